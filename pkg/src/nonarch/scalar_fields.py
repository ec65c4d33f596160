"""Absolute value functions on the rationals.

An :class:`AbsoluteValue` is one of :class:`Trivial`, :class:`RealStd`,
:class:`Padic` or a positive rational :class:`Power` of one of these.
Evaluating one on a rational gives an exact :class:`~nonarch.exact.Magnitude`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .exact import Magnitude, Sum, as_fraction, compare, perfect_power_root

INF = math.inf


class UnderdeterminedError(ValueError):
    """Every sample has absolute value 0 or 1, so no exponent can be solved for."""


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24, probabilistic-strong beyond."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d, s = d // 2, s + 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def require_prime(p: int) -> int:
    if not isinstance(p, int) or not is_prime(p):
        raise ValueError(f"{p!r} is not a prime")
    return p


def padic_valuation(p: int, x) -> float | int:
    """Exponent ``j`` with ``x = p**j * (a/b)``, ``p`` dividing neither a nor b.

    Returns ``math.inf`` for ``x == 0``.

    >>> padic_valuation(2, 12)
    2
    >>> padic_valuation(3, Fraction(1, 9))
    -2
    """
    require_prime(p)
    x = as_fraction(x)
    if x == 0:
        return INF
    j = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        j += 1
    while den % p == 0:
        den //= p
        j -= 1
    return j


class AbsoluteValue:
    """Base class; instances are immutable and callable on rationals."""

    def __call__(self, x) -> Magnitude:
        raise NotImplementedError

    @property
    def q(self) -> Fraction | float:
        """Largest q for which this is a q-absolute value (``inf`` if ultrametric)."""
        raise NotImplementedError

    @property
    def is_ultrametric(self) -> bool:
        return self.q == INF

    def power(self, exponent) -> AbsoluteValue:
        return Power(self, as_fraction(exponent))

    def root_kind(self) -> AbsoluteValue:
        return self


@dataclass(frozen=True)
class Trivial(AbsoluteValue):
    def __call__(self, x) -> Magnitude:
        return Magnitude(0 if as_fraction(x) == 0 else 1)

    @property
    def q(self):
        return INF

    def __str__(self) -> str:
        return "trivial"


@dataclass(frozen=True)
class RealStd(AbsoluteValue):
    def __call__(self, x) -> Magnitude:
        return Magnitude(abs(as_fraction(x)))

    @property
    def q(self):
        return Fraction(1)

    def __str__(self) -> str:
        return "real"


@dataclass(frozen=True)
class Padic(AbsoluteValue):
    p: int

    def __post_init__(self):
        require_prime(self.p)

    def __call__(self, x) -> Magnitude:
        j = padic_valuation(self.p, x)
        if j == INF:
            return Magnitude(0)
        return Magnitude(Fraction(1, self.p ** j) if j >= 0 else Fraction(self.p ** -j))

    @property
    def q(self):
        return INF

    def __str__(self) -> str:
        return f"padic:{self.p}"


@dataclass(frozen=True)
class Power(AbsoluteValue):
    base: AbsoluteValue
    exponent: Fraction

    def __post_init__(self):
        exponent = as_fraction(self.exponent)
        if exponent <= 0:
            raise ValueError("Power exponent must be positive")
        base = self.base
        if isinstance(base, Power):
            exponent *= base.exponent
            base = base.base
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "exponent", exponent)

    def __call__(self, x) -> Magnitude:
        return self.base(x) ** self.exponent

    @property
    def q(self):
        bq = self.base.q
        return INF if bq == INF else bq / self.exponent

    def root_kind(self) -> AbsoluteValue:
        return self.base

    def __str__(self) -> str:
        return f"{self.base}^{self.exponent}"


def parse_absval(text: str) -> AbsoluteValue:
    """Parse ``trivial``, ``real``, ``padic:P``, optionally suffixed by ``^E``."""
    text = text.strip()
    base_txt, _, exp_txt = text.partition("^")
    kind, _, arg = base_txt.partition(":")
    kind = kind.strip().lower()
    if kind == "trivial":
        v: AbsoluteValue = Trivial()
    elif kind in ("real", "realstd"):
        v = RealStd()
    elif kind in ("padic", "p"):
        if not arg:
            raise ValueError("padic absolute value needs a prime, e.g. padic:2")
        v = Padic(int(arg))
    else:
        raise ValueError(f"unknown absolute value kind {kind!r}")
    if exp_txt:
        v = Power(v, as_fraction(exp_txt))
    return v


def abs_eval(v: AbsoluteValue, x) -> Magnitude:
    return v(x)


def check_q_subadditive(
    v: AbsoluteValue, samples: Iterable[tuple], q
) -> list[tuple[Fraction, Fraction]]:
    """Pairs ``(x, y)`` with ``|x + y|**q > |x|**q + |y|**q`` (exact)."""
    q = as_fraction(q)
    if q <= 0:
        raise ValueError("q must be positive")
    bad = []
    for x, y in samples:
        x, y = as_fraction(x), as_fraction(y)
        lhs = v(x + y) ** q
        rhs = Sum((v(x) ** q, v(y) ** q))
        if compare(lhs, rhs) > 0:
            bad.append((x, y))
    return bad


@dataclass(frozen=True)
class Archimedean:
    witness: int


@dataclass(frozen=True)
class NonArchimedeanUpTo:
    n_max: int


def is_archimedean(v: AbsoluteValue, n_max: int) -> Archimedean | NonArchimedeanUpTo:
    """Bounded search for an integer ``n <= n_max`` with ``|n| > 1``."""
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    one = Magnitude(1)
    for n in range(2, n_max + 1):
        if v(n).cmp(one) > 0:
            return Archimedean(n)
    return NonArchimedeanUpTo(n_max)


def _log_ratio(m1: Magnitude, m2: Magnitude) -> Fraction | None:
    """Rational ``a`` with ``m2 == m1 ** a``, or None if no rational one exists."""
    n1, n2 = m1._denominator_lcm(), m2._denominator_lcm()
    r1, r2 = m1.raised(n1), m2.raised(n2)
    if r2 == 1:
        return Fraction(0)
    s1, k1 = perfect_power_root(r1)
    s2, k2 = perfect_power_root(r2)
    if s1 != s2:
        return None
    # m1 = s**(k1/n1), m2 = s**(k2/n2)
    return Fraction(k2, n2) / Fraction(k1, n1)


def equivalence_exponent(
    v1: AbsoluteValue, v2: AbsoluteValue, samples: Sequence
) -> Fraction | None:
    """Exponent ``a > 0`` with ``|x|_2 == |x|_1 ** a`` on every sample, else None.

    The exponent is solved from the first sample whose first absolute value
    is neither 0 nor 1 and then verified on all samples.  All exponents of
    this module's absolute values are rational, so the answer is exact.
    """
    samples = [as_fraction(x) for x in samples]
    if not samples:
        raise ValueError("samples must be nonempty")
    one = Magnitude(1)
    pivot = next(
        (x for x in samples if not v1(x).is_zero and v1(x).cmp(one) != 0), None
    )
    if pivot is None:
        raise UnderdeterminedError("all samples have |x|_1 in {0, 1}")
    a = _log_ratio(v1(pivot), v2(pivot))
    if a is None or a <= 0:
        return None
    for x in samples:
        if v2(x).cmp(v1(x) ** a) != 0:
            return None
    return a
