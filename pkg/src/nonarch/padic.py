"""p-adic integers at finite precision.

``Z_p / p**j Z_p`` is isomorphic as a ring to ``Z / p**j Z``, so an element
known to precision ``j`` is stored as its residue in ``[0, p**j)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exact import as_fraction
from .scalar_fields import INF, padic_valuation, require_prime


class PadicDomainError(ValueError):
    """Raised for elements outside Z_p or non-units where a unit is required."""


@dataclass(frozen=True)
class PadicApprox:
    """The coset ``residue + p**precision * Z_p``."""

    p: int
    precision: int
    residue: int

    def __post_init__(self):
        require_prime(self.p)
        if self.precision < 1:
            raise ValueError("precision must be a positive integer")
        if not 0 <= self.residue < self.modulus:
            object.__setattr__(self, "residue", self.residue % self.modulus)

    @property
    def modulus(self) -> int:
        return self.p ** self.precision

    def _check(self, other: PadicApprox) -> None:
        if not isinstance(other, PadicApprox):
            raise TypeError("expected a PadicApprox")
        if (self.p, self.precision) != (other.p, other.precision):
            raise ValueError(
                f"mismatched p-adic parameters: (p={self.p}, j={self.precision}) "
                f"vs (p={other.p}, j={other.precision})"
            )

    def _new(self, residue: int) -> PadicApprox:
        return PadicApprox(self.p, self.precision, residue % self.modulus)

    def __add__(self, other: PadicApprox) -> PadicApprox:
        self._check(other)
        return self._new(self.residue + other.residue)

    def __sub__(self, other: PadicApprox) -> PadicApprox:
        self._check(other)
        return self._new(self.residue - other.residue)

    def __mul__(self, other: PadicApprox) -> PadicApprox:
        self._check(other)
        return self._new(self.residue * other.residue)

    def __neg__(self) -> PadicApprox:
        return self._new(-self.residue)

    def __pow__(self, n: int) -> PadicApprox:
        if n < 0:
            return self.invert() ** -n
        return self._new(pow(self.residue, n, self.modulus))

    def is_unit(self) -> bool:
        return self.residue % self.p != 0

    def invert(self) -> PadicApprox:
        if not self.is_unit():
            raise PadicDomainError(
                f"residue {self.residue} is divisible by {self.p}: not a unit"
            )
        return self._new(pow(self.residue, -1, self.modulus))

    def valuation(self) -> int:
        """p-adic valuation of the residue; ``precision`` when the residue is 0.

        A zero residue only says the valuation is at least ``precision``.
        """
        if self.residue == 0:
            return self.precision
        return padic_valuation(self.p, self.residue)

    def magnitude(self) -> tuple[Fraction, bool]:
        """``(value, exact)``: ``|x|_p``, or the bound ``p**-j`` with ``exact=False``."""
        v = self.valuation()
        return Fraction(1, self.p ** v), self.residue != 0

    def digits(self) -> list[int]:
        return digits(self)

    def __str__(self) -> str:
        return f"{self.residue} (mod {self.p}^{self.precision})"


def from_rational(w, p: int, j: int) -> PadicApprox:
    """Residue ``r`` in ``[0, p**j)`` with ``|w - r|_p <= p**-j``.

    ``w = a/b`` with ``b`` prime to ``p``; computes ``a * b**-1 mod p**j``.
    """
    require_prime(p)
    w = as_fraction(w)
    if w.denominator % p == 0:
        raise PadicDomainError(
            f"{w} has |w|_{p} > 1: need w = a/b where b is not divisible by p"
        )
    m = p ** j
    return PadicApprox(p, j, w.numerator * pow(w.denominator, -1, m) % m)


def split_unit(w, p: int, j: int) -> tuple[PadicApprox, int | float]:
    """``(u, v)`` with ``w = p**v * u`` and ``u`` a unit; ``(0, inf)`` for ``w == 0``."""
    w = as_fraction(w)
    v = padic_valuation(p, w)
    if v == INF:
        return PadicApprox(p, j, 0), INF
    unit = w / Fraction(p) ** v
    return from_rational(unit, p, j), v


def geometric_sum(x: PadicApprox, n: int) -> PadicApprox:
    """``sum(x**i for i in 0..n)`` modulo ``p**j``; requires ``|x|_p < 1``."""
    if x.is_unit():
        raise PadicDomainError("geometric series needs x divisible by p")
    if n < 0:
        raise ValueError("n must be nonnegative")
    total, term = 0, 1
    m = x.modulus
    for _ in range(n + 1):
        total = (total + term) % m
        term = term * x.residue % m
        if term == 0:
            break
    return PadicApprox(x.p, x.precision, total)


def geometric_limit(x: PadicApprox) -> PadicApprox:
    """``1 / (1 - x)``, the limit of :func:`geometric_sum` as ``n`` grows."""
    if x.is_unit():
        raise PadicDomainError("geometric series needs x divisible by p")
    one = PadicApprox(x.p, x.precision, 1)
    return (one - x).invert()


def digits(x: PadicApprox) -> list[int]:
    """Base-p digits of the residue, least significant first, length ``precision``."""
    out = []
    r = x.residue
    for _ in range(x.precision):
        r, d = divmod(r, x.p)
        out.append(d)
    return out


def coset_decomposition(p: int, j: int, level: int) -> list[PadicApprox]:
    """Representatives ``0 .. p**level - 1`` of ``Z_p / p**level Z_p`` at precision j."""
    require_prime(p)
    if not 0 <= level <= j:
        raise ValueError("need 0 <= level <= precision")
    return [PadicApprox(p, j, r) for r in range(p ** level)]


def coset_index(x: PadicApprox, level: int) -> int:
    """Which translate of ``p**level Z_p`` contains ``x``."""
    if not 0 <= level <= x.precision:
        raise ValueError("need 0 <= level <= precision")
    return x.residue % x.p ** level


def padic_distance(x: PadicApprox, y: PadicApprox) -> tuple[Fraction, bool]:
    """``|x - y|_p`` as ``(value, exact)``; see :meth:`PadicApprox.magnitude`."""
    return (x - y).magnitude()
