"""Exact nonnegative reals built from rationals.

Two layers live here:

* :class:`Magnitude` -- a product ``c * b_1**e_1 * ... * b_k**e_k`` with
  rational ``c, b_i`` and rational exponents.  Products, rational powers,
  equality and ordering are all decided exactly (raise both sides to a
  common integer power and compare rationals).
* :class:`Real` expression trees (sums, products, maxima, rational powers
  of other expressions).  Ordering is decided by evaluating outward-rounded
  rational enclosures at increasing precision.  Equality of two sums of
  magnitudes is decided exactly; for other trees, values whose enclosures
  still overlap at ``MAX_BITS`` bits are reported as equal.
"""

from __future__ import annotations

import math
import decimal
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Iterable, Union

Number = Union[int, Fraction, float]

PRECISIONS = (64, 256, 1024, 4096)
MAX_BITS = PRECISIONS[-1]
# refinement cap once a difference of radical sums is known to be nonzero
MAX_RADICAL_BITS = 1 << 16
# Largest integer size (in bits) the exact paths may build before switching
# to logarithmic enclosures.
EXACT_BIT_BUDGET = 1 << 18


def as_fraction(x) -> Fraction:
    """Parse ``x`` into an exact Fraction.

    Accepts ints, Fractions, floats (converted exactly), and strings of the
    form ``"a/b"`` or decimal literals such as ``"0.3"`` or ``"1e-3"``.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, float)):
        return Fraction(x)
    if isinstance(x, Decimal):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if "/" in s:
            num, den = s.split("/", 1)
            return Fraction(int(num.strip()), int(den.strip()))
        try:
            return Fraction(Decimal(s))
        except InvalidOperation:
            raise ValueError(f"not a rational literal: {x!r}") from None
    raise TypeError(f"cannot convert {type(x).__name__} to Fraction")


def iroot(n: int, k: int) -> int:
    """Floor of the k-th root of a nonnegative integer."""
    if n < 0:
        raise ValueError("iroot of negative number")
    if n < 2 or k == 1:
        return n
    if k == 2:
        return math.isqrt(n)
    # Newton iteration from an overestimate
    x = 1 << -(-n.bit_length() // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x ** k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def exact_root(x: Fraction, k: int) -> Fraction | None:
    """The k-th root of ``x >= 0`` if it is rational, else None."""
    if x < 0:
        raise ValueError("root of negative rational")
    a = iroot(x.numerator, k)
    if a ** k != x.numerator:
        return None
    b = iroot(x.denominator, k)
    if b ** k != x.denominator:
        return None
    return Fraction(a, b)


def rational_power(x: Fraction, e: Fraction) -> Fraction | None:
    """``x ** e`` for ``x >= 0`` when the result is rational, else None."""
    x, e = Fraction(x), Fraction(e)
    if x == 0:
        if e <= 0:
            raise ZeroDivisionError("0 raised to a nonpositive power")
        return Fraction(0)
    root = exact_root(x, e.denominator)
    if root is None:
        return None
    return root ** e.numerator


@lru_cache(maxsize=64)
def _primes_upto(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
    return [i for i, flag in enumerate(sieve) if flag]


@lru_cache(maxsize=4096)
def perfect_power_root(x: Fraction) -> tuple[Fraction, int]:
    """Write positive ``x != 1`` as ``s ** k`` with ``s > 1`` not a perfect power.

    ``k`` is a nonzero integer (negative when ``x < 1``).
    """
    x = Fraction(x)
    if x <= 0 or x == 1:
        raise ValueError("perfect_power_root needs a positive rational other than 1")
    sign = 1
    if x < 1:
        x, sign = 1 / x, -1
    k = 1
    changed = True
    while changed:
        changed = False
        bound = max(x.numerator.bit_length(), x.denominator.bit_length())
        for prime in _primes_upto(bound):
            r = exact_root(x, prime)
            if r is not None and r != 1:
                x, k, changed = r, k * prime, True
                break
    return x, sign * k


def _shift_floor(x: Fraction, bits: int) -> Fraction:
    """Round positive ``x`` down to a dyadic with about ``bits`` significant bits."""
    if x <= 0:
        return Fraction(0)
    scale = bits - (x.numerator.bit_length() - x.denominator.bit_length())
    if scale >= 0:
        return Fraction((x.numerator << scale) // x.denominator, 1 << scale)
    return Fraction((x.numerator // (x.denominator << -scale)) << -scale)


def _shift_ceil(x: Fraction, bits: int) -> Fraction:
    if x <= 0:
        return Fraction(0)
    scale = bits - (x.numerator.bit_length() - x.denominator.bit_length())
    if scale >= 0:
        return Fraction(-((-x.numerator << scale) // x.denominator), 1 << scale)
    return Fraction(-((-x.numerator) // (x.denominator << -scale)) << -scale)


def _root_bounds(y: Fraction, k: int, bits: int) -> tuple[Fraction, Fraction]:
    """Rational enclosure of ``y ** (1/k)`` for ``y > 0``."""
    if k == 1:
        return y, y
    exp2 = (y.numerator.bit_length() - y.denominator.bit_length()) // k
    scale = bits - exp2
    if scale >= 0:
        m = (y.numerator << (scale * k)) // y.denominator
        r = iroot(m, k)
        lo = Fraction(r, 1 << scale)
        hi = lo if r ** k == m and m * y.denominator == y.numerator << (scale * k) else Fraction(r + 1, 1 << scale)
    else:
        m = y.numerator // (y.denominator << (-scale * k))
        r = iroot(m, k)
        lo = Fraction(r << -scale)
        hi = Fraction((r + 1) << -scale)
    return lo, hi


def pow_bounds(x: Fraction, e: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    """Rational enclosure of ``x ** e`` for ``x >= 0`` and rational ``e``."""
    if x == 0:
        if e <= 0:
            raise ZeroDivisionError("0 raised to a nonpositive power")
        return Fraction(0), Fraction(0)
    size = max(x.numerator.bit_length(), x.denominator.bit_length())
    if abs(e.numerator) * size + (bits + size) * e.denominator > EXACT_BIT_BUDGET:
        return _log_pow_bounds(x, e, bits)
    y = x ** e.numerator
    if e.denominator == 1:
        return y, y
    exact = exact_root(y, e.denominator)
    if exact is not None:
        return exact, exact
    return _root_bounds(y, e.denominator, bits)


def _log_pow_bounds(x: Fraction, e: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    """Enclosure of ``x ** e`` as ``exp(e * ln x)`` with decimal arithmetic.

    ``Decimal.ln`` and ``Decimal.exp`` are correctly rounded, so widening each
    result by one unit in the last place keeps the true value inside.
    """
    with decimal.localcontext() as ctx:
        ctx.prec = bits * 30103 // 100000 + 20
        ctx.Emax, ctx.Emin = decimal.MAX_EMAX, decimal.MIN_EMIN
        ctx.rounding = decimal.ROUND_FLOOR
        xlo = Decimal(x.numerator) / Decimal(x.denominator)
        ctx.rounding = decimal.ROUND_CEILING
        xhi = Decimal(x.numerator) / Decimal(x.denominator)
        ctx.rounding = decimal.ROUND_HALF_EVEN
        llo, lhi = xlo.ln().next_minus(), xhi.ln().next_plus()
        t1, t2 = Fraction(llo) * e, Fraction(lhi) * e
        tlo, thi = min(t1, t2), max(t1, t2)
        ctx.rounding = decimal.ROUND_FLOOR
        dlo = Decimal(tlo.numerator) / Decimal(tlo.denominator)
        ctx.rounding = decimal.ROUND_CEILING
        dhi = Decimal(thi.numerator) / Decimal(thi.denominator)
        ctx.rounding = decimal.ROUND_HALF_EVEN
        lo, hi = dlo.exp().next_minus(), dhi.exp().next_plus()
    return max(Fraction(lo), Fraction(0)), Fraction(hi)


class Real:
    """A nonnegative real number with exact ordering.

    Subclasses implement :meth:`bounds` (rational enclosure at a working
    precision) and :meth:`exact` (the value as a Fraction when rational and
    cheaply known).
    """

    def bounds(self, bits: int) -> tuple[Fraction, Fraction]:
        raise NotImplementedError

    def exact(self) -> Fraction | None:
        return None

    def __float__(self) -> float:
        ex = self.exact()
        if ex is not None:
            return float(ex)
        lo, hi = self.bounds(64)
        return float((lo + hi) / 2)

    def __add__(self, other) -> Real:
        other = to_real(other)
        return Sum((self, other))

    __radd__ = __add__

    def __mul__(self, other) -> Real:
        other = to_real(other)
        if isinstance(self, Magnitude) and isinstance(other, Magnitude):
            return self._mul(other)
        return Prod((self, other))

    __rmul__ = __mul__

    def __pow__(self, e) -> Real:
        e = as_fraction(e)
        if e == 1:
            return self
        return Pow(self, e)

    def __lt__(self, other) -> bool:
        return compare(self, other) < 0

    def __le__(self, other) -> bool:
        return compare(self, other) <= 0

    def __gt__(self, other) -> bool:
        return compare(self, other) > 0

    def __ge__(self, other) -> bool:
        return compare(self, other) >= 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, (Real, int, Fraction, float)):
            return NotImplemented
        return compare(self, other) == 0

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        ex = self.exact()
        if ex is not None:
            return f"{type(self).__name__}({ex})"
        return f"{type(self).__name__}(~{float(self):.17g})"

    def __str__(self) -> str:
        ex = self.exact()
        return str(ex) if ex is not None else f"{float(self):.17g}"


class Magnitude(Real):
    """``coeff * prod(base ** exp)`` with fractional exponents in (0, 1)."""

    __slots__ = ("coeff", "radicals")

    def __init__(self, coeff=1, radicals: Iterable[tuple[Fraction, Fraction]] = ()):
        coeff = as_fraction(coeff)
        if coeff < 0:
            raise ValueError("magnitudes are nonnegative")
        rads: dict[Fraction, Fraction] = {}
        for base, exp in radicals:
            base, exp = as_fraction(base), as_fraction(exp)
            if base <= 0:
                if base == 0:
                    coeff = Fraction(0)
                    continue
                raise ValueError("radical base must be positive")
            if base == 1 or exp == 0:
                continue
            # reduce to a non-perfect-power root so equal values merge
            root, k = perfect_power_root(base)
            rads[root] = rads.get(root, Fraction(0)) + exp * k
        out = []
        if coeff != 0:
            for base, exp in sorted(rads.items()):
                whole = math.floor(exp)
                frac = exp - whole
                coeff *= base ** whole
                if frac:
                    out.append((base, frac))
        self.coeff = coeff
        self.radicals = tuple(out)

    @classmethod
    def power(cls, base, e) -> Magnitude:
        base, e = as_fraction(base), as_fraction(e)
        if base == 0:
            if e <= 0:
                raise ZeroDivisionError("0 raised to a nonpositive power")
            return cls(0)
        return cls(1, [(base, e)])

    @property
    def is_zero(self) -> bool:
        return self.coeff == 0

    def exact(self) -> Fraction | None:
        return None if self.radicals else self.coeff

    def bounds(self, bits: int) -> tuple[Fraction, Fraction]:
        lo = hi = self.coeff
        for base, exp in self.radicals:
            blo, bhi = pow_bounds(base, exp, bits)
            lo, hi = _shift_floor(lo * blo, bits), _shift_ceil(hi * bhi, bits)
        return lo, hi

    def _denominator_lcm(self) -> int:
        return reduce(math.lcm, (e.denominator for _, e in self.radicals), 1)

    def raised(self, n: int) -> Fraction:
        """``self ** n`` as a Fraction; ``n`` must clear every exponent denominator."""
        out = self.coeff ** n
        for base, exp in self.radicals:
            e = exp * n
            if e.denominator != 1:
                raise ValueError("exponent denominators not cleared")
            out *= base ** e.numerator
        return out

    def _mul(self, other: Magnitude) -> Magnitude:
        return Magnitude(self.coeff * other.coeff, self.radicals + other.radicals)

    def __pow__(self, e) -> Magnitude:
        e = as_fraction(e)
        if self.coeff == 0:
            if e <= 0:
                raise ZeroDivisionError("0 raised to a nonpositive power")
            return Magnitude(0)
        rads = [(self.coeff, e)] + [(b, x * e) for b, x in self.radicals]
        return Magnitude(1, rads)

    def __truediv__(self, other) -> Magnitude:
        other = to_magnitude(other)
        if other.is_zero:
            raise ZeroDivisionError("division by zero magnitude")
        return self._mul(other ** -1)

    def cmp(self, other: Magnitude) -> int:
        if self.is_zero or other.is_zero:
            return (not self.is_zero) - (not other.is_zero)
        n = math.lcm(self._denominator_lcm(), other._denominator_lcm())
        if self._raised_bits(n) + other._raised_bits(n) <= EXACT_BIT_BUDGET:
            a, b = self.raised(n), other.raised(n)
            return (a > b) - (a < b)
        return _interval_compare(self, other)

    def _raised_bits(self, n: int) -> int:
        """Rough size in bits of :meth:`raised` at ``n``."""
        size = lambda x: max(x.numerator.bit_length(), x.denominator.bit_length())
        return n * size(self.coeff) + sum(abs(e.numerator) * (n // e.denominator) * size(b) for b, e in self.radicals)

    def log(self) -> float:
        """Natural logarithm (float); ``-inf`` for zero."""
        if self.is_zero:
            return -math.inf
        out = math.log(self.coeff.numerator) - math.log(self.coeff.denominator)
        for base, exp in self.radicals:
            out += float(exp) * (math.log(base.numerator) - math.log(base.denominator))
        return out

    def __float__(self) -> float:
        if not self.radicals:
            return float(self.coeff)
        try:
            lo, hi = self.bounds(64)
            return float((lo + hi) / 2)
        except OverflowError:
            return math.exp(self.log())

    def __str__(self) -> str:
        if not self.radicals:
            return str(self.coeff)
        parts = [] if self.coeff == 1 else [str(self.coeff)]
        parts += [f"{b}^({e})" if b.denominator == 1 else f"({b})^({e})" for b, e in self.radicals]
        return "*".join(parts)

    def __repr__(self) -> str:
        return f"Magnitude({self})"


class Sum(Real):
    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[Real]):
        flat: list[Real] = []
        for t in terms:
            t = to_real(t)
            flat.extend(t.terms if isinstance(t, Sum) else (t,))
        self.terms = tuple(flat)

    def exact(self) -> Fraction | None:
        total = Fraction(0)
        for t in self.terms:
            ex = t.exact()
            if ex is None:
                return None
            total += ex
        return total

    def bounds(self, bits: int) -> tuple[Fraction, Fraction]:
        lo = hi = Fraction(0)
        for t in self.terms:
            a, b = t.bounds(bits)
            lo, hi = lo + a, hi + b
        return _shift_floor(lo, bits), _shift_ceil(hi, bits)


class Prod(Real):
    __slots__ = ("factors",)

    def __init__(self, factors: Iterable[Real]):
        self.factors = tuple(to_real(f) for f in factors)

    def exact(self) -> Fraction | None:
        out = Fraction(1)
        for f in self.factors:
            ex = f.exact()
            if ex is None:
                return None
            out *= ex
        return out

    def bounds(self, bits: int) -> tuple[Fraction, Fraction]:
        lo = hi = Fraction(1)
        for f in self.factors:
            a, b = f.bounds(bits)
            lo, hi = _shift_floor(lo * a, bits), _shift_ceil(hi * b, bits)
        return lo, hi


class Max(Real):
    __slots__ = ("items",)

    def __init__(self, items: Iterable[Real]):
        self.items = tuple(to_real(i) for i in items) or (Magnitude(0),)

    def exact(self) -> Fraction | None:
        vals = [i.exact() for i in self.items]
        if any(v is None for v in vals):
            return None
        return max(vals)

    def bounds(self, bits: int) -> tuple[Fraction, Fraction]:
        pairs = [i.bounds(bits) for i in self.items]
        return max(p[0] for p in pairs), max(p[1] for p in pairs)


class Pow(Real):
    __slots__ = ("base", "exponent")

    def __init__(self, base: Real, exponent: Fraction):
        self.base = to_real(base)
        self.exponent = as_fraction(exponent)

    def exact(self) -> Fraction | None:
        b = self.base.exact()
        if b is None:
            return None
        return rational_power(b, self.exponent)

    def bounds(self, bits: int) -> tuple[Fraction, Fraction]:
        lo, hi = self.base.bounds(bits + 16)
        e = self.exponent
        if e < 0:
            if lo <= 0:
                raise ZeroDivisionError("negative power of a value not bounded away from 0")
            lo, hi = hi, lo
        a = pow_bounds(lo, e, bits + 16)[0] if lo > 0 or e > 0 else Fraction(0)
        b = pow_bounds(hi, e, bits + 16)[1]
        return _shift_floor(a, bits), _shift_ceil(b, bits)


def to_real(x) -> Real:
    if isinstance(x, Real):
        return x
    return Magnitude(as_fraction(x))


def to_magnitude(x) -> Magnitude:
    if isinstance(x, Magnitude):
        return x
    if isinstance(x, Real):
        ex = x.exact()
        if ex is None:
            raise TypeError("expression is not a monomial magnitude")
        return Magnitude(ex)
    return Magnitude(as_fraction(x))


def compare(a, b) -> int:
    """Sign of ``a - b`` for nonnegative reals.

    Exact for magnitudes and sums of magnitudes; other expressions count as
    equal when indistinguishable at ``MAX_BITS``.
    """
    a, b = to_real(a), to_real(b)
    if isinstance(a, Magnitude) and isinstance(b, Magnitude):
        return a.cmp(b)
    ea, eb = a.exact(), b.exact()
    if ea is not None and eb is not None:
        return (ea > eb) - (ea < eb)
    return _interval_compare(a, b)


def _interval_compare(a: Real, b: Real) -> int:
    """Sign from rigorous enclosures.

    When both sides are sums of magnitudes a zero difference is detected
    exactly, and a nonzero one keeps refining past ``PRECISIONS``.
    """
    nonzero = None
    bits = PRECISIONS[0]
    while True:
        alo, ahi = a.bounds(bits)
        blo, bhi = b.bounds(bits)
        if ahi < blo:
            return -1
        if alo > bhi:
            return 1
        if nonzero is None:
            nonzero = _radical_difference_nonzero(a, b)
            if nonzero is False:
                return 0
        bits *= 4
        if bits > (MAX_RADICAL_BITS if nonzero else MAX_BITS):
            return 0


def _radical_terms(x: Real) -> list[Magnitude] | None:
    if isinstance(x, Magnitude):
        return [x]
    if isinstance(x, Sum) and all(isinstance(t, Magnitude) for t in x.terms):
        return list(x.terms)
    return None


def _radical_difference_nonzero(a: Real, b: Real) -> bool | None:
    """Whether ``a - b != 0`` for sums of magnitudes; None for other shapes.

    Positive reals with rational powers and pairwise irrational ratios are
    linearly independent over Q, so grouping terms into classes of rational
    ratio and checking each class coefficient decides equality exactly.
    """
    ta, tb = _radical_terms(a), _radical_terms(b)
    if ta is None or tb is None:
        return None
    classes: list[list] = []  # [representative, rational coefficient]
    for sign, terms in ((1, ta), (-1, tb)):
        for t in terms:
            if t.is_zero:
                continue
            for cls in classes:
                ratio = t / cls[0]
                n = ratio._denominator_lcm()
                if ratio._raised_bits(n) > EXACT_BIT_BUDGET:
                    return None
                root = exact_root(ratio.raised(n), n)
                if root is not None:
                    cls[1] += sign * root
                    break
            else:
                classes.append([t, Fraction(sign)])
    return any(c for _, c in classes)


def real_sum(values: Iterable) -> Real:
    """Sum of nonnegative values, collapsing to a Magnitude when rational."""
    s = Sum(values)
    ex = s.exact()
    return Magnitude(ex) if ex is not None else s


def real_max(values: Iterable) -> Real:
    items = [to_real(v) for v in values]
    if not items:
        return Magnitude(0)
    best = items[0]
    for item in items[1:]:
        if compare(item, best) > 0:
            best = item
    return best


def real_pow(x, e) -> Real:
    """``x ** e`` collapsing to a Magnitude whenever the base is exact."""
    x = to_real(x)
    e = as_fraction(e)
    if isinstance(x, Magnitude):
        return x ** e
    ex = x.exact()
    if ex is not None:
        return Magnitude(ex) ** e
    return x ** e


def ceil_real(x) -> int:
    """Smallest integer ``>= x``; exact unless ``x`` is an unresolved near-integer."""
    x = to_real(x)
    ex = x.exact()
    if ex is not None:
        return math.ceil(ex)
    for bits in PRECISIONS:
        lo, hi = x.bounds(bits)
        if math.ceil(lo) == math.ceil(hi):
            return math.ceil(hi)
    return math.ceil(x.bounds(MAX_BITS)[0])
