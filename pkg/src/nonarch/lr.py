"""l^r norms of finitely supported vector-valued functions.

Vectors live in ``k**m`` with the coordinate-max norm ``N(v) = max |v_i|``,
which is an ultranorm when ``|.|`` is ultrametric and a q-norm when ``|.|``
is a q-absolute value.  Norm comparisons are made in the ``r``-th power
domain with exact arithmetic.
"""

from __future__ import annotations

import enum
import functools
import itertools
import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

from .exact import (
    Magnitude,
    Real,
    as_fraction,
    ceil_real,
    compare,
    real_max,
    real_pow,
    real_sum,
)
from .scalar_fields import AbsoluteValue, Padic, Power, RealStd, Trivial

INF = math.inf


class PreconditionError(ValueError):
    """A named precondition of an estimate failed."""

    def __init__(self, name: str, message: str):
        super().__init__(f"{name}: {message}")
        self.name = name


def _key_order(k):
    return (0, k, "") if isinstance(k, int) else (1, 0, str(k))


@dataclass(frozen=True)
class NormedSpace:
    """``k**dim`` over the rationals with absolute value ``scalar`` and the max norm."""

    scalar: AbsoluteValue
    dim: int = 1

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be positive")

    @property
    def q(self):
        return self.scalar.q

    def vector(self, v) -> tuple[Fraction, ...]:
        if not isinstance(v, (tuple, list)):
            v = (v,)
        v = tuple(as_fraction(c) for c in v)
        if len(v) != self.dim:
            raise ValueError(f"expected {self.dim} coordinates, got {len(v)}")
        return v

    def norm(self, v) -> Magnitude:
        return real_max(self.scalar(c) for c in self.vector(v))


class FiniteVec(Mapping):
    """Finitely supported map from keys to coordinate tuples; zero entries are dropped."""

    def __init__(self, entries: Mapping | Iterable = (), dim: int | None = None):
        items = entries.items() if isinstance(entries, Mapping) else entries
        data = {}
        for k, v in items:
            v = tuple(as_fraction(c) for c in (v if isinstance(v, (tuple, list)) else (v,)))
            if dim is None:
                dim = len(v)
            elif len(v) != dim:
                raise ValueError(f"entry {k!r} has {len(v)} coordinates, expected {dim}")
            if any(v):
                data[k] = v
        self._data = dict(sorted(data.items(), key=lambda kv: _key_order(kv[0])))
        self.dim = dim

    def __getitem__(self, k):
        return self._data[k]

    def __iter__(self):
        return iter(self._data)

    def __len__(self):
        return len(self._data)

    def __eq__(self, other):
        if isinstance(other, FiniteVec):
            return self._data == other._data
        return NotImplemented

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self):
        return f"FiniteVec({self._data!r})"

    @property
    def support(self) -> frozenset:
        return frozenset(self._data)

    def _zero(self, dim):
        return (Fraction(0),) * dim

    def _combine(self, other: FiniteVec, op) -> FiniteVec:
        dim = self.dim or other.dim
        if self.dim and other.dim and self.dim != other.dim:
            raise ValueError("dimension mismatch")
        keys = set(self) | set(other)
        zero = self._zero(dim or 0)
        return FiniteVec(
            {k: tuple(op(a, b) for a, b in zip(self.get(k, zero), other.get(k, zero))) for k in keys},
            dim,
        )

    def __add__(self, other: FiniteVec) -> FiniteVec:
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other: FiniteVec) -> FiniteVec:
        return self._combine(other, lambda a, b: a - b)

    def __neg__(self) -> FiniteVec:
        return self.scale(-1)

    def scale(self, t) -> FiniteVec:
        t = as_fraction(t)
        return FiniteVec({k: tuple(t * c for c in v) for k, v in self.items()}, self.dim)

    def restrict(self, keys: Iterable) -> FiniteVec:
        keys = set(keys)
        return FiniteVec({k: v for k, v in self.items() if k in keys}, self.dim)


@dataclass(frozen=True)
class LrNorm:
    """``value`` is ``||f||_r``; ``power`` is ``sum N(f(x))**r`` (None when r is infinite)."""

    r: object
    value: Real
    power: Real | None

    def __float__(self):
        return float(self.value)


def _as_r(r):
    if r == INF or (isinstance(r, str) and r.strip().lower() in ("inf", "infinity")):
        return INF
    r = as_fraction(r)
    if r <= 0:
        raise ValueError("r must be positive")
    return r


def lr_norm(space: NormedSpace, f: FiniteVec, r) -> LrNorm:
    """``(sum_x N(f(x))**r) ** (1/r)``, or ``max_x N(f(x))`` for infinite ``r``."""
    r = _as_r(r)
    norms = [space.norm(v) for v in f.values()]
    if r == INF:
        return LrNorm(r, real_max(norms), None)
    power = real_sum(n ** r for n in norms)
    return LrNorm(r, real_pow(power, 1 / r), power)


class Regime(enum.Enum):
    """Which triangle inequality the l^r norm obeys."""

    R_NORM = "r-norm"
    Q_NORM = "q-norm"
    ULTRANORM_ALL_R = "ultranorm-all-r"


def triangle_regime(space: NormedSpace, r) -> Regime:
    r = _as_r(r)
    q = space.q
    if q == INF:
        return Regime.ULTRANORM_ALL_R
    if r <= q:
        return Regime.R_NORM
    return Regime.Q_NORM


def triangle_sides(space: NormedSpace, f: FiniteVec, g: FiniteVec, r) -> tuple[Real, Real]:
    """Left and right sides of the inequality named by :func:`triangle_regime`."""
    r = _as_r(r)
    regime = triangle_regime(space, r)
    nf, ng, nfg = (lr_norm(space, h, r) for h in (f, g, f + g))
    if r == INF:
        if regime is Regime.ULTRANORM_ALL_R:
            return nfg.value, real_max((nf.value, ng.value))
        q = space.q
        return real_pow(nfg.value, q), real_sum((real_pow(nf.value, q), real_pow(ng.value, q)))
    if regime is Regime.Q_NORM:
        q = space.q
        return real_pow(nfg.value, q), real_sum((real_pow(nf.value, q), real_pow(ng.value, q)))
    return nfg.power, real_sum((nf.power, ng.power))


def triangle_holds(space: NormedSpace, f: FiniteVec, g: FiniteVec, r) -> bool:
    lhs, rhs = triangle_sides(space, f, g, r)
    return compare(lhs, rhs) <= 0


def _by_norm_desc(space: NormedSpace, f: FiniteVec) -> list:
    norms = {k: space.norm(v) for k, v in f.items()}

    def cmp(a, b):
        c = norms[b].cmp(norms[a])
        if c:
            return c
        return -1 if _key_order(a) < _key_order(b) else (1 if _key_order(a) > _key_order(b) else 0)

    return sorted(f, key=functools.cmp_to_key(cmp))


def tail_support(space: NormedSpace, f: FiniteVec, eps, r) -> frozenset:
    """Fewest keys ``A`` with ``sum_{x not in A} N(f(x))**r < eps``.

    Keys are taken greedily by decreasing norm, ties broken by key order.
    """
    eps, r = as_fraction(eps), _as_r(r)
    if eps <= 0:
        raise ValueError("eps must be positive")
    order = _by_norm_desc(space, f)
    powers = [space.norm(f[k]) ** r for k in order]
    for n in range(len(order) + 1):
        if compare(real_sum(powers[n:]), eps) < 0:
            return frozenset(order[:n])
    return frozenset(order)  # unreachable: the empty tail is 0 < eps


def erdos_chain(space: NormedSpace, keys: Sequence, v) -> list[FiniteVec]:
    """``f_0 = 0`` and ``f_l`` equal to ``v`` on the first ``l`` keys.

    Consecutive elements differ by ``v`` at a single key, so every step has
    norm ``N(v)`` while ``||f_l||_r**r = l * N(v)**r``.
    """
    keys = list(keys)
    if len(set(keys)) != len(keys):
        raise ValueError("keys must be distinct")
    v = space.vector(v)
    if not any(v):
        raise ValueError("v must be nonzero")
    return [FiniteVec({k: v for k in keys[:l]}, space.dim) for l in range(len(keys) + 1)]


def small_scalar(v: AbsoluteValue) -> Fraction:
    """A rational ``t`` with ``0 < |t| < 1``."""
    base = v.base if isinstance(v, Power) else v
    if isinstance(base, Trivial):
        raise ValueError("the trivial absolute value has no element with 0 < |t| < 1")
    if isinstance(base, Padic):
        return Fraction(base.p)
    if isinstance(base, RealStd):
        return Fraction(1, 2)
    raise TypeError(f"unsupported absolute value {v!r}")


@dataclass(frozen=True)
class ErdosCertificate:
    """An eta-chain from 0 to an element of r-norm at least ``target``.

    The chain is not materialized until :meth:`chain` or :meth:`endpoint`
    is called, since its length grows like ``(target / N(v_eta)) ** r``.
    """

    space: NormedSpace
    eta: Fraction
    target: Fraction
    r: Fraction
    v_eta: tuple[Fraction, ...]
    step_norm: Magnitude
    length: int
    key_supply: Callable[[], Iterable] = field(default=lambda: itertools.count(1), repr=False)

    def keys(self) -> list:
        return list(itertools.islice(self.key_supply(), self.length))

    def chain(self) -> Iterator[FiniteVec]:
        keys = self.keys()
        data: dict = {}
        yield FiniteVec({}, self.space.dim)
        for k in keys:
            data[k] = self.v_eta
            yield FiniteVec(data, self.space.dim)

    def endpoint(self) -> FiniteVec:
        return FiniteVec({k: self.v_eta for k in self.keys()}, self.space.dim)

    def endpoint_power(self) -> Magnitude:
        """``||f_n||_r**r``, from ``n * N(v_eta)**r`` without building ``f_n``."""
        return Magnitude(self.length) * self.step_norm ** self.r


def unboundedness_certificate(
    space: NormedSpace,
    eta,
    target,
    r,
    key_supply: Callable[[], Iterable] | None = None,
) -> ErdosCertificate:
    """Build an eta-chain out of 0 whose endpoint has r-norm ``>= target``.

    Any set containing 0 and eta-separated from its complement contains the
    whole chain, so it is not bounded by ``target``.
    """
    eta, target, r = as_fraction(eta), as_fraction(target), _as_r(r)
    if eta <= 0 or target <= 0:
        raise ValueError("eta and target must be positive")
    if r == INF:
        raise ValueError("r must be finite")
    t = small_scalar(space.scalar)
    k = 1
    while space.scalar(t ** k).cmp(Magnitude(eta)) >= 0:
        k += 1
    v = (t ** k,) + (Fraction(0),) * (space.dim - 1)
    step = space.norm(v)
    length = max(1, ceil_real(real_pow(Magnitude(target) / step, r)))
    return ErdosCertificate(
        space, eta, target, r, v, step, length, key_supply or (lambda: itertools.count(1))
    )


def cube_membership(space: NormedSpace, f: FiniteVec, bounds: Mapping) -> bool:
    """``N(f(x)) <= bounds[x]`` at every key (missing bounds count as 0)."""
    for k, v in f.items():
        b = as_fraction(bounds.get(k, 0))
        if b < 0:
            raise ValueError("bounds must be nonnegative")
        if space.norm(v).cmp(Magnitude(b)) > 0:
            return False
    return True


@dataclass(frozen=True)
class SphereTail:
    support: frozenset
    tail: Real
    bound: Fraction

    @property
    def holds(self) -> bool:
        return compare(self.tail, self.bound) < 0


def sphere_tail_bound(
    space: NormedSpace, f: FiniteVec, g: FiniteVec, eps, r, t=None
) -> SphereTail:
    """Tail of ``g`` outside ``A(eps)`` for ``f`` on the sphere of radius ``t``.

    With ``A = tail_support(f, eps, r)``, ``||g||_r <= t`` and
    ``sum_A N(g)**r > t**r - 2 eps``, the tail ``sum_{x not in A} N(g(x))**r``
    is below ``2 eps``.  ``t`` defaults to ``||f||_r``.
    """
    eps, r = as_fraction(eps), _as_r(r)
    if r == INF:
        raise ValueError("r must be finite")
    f_power = lr_norm(space, f, r).power
    t_power = f_power if t is None else real_pow(Magnitude(as_fraction(t)), r)
    if compare(f_power, t_power) != 0:
        raise PreconditionError("sphere", "||f||_r differs from t")
    g_powers = {k: space.norm(v) ** r for k, v in g.items()}
    if compare(real_sum(g_powers.values()), t_power) > 0:
        raise PreconditionError("ball", "||g||_r exceeds t")
    A = tail_support(space, f, eps, r)
    on_A = real_sum(p for k, p in g_powers.items() if k in A)
    if compare(real_sum((on_A, 2 * eps)), t_power) <= 0:
        raise PreconditionError("close-on-A", "sum over A(eps) of N(g)^r is not above t^r - 2 eps")
    tail = real_sum(p for k, p in g_powers.items() if k not in A)
    return SphereTail(A, tail, 2 * eps)


def parse_key(text: str):
    try:
        return int(text)
    except ValueError:
        return text


def parse_finitevec(text: str) -> FiniteVec:
    """Lines ``key<TAB>c_1 ... c_m``; blank lines and ``#`` comments skipped."""
    entries = []
    for ln in text.splitlines():
        ln = ln.split("#", 1)[0].rstrip()
        if not ln.strip():
            continue
        if "\t" in ln:
            key, _, coords = ln.partition("\t")
        else:
            key, _, coords = ln.strip().partition(" ")
        parts = coords.split()
        if not parts:
            raise ValueError(f"entry {key!r} has no coordinates")
        entries.append((parse_key(key.strip()), tuple(as_fraction(c) for c in parts)))
    keys = [k for k, _ in entries]
    if len(set(keys)) != len(keys):
        raise ValueError("duplicate keys in vector input")
    return FiniteVec(entries)


def format_finitevec(f: FiniteVec) -> str:
    return "".join(f"{k}\t{' '.join(str(c) for c in v)}\n" for k, v in f.items())
