"""Simple functions on [0, 1) and finitely-additive measures.

Sets are finite unions of half-open intervals ``[a, b)`` with rational
endpoints, kept in canonical (sorted, merged) form so that equality of
sets is equality of representations.  Measures come from continuous
piecewise-linear distribution functions, so single points are null and the
half-open convention changes no measure, integral or distance compared to
closed intervals.
"""

from __future__ import annotations

import bisect
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .exact import Magnitude, Real, as_fraction, compare, real_max, real_pow, real_sum
from .lr import LrNorm, NormedSpace, _as_r
from .scalar_fields import RealStd

INF = math.inf
ZERO, ONE = Fraction(0), Fraction(1)


@dataclass(frozen=True)
class IntervalSet:
    """Disjoint, non-adjacent ``[a, b)`` intervals inside ``[0, 1)``, sorted."""

    intervals: tuple[tuple[Fraction, Fraction], ...] = ()

    def __post_init__(self):
        raw = []
        for a, b in self.intervals:
            a, b = as_fraction(a), as_fraction(b)
            if not (0 <= a <= b <= 1):
                raise ValueError(f"interval [{a}, {b}) is not inside [0, 1)")
            if a < b:
                raw.append((a, b))
        raw.sort()
        merged: list[tuple[Fraction, Fraction]] = []
        for a, b in raw:
            if merged and a <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(b, merged[-1][1]))
            else:
                merged.append((a, b))
        object.__setattr__(self, "intervals", tuple(merged))

    @classmethod
    def of(cls, *pairs) -> IntervalSet:
        return cls(tuple(pairs))

    @classmethod
    def full(cls) -> IntervalSet:
        return cls(((ZERO, ONE),))

    def __bool__(self) -> bool:
        return bool(self.intervals)

    def __contains__(self, x) -> bool:
        x = as_fraction(x)
        return any(a <= x < b for a, b in self.intervals)

    def endpoints(self) -> list[Fraction]:
        return [e for iv in self.intervals for e in iv]

    def __or__(self, other: IntervalSet) -> IntervalSet:
        return IntervalSet(self.intervals + other.intervals)

    def __and__(self, other: IntervalSet) -> IntervalSet:
        out, i, j = [], 0, 0
        A, B = self.intervals, other.intervals
        while i < len(A) and j < len(B):
            lo, hi = max(A[i][0], B[j][0]), min(A[i][1], B[j][1])
            if lo < hi:
                out.append((lo, hi))
            if A[i][1] < B[j][1]:
                i += 1
            else:
                j += 1
        return IntervalSet(tuple(out))

    def complement(self) -> IntervalSet:
        out, prev = [], ZERO
        for a, b in self.intervals:
            out.append((prev, a))
            prev = b
        out.append((prev, ONE))
        return IntervalSet(tuple(out))

    __invert__ = complement

    def __sub__(self, other: IntervalSet) -> IntervalSet:
        return self & other.complement()

    def __xor__(self, other: IntervalSet) -> IntervalSet:
        return (self - other) | (other - self)

    def issubset(self, other: IntervalSet) -> bool:
        return not (self - other)

    def __str__(self) -> str:
        if not self.intervals:
            return "empty"
        return " ".join(f"[{a},{b})" for a, b in self.intervals)


_INTERVAL_RE = re.compile(r"\[\s*([^,\[\]()]+?)\s*,\s*([^,\[\]()]+?)\s*\)")


def parse_intervalset(text: str) -> IntervalSet:
    """Parse ``[a,b) [c,d) ...`` or ``empty``."""
    text = text.strip()
    if text in ("", "empty", "∅"):
        return IntervalSet()
    pairs = _INTERVAL_RE.findall(text)
    if not pairs or _INTERVAL_RE.sub("", text).strip(" ,;∪U"):
        raise ValueError(f"cannot parse interval set {text!r}")
    return IntervalSet(tuple((as_fraction(a), as_fraction(b)) for a, b in pairs))


@dataclass(frozen=True)
class FAMeasure:
    """Measure ``mu([a, b)) = F(b) - F(a)`` for a continuous piecewise-linear ``F``.

    ``breakpoints`` are ``(t, F(t))`` pairs with ``t`` running from 0 to 1 and
    ``F(0) = 0``; ``F`` is linear in between and must be nondecreasing.
    """

    breakpoints: tuple[tuple[Fraction, Fraction], ...] = ((ZERO, ZERO), (ONE, ONE))

    def __post_init__(self):
        pts = tuple((as_fraction(t), as_fraction(v)) for t, v in self.breakpoints)
        if len(pts) < 2 or pts[0] != (ZERO, ZERO) or pts[-1][0] != ONE:
            raise ValueError("breakpoints must start at (0, 0) and end at t = 1")
        for (t0, v0), (t1, v1) in zip(pts, pts[1:]):
            if t1 <= t0:
                raise ValueError("breakpoint abscissae must increase")
            if v1 < v0:
                raise ValueError("distribution function must be nondecreasing")
        object.__setattr__(self, "breakpoints", pts)
        object.__setattr__(self, "_ts", [t for t, _ in pts])

    @classmethod
    def lebesgue(cls) -> FAMeasure:
        return cls()

    def F(self, t) -> Fraction:
        t = as_fraction(t)
        if not 0 <= t <= 1:
            raise ValueError("F is defined on [0, 1]")
        i = bisect.bisect_right(self._ts, t) - 1
        if i >= len(self.breakpoints) - 1:
            return self.breakpoints[-1][1]
        (t0, v0), (t1, v1) = self.breakpoints[i], self.breakpoints[i + 1]
        return v0 + (v1 - v0) * (t - t0) / (t1 - t0)

    def __call__(self, A: IntervalSet) -> Fraction:
        return sum((self.F(b) - self.F(a) for a, b in A.intervals), ZERO)

    def total(self) -> Fraction:
        return self.breakpoints[-1][1]

    def knots(self) -> list[Fraction]:
        return list(self._ts)


def measure(mu: FAMeasure, A: IntervalSet) -> Fraction:
    return mu(A)


def parse_measure(text: str) -> FAMeasure:
    """Lines ``t F(t)``; blank lines and ``#`` comments skipped."""
    pts = []
    for ln in text.splitlines():
        ln = ln.split("#", 1)[0].strip()
        if ln:
            t, v = ln.split()
            pts.append((as_fraction(t), as_fraction(v)))
    return FAMeasure(tuple(pts))


def format_measure(mu: FAMeasure) -> str:
    return "".join(f"{t} {v}\n" for t, v in mu.breakpoints)


def _vec(v) -> tuple[Fraction, ...]:
    if isinstance(v, (tuple, list)):
        return tuple(as_fraction(c) for c in v)
    return (as_fraction(v),)


class SimpleFn:
    """``sum_j v_j * 1_{E_j}`` with disjoint nonempty ``E_j`` and distinct nonzero ``v_j``.

    Parts are kept in canonical form: equal values are merged and zero
    values dropped, so measurability of every level set is built in.
    """

    __slots__ = ("parts", "dim")

    def __init__(self, parts: Iterable[tuple[IntervalSet, object]] = (), dim: int | None = None):
        by_value: dict[tuple, IntervalSet] = {}
        seen = IntervalSet()
        for E, v in parts:
            v = _vec(v)
            if dim is None:
                dim = len(v)
            elif len(v) != dim:
                raise ValueError("inconsistent value dimensions")
            if seen & E:
                raise ValueError("parts of a simple function must be disjoint")
            seen = seen | E
            if not any(v) or not E:
                continue
            by_value[v] = by_value.get(v, IntervalSet()) | E
        self.parts = tuple(sorted(((E, v) for v, E in by_value.items()), key=lambda p: p[0].intervals))
        self.dim = dim or 1

    @classmethod
    def from_pieces(cls, pieces: Iterable[tuple], dim: int | None = None) -> SimpleFn:
        """Build from ``(a, b, value)`` triples meaning ``value`` on ``[a, b)``."""
        return cls(((IntervalSet.of((a, b)), v) for a, b, v in pieces), dim)

    @classmethod
    def indicator(cls, E: IntervalSet, value=1) -> SimpleFn:
        return cls([(E, value)])

    def zero_value(self) -> tuple[Fraction, ...]:
        return (ZERO,) * self.dim

    def __call__(self, x) -> tuple[Fraction, ...]:
        x = as_fraction(x)
        for E, v in self.parts:
            if x in E:
                return v
        return self.zero_value()

    def support(self) -> IntervalSet:
        out = IntervalSet()
        for E, _ in self.parts:
            out = out | E
        return out

    def breakpoints(self) -> list[Fraction]:
        pts = {ZERO, ONE}
        for E, _ in self.parts:
            pts.update(E.endpoints())
        return sorted(pts)

    def __eq__(self, other) -> bool:
        if isinstance(other, SimpleFn):
            return self.parts == other.parts
        return NotImplemented

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return "SimpleFn(" + ", ".join(f"{E}: {v}" for E, v in self.parts) + ")"

    def _pointwise(self, other: SimpleFn, op) -> SimpleFn:
        if self.parts and other.parts and self.dim != other.dim:
            raise ValueError("dimension mismatch")
        dim = self.dim if self.parts else other.dim
        pts = sorted(set(self.breakpoints()) | set(other.breakpoints()))
        pieces = []
        for a, b in zip(pts, pts[1:]):
            v = tuple(op(x, y) for x, y in zip(self(a), other(a))) if self.parts or other.parts else ()
            pieces.append((IntervalSet.of((a, b)), v or (ZERO,) * dim))
        return SimpleFn(pieces, dim)

    def __add__(self, other: SimpleFn) -> SimpleFn:
        return self._pointwise(other, lambda x, y: x + y)

    def __sub__(self, other: SimpleFn) -> SimpleFn:
        return self._pointwise(other, lambda x, y: x - y)

    def scale(self, t) -> SimpleFn:
        t = as_fraction(t)
        return SimpleFn(((E, tuple(t * c for c in v)) for E, v in self.parts), self.dim)

    def restrict(self, A: IntervalSet) -> SimpleFn:
        return SimpleFn(((E & A, v) for E, v in self.parts), self.dim)

    def disagreement(self, other: SimpleFn) -> IntervalSet:
        pts = sorted(set(self.breakpoints()) | set(other.breakpoints()))
        return IntervalSet(tuple((a, b) for a, b in zip(pts, pts[1:]) if self(a) != other(a)))


def _scalar_values(f: SimpleFn) -> list[tuple[IntervalSet, Fraction]]:
    if f.dim != 1:
        raise ValueError("expected a real-valued simple function")
    return [(E, v[0]) for E, v in f.parts]


def integrate(mu, f: SimpleFn) -> Fraction:
    """``sum_j t_j * mu(E_j)`` for a real-valued simple function (any sign)."""
    return sum((t * mu(E) for E, t in _scalar_values(f)), ZERO)


def integrate_simple(mu, f: SimpleFn) -> Fraction:
    """Integral of a nonnegative real-valued simple function."""
    if any(t < 0 for _, t in _scalar_values(f)):
        raise ValueError("integrate_simple needs nonnegative values")
    return integrate(mu, f)


def lr_norm_simple(mu, f: SimpleFn, r, space: NormedSpace | None = None) -> LrNorm:
    """L^r norm, exact in the r-th power domain; essential maximum for infinite r."""
    r = _as_r(r)
    space = space or NormedSpace(RealStd(), f.dim)
    if r == INF:
        ess = real_max(space.norm(v) for E, v in f.parts if mu(E) > 0)
        return LrNorm(r, ess, None)
    power = real_sum(space.norm(v) ** r * Magnitude(mu(E)) for E, v in f.parts)
    return LrNorm(r, real_pow(power, 1 / r), power)


def sym_diff_metric(mu, A: IntervalSet, B: IntervalSet) -> Fraction:
    return mu(A ^ B)


def ae_equal(mu, f: SimpleFn, g: SimpleFn) -> bool:
    return mu(f.disagreement(g)) == 0


def _cumulative(mu: FAMeasure, E: IntervalSet, knots: list[Fraction]) -> list[Fraction]:
    return [mu(E & IntervalSet.of((ZERO, s))) for s in knots]


def chain_decompose(mu: FAMeasure, E: IntervalSet, eps) -> list[IntervalSet]:
    """Split ``E`` into disjoint pieces of measure below ``eps``.

    Uses ``floor(mu(E)/eps) + 1`` pieces of equal measure, cutting at the
    points where ``s -> mu(E & [0, s))`` reaches each multiple of the piece
    measure.  The partial unions form an eps-chain from the empty set to
    ``E`` for the symmetric-difference metric.
    """
    eps = as_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if not E:
        return []
    total = mu(E)
    n = math.floor(total / eps) + 1
    if n == 1:
        return [E]
    knots = sorted(set(mu.knots()) | set(E.endpoints()) | {ZERO, ONE})
    G = _cumulative(mu, E, knots)
    cuts = [ZERO]
    for l in range(1, n):
        target = total * l / n
        i = bisect.bisect_left(G, target)
        # G is linear on [knots[i-1], knots[i]] and G[i-1] < target <= G[i]
        s0, s1, g0, g1 = knots[i - 1], knots[i], G[i - 1], G[i]
        cuts.append(s0 + (s1 - s0) * (target - g0) / (g1 - g0))
    cuts.append(ONE)
    return [E & IntervalSet.of((a, b)) for a, b in zip(cuts, cuts[1:])]


def chain_from_pieces(pieces: Sequence[IntervalSet]) -> list[IntervalSet]:
    """Partial unions ``E_0 = {}, E_l = A_1 | ... | A_l``."""
    out = [IntervalSet()]
    for A in pieces:
        out.append(out[-1] | A)
    return out


def pieces_from_chain(chain: Sequence[IntervalSet], E: IntervalSet) -> list[IntervalSet]:
    """Disjoint pieces of ``E`` from a chain ``E_0 = {}, ..., E_n = E``.

    ``E'_l = E_l & E``, ``E''_l = E'_1 | ... | E'_l`` and
    ``A_l = E''_l - E''_{l-1}``; each ``mu(A_l) <= d_mu(E_{l-1}, E_l)``.
    """
    if not chain or chain[0] or chain[-1] != E:
        raise ValueError("chain must run from the empty set to E")
    pieces, acc = [], IntervalSet()
    for El in chain[1:]:
        nxt = acc | (El & E)
        pieces.append(nxt - acc)
        acc = nxt
    return pieces


def truncate_path(f: SimpleFn, t) -> SimpleFn:
    """``f_t = 1_{[0, t)} * f``: ``f_1 = f`` and ``f_0 = 0``."""
    t = as_fraction(t)
    if not 0 <= t <= 1:
        raise ValueError("t must lie in [0, 1]")
    return f.restrict(IntervalSet.of((ZERO, t)))


@dataclass(frozen=True)
class PathModulus:
    """``lhs = ||f_{t2} - f_{t1}||_r**r`` against ``rhs = mu([t1, t2)) * ||f||_inf**r``."""

    lhs: Real
    rhs: Real

    @property
    def holds(self) -> bool:
        return compare(self.lhs, self.rhs) <= 0


def path_modulus(mu: FAMeasure, f: SimpleFn, t1, t2, r, space: NormedSpace | None = None) -> PathModulus:
    t1, t2, r = as_fraction(t1), as_fraction(t2), _as_r(r)
    if not 0 <= t1 <= t2 <= 1:
        raise ValueError("need 0 <= t1 <= t2 <= 1")
    if r == INF:
        raise ValueError("r must be finite")
    diff = truncate_path(f, t2) - truncate_path(f, t1)
    lhs = lr_norm_simple(mu, diff, r, space).power
    sup = lr_norm_simple(mu, f, INF, space).value
    rhs = Magnitude(mu(IntervalSet.of((t1, t2)))) * real_pow(sup, r)
    return PathModulus(lhs, rhs)


@dataclass(frozen=True)
class AtomicSpace:
    """Finite set of labelled atoms with nonnegative weights."""

    atoms: tuple[tuple[str, Fraction], ...]

    def __post_init__(self):
        atoms = tuple((str(a), as_fraction(w)) for a, w in self.atoms)
        if any(w < 0 for _, w in atoms):
            raise ValueError("weights must be nonnegative")
        if len({a for a, _ in atoms}) != len(atoms):
            raise ValueError("atom labels must be distinct")
        object.__setattr__(self, "atoms", atoms)

    def total(self) -> Fraction:
        return sum((w for _, w in self.atoms), ZERO)


@dataclass(frozen=True)
class PushforwardMeasure:
    """``nu(E) = mu(phi^{-1}(E))`` for an atomic ``mu``: weights placed at points."""

    points: tuple[tuple[Fraction, Fraction], ...]

    def __call__(self, A: IntervalSet) -> Fraction:
        return sum((w for x, w in self.points if x in A), ZERO)


def pushforward(space: AtomicSpace, phi: Mapping) -> PushforwardMeasure:
    pts = []
    for label, w in space.atoms:
        if label not in phi:
            raise ValueError(f"phi is undefined at {label!r}")
        x = as_fraction(phi[label])
        if not 0 <= x < 1:
            raise ValueError(f"phi({label}) = {x} is outside [0, 1)")
        pts.append((x, w))
    return PushforwardMeasure(tuple(pts))


def pushforward_check(space: AtomicSpace, phi: Mapping, f: SimpleFn) -> tuple[Fraction, Fraction]:
    """Both sides of the change of variables: ``(int f o phi dmu, int f dnu)``."""
    nu = pushforward(space, phi)
    lhs = sum((w * f(phi[a])[0] for a, w in space.atoms), ZERO) if f.dim == 1 else None
    if lhs is None:
        raise ValueError("expected a real-valued simple function")
    return lhs, integrate(nu, f)


def parse_simplefn(text: str) -> SimpleFn:
    """Lines ``a b<TAB>c_1 ... c_m`` meaning the value ``(c_1..c_m)`` on ``[a, b)``."""
    pieces = []
    for ln in text.splitlines():
        ln = ln.split("#", 1)[0].strip()
        if not ln:
            continue
        parts = ln.split()
        if len(parts) < 3:
            raise ValueError(f"bad simple-function line {ln!r}")
        pieces.append((as_fraction(parts[0]), as_fraction(parts[1]), tuple(as_fraction(c) for c in parts[2:])))
    return SimpleFn.from_pieces(pieces)


def format_simplefn(f: SimpleFn) -> str:
    lines = []
    for E, v in sorted(
        ((IntervalSet.of(iv), v) for E, v in f.parts for iv in E.intervals),
        key=lambda p: p[0].intervals,
    ):
        (a, b), = E.intervals
        lines.append(f"{a} {b}\t{' '.join(str(c) for c in v)}\n")
    return "".join(lines)


def parse_atoms(text: str) -> tuple[AtomicSpace, dict[str, Fraction]]:
    """Lines ``label weight phi(label)``."""
    atoms, phi = [], {}
    for ln in text.splitlines():
        ln = ln.split("#", 1)[0].strip()
        if not ln:
            continue
        label, w, x = ln.split()
        atoms.append((label, as_fraction(w)))
        phi[label] = as_fraction(x)
    return AtomicSpace(tuple(atoms)), phi
