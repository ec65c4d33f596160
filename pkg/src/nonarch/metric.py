"""Finite distance matrices and audits of q-metric and ultrametric axioms."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence, Union

from .exact import Magnitude, Sum, as_fraction, compare, rational_power

Entry = Union[Fraction, float]

Q_LO = 1e-3
Q_HI = 64.0
Q_RTOL = 1e-9
FLOAT_RTOL = 1e-12


class ExponentOutOfRange(ValueError):
    """The maximal metric exponent falls outside the bisection bracket."""


class MatrixFormatError(ValueError):
    pass


@dataclass(frozen=True)
class DistMatrix:
    """Symmetric distance matrix with zero diagonal and positive off-diagonal.

    Entries are Fractions, or floats when ``tol > 0``; ``tol`` is a relative
    slack used by every inequality check on this matrix.
    """

    labels: tuple[str, ...]
    d: tuple[tuple[Entry, ...], ...]
    tol: float = 0.0

    def __post_init__(self):
        labels = tuple(str(x) for x in self.labels)
        if len(set(labels)) != len(labels):
            raise ValueError("labels must be distinct")
        n = len(labels)
        rows = tuple(tuple(self._coerce(v) for v in row) for row in self.d)
        if len(rows) != n or any(len(r) != n for r in rows):
            raise ValueError(f"expected a {n}x{n} matrix")
        for i in range(n):
            if rows[i][i] != 0:
                raise ValueError(f"nonzero diagonal at {labels[i]!r}")
            for j in range(i + 1, n):
                a, b = rows[i][j], rows[j][i]
                if a != b and abs(a - b) > self.tol * max(abs(a), abs(b)):
                    raise ValueError(f"asymmetric entries at ({labels[i]}, {labels[j]})")
                if a <= 0:
                    raise ValueError(f"nonpositive distance between {labels[i]} and {labels[j]}")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "d", rows)
        object.__setattr__(self, "_index", {x: i for i, x in enumerate(labels)})

    def _coerce(self, v) -> Entry:
        if isinstance(v, float):
            return v if self.tol > 0 else Fraction(v)
        return as_fraction(v)

    @classmethod
    def from_points(cls, points: dict, dist: Callable, tol: float = 0.0) -> DistMatrix:
        labels = list(points)
        d = [[dist(points[a], points[b]) if a != b else 0 for b in labels] for a in labels]
        return cls(tuple(labels), tuple(map(tuple, d)), tol)

    @classmethod
    def line(cls, xs: Sequence) -> DistMatrix:
        """Points of the real line labelled by their coordinates."""
        xs = [as_fraction(x) for x in xs]
        return cls.from_points({_fmt(x): x for x in xs}, lambda a, b: abs(a - b))

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def is_exact(self) -> bool:
        return self.tol == 0

    def index(self, label) -> int:
        try:
            return self._index[str(label)]
        except KeyError:
            raise KeyError(f"unknown label {label!r}") from None

    def __call__(self, x, y) -> Entry:
        return self.d[self.index(x)][self.index(y)]

    def scaled(self, c) -> DistMatrix:
        c = as_fraction(c) if self.is_exact else float(c)
        return DistMatrix(self.labels, tuple(tuple(v * c for v in row) for row in self.d), self.tol)

    def restrict(self, labels: Iterable) -> DistMatrix:
        idx = sorted(self.index(x) for x in labels)
        return DistMatrix(
            tuple(self.labels[i] for i in idx),
            tuple(tuple(self.d[i][j] for j in idx) for i in idx),
            self.tol,
        )

    def le(self, a: Entry, b: Entry) -> bool:
        """``a <= b`` up to this matrix's tolerance."""
        if self.is_exact:
            return a <= b
        return a <= b + self.tol * max(abs(b), abs(a))

    def equal(self, a: Entry, b: Entry) -> bool:
        return self.le(a, b) and self.le(b, a)


def _fmt(x) -> str:
    x = as_fraction(x) if not isinstance(x, float) else x
    if isinstance(x, Fraction) and x.denominator == 1:
        return str(x.numerator)
    return str(x)


def _q_violates(D: DistMatrix, c: Entry, a: Entry, b: Entry, q) -> bool:
    """``c**q > a**q + b**q``, exactly for rational entries."""
    if not D.is_exact:
        q = float(q)
        lhs, rhs = c ** q, a ** q + b ** q
        return lhs > rhs + D.tol * max(lhs, rhs)
    if c <= max(a, b):
        return False
    if q.denominator == 1:
        n = q.numerator
        return c ** n > a ** n + b ** n
    return compare(Magnitude.power(c, q), Sum((Magnitude.power(a, q), Magnitude.power(b, q)))) > 0


def verify_qmetric(D: DistMatrix, q) -> list[tuple[str, str, str]]:
    """Every ordered triple ``(x, y, z)`` with ``d(x,z)**q > d(x,y)**q + d(y,z)**q``."""
    q = as_fraction(q)
    if q <= 0:
        raise ValueError("q must be positive")
    out = []
    d = D.d
    for i, j, k in itertools.permutations(range(D.n), 3):
        if _q_violates(D, d[i][k], d[i][j], d[j][k], q):
            out.append((D.labels[i], D.labels[j], D.labels[k]))
    return out


def verify_ultrametric(D: DistMatrix) -> list[tuple[str, str, str]]:
    """Every ordered triple with ``d(x,z) > max(d(x,y), d(y,z))``."""
    out = []
    d = D.d
    for i, j, k in itertools.permutations(range(D.n), 3):
        if not D.le(d[i][k], max(d[i][j], d[j][k])):
            out.append((D.labels[i], D.labels[j], D.labels[k]))
    return out


def _triangle_root(a: float, b: float, c: float) -> float:
    """Root in q of ``(a/c)**q + (b/c)**q == 1`` for ``a, b < c``; ``inf`` above ``Q_HI``."""
    la, lb = math.log(a / c), math.log(b / c)

    def g(q: float) -> float:
        return math.exp(q * la) + math.exp(q * lb) - 1.0

    lo, hi = Q_LO, Q_HI
    if g(lo) < 0:
        raise ExponentOutOfRange(f"root for sides ({a}, {b}, {c}) lies below {Q_LO}")
    if g(hi) > 0:
        return math.inf
    while hi - lo > Q_RTOL * 1e-3 * hi:
        mid = (lo + hi) / 2
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def _snap(q: float, triple: tuple[Fraction, Fraction, Fraction]) -> Fraction | float:
    """Replace ``q`` by a nearby small-denominator rational if it solves exactly."""
    cand = Fraction(q).limit_denominator(64)
    if cand <= 0 or abs(float(cand) - q) > Q_RTOL * q:
        return q
    a, b, c = triple
    pa, pb, pc = (rational_power(x, cand) for x in (a, b, c))
    if None not in (pa, pb, pc) and pa + pb == pc:
        return cand
    return q


def max_metric_exponent(D: DistMatrix) -> Fraction | float:
    """Largest ``q`` making ``D`` a q-metric; ``math.inf`` for an ultrametric.

    Each triple whose largest side ``c`` strictly exceeds the other two
    contributes the root of ``c**q = a**q + b**q``; the answer is the least
    such root.  Exactly solvable rational roots are returned as Fractions.
    """
    best: float = math.inf
    best_triple = None
    above_range = None
    d = D.d
    for i, j, k in itertools.combinations(range(D.n), 3):
        a, b, c = sorted((d[i][j], d[j][k], d[i][k]))
        if D.le(c, b):
            continue
        root = _triangle_root(float(a), float(b), float(c))
        if root == math.inf:
            above_range = (a, b, c)
        elif root < best:
            best, best_triple = root, (a, b, c)
    if best_triple is None:
        if above_range is not None:
            raise ExponentOutOfRange(f"root for sides {above_range} lies above {Q_HI}")
        return math.inf
    if D.is_exact:
        return _snap(best, best_triple)
    return best


def power_transform(D: DistMatrix, a) -> DistMatrix:
    """Entrywise ``d ** a``; stays exact when every power is rational."""
    a = as_fraction(a)
    if a <= 0:
        raise ValueError("exponent must be positive")
    if D.is_exact:
        rows = [[rational_power(v, a) for v in row] for row in D.d]
        if all(v is not None for row in rows for v in row):
            return DistMatrix(D.labels, tuple(map(tuple, rows)))
    fa = float(a)
    rows = [[float(v) ** fa for v in row] for row in D.d]
    return DistMatrix(D.labels, tuple(map(tuple, rows)), max(D.tol, FLOAT_RTOL))


def isoceles_audit(D: DistMatrix) -> list[tuple[str, str, str]]:
    """Unordered triples whose two largest sides differ."""
    out = []
    d = D.d
    for i, j, k in itertools.combinations(range(D.n), 3):
        _, b, c = sorted((d[i][j], d[j][k], d[i][k]))
        if not D.equal(b, c):
            out.append((D.labels[i], D.labels[j], D.labels[k]))
    return out


def ball(D: DistMatrix, x, r, closed: bool = False) -> frozenset[str]:
    """Open (``d < r``) or closed (``d <= r``) ball about ``x``."""
    i = D.index(x)
    r = as_fraction(r) if D.is_exact else float(r)
    row = D.d[i]
    if closed:
        return frozenset(D.labels[j] for j in range(D.n) if row[j] <= r)
    return frozenset(D.labels[j] for j in range(D.n) if row[j] < r)


def parse_distmatrix(text: str, tol: float = 0.0) -> DistMatrix:
    """Read the text format: ``n`` then ``n`` lines of ``label e_1 ... e_n``.

    Entries are rationals ``a/b`` or decimal literals, parsed exactly.  Blank
    lines and ``#`` comments are ignored.
    """
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise MatrixFormatError("empty distance matrix input")
    try:
        n = int(lines[0])
    except ValueError:
        raise MatrixFormatError(f"first line must be the point count, got {lines[0]!r}") from None
    if len(lines) - 1 != n:
        raise MatrixFormatError(f"expected {n} matrix rows, found {len(lines) - 1}")
    labels, rows = [], []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != n + 1:
            raise MatrixFormatError(f"row {parts[0] if parts else ''!r}: expected label and {n} entries")
        labels.append(parts[0])
        try:
            rows.append(tuple(as_fraction(p) for p in parts[1:]))
        except (ValueError, ZeroDivisionError) as exc:
            raise MatrixFormatError(str(exc)) from None
    if tol > 0:
        rows = [tuple(float(v) for v in row) for row in rows]
    try:
        return DistMatrix(tuple(labels), tuple(rows), tol)
    except ValueError as exc:
        raise MatrixFormatError(str(exc)) from None


def format_entry(v: Entry) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def format_distmatrix(D: DistMatrix) -> str:
    out = [str(D.n)]
    for label, row in zip(D.labels, D.d):
        out.append(" ".join([label] + [format_entry(v) for v in row]))
    return "\n".join(out) + "\n"
