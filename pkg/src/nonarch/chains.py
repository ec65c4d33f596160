"""eta-chains on finite distance matrices.

Steps of an eta-chain are strictly shorter than ``eta``; eta-separation uses
``>= eta``.  With these conventions the blocks of :func:`eta_partition` are
exactly the eta-chain components and are pairwise eta-separated.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .exact import Magnitude, Real, as_fraction, compare, real_max, real_pow, real_sum
from .metric import DistMatrix, verify_ultrametric

INF = math.inf


class UnionFind:
    """Disjoint sets over ``0 .. n-1`` with path halving and union by size."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n
        self.count = n

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.count -= 1
        return True

    def groups(self) -> list[list[int]]:
        out: dict[int, list[int]] = {}
        for i in range(len(self.parent)):
            out.setdefault(self.find(i), []).append(i)
        return sorted(out.values(), key=lambda g: g[0])


@dataclass(frozen=True)
class Partition:
    blocks: tuple[tuple[str, ...], ...]
    eta: object

    def block_of(self, label) -> tuple[str, ...]:
        for b in self.blocks:
            if str(label) in b:
                return b
        raise KeyError(f"unknown label {label!r}")

    def as_sets(self) -> set[frozenset[str]]:
        return {frozenset(b) for b in self.blocks}

    def refines(self, other: Partition) -> bool:
        """Every block of ``self`` lies inside a block of ``other``."""
        return all(set(b) <= set(other.block_of(b[0])) for b in self.blocks)


def _less(D: DistMatrix, d, eta) -> bool:
    return eta == INF or d < eta


def eta_partition(D: DistMatrix, eta) -> Partition:
    """Connected components of the graph with an edge wherever ``d < eta``."""
    if eta != INF:
        eta = as_fraction(eta) if D.is_exact else float(eta)
        if eta <= 0:
            raise ValueError("eta must be positive")
    uf = UnionFind(D.n)
    for i, j in itertools.combinations(range(D.n), 2):
        if _less(D, D.d[i][j], eta):
            uf.union(i, j)
    blocks = tuple(tuple(D.labels[i] for i in g) for g in uf.groups())
    return Partition(blocks, eta)


def is_eta_separated(D: DistMatrix, A: Iterable, B: Iterable, eta) -> bool:
    """All cross distances between ``A`` and ``B`` are ``>= eta``."""
    A, B = {str(a) for a in A}, {str(b) for b in B}
    if A & B:
        raise ValueError(f"sets overlap on {sorted(A & B)}")
    if eta == INF:
        return not (A and B)
    eta = as_fraction(eta) if D.is_exact else float(eta)
    return all(D(a, b) >= eta for a in A for b in B)


BRUTE_FORCE_LIMIT = 16


def _has_separated_split(D: DistMatrix, S: list[str], eta) -> bool:
    first, rest = S[0], S[1:]
    for mask in range(1 << len(rest)):
        A = [first] + [x for i, x in enumerate(rest) if mask >> i & 1]
        B = [x for i, x in enumerate(rest) if not mask >> i & 1]
        if B and is_eta_separated(D, A, B, eta):
            return True
    return False


def is_eta_connected(D: DistMatrix, S: Iterable, eta) -> bool:
    """``S`` forms one eta-chain component of the restricted matrix.

    For ``|S| <= BRUTE_FORCE_LIMIT`` the absence of an eta-separated split
    of ``S`` is also checked by enumeration; the two answers must agree.
    """
    S = sorted({str(x) for x in S}, key=D.index)
    if not S:
        raise ValueError("S must be nonempty")
    connected = len(eta_partition(D.restrict(S), eta).blocks) == 1
    if len(S) <= BRUTE_FORCE_LIMIT:
        no_split = not _has_separated_split(D, S, eta)
        if no_split != connected:
            raise AssertionError("chain components disagree with split enumeration")
    return connected


def minimum_spanning_edges(D: DistMatrix) -> list[tuple[int, int, object]]:
    """Kruskal MST edges ``(i, j, weight)`` in nondecreasing weight order."""
    edges = sorted(
        ((D.d[i][j], i, j) for i, j in itertools.combinations(range(D.n), 2)),
        key=lambda e: e[0],
    )
    uf = UnionFind(D.n)
    out = []
    for w, i, j in edges:
        if uf.union(i, j):
            out.append((i, j, w))
    return out


def subdominant_ultrametric(D: DistMatrix) -> DistMatrix:
    """Minimax chain distance: the largest ultrametric below ``D``.

    ``u(x, y)`` is the least possible largest step over chains from ``x`` to
    ``y``, read off the minimum spanning tree: merging components in Kruskal
    order, every pair first joined by an edge of weight ``w`` gets ``u = w``.
    """
    n = D.n
    u = [[D.d[i][j] * 0 for j in range(n)] for i in range(n)]
    members = {i: [i] for i in range(n)}
    uf = UnionFind(n)
    for i, j, w in minimum_spanning_edges(D):
        ri, rj = uf.find(i), uf.find(j)
        for a in members[ri]:
            for b in members[rj]:
                u[a][b] = u[b][a] = w
        uf.union(ri, rj)
        root = uf.find(ri)
        members[root] = members.pop(ri) + members.pop(rj)
    return DistMatrix(D.labels, tuple(map(tuple, u)), D.tol)


def critical_thresholds(D: DistMatrix) -> list:
    """Distinct MST weights: the values of eta where the partition changes.

    The partition is constant for ``eta`` in each half-open interval
    ``(t_i, t_{i+1}]`` and strictly coarsens just above each ``t_i``.
    """
    return sorted({w for _, _, w in minimum_spanning_edges(D)})


@dataclass(frozen=True)
class Chain:
    points: tuple[str, ...]

    def __post_init__(self):
        pts = tuple(str(p) for p in self.points)
        if not pts:
            raise ValueError("a chain has at least one point")
        object.__setattr__(self, "points", pts)

    def steps(self, D: DistMatrix) -> list:
        return [D(a, b) for a, b in zip(self.points, self.points[1:])]

    def is_eta_chain(self, D: DistMatrix, eta) -> bool:
        return all(_less(D, s, eta) for s in self.steps(D))

    def diameter(self, D: DistMatrix):
        return max((D(a, b) for a in self.points for b in self.points), default=0)


def chain_a_length(D: DistMatrix, chain: Chain | Sequence, a) -> Real:
    """``(sum(step**a)) ** (1/a)``; the largest step when ``a`` is infinite.

    One-point chains have length 0.
    """
    if not isinstance(chain, Chain):
        chain = Chain(tuple(chain))
    steps = chain.steps(D)
    if not steps:
        return Magnitude(0)
    if a == INF:
        return real_max(Magnitude(s) for s in steps)
    a = as_fraction(a)
    if a <= 0:
        raise ValueError("a must be positive")
    return real_pow(real_sum(Magnitude.power(s, a) for s in steps), 1 / a)


def _path_key_cmp(k1, k2) -> int:
    c = compare(k1[0], k2[0])
    if c:
        return c
    if k1[1] != k2[1]:
        return -1 if k1[1] < k2[1] else 1
    if k1[2] != k2[2]:
        return -1 if k1[2] < k2[2] else 1
    return 0


def min_a_length(D: DistMatrix, x, y, a) -> tuple[Real, Chain]:
    """Least a-length over chains from ``x`` to ``y`` and a chain attaining it.

    Dijkstra on edge weights ``d**a`` with keys ``(cost, hops, labels)``,
    so ties prefer fewer hops, then lexicographically smaller label paths.
    """
    a = as_fraction(a)
    if a <= 0:
        raise ValueError("a must be positive")
    s, t = D.index(x), D.index(y)
    if s == t:
        return Magnitude(0), Chain((D.labels[s],))
    weight = [[Magnitude.power(D.d[i][j], a) if i != j else None for j in range(D.n)] for i in range(D.n)]
    best: dict[int, tuple] = {s: (Magnitude(0), 0, (D.labels[s],))}
    done: set[int] = set()
    while True:
        frontier = [i for i in best if i not in done]
        if not frontier:
            break
        u = frontier[0]
        for i in frontier[1:]:
            if _path_key_cmp(best[i], best[u]) < 0:
                u = i
        done.add(u)
        if u == t:
            break
        cost, hops, path = best[u]
        for v in range(D.n):
            if v == u or v in done:
                continue
            cand = (real_sum((cost, weight[u][v])), hops + 1, path + (D.labels[v],))
            if v not in best or _path_key_cmp(cand, best[v]) < 0:
                best[v] = cand
    cost, _, path = best[t]
    return real_pow(cost, 1 / a), Chain(path)


def zero_dim_profile(D: DistMatrix, x, r) -> object | None:
    """Largest ``eta`` whose chain component of ``x`` fits in the open ball ``B(x, r)``.

    Candidates are the critical thresholds plus ``inf`` (the one-block
    partition).  A component at ``eta`` is automatically eta-separated from
    its complement; the separation is re-checked anyway.  Returns None when
    not even the singleton level works, which cannot happen for ``r > 0``
    but keeps the diagnostic honest on degenerate inputs.
    """
    r = as_fraction(r) if D.is_exact else float(r)
    if r <= 0:
        raise ValueError("r must be positive")
    x = str(x)
    D.index(x)
    inside = lambda lab: D(x, lab) < r
    for eta in [INF] + critical_thresholds(D)[::-1]:
        block = eta_partition(D, eta).block_of(x)
        rest = [lab for lab in D.labels if lab not in block]
        if all(inside(lab) for lab in block) and is_eta_separated(D, block, rest, eta):
            return eta
    return None


def ceil_power(t: Fraction, base: Fraction) -> Fraction:
    """``base ** ceil(log_base t)``: the least integer power of ``base`` that is ``>= t``."""
    if t == 0:
        return Fraction(0)
    log = lambda q: math.log(q.numerator) - math.log(q.denominator)
    k = math.ceil(log(t) / log(base))
    while base ** k < t:
        k += 1
    while base ** (k - 1) >= t:
        k -= 1
    return base ** k


def quantize_metric(D: DistMatrix, base) -> DistMatrix:
    """Apply ``h(t) = base ** ceil(log_base t)`` entrywise to an ultrametric."""
    base = as_fraction(base)
    if base <= 1:
        raise ValueError("base must exceed 1")
    if verify_ultrametric(D):
        raise ValueError("quantize_metric needs an ultrametric input")
    rows = tuple(tuple(ceil_power(Fraction(v), base) for v in row) for row in D.d)
    return DistMatrix(D.labels, rows)


def format_partition(P: Partition) -> str:
    return "".join(" ".join(b) + "\n" for b in P.blocks)


def parse_partition(text: str) -> list[tuple[str, ...]]:
    return [tuple(ln.split()) for ln in text.splitlines() if ln.strip()]
