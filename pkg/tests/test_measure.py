import itertools
import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nonarch.exact import Magnitude, compare, real_pow, real_sum
from nonarch.lr import NormedSpace
from nonarch.measure import (
    AtomicSpace,
    FAMeasure,
    IntervalSet,
    SimpleFn,
    ae_equal,
    chain_decompose,
    chain_from_pieces,
    format_measure,
    format_simplefn,
    integrate,
    integrate_simple,
    lr_norm_simple,
    measure,
    parse_atoms,
    parse_intervalset,
    parse_measure,
    parse_simplefn,
    path_modulus,
    pieces_from_chain,
    pushforward,
    pushforward_check,
    sym_diff_metric,
    truncate_path,
)
from nonarch.scalar_fields import Padic, RealStd

GRID = 24
LEB = FAMeasure.lebesgue()
F = Fraction


# ---- grid oracle: sets as boolean arrays over cells [k/GRID, (k+1)/GRID) ----

@st.composite
def cell_sets(draw):
    return tuple(draw(st.lists(st.booleans(), min_size=GRID, max_size=GRID)))


def to_set(cells) -> IntervalSet:
    return IntervalSet(tuple((F(k, GRID), F(k + 1, GRID)) for k, c in enumerate(cells) if c))


@st.composite
def grid_measures(draw):
    """Piecewise-linear F with knots on the grid, sometimes flat."""
    ks = sorted(draw(st.sets(st.integers(1, GRID - 1), max_size=5)))
    pts, v = [(F(0), F(0))], F(0)
    for k in ks + [GRID]:
        v += draw(st.sampled_from([F(0), F(1, 3), F(1, 2), F(2), F(5, 4)]))
        pts.append((F(k, GRID), v))
    return FAMeasure(tuple(pts))


def cell_measure(mu: FAMeasure, cells) -> Fraction:
    return sum((mu.F(F(k + 1, GRID)) - mu.F(F(k, GRID)) for k, c in enumerate(cells) if c), F(0))


@st.composite
def grid_simplefns(draw, values=st.integers(-3, 3)):
    vals = [draw(values) for _ in range(GRID)]
    return SimpleFn.from_pieces((F(k, GRID), F(k + 1, GRID), v) for k, v in enumerate(vals)), vals


# ---- set algebra ----

def test_set_examples():
    A, B = IntervalSet.of((0, F(1, 2))), IntervalSet.of((F(1, 4), F(3, 4)))
    assert A ^ B == IntervalSet.of((0, F(1, 4)), (F(1, 2), F(3, 4)))
    assert not (A ^ A)
    assert A ^ IntervalSet() == A
    assert IntervalSet.of((0, F(1, 2)), (F(1, 2), 1)) == IntervalSet.full()
    assert str(A ^ B) == "[0,1/4) [1/2,3/4)"


@given(cell_sets(), cell_sets(), cell_sets())
def test_set_operations_match_grid(a, b, c):
    A, B, C = map(to_set, (a, b, c))
    assert A | B == to_set([x or y for x, y in zip(a, b)])
    assert A & B == to_set([x and y for x, y in zip(a, b)])
    assert A - B == to_set([x and not y for x, y in zip(a, b)])
    assert A ^ B == to_set([x != y for x, y in zip(a, b)])
    assert ~A == to_set([not x for x in a])
    assert (A & C) ^ (B & C) == (A ^ B) & C
    assert ~(A | B) == ~A & ~B
    assert A.issubset(A | B)


def test_interval_set_rejects_out_of_range():
    with pytest.raises(ValueError):
        IntervalSet.of((F(-1, 2), F(1, 2)))
    with pytest.raises(ValueError):
        IntervalSet.of((0, 2))


@pytest.mark.parametrize("text", ["[0,1/4) [1/2,3/4)", "empty", "[0, 0.5)"])
def test_intervalset_text_round_trip(text):
    A = parse_intervalset(text)
    assert parse_intervalset(str(A)) == A


def test_parse_intervalset_rejects_garbage():
    with pytest.raises(ValueError):
        parse_intervalset("[0,1] nonsense")


# ---- measures ----

def test_measure_examples():
    assert measure(LEB, IntervalSet.of((0, F(1, 2)))) == F(1, 2)
    assert measure(FAMeasure(((0, 0), (F(1, 2), 3), (1, 3))), IntervalSet()) == 0
    assert measure(LEB, IntervalSet.of((0, F(1, 4)), (F(1, 2), F(3, 4)))) == F(1, 2)


def test_measure_rejects_decreasing_or_bad_breakpoints():
    with pytest.raises(ValueError):
        FAMeasure(((0, 0), (F(1, 2), 2), (1, 1)))
    with pytest.raises(ValueError):
        FAMeasure(((0, 1), (1, 2)))


@given(grid_measures(), cell_sets(), cell_sets())
def test_measure_matches_grid_and_is_additive(mu, a, b):
    A, B = to_set(a), to_set(b)
    assert mu(A) == cell_measure(mu, a)
    assert mu(A | B) + mu(A & B) == mu(A) + mu(B)


def test_measure_text_round_trip():
    mu = parse_measure("# F\n0 0\n1/2 1/4\n1 2\n")
    assert mu.F(F(1, 4)) == F(1, 8)
    assert parse_measure(format_measure(mu)) == mu


# ---- integration and norms ----

def test_integrate_examples():
    f = SimpleFn.from_pieces([(0, F(1, 2), 3), (F(1, 2), 1, 1)])
    assert integrate_simple(LEB, f) == 2
    assert integrate_simple(LEB, SimpleFn()) == 0
    mu = FAMeasure(((0, 0), (F(1, 3), 2), (1, 5)))
    assert integrate_simple(mu, SimpleFn.indicator(IntervalSet.full())) == mu(IntervalSet.full())
    with pytest.raises(ValueError):
        integrate_simple(LEB, f.scale(-1))


def test_simplefn_is_canonical():
    f = SimpleFn.from_pieces([(0, F(1, 4), 2), (F(1, 2), F(3, 4), 2), (F(1, 4), F(1, 2), 0)])
    assert len(f.parts) == 1 and f.parts[0][0] == IntervalSet.of((0, F(1, 4)), (F(1, 2), F(3, 4)))
    with pytest.raises(ValueError):
        SimpleFn.from_pieces([(0, F(1, 2), 1), (F(1, 4), 1, 2)])


@given(grid_measures(), grid_simplefns(), grid_simplefns(), st.fractions(min_value=-5, max_value=5, max_denominator=6))
def test_integral_matches_grid_and_is_linear(mu, fv, gv, a):
    (f, fvals), (g, gvals) = fv, gv
    cell = [mu.F(F(k + 1, GRID)) - mu.F(F(k, GRID)) for k in range(GRID)]
    assert integrate(mu, f) == sum(v * m for v, m in zip(fvals, cell))
    assert integrate(mu, f + g) == integrate(mu, f) + integrate(mu, g)
    assert integrate(mu, f.scale(a)) == a * integrate(mu, f)
    assert [f(F(k, GRID))[0] for k in range(GRID)] == fvals


@given(grid_measures(), grid_simplefns(st.integers(0, 4)), grid_simplefns(st.integers(0, 4)))
def test_integral_is_monotone(mu, fv, gv):
    (f, _), (g, _) = fv, gv
    assert integrate_simple(mu, f) <= integrate_simple(mu, f + g)


def test_lr_norm_simple_examples():
    f = SimpleFn.from_pieces([(0, F(1, 2), 3), (F(1, 2), 1, 1)])
    assert lr_norm_simple(LEB, f, 1).value == 2
    assert lr_norm_simple(LEB, f, math.inf).value == 3
    flat = FAMeasure(((0, 0), (F(1, 2), 0), (1, 1)))
    g = SimpleFn.from_pieces([(0, F(1, 2), 7)])
    for r in (F(1, 2), 1, 2, math.inf):
        assert compare(lr_norm_simple(flat, g, r).value, 0) == 0


@given(grid_measures(), grid_simplefns(), st.sampled_from([F(1, 2), 1, F(3, 2), 2, 3]))
def test_lr_norm_simple_matches_grid(mu, fv, r):
    f, vals = fv
    cell = [mu.F(F(k + 1, GRID)) - mu.F(F(k, GRID)) for k in range(GRID)]
    with mpmath.workprec(200):
        rr = mpmath.mpf(F(r).numerator) / F(r).denominator
        expected = mpmath.fsum(abs(v) ** rr * (mpmath.mpf(m.numerator) / m.denominator) for v, m in zip(vals, cell) if v)
        got = lr_norm_simple(mu, f, r)
        assert float(got.power) == pytest.approx(float(expected), rel=1e-12, abs=1e-300)
    ess = max((abs(v) for v, m in zip(vals, cell) if m > 0), default=0)
    assert lr_norm_simple(mu, f, math.inf).value == ess


@given(grid_measures(), grid_simplefns(st.integers(0, 4)), grid_simplefns(st.integers(0, 4)), st.sampled_from([F(1, 3), F(1, 2), 1, F(3, 2), 2, 3]))
def test_minkowski_regimes_real(mu, fv, gv, r):
    (f, _), (g, _) = fv, gv
    nf, ng, nfg = (lr_norm_simple(mu, h, r) for h in (f, g, f + g))
    if r >= 1:
        assert compare(nfg.value, real_sum((nf.value, ng.value))) <= 0
    if r <= 1:
        assert compare(nfg.power, real_sum((nf.power, ng.power))) <= 0


@st.composite
def grid_vector_fns(draw):
    vals = [(draw(st.integers(-8, 8)), draw(st.integers(-8, 8))) for _ in range(GRID // 4)]
    return SimpleFn.from_pieces((F(k, GRID // 4), F(k + 1, GRID // 4), v) for k, v in enumerate(vals))


@given(grid_measures(), grid_vector_fns(), grid_vector_fns(), st.sampled_from([F(1, 2), 1, 2, 3, math.inf]))
def test_vector_regimes(mu, f, g, r):
    for space in (NormedSpace(RealStd(), 2), NormedSpace(Padic(2), 2)):
        nf, ng, nfg = (lr_norm_simple(mu, h, r, space) for h in (f, g, f + g))
        q = space.q
        if r == math.inf:
            if q == math.inf:
                assert compare(nfg.value, nf.value) <= 0 or compare(nfg.value, ng.value) <= 0
            else:
                assert compare(nfg.value, real_sum((nf.value, ng.value))) <= 0
        elif r <= q:
            assert compare(nfg.power, real_sum((nf.power, ng.power))) <= 0
        else:
            assert compare(real_pow(nfg.value, q), real_sum((real_pow(nf.value, q), real_pow(ng.value, q)))) <= 0


# ---- symmetric difference metric ----

def test_sym_diff_examples():
    A, B = IntervalSet.of((0, F(1, 2))), IntervalSet.of((F(1, 4), F(3, 4)))
    assert sym_diff_metric(LEB, A, B) == F(1, 2)
    assert sym_diff_metric(LEB, A, A) == 0
    mu = FAMeasure(((0, 0), (1, 3)))
    assert sym_diff_metric(mu, IntervalSet(), IntervalSet.full()) == 3


@given(grid_measures(), cell_sets(), cell_sets(), cell_sets())
def test_sym_diff_pseudometric(mu, a, b, c):
    A, B, C = map(to_set, (a, b, c))
    assert sym_diff_metric(mu, A, B) == cell_measure(mu, [x != y for x, y in zip(a, b)])
    assert sym_diff_metric(mu, A, C) <= sym_diff_metric(mu, A, B) + sym_diff_metric(mu, B, C)
    assert sym_diff_metric(mu, A & C, B & C) <= sym_diff_metric(mu, A, B)
    assert sym_diff_metric(mu, A, B) == sym_diff_metric(mu, B, A)


# ---- chain decomposition ----

def test_chain_decompose_examples():
    pieces = chain_decompose(LEB, IntervalSet.full(), F(3, 10))
    assert pieces == [IntervalSet.of((F(k, 4), F(k + 1, 4))) for k in range(4)]
    small = IntervalSet.of((0, F(1, 10)))
    assert chain_decompose(LEB, small, F(1, 2)) == [small]
    assert chain_decompose(LEB, IntervalSet(), F(1, 2)) == []


def test_chain_decompose_exact_multiple_stays_below_eps():
    pieces = chain_decompose(LEB, IntervalSet.full(), F(1, 4))
    assert all(LEB(A) < F(1, 4) for A in pieces)


def check_decomposition(mu, E, pieces, eps):
    union = IntervalSet()
    for A, B in itertools.combinations(pieces, 2):
        assert not (A & B)
    for A in pieces:
        assert mu(A) < eps
        union = union | A
    assert union == E


@given(grid_measures(), cell_sets(), st.fractions(min_value=F(1, 50), max_value=3, max_denominator=50))
def test_chain_decompose_round_trip(mu, e, eps):
    E = to_set(e)
    pieces = chain_decompose(mu, E, eps)
    check_decomposition(mu, E, pieces, eps)
    chain = chain_from_pieces(pieces)
    assert chain[0] == IntervalSet() and chain[-1] == E
    assert all(sym_diff_metric(mu, X, Y) < eps for X, Y in zip(chain, chain[1:]))
    check_decomposition(mu, E, pieces_from_chain(chain, E), eps)


@given(grid_measures(), st.lists(cell_sets(), min_size=1, max_size=8))
def test_converse_construction_from_arbitrary_chains(mu, steps):
    """Chains that wander outside E still give pieces bounded by the step distances."""
    chain = [IntervalSet()] + [to_set(s) for s in steps]
    E = chain[-1]
    pieces = pieces_from_chain(chain, E)
    assert len(pieces) == len(chain) - 1
    union = IntervalSet()
    for A, (X, Y) in zip(pieces, zip(chain, chain[1:])):
        assert mu(A) <= sym_diff_metric(mu, X, Y)
        assert not (union & A)
        union = union | A
    assert union == E


def test_pieces_from_chain_rejects_bad_endpoints():
    with pytest.raises(ValueError):
        pieces_from_chain([IntervalSet.full()], IntervalSet.full())


# ---- paths ----

def test_truncate_path_examples():
    f = SimpleFn.from_pieces([(0, F(1, 2), 3), (F(1, 2), 1, 1)])
    assert truncate_path(f, 1) == f
    assert truncate_path(f, 0) == SimpleFn()
    assert truncate_path(f, F(1, 4)) == SimpleFn.from_pieces([(0, F(1, 4), 3)])


def test_path_modulus_example():
    f = SimpleFn.from_pieces([(0, F(1, 2), 3), (F(1, 2), 1, 1)])
    res = path_modulus(LEB, f, F(1, 4), F(3, 4), 1)
    assert res.lhs == 1 and res.rhs == F(3, 2) and res.holds
    same = path_modulus(LEB, f, F(1, 3), F(1, 3), 2)
    assert same.lhs == 0 and same.holds


@given(grid_measures(), grid_simplefns(), st.fractions(min_value=0, max_value=1, max_denominator=40), st.fractions(min_value=0, max_value=1, max_denominator=40), st.sampled_from([F(1, 2), 1, 2, F(5, 2)]))
def test_path_modulus_bound(mu, fv, a, b, r):
    f, _ = fv
    t1, t2 = sorted((a, b))
    assert path_modulus(mu, f, t1, t2, r).holds
    diff = truncate_path(f, t2) - truncate_path(f, t1)
    assert diff.support().issubset(IntervalSet.of((t1, t2)))


# ---- a.e. equality ----

def test_ae_equal_examples():
    f = SimpleFn.from_pieces([(0, F(1, 2), 3), (F(1, 2), 1, 1)])
    flat = FAMeasure(((0, 0), (F(1, 2), 1), (F(3, 4), 1), (1, 2)))
    assert ae_equal(LEB, f, f)
    assert ae_equal(flat, f, f.restrict(~IntervalSet.of((F(1, 2), F(3, 4)))))
    assert not ae_equal(LEB, SimpleFn.indicator(IntervalSet.of((0, F(1, 2)))), SimpleFn())


@given(grid_measures(), grid_simplefns(), grid_simplefns())
def test_ae_equal_implies_equal_norms(mu, fv, gv):
    (f, _), (g, _) = fv, gv
    null = IntervalSet(tuple((a, b) for a, b in zip(mu.knots(), mu.knots()[1:]) if mu.F(a) == mu.F(b)))
    h = f.restrict(~null) + g.restrict(null)
    assert ae_equal(mu, f, h)
    for r in (F(1, 2), 1, 2, math.inf):
        assert compare(lr_norm_simple(mu, f, r).value, lr_norm_simple(mu, h, r).value) == 0


# ---- pushforward ----

def test_pushforward_examples():
    X = AtomicSpace((("a", F(1, 2)), ("b", F(1, 2))))
    phi = {"a": F(1, 4), "b": F(3, 4)}
    nu = pushforward(X, phi)
    assert nu(IntervalSet.of((0, F(1, 2)))) == F(1, 2)
    assert pushforward_check(X, phi, SimpleFn.indicator(IntervalSet.full())) == (1, 1)
    assert pushforward_check(X, phi, SimpleFn.indicator(IntervalSet.of((0, F(1, 2))), 3)) == (F(3, 2), F(3, 2))
    with pytest.raises(ValueError):
        pushforward(X, {"a": 1, "b": 0})


def test_pushforward_random_instances():
    rng = random.Random(21)
    for _ in range(200):
        atoms = tuple((f"x{i}", F(rng.randint(0, 9), rng.randint(1, 5))) for i in range(rng.randint(1, 8)))
        phi = {a: F(rng.randint(0, GRID - 1), GRID) for a, _ in atoms}
        vals = [rng.randint(-4, 4) for _ in range(GRID)]
        f = SimpleFn.from_pieces((F(k, GRID), F(k + 1, GRID), v) for k, v in enumerate(vals))
        lhs, rhs = pushforward_check(AtomicSpace(atoms), phi, f)
        assert lhs == rhs == sum(w * vals[int(phi[a] * GRID)] for a, w in atoms)


def test_parse_atoms():
    X, phi = parse_atoms("# atoms\na 1/2 1/4\nb 1/2 3/4\n")
    assert X.total() == 1 and phi == {"a": F(1, 4), "b": F(3, 4)}


# ---- simple function text format ----

def test_simplefn_text_round_trip():
    f = parse_simplefn("0 1/2\t3\n1/2 1\t1\n")
    assert f == SimpleFn.from_pieces([(0, F(1, 2), 3), (F(1, 2), 1, 1)])
    assert parse_simplefn(format_simplefn(f)) == f


@given(grid_vector_fns())
def test_vector_simplefn_round_trip(f):
    assert parse_simplefn(format_simplefn(f)) == f
