import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from nonarch.metric import DistMatrix

settings.register_profile("default", deadline=None)
settings.load_profile("default")

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    """Record a one-line PASS/FAIL verdict for the acceptance summary."""

    def _report(name: str, ok: bool, detail: str = "") -> None:
        line = f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else "")
        _ACCEPTANCE_LINES.append(line)
        print(line)

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def fractions(min_value=-10, max_value=10, max_denominator=12):
    return st.fractions(min_value=min_value, max_value=max_value, max_denominator=max_denominator)


positive_fractions = st.fractions(min_value=Fraction(1, 12), max_value=20, max_denominator=12).filter(
    lambda x: x > 0
)


@st.composite
def dist_matrices(draw, min_n=1, max_n=6):
    n = draw(st.integers(min_n, max_n))
    labels = [f"p{i}" for i in range(n)]
    d = [[Fraction(0)] * n for _ in range(n)]
    for i, j in itertools.combinations(range(n), 2):
        d[i][j] = d[j][i] = draw(positive_fractions)
    return DistMatrix(tuple(labels), tuple(map(tuple, d)))


def random_matrix(rng: random.Random, n: int, max_num=20, max_den=6) -> DistMatrix:
    """Random symmetric matrix with positive rational off-diagonal entries (not necessarily metric)."""
    d = [[Fraction(0)] * n for _ in range(n)]
    for i, j in itertools.combinations(range(n), 2):
        d[i][j] = d[j][i] = Fraction(rng.randint(1, max_num), rng.randint(1, max_den))
    return DistMatrix(tuple(f"x{i}" for i in range(n)), tuple(map(tuple, d)))


def random_points_matrix(rng: random.Random, n: int) -> DistMatrix:
    """Points on the rational line: a genuine metric."""
    xs = rng.sample(range(-50, 50), n)
    pts = {f"x{i}": Fraction(x, 3) for i, x in enumerate(xs)}
    return DistMatrix.from_points(pts, lambda a, b: abs(a - b))
