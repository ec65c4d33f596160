"""Exact arithmetic for absolute values, p-adics, ultrametrics, l^r norms and simple functions."""

from .exact import Magnitude, Real, as_fraction, compare
from .scalar_fields import AbsoluteValue, Padic, Power, RealStd, Trivial, parse_absval
from .padic import PadicApprox, from_rational
from .metric import DistMatrix, parse_distmatrix
from .lr import FiniteVec, NormedSpace
from .measure import FAMeasure, IntervalSet, SimpleFn

__version__ = "0.1.0"
