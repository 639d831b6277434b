"""Sparse convex decompositions and separating hyperplanes via Frank-Wolfe.

Both applications minimize ``||x - target||^2`` over the region. Because the
optimal value is known (0 for members), the primal gap can be observed
directly and used to stop.
"""
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ._validation import check_positive, check_vector
from .core import distance_squared
from .exceptions import ContractViolation, InputError, PartialResultError, UndecidedError
from .solver import CALLBACK, RunTrace, SolverConfig, run
from .steps import ShortStep, parse_rule


@dataclass
class Decomposition:
    """Convex combination of extreme points approximating a target."""

    weights: np.ndarray
    vertices: np.ndarray
    approximant: np.ndarray
    error: float
    iterations: int
    trace: Optional[RunTrace] = field(default=None, repr=False, compare=False)

    @property
    def cardinality(self):
        return int(np.count_nonzero(self.weights > 0))

    @property
    def atoms(self) -> List[Tuple[float, np.ndarray]]:
        return list(zip(self.weights.tolist(), self.vertices))

    def to_dict(self):
        return {
            "kind": "decomposition",
            "weights": self.weights.tolist(),
            "vertices": self.vertices.tolist(),
            "approximant": self.approximant.tolist(),
            "error": self.error,
            "cardinality": self.cardinality,
            "iterations": self.iterations,
        }


@dataclass
class MembershipWitness(Decomposition):
    """The point lies within ``epsilon`` of the region; here is the evidence."""

    def to_dict(self):
        d = super().to_dict()
        d["kind"] = "membership"
        return d


@dataclass
class Hyperplane:
    """Valid inequality ``<normal, x> >= offset`` for every ``x`` in the region."""

    normal: np.ndarray
    offset: float
    point_value: float  # <normal, point>, strictly below offset when separating
    iterations: int
    trace: Optional[RunTrace] = field(default=None, repr=False, compare=False)

    def separates(self, point):
        return float(self.normal @ np.asarray(point, dtype=float)) < self.offset

    def to_dict(self):
        return {
            "kind": "hyperplane",
            "normal": self.normal.tolist(),
            "offset": self.offset,
            "point_value": self.point_value,
            "iterations": self.iterations,
        }


def _seed_vertex(region, target):
    # vertex most aligned with target - center
    return region.lmo(-(target - region.center()))


def _decomposition(trace, target, cls=Decomposition, keep_trace=False):
    active = trace.active_set
    x = trace.final_x
    return cls(weights=active.weights, vertices=active.vertices, approximant=x.copy(),
               error=float(np.linalg.norm(x - target)), iterations=trace.rows[-1].t,
               trace=trace if keep_trace else None)


def _rule(step):
    if step is None:
        return ShortStep(2.0)
    return parse_rule(step) if isinstance(step, str) else step


def approx_caratheodory(region, target, epsilon, max_iter=None, step=None, record_iterates=False):
    """Sparse convex combination of vertices within ``epsilon`` of ``target``.

    Runs Frank-Wolfe on ``||x - target||^2`` until the value drops to
    ``epsilon^2``. With the default short step the number of atoms is at
    most ``ceil(4 D^2 / epsilon^2) + 1``. ``record_iterates=True`` attaches
    the full run trace (with iterates) as ``result.trace`` for auditing.

    Raises
    ------
    InputError
        ``target`` is not in the region.
    PartialResultError
        ``max_iter`` ran out first; ``exc.result`` holds the best decomposition.
    """
    target = check_vector(target, region.dim, name="target")
    epsilon = check_positive(epsilon, "epsilon")
    if not region.contains(target, 1e-9):
        raise InputError("target is not in the region")
    if max_iter is None:
        max_iter = math.ceil(4.0 * region.diameter() ** 2 / epsilon ** 2) + 1
    eps2 = epsilon * epsilon
    cfg = SolverConfig(max_iterations=max_iter, step_rule=_rule(step),
                       record_iterates=record_iterates, callback=lambda s: s.value <= eps2)
    trace = run(region, distance_squared(target), _seed_vertex(region, target), cfg, f_star=0.0)
    dec = _decomposition(trace, target, keep_trace=record_iterates)
    if trace.termination != CALLBACK and dec.error > epsilon:
        raise PartialResultError(
            f"error {dec.error:.3g} > {epsilon} after {dec.iterations} iterations", result=dec)
    return dec


def separate(region, point, epsilon, max_iter=None, step=None, record_iterates=False):
    """Separating hyperplane for ``point``, or a witness that it is ``epsilon``-close.

    Each iteration tests whether the valid inequality
    ``<g_t, x> >= min_v <g_t, v>`` induced by the current gradient cuts off
    ``point``; that test runs before the closeness test.

    Returns
    -------
    Hyperplane or MembershipWitness

    Raises
    ------
    UndecidedError
        Neither outcome within ``max_iter`` (default ``ceil(13.5 D^2 / epsilon^2)``).
    """
    point = check_vector(point, region.dim, name="point")
    epsilon = check_positive(epsilon, "epsilon")
    if max_iter is None:
        max_iter = max(1, math.ceil(13.5 * region.diameter() ** 2 / epsilon ** 2))
    eps2 = epsilon * epsilon
    found = {}

    def test(state):
        offset = float(state.gradient @ state.vertex)
        at_point = float(state.gradient @ point)
        if offset > at_point:
            found["h"] = Hyperplane(state.gradient.copy(), offset, at_point, state.t)
            return True
        return state.value <= eps2

    cfg = SolverConfig(max_iterations=max_iter, step_rule=_rule(step),
                       record_iterates=record_iterates, callback=test)
    trace = run(region, distance_squared(point), _seed_vertex(region, point), cfg, f_star=0.0)
    if "h" in found:
        if record_iterates:
            found["h"].trace = trace
        return found["h"]
    if trace.termination == CALLBACK:
        return _decomposition(trace, point, MembershipWitness, keep_trace=record_iterates)
    dist = math.sqrt(max(trace.rows[-1].f, 0.0))
    raise UndecidedError(
        f"no decision after {trace.rows[-1].t} iterations (distance estimate {dist:.6g})",
        distance_estimate=dist, result=_decomposition(trace, point, MembershipWitness))


class CaratheodoryDecomposer(TransformerMixin, BaseEstimator):
    """Replace each row of ``X`` by a sparse convex combination of region vertices.

    Parameters
    ----------
    region : Region
    epsilon : float, default=0.1
        Target Euclidean accuracy.
    max_iter : int, optional
    step : str or StepRule, optional
        Defaults to the short step with ``L = 2``.
    """

    def __init__(self, region=None, epsilon=0.1, max_iter=None, step=None):
        self.region = region
        self.epsilon = epsilon
        self.max_iter = max_iter
        self.step = step

    def fit(self, X=None, y=None):
        if self.region is None:
            raise ContractViolation("region must be set")
        check_positive(self.epsilon, "epsilon")
        self.n_features_in_ = self.region.dim
        return self

    def decompose(self, x):
        check_is_fitted(self, "n_features_in_")
        return approx_caratheodory(self.region, x, self.epsilon, self.max_iter, self.step)

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_array(X, ensure_2d=True)
        if X.shape[1] != self.n_features_in_:
            raise ContractViolation(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return np.vstack([self.decompose(row).approximant for row in X])


class SeparationOracle(BaseEstimator):
    """Membership classifier backed by Frank-Wolfe separation.

    ``predict`` returns ``True`` for rows within ``epsilon`` of the region and
    ``False`` for rows cut off by a separating hyperplane.
    """

    def __init__(self, region=None, epsilon=0.1, max_iter=None, step=None):
        self.region = region
        self.epsilon = epsilon
        self.max_iter = max_iter
        self.step = step

    def fit(self, X=None, y=None):
        if self.region is None:
            raise ContractViolation("region must be set")
        check_positive(self.epsilon, "epsilon")
        self.n_features_in_ = self.region.dim
        return self

    def separate(self, x):
        check_is_fitted(self, "n_features_in_")
        return separate(self.region, x, self.epsilon, self.max_iter, self.step)

    def predict(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_array(X, ensure_2d=True)
        return np.array([isinstance(self.separate(row), MembershipWitness) for row in X])
