"""The Frank-Wolfe loop, its run trace and a scikit-learn style estimator."""
import copy
import csv
import io
import math
import time
from dataclasses import dataclass, field
from typing import Callable, List, NamedTuple, Optional

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_nonnegative, check_positive_int, check_vector
from .core import Objective
from .exceptions import ContractViolation, FeasibilityError, InputError
from .steps import OpenLoop, StepRule, parse_rule

CSV_HEADER = ("t", "f", "primal_gap", "fw_gap", "gamma", "l_est", "n_atoms", "elapsed_ns")

GAP_REACHED = "gap_reached"
ITERATION_LIMIT = "iteration_limit"
STATIONARY = "stationary"
CALLBACK = "callback"


def fw_gap(region, x, gradient):
    """Frank-Wolfe gap ``max_v <g, x - v>`` and the vertex attaining it."""
    v = region.lmo(gradient)
    return float(gradient @ (x - v)), v


class IterationState(NamedTuple):
    """What a callback sees at iteration ``t`` (before the step is taken)."""

    t: int
    x: np.ndarray
    value: float
    gradient: np.ndarray
    vertex: np.ndarray
    gap: float


@dataclass
class SolverConfig:
    """Run parameters.

    ``callback(state)`` is called once per iteration after the LMO; returning
    ``True`` stops the run with termination ``"callback"``.
    """

    max_iterations: int = 1000
    epsilon: float = 0.0
    step_rule: StepRule = field(default_factory=OpenLoop)
    record_active_set: bool = True
    feasibility_audit_tol: float = 1e-9
    record_iterates: bool = False
    callback: Optional[Callable[[IterationState], bool]] = None

    def __post_init__(self):
        check_positive_int(self.max_iterations, "max_iterations")
        check_nonnegative(self.epsilon, "epsilon")
        if isinstance(self.step_rule, str):
            self.step_rule = parse_rule(self.step_rule)


class ActiveSet:
    """Convex decomposition of the iterate over the vertices picked so far."""

    def __init__(self, vertex):
        v = np.array(vertex, dtype=np.float64)
        self._atoms = {v.tobytes(): [1.0, v]}

    def update(self, gamma, vertex):
        if gamma == 0.0:
            return
        keep = 1.0 - gamma
        for atom in self._atoms.values():
            atom[0] *= keep
        key = vertex.tobytes()
        if key in self._atoms:
            self._atoms[key][0] += gamma
        else:
            self._atoms[key] = [gamma, np.array(vertex, dtype=np.float64)]
        if keep == 0.0:
            self._atoms = {k: a for k, a in self._atoms.items() if a[0] > 0.0}

    def __len__(self):
        return sum(1 for w, _ in self._atoms.values() if w > 0.0)

    @property
    def weights(self):
        return np.array([w for w, _ in self._atoms.values() if w > 0.0])

    @property
    def vertices(self):
        return np.array([v for w, v in self._atoms.values() if w > 0.0])

    @property
    def atoms(self):
        return [(w, v.copy()) for w, v in self._atoms.values() if w > 0.0]

    def point(self):
        return self.weights @ self.vertices


class TraceRow(NamedTuple):
    t: int
    f: float
    primal_gap: Optional[float]
    fw_gap: float
    gamma: Optional[float]
    l_est: Optional[float]
    n_atoms: Optional[int]
    elapsed_ns: Optional[int]


@dataclass
class RunTrace:
    """Per-iteration record of a run.

    Row ``t`` describes iterate ``x_t``: its value, its Frank-Wolfe gap and
    the step ``gamma_t`` taken from it (empty on the final row).
    """

    rows: List[TraceRow]
    final_x: np.ndarray
    termination: str
    iterates: Optional[List[np.ndarray]] = None
    vertices: Optional[List[np.ndarray]] = None
    active_set: Optional[ActiveSet] = None
    step_rule: Optional[StepRule] = None
    f_star: Optional[float] = None

    def __len__(self):
        return len(self.rows)

    def column(self, name):
        vals = [getattr(r, name) for r in self.rows]
        return np.array([np.nan if v is None else v for v in vals], dtype=np.float64)

    @property
    def f_values(self):
        return self.column("f")

    @property
    def fw_gaps(self):
        return self.column("fw_gap")

    @property
    def gammas(self):
        return self.column("gamma")

    def to_csv(self, fh=None, timing=True):
        """Write the trace as CSV; returns the text when ``fh`` is None."""
        out = io.StringIO() if fh is None else fh
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in self.rows:
            rec = r._replace(elapsed_ns=r.elapsed_ns if timing else None)
            writer.writerow([_fmt(v) for v in rec])
        return out.getvalue() if fh is None else None

    @classmethod
    def from_csv(cls, fh):
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != CSV_HEADER:
            raise InputError(f"unexpected trace header {header!r}")
        rows = []
        for rec in reader:
            if not rec:
                continue
            t, f, pg, gap, gamma, lest, na, ns = rec
            rows.append(TraceRow(int(t), float(f), _opt(pg, float), float(gap),
                                 _opt(gamma, float), _opt(lest, float),
                                 _opt(na, int), _opt(ns, int)))
        if not rows:
            raise InputError("empty trace")
        return cls(rows=rows, final_x=None, termination="unknown")


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return "" if math.isnan(v) else repr(v)
    return str(v)


def _opt(text, conv):
    return conv(text) if text != "" else None


def running_min_gap(trace):
    """Prefix minima of the Frank-Wolfe gap column."""
    gaps = trace.fw_gaps if isinstance(trace, RunTrace) else np.asarray(trace, dtype=float)
    if gaps.size == 0:
        raise ContractViolation("empty trace")
    return np.minimum.accumulate(gaps)


def run(region, obj, x0, config=None, f_star=None):
    """Run Frank-Wolfe from ``x0``.

    Parameters
    ----------
    region : Region
    obj : Objective
    x0 : array-like
        Feasible starting point.
    config : SolverConfig, optional
    f_star : float, optional
        Optimal value; fills the ``primal_gap`` column when given.

    Returns
    -------
    RunTrace
    """
    config = config or SolverConfig()
    if obj.dim != region.dim:
        raise ContractViolation(f"objective dim {obj.dim} != region dim {region.dim}")
    x = check_vector(x0, region.dim, name="x0")
    tol = config.feasibility_audit_tol
    if not region.contains(x, tol):
        raise InputError("x0 is not feasible")
    rule = copy.deepcopy(config.step_rule)
    rule.reset()
    if rule.requires_convexity and not obj.is_convex:
        raise InputError(f"step rule {rule.label} requires a convex objective")

    active = ActiveSet(x) if config.record_active_set else None
    iterates = [x] if config.record_iterates else None
    vertices = [] if config.record_iterates else None
    rows = []
    start = time.perf_counter_ns()
    termination = ITERATION_LIMIT
    t = 0
    while True:
        value, g = obj.value_and_gradient(x)
        v = region._lmo(g)
        d = x - v
        gap = float(g @ d)
        if vertices is not None:
            vertices.append(v)
        pg = None if f_star is None else value - f_star
        n_atoms = len(active) if active is not None else None

        stop = None
        if config.callback is not None and config.callback(
                IterationState(t, x, value, g, v, gap)):
            stop = CALLBACK
        elif gap <= config.epsilon:
            stop = GAP_REACHED
        elif t >= config.max_iterations:
            stop = ITERATION_LIMIT
        if stop is not None:
            rows.append(TraceRow(t, value, pg, gap, None, rule.estimate, n_atoms,
                                 time.perf_counter_ns() - start))
            termination = stop
            break

        gamma = float(rule.step(t, obj, x, v, g, gap, float(d @ d)))
        rows.append(TraceRow(t, value, pg, gap, gamma, rule.estimate, n_atoms,
                             time.perf_counter_ns() - start))
        if gamma == 0.0:
            termination = STATIONARY
            break
        x = (1.0 - gamma) * x + gamma * v
        if not region._contains(x, tol):
            raise FeasibilityError(f"iterate {t + 1} left the feasible region")
        if active is not None:
            active.update(gamma, v)
        if iterates is not None:
            iterates.append(x)
        t += 1

    return RunTrace(rows=rows, final_x=x, termination=termination, iterates=iterates,
                    vertices=vertices, active_set=active, step_rule=rule, f_star=f_star)


class FrankWolfe(BaseEstimator):
    """Estimator-style front end for :func:`run`.

    Parameters
    ----------
    region : Region
        Feasible region (accessed only through its LMO).
    step : str or StepRule, default="open2"
        Step-size rule or its CLI spelling.
    max_iter : int, default=1000
    epsilon : float, default=0.0
        Stop once the Frank-Wolfe gap drops to this value.
    record_active_set : bool, default=True
    record_iterates : bool, default=False
    audit_tol : float, default=1e-9

    Attributes
    ----------
    x_ : ndarray
        Final iterate.
    trace_ : RunTrace
    n_iter_ : int
        Number of steps taken.
    termination_ : str
    """

    def __init__(self, region=None, step="open2", max_iter=1000, epsilon=0.0,
                 record_active_set=True, record_iterates=False, audit_tol=1e-9):
        self.region = region
        self.step = step
        self.max_iter = max_iter
        self.epsilon = epsilon
        self.record_active_set = record_active_set
        self.record_iterates = record_iterates
        self.audit_tol = audit_tol

    def _config(self, callback=None):
        rule = parse_rule(self.step) if isinstance(self.step, str) else self.step
        return SolverConfig(max_iterations=self.max_iter, epsilon=self.epsilon,
                            step_rule=rule, record_active_set=self.record_active_set,
                            feasibility_audit_tol=self.audit_tol,
                            record_iterates=self.record_iterates, callback=callback)

    def fit(self, objective, x0=None, f_star=None):
        """Minimize ``objective`` over the region.

        ``x0`` defaults to the LMO vertex for the gradient at the region's
        center.
        """
        if self.region is None:
            raise ContractViolation("region must be set")
        if not isinstance(objective, Objective):
            raise ContractViolation("fit expects an Objective")
        if x0 is None:
            _, g = objective.value_and_gradient(self.region.center())
            x0 = self.region.lmo(g)
        self.trace_ = run(self.region, objective, x0, self._config(), f_star=f_star)
        self.x_ = self.trace_.final_x
        self.n_iter_ = self.trace_.rows[-1].t
        self.termination_ = self.trace_.termination
        self.n_features_in_ = self.region.dim
        return self

    @property
    def active_set_(self):
        check_is_fitted(self, "trace_")
        return self.trace_.active_set

    def gap(self):
        """Frank-Wolfe gap at the final iterate."""
        check_is_fitted(self, "trace_")
        return self.trace_.rows[-1].fw_gap
