"""Step-size rules for the Frank-Wolfe update ``x+ = (1 - g) x + g v``.

Open-loop rules depend only on the iteration counter. The others look at the
current iterate: the short step needs the smoothness constant, the adaptive
rules estimate it on the fly by testing gradient inner products, and the
exact line search needs a quadratic objective.
"""
import math
from dataclasses import dataclass
from typing import List, NamedTuple, Optional

import numpy as np

from ._validation import check_positive, check_positive_int, check_nonnegative
from .exceptions import ContractViolation, NonAcceptanceError, WrongRuleError


@dataclass(frozen=True)
class AdaptiveParams:
    """Knobs of the adaptive smoothness search.

    Parameters
    ----------
    eta : float
        Shrink factor applied to the carried estimate at every call, ``0 < eta <= 1``.
    tau : float
        Escalation factor after a rejected estimate, ``tau > 1``.
    initial_estimate : float or None
        Seed estimate. ``None`` means: read a local curvature off the first
        step (see :func:`initial_smoothness_estimate`).
    max_doublings : int
        Number of escalations allowed before giving up.
    accept_tolerance : float
        Relative slack of the acceptance test, scaled by ``1 + ||g|| ||x - v||``.
    """

    eta: float = 0.9
    tau: float = 2.0
    initial_estimate: Optional[float] = None
    max_doublings: int = 64
    accept_tolerance: float = 1e-12

    def __post_init__(self):
        if not (0.0 < self.eta <= 1.0 < self.tau):
            raise ContractViolation(f"need 0 < eta <= 1 < tau, got eta={self.eta}, tau={self.tau}")
        check_positive_int(self.max_doublings, "max_doublings")
        check_nonnegative(self.accept_tolerance, "accept_tolerance")
        if self.initial_estimate is not None:
            check_positive(self.initial_estimate, "initial_estimate")


class AcceptanceProbe(NamedTuple):
    """One evaluation of an adaptive acceptance test at estimate ``M``."""

    M: float
    gamma: float
    lhs: float        # <grad f(x + gamma (v - x)), x - v>
    rhs: float        # 0 for the gradient test, gap / 2 for the simple test
    tolerance: float  # absolute slack actually granted
    accepted: bool


def short_step(gap, dist_sq, L, truncate=True):
    """``min{gap / (L dist_sq), 1}``; 0 when ``x == v``."""
    if dist_sq <= 0.0:
        return 0.0
    if L <= 0:
        raise ContractViolation("L must be positive")
    gamma = max(gap, 0.0) / (L * dist_sq)
    return min(gamma, 1.0) if truncate else gamma


def probe(obj, x, v, gradient_at_x, M, simple=False, accept_tolerance=1e-12):
    """Evaluate the acceptance test of an adaptive step at estimate ``M``.

    The gradient test accepts when ``<grad f(x+), x - v> >= 0``; the simple
    test requires ``>= <grad f(x), x - v> / 2`` instead.
    """
    d = x - v
    gap = float(gradient_at_x @ d)
    dist_sq = float(d @ d)
    gamma = short_step(gap, dist_sq, M)
    x_new = (1.0 - gamma) * x + gamma * v
    _, g_new = obj.value_and_gradient(x_new)
    lhs = float(g_new @ d)
    rhs = 0.5 * gap if simple else 0.0
    tol = accept_tolerance * (1.0 + np.linalg.norm(gradient_at_x) * math.sqrt(dist_sq))
    return AcceptanceProbe(M, gamma, lhs, rhs, tol, lhs >= rhs - tol)


def _adaptive_search(obj, x, v, gradient_at_x, params, L_prev, simple, trail=None):
    d = x - v
    gap = float(gradient_at_x @ d)
    dist_sq = float(d @ d)
    scale = 1.0 + np.linalg.norm(gradient_at_x) * math.sqrt(dist_sq)
    if dist_sq == 0.0 or gap <= params.accept_tolerance * scale:
        return L_prev, 0.0
    M = params.eta * L_prev
    for _ in range(params.max_doublings + 1):
        res = probe(obj, x, v, gradient_at_x, M, simple, params.accept_tolerance)
        if trail is not None:
            trail.append(res)
        if res.accepted:
            return M, res.gamma
        M *= params.tau
    raise NonAcceptanceError(
        f"adaptive step not accepted after {params.max_doublings} escalations "
        f"(last estimate {M / params.tau:.6g}); objective may be non-smooth or mis-scaled",
        last_estimate=M / params.tau)


def adaptive_step(obj, x, v, gradient_at_x, params, L_prev, trail=None):
    """Adaptive step with the gradient acceptance test.

    Starts from ``M = eta * L_prev`` and multiplies by ``tau`` until the
    short step for ``M`` lands at a point whose gradient still makes a
    nonnegative inner product with ``x - v``.

    Returns
    -------
    L_new : float
        The accepted estimate.
    gamma : float
        Step size in ``[0, 1]``.
    """
    return _adaptive_search(obj, x, v, gradient_at_x, params, L_prev, False, trail)


def adaptive_step_simple(obj, x, v, gradient_at_x, params, L_prev, trail=None):
    """Like :func:`adaptive_step` but accepts once half the gap survives.

    This test only certifies ``M`` up to a factor of two of the true
    smoothness constant.
    """
    return _adaptive_search(obj, x, v, gradient_at_x, params, L_prev, True, trail)


def exact_line_search_quadratic(obj, x, v, truncate=True):
    """Exact minimizer of ``f`` on the segment ``[x, v]`` for quadratic ``f``."""
    H = obj.hessian
    if H is None:
        raise ContractViolation("exact line search needs a quadratic objective")
    d = v - x
    _, g = obj.value_and_gradient(x)
    slope = float(g @ d)
    curv = float(d @ H @ d)
    if curv <= 0.0:
        return 1.0 if slope < 0 else 0.0
    gamma = -slope / curv
    return min(max(gamma, 0.0), 1.0) if truncate else gamma


def initial_smoothness_estimate(obj, x0, v0, floor=1e-6):
    """Local curvature ``<g(y) - g(x0), y - x0> / ||y - x0||^2`` with ``y`` near ``x0``."""
    y = x0 + 1e-3 * (v0 - x0)
    s = y - x0
    ss = float(s @ s)
    if ss == 0.0:
        return 1.0
    _, g0 = obj.value_and_gradient(x0)
    _, gy = obj.value_and_gradient(y)
    return max(float((gy - g0) @ s) / ss, floor)


class StepRule:
    """Base class for step-size rules.

    Subclasses set ``label`` (the CLI spelling) and implement either
    ``schedule(t)`` (open loop) or ``step(...)`` (data dependent).
    """

    label = ""
    data_dependent = False
    requires_convexity = False
    needs_smoothness = False

    @property
    def estimate(self):
        """Current smoothness estimate, if the rule keeps one."""
        return None

    def reset(self):
        """Forget run-specific state."""

    def schedule(self, t):
        raise WrongRuleError(f"{self.label} is data dependent and has no schedule")

    def step(self, t, obj, x, v, gradient, gap, dist_sq):
        return self.schedule(t)

    def __repr__(self):
        return f"{type(self).__name__}({self.label!r})"


class OpenLoop(StepRule):
    """``gamma_t = ell / (t + ell)``; ``ell = 2`` is the classic ``2 / (t + 2)``."""

    def __init__(self, ell=2):
        self.ell = check_positive_int(ell, "ell")
        self.label = "open2" if self.ell == 2 else f"open-ell:{self.ell}"

    def schedule(self, t):
        return self.ell / (t + self.ell)


class LogShift(StepRule):
    label = "log-shift"

    def schedule(self, t):
        lg = math.log(t + 1)
        return (2.0 + lg) / (t + 2.0 + lg)


class ConstantStep(StepRule):
    """Fixed step ``1 / sqrt(T + 1)`` for a horizon ``T``, or an explicit ``gamma``."""

    def __init__(self, T=None, gamma=None):
        if (T is None) == (gamma is None):
            raise ContractViolation("give exactly one of T or gamma")
        if T is not None:
            self.T = check_positive_int(T, "T")
            self.gamma = 1.0 / math.sqrt(self.T + 1)
            self.label = f"constant:{self.T}"
        else:
            self.T = None
            self.gamma = float(gamma)
            if not 0.0 <= self.gamma <= 1.0:
                raise ContractViolation("gamma must lie in [0, 1]")
            self.label = f"fixed:{self.gamma!r}"

    def schedule(self, t):
        return self.gamma


class AnytimeSqrt(StepRule):
    label = "anytime-sqrt"

    def schedule(self, t):
        return 1.0 / math.sqrt(t + 1)


class ShortStep(StepRule):
    data_dependent = True
    needs_smoothness = True

    def __init__(self, L):
        self.L = check_positive(L, "L")
        self.label = f"short:{self.L:g}"

    def step(self, t, obj, x, v, gradient, gap, dist_sq):
        return short_step(gap, dist_sq, self.L)


class LineSearch(StepRule):
    label = "linesearch"
    data_dependent = True
    requires_convexity = True

    def step(self, t, obj, x, v, gradient, gap, dist_sq):
        if dist_sq == 0.0:
            return 0.0
        return exact_line_search_quadratic(obj, x, v)


class AdaptiveRecord(NamedTuple):
    t: int
    probes: List[AcceptanceProbe]


class Adaptive(StepRule):
    """Adaptive short step carrying a smoothness estimate across iterations.

    ``history`` keeps every acceptance probe per iteration so callers can
    audit the accepted inequalities afterwards.
    """

    label = "adaptive"
    data_dependent = True
    requires_convexity = True
    simple = False

    def __init__(self, params=None):
        self.params = params or AdaptiveParams()
        self.reset()

    @property
    def estimate(self):
        return self._estimate

    def reset(self):
        self._estimate = self.params.initial_estimate
        self.history = []

    def step(self, t, obj, x, v, gradient, gap, dist_sq):
        if self._estimate is None:
            self._estimate = initial_smoothness_estimate(obj, x, v)
        trail = []
        search = adaptive_step_simple if self.simple else adaptive_step
        self._estimate, gamma = search(obj, x, v, gradient, self.params, self._estimate, trail)
        self.history.append(AdaptiveRecord(t, trail))
        return gamma


class AdaptiveSimple(Adaptive):
    label = "adaptive-simple"
    simple = True


def schedule_gamma(rule, t):
    """Step size of an open-loop rule at iteration ``t``."""
    if t < 0:
        raise ContractViolation("t must be nonnegative")
    return rule.schedule(t)


def parse_rule(text):
    """Build a rule from its CLI spelling, e.g. ``open2`` or ``short:2``."""
    name, _, arg = text.strip().partition(":")
    try:
        if name == "open2" and not arg:
            return OpenLoop(2)
        if name == "open-ell":
            return OpenLoop(int(arg))
        if name == "log-shift" and not arg:
            return LogShift()
        if name == "constant":
            return ConstantStep(T=int(arg))
        if name == "fixed":
            return ConstantStep(gamma=float(arg))
        if name == "anytime-sqrt" and not arg:
            return AnytimeSqrt()
        if name == "short":
            return ShortStep(float(arg))
        if name == "adaptive" and not arg:
            return Adaptive()
        if name == "adaptive-simple" and not arg:
            return AdaptiveSimple()
        if name == "linesearch" and not arg:
            return LineSearch()
    except ValueError as exc:
        raise ContractViolation(f"bad step rule {text!r}: {exc}") from exc
    raise ContractViolation(f"unknown step rule {text!r}")
