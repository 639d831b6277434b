"""Numerical audits of the inequalities behind Frank-Wolfe's guarantees.

Each ``check_*`` / ``certify_*`` function is pure: it inspects its inputs,
evaluates both sides of an inequality at every checked point and returns a
:class:`CertificateReport` listing the points where it fails.
"""
import json
import math
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional

import numpy as np

from .core import distance_squared
from .exceptions import ContractViolation, InputError
from .regions import Box, Simplex, box_dual_prices
from .solver import fw_gap, running_min_gap

DEFAULT_SEED = 0


class Violation(NamedTuple):
    location: str
    lhs: float
    rhs: float
    slack: float  # rhs - lhs, negative when violated


@dataclass
class CertificateReport:
    name: str
    checked_points: int = 0
    violations: List[Violation] = field(default_factory=list)
    warnings: List[Violation] = field(default_factory=list)
    seed: Optional[int] = None
    details: Dict[str, float] = field(default_factory=dict)

    @property
    def passed(self):
        return not self.violations

    def to_dict(self):
        d = {
            "name": self.name,
            "checked_points": self.checked_points,
            "passed": self.passed,
            "violations": [v._asdict() for v in self.violations],
        }
        if self.warnings:
            d["warnings"] = [v._asdict() for v in self.warnings]
        if self.seed is not None:
            d["seed"] = self.seed
        if self.details:
            d["details"] = dict(sorted(self.details.items()))
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


class _Checker:
    """Accumulates ``lhs <= rhs + tol`` checks into a report."""

    def __init__(self, report, tol):
        self.report = report
        self.tol = tol
        self.max_abs_slack = {}

    def le(self, location, lhs, rhs, tag=None, tol=None):
        tol = self.tol if tol is None else tol
        slack = float(rhs - lhs)
        if tag is not None:
            self.max_abs_slack[tag] = max(self.max_abs_slack.get(tag, 0.0), abs(slack))
        if slack < -tol:
            self.report.violations.append(Violation(location, float(lhs), float(rhs), slack))

    def finish(self):
        for tag, val in self.max_abs_slack.items():
            self.report.details[f"{tag}_max_abs_slack"] = val
        return self.report


def sample_pairs(region, n_pairs=100, seed=DEFAULT_SEED):
    """Deterministic feasible pairs ``(x, y)``, shape ``(n_pairs, 2, n)``."""
    rng = np.random.default_rng(seed)
    pts = region.sample(rng, 2 * n_pairs)
    return pts.reshape(n_pairs, 2, region.dim)


def _bregman(obj, x, y):
    """Returns f(x), f(y), grad f(x), grad f(y), and f(y) - f(x) - <g(x), y - x>."""
    fx, gx = obj.value_and_gradient(x)
    fy, gy = obj.value_and_gradient(y)
    return fx, fy, gx, gy, fy - fx - gx @ (y - x)


def check_convexity(obj, samples, tol=1e-9, seed=None):
    """Check ``f(y) - f(x) >= <g(x), y - x>`` (plus the ``mu`` form if declared)."""
    report = CertificateReport("convexity", seed=seed)
    chk = _Checker(report, tol)
    mu = obj.strong_convexity_mu
    for i, (x, y) in enumerate(samples):
        _, _, _, _, breg = _bregman(obj, x, y)
        chk.le(f"pair {i}", 0.0, breg, "convex")
        if mu is not None:
            d = y - x
            chk.le(f"pair {i} (strong convexity)", 0.5 * mu * (d @ d), breg, "strconvex")
        report.checked_points += 1
    return chk.finish()


def check_smoothness(obj, samples, tol=1e-9, seed=None):
    """Check the four smoothness inequalities at the declared ``L``.

    * ``f(y) - f(x) - <g(x), y - x> <= L/2 ||y - x||^2``
    * ``<g(y) - g(x), y - x> <= L ||y - x||^2``
    * ``<g(y) - g(x), y - x>^2 / (2 L ||y - x||^2) <= f(y) - f(x) - <g(x), y - x>``
    * ``||g(y) - g(x)||^2 <= 2 L (f(y) - f(x) - <g(x), y - x>)``

    The last two are only valid for convex objectives and are skipped otherwise.
    """
    L = obj.smoothness_L
    if L is None:
        raise ContractViolation("objective declares no smoothness constant")
    report = CertificateReport("smoothness", seed=seed)
    chk = _Checker(report, tol)
    for i, (x, y) in enumerate(samples):
        _, _, gx, gy, breg = _bregman(obj, x, y)
        d = y - x
        dd = float(d @ d)
        dg = gy - gx
        inner = float(dg @ d)
        chk.le(f"pair {i} (base)", breg, 0.5 * L * dd, "base")
        chk.le(f"pair {i} (gradient)", inner, L * dd, "gradient")
        if obj.is_convex:
            if dd > 0.0:
                chk.le(f"pair {i} (revisited)", inner ** 2 / (2.0 * L * dd), breg, "revisited")
            chk.le(f"pair {i} (gradient difference)", float(dg @ dg), 2.0 * L * breg,
                   "gradient_difference")
        report.checked_points += 1
    return chk.finish()


def check_first_order_optimality(region, obj, x, tol=1e-9):
    """True iff the Frank-Wolfe gap at ``x`` is at most ``tol``."""
    _, g = obj.value_and_gradient(np.asarray(x, dtype=np.float64))
    gap, _ = fw_gap(region, x, g)
    return gap <= tol


def certify_primal_rate(trace, L, D, f_star, rel_tol=1e-9):
    """``f(x_t) - f* <= 2 L D^2 / (t + 2)`` for every row with ``t >= 1``."""
    report = CertificateReport("primal_rate")
    chk = _Checker(report, 0.0)
    for r in trace.rows:
        if r.t < 1:
            continue
        bound = 2.0 * L * D * D / (r.t + 2)
        chk.le(f"t={r.t}", r.f - f_star, bound * (1.0 + rel_tol))
        report.checked_points += 1
    return chk.finish()


def certify_dual_rate(trace, L, D, warn_slack=0.05):
    """Running-minimum gap ``<= 6.75 L D^2 / (t + 2)``.

    Excess within ``warn_slack`` (relative) is reported as a warning only.
    """
    report = CertificateReport("dual_rate")
    running = running_min_gap(trace)
    for r, g in zip(trace.rows, running):
        bound = 6.75 * L * D * D / (r.t + 2)
        slack = bound - g
        if slack < 0:
            item = Violation(f"t={r.t}", float(g), bound, float(slack))
            if g <= bound * (1.0 + warn_slack):
                report.warnings.append(item)
            else:
                report.violations.append(item)
        report.checked_points += 1
    return report


def certify_nonconvex(trace, h0, L, D, T, variant="arithmetic", tol=1e-9):
    """Best gap over ``t = 0..T`` against the constant-step nonconvex bounds.

    ``arithmetic``: ``G_T <= max{2 h0, L D^2} / sqrt(T + 1)``.
    ``geometric``: additionally ``G_T <= sqrt(2 h0 L D^2 / (T + 1))``.
    Both variants also check the average gap against
    ``h0 / (gamma (T + 1)) + gamma L D^2 / 2`` for the recorded constant ``gamma``.
    """
    if variant not in ("arithmetic", "geometric"):
        raise ContractViolation(f"unknown variant {variant!r}")
    if len(trace.rows) < T + 1:
        raise InputError(f"trace has {len(trace.rows)} rows, need T + 1 = {T + 1}")
    report = CertificateReport(f"nonconvex_{variant}")
    chk = _Checker(report, tol)
    gaps = trace.fw_gaps[: T + 1]
    G_T = float(gaps.min())
    LD2 = L * D * D
    chk.le(f"G_{T} (max form)", G_T, max(2.0 * h0, LD2) / math.sqrt(T + 1))
    if variant == "geometric":
        chk.le(f"G_{T} (geometric mean)", G_T, math.sqrt(2.0 * h0 * LD2 / (T + 1)))
    gammas = [r.gamma for r in trace.rows[: T + 1] if r.gamma is not None]
    if gammas and max(gammas) - min(gammas) <= 1e-15 and gammas[0] > 0:
        gamma = gammas[0]
        chk.le(f"mean gap t<={T}", float(gaps.mean()), h0 / (gamma * (T + 1)) + gamma * LD2 / 2)
    report.checked_points = T + 1
    report.details["G_T"] = G_T
    return chk.finish()


def lower_bound_instance(n, shifted=False):
    """Simplex instance on which any LMO-based method needs ``t`` steps for ``1/(t+1)``.

    Returns ``(Simplex(n), objective, e_1)`` with objective ``||x||^2`` or,
    if ``shifted``, ``||x - (1/n, ..., 1/n)||^2`` (same gaps, shifted values).
    """
    if n < 2:
        raise ContractViolation("n must be at least 2")
    p = np.full(n, 1.0 / n) if shifted else np.zeros(n)
    x0 = np.zeros(n)
    x0[0] = 1.0
    return Simplex(n), distance_squared(p), x0


def check_lower_bound(trace, n, shifted=False, tol=1e-12):
    """``f(x_t) >= 1/(t+1)`` (minus ``1/n`` when shifted) for every ``t < n``."""
    report = CertificateReport("lower_bound")
    chk = _Checker(report, tol)
    offset = 1.0 / n if shifted else 0.0
    for r in trace.rows:
        if r.t >= n:
            break
        chk.le(f"t={r.t}", 1.0 / (r.t + 1) - offset, r.f)
        report.checked_points += 1
    return chk.finish()


def certify_fixed_lower(trace, region, obj, x_star, tol=1e-9):
    """``f(x_t) - f* >= prod_{tau=1}^{t-1} (1 - gamma_tau) <grad f(x*), x_1 - x*>``."""
    if trace.iterates is None or len(trace.iterates) < 2:
        report = CertificateReport("fixed_lower")
        return report
    x_star = np.asarray(x_star, dtype=np.float64)
    f_star, g_star = obj.value_and_gradient(x_star)
    base = float(g_star @ (trace.iterates[1] - x_star))
    report = CertificateReport("fixed_lower")
    report.details["base"] = base
    chk = _Checker(report, tol)
    prod = 1.0
    for r in trace.rows[1:]:
        chk.le(f"t={r.t}", prod * base, r.f - f_star)
        report.checked_points += 1
        if r.gamma is not None:
            prod *= 1.0 - r.gamma
    return chk.finish()


def certify_dual_prices(region, obj, x, tol=1e-10):
    """Box dual prices: ``g = -lambda A``, ``<g, v> = -<lambda, b>``, gap = complementarity."""
    if not isinstance(region, Box):
        raise ContractViolation("dual-price certificate needs a box region")
    x = np.asarray(x, dtype=np.float64)
    _, g = obj.value_and_gradient(x)
    prices = box_dual_prices(region, g)
    gap, v = fw_gap(region, x, g)
    report = CertificateReport("dual_prices")
    chk = _Checker(report, tol)
    resid = float(np.abs(g + prices.lam @ prices.A).max())
    chk.le("stationarity |g + lambda A|_inf", resid, 0.0)
    strong = abs(float(g @ v) + float(prices.lam @ prices.b))
    chk.le("|<g, v> + <lambda, b>|", strong, 0.0)
    comp = abs(gap - prices.complementarity_gap(x))
    chk.le("|fw_gap - <lambda, b - A x>|", comp, 0.0)
    if float(prices.lam.min()) < 0:
        report.violations.append(Violation("lambda >= 0", float(prices.lam.min()), 0.0,
                                           float(prices.lam.min())))
    report.checked_points = 1
    report.details["fw_gap"] = gap
    return chk.finish()


def _require_iterates(trace):
    if trace.iterates is None or trace.vertices is None:
        raise ContractViolation("trace was recorded without iterates")


def certify_step_progress(trace, L, tol=1e-9):
    """Every step: ``f(x_t) - f(x_{t+1}) >= g_t gap_t - g_t^2 L/2 ||x_t - v_t||^2``."""
    _require_iterates(trace)
    report = CertificateReport("step_progress")
    chk = _Checker(report, tol)
    rows = trace.rows
    for t in range(len(trace.iterates) - 1):
        gamma = rows[t].gamma
        d = trace.iterates[t] - trace.vertices[t]
        rhs = gamma * rows[t].fw_gap - 0.5 * gamma * gamma * L * float(d @ d)
        chk.le(f"t={t}", rhs, rows[t].f - rows[t + 1].f)
        report.checked_points += 1
    return chk.finish()


def certify_monotone(trace, tol=1e-9):
    """``f(x_{t+1}) <= f(x_t)`` along the trace."""
    report = CertificateReport("monotone")
    chk = _Checker(report, tol)
    f = trace.f_values
    for t in range(len(f) - 1):
        chk.le(f"t={t}", f[t + 1], f[t])
        report.checked_points += 1
    return chk.finish()


def certify_contraction(trace, L, D, f_star, tol=1e-9):
    """``h_{t+1} <= (1 - gamma_t) h_t + gamma_t^2 L D^2 / 2`` with ``h_t = f(x_t) - f*``."""
    report = CertificateReport("contraction")
    chk = _Checker(report, tol)
    rows = trace.rows
    for t in range(len(rows) - 1):
        g = rows[t].gamma
        h, h_next = rows[t].f - f_star, rows[t + 1].f - f_star
        chk.le(f"t={t}", h_next, (1.0 - g) * h + 0.5 * g * g * L * D * D)
        report.checked_points += 1
    return chk.finish()


def certify_gap_chain(trace, obj, x_star, tol=1e-9):
    """``primal gap <= <g(x_t), x_t - x*> <= Frank-Wolfe gap`` at every iterate."""
    _require_iterates(trace)
    report = CertificateReport("gap_chain")
    chk = _Checker(report, tol)
    x_star = np.asarray(x_star, dtype=np.float64)
    f_star = obj.value(x_star)
    for t, x in enumerate(trace.iterates):
        fx, g = obj.value_and_gradient(x)
        dual = float(g @ (x - x_star))
        chk.le(f"t={t} primal<=dual", fx - f_star, dual)
        chk.le(f"t={t} dual<=fw", dual, trace.rows[t].fw_gap)
        report.checked_points += 1
    return chk.finish()


def certify_adaptive_steps(trace, obj, L=None, tol=1e-9):
    """Audit the probes recorded by an adaptive rule.

    Checks that every accepted probe satisfies its test as evaluated, that
    the step taken is the accepted one, and the matching progress bound:
    ``(gap^2 + lhs^2) / (2 max{L, M} ||x - v||^2)`` for the gradient test
    (needs ``L``, and ``gamma < 1``), ``gamma gap / 2`` for the simple test.
    """
    _require_iterates(trace)
    rule = trace.step_rule
    if not hasattr(rule, "history"):
        raise ContractViolation("trace was not produced by an adaptive rule")
    report = CertificateReport(f"{rule.label}_steps")
    chk = _Checker(report, tol)
    rows = trace.rows
    for rec in rule.history:
        t = rec.t
        if not rec.probes:
            continue
        acc = rec.probes[-1]
        if not acc.accepted:
            report.violations.append(Violation(f"t={t} not accepted", acc.lhs, acc.rhs, -1.0))
            continue
        chk.le(f"t={t} test", acc.rhs - acc.tolerance, acc.lhs, tol=0.0)
        if rows[t].gamma != acc.gamma:
            report.violations.append(Violation(f"t={t} gamma", rows[t].gamma, acc.gamma, -1.0))
        if t + 1 >= len(rows):
            continue
        progress = rows[t].f - rows[t + 1].f
        gap = rows[t].fw_gap
        d = trace.iterates[t] - trace.vertices[t]
        dd = float(d @ d)
        if rule.simple:
            chk.le(f"t={t} progress", acc.gamma * gap / 2.0, progress)
        elif L is not None and acc.gamma < 1.0:
            chk.le(f"t={t} progress", (gap ** 2 + acc.lhs ** 2) / (2.0 * max(L, acc.M) * dd),
                   progress)
        elif L is not None and acc.M >= L:
            chk.le(f"t={t} progress (truncated)", gap / 2.0, progress)
        report.checked_points += 1
    return chk.finish()
