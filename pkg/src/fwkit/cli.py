"""Batch experiment driver.

Subcommands::

    fwkit solve SPEC --step open2 --max-iter 1000 --out trace.csv
    fwkit compare SPEC --rules open2,short:2,adaptive --out wide.csv
    fwkit certify SPEC TRACE --which primal-rate,dual-rate
    fwkit caratheodory --region simplex:100 --target uniform --epsilon 0.1
    fwkit separate --region simplex:2 --point 1,1 --epsilon 0.1
    fwkit lowerbound --n 10 --out spec.json

SPEC is a JSON problem file or one of the built-ins ``builtin:lowerbound:<n>``,
``builtin:lowerbound-shifted:<n>`` and ``builtin:ksparse[:n:K:tau]``.
"""
import argparse
import concurrent.futures
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile

import numpy as np

from . import certify as cert
from .apps import approx_caratheodory, separate
from .core import distance_squared, quadratic
from .exceptions import FWError, PartialResultError, UndecidedError
from .regions import region_from_dict
from .solver import RunTrace, SolverConfig, run
from .steps import parse_rule

log = logging.getLogger("fwkit")

EXIT_OK, EXIT_FAILED, EXIT_BAD_INPUT, EXIT_SOLVER, EXIT_UNDECIDED = 0, 1, 2, 3, 4
MAX_DIM = 10_000


class SpecError(Exception):
    pass


class Problem:
    """Parsed problem file: region, objective, start point, optional optimum."""

    def __init__(self, region, objective, x0, f_star=None, x_star=None, raw=None):
        self.region = region
        self.objective = objective
        self.x0 = x0
        self.f_star = f_star
        self.x_star = x_star
        self.raw = raw


def _vector_field(value, n, rng, region, name):
    if isinstance(value, str):
        if value in ("zero", "zeros", "origin"):
            return np.zeros(n)
        if value == "uniform":
            return np.full(n, 1.0 / n)
        if value == "center":
            return region.center()
        if value == "random":
            return rng.standard_normal(n)
        raise SpecError(f"unknown {name} shorthand {value!r}")
    arr = np.asarray(value, dtype=float)
    if arr.shape != (n,):
        raise SpecError(f"{name} has shape {arr.shape}, expected ({n},)")
    return arr


def _objective_from_dict(d, region, rng):
    n = region.dim
    kind = d.get("kind")
    if kind == "distance_squared":
        obj = distance_squared(_vector_field(d.get("p", "zero"), n, rng, region, "p"))
    elif kind == "quadratic":
        Q = np.asarray(d["Q"], dtype=float)
        if Q.shape != (n, n):
            raise SpecError(f"Q has shape {Q.shape}, expected ({n}, {n})")
        b = _vector_field(d.get("b", "zero"), n, rng, region, "b")
        obj = quadratic(Q, b, constant=d.get("constant", 0.0), is_convex=d.get("is_convex"))
    else:
        raise SpecError(f"unsupported objective kind {kind!r}")
    if "L" in d or "mu" in d:
        mu = d.get("mu", obj.strong_convexity_mu)
        L = d.get("L", obj.smoothness_L)
        if mu is not None and L is not None and mu > L:
            mu = None
        obj = obj.with_constants(L, mu)
    return obj


def _builtin(name, rng):
    parts = name.split(":")[1:]
    if parts[0] in ("lowerbound", "lowerbound-shifted"):
        n = int(parts[1]) if len(parts) > 1 else 10
        return lowerbound_spec(n, shifted=parts[0] == "lowerbound-shifted")
    if parts[0] == "ksparse":
        n, K, tau = 100, 10, 1.0
        if len(parts) > 1:
            n, K, tau = int(parts[1]), int(parts[2]), float(parts[3])
        return {"region": {"kind": "ksparse", "n": n, "K": K, "tau": tau},
                "objective": {"kind": "distance_squared",
                              "p": rng.standard_normal(n).tolist()},
                "x0": "lmo-seed",
                "note": "reconstructed default instance: distance to a random point"}
    raise SpecError(f"unknown built-in spec {name!r}")


def lowerbound_spec(n, shifted=False):
    p = [1.0 / n] * n if shifted else [0.0] * n
    return {"region": {"kind": "simplex", "n": n},
            "objective": {"kind": "distance_squared", "p": p},
            "x0": {"vertex_index": 0},
            "f_star": 0.0 if shifted else 1.0 / n,
            "x_star": [1.0 / n] * n}


def load_problem(path, seed):
    rng = np.random.default_rng(seed)
    try:
        if path.startswith("builtin:"):
            raw = _builtin(path, rng)
        else:
            with open(path) as fh:
                raw = json.load(fh)
        region = region_from_dict(raw["region"])
        if region.dim > MAX_DIM:
            raise SpecError(f"dimension {region.dim} exceeds the CLI cap {MAX_DIM}")
        obj = _objective_from_dict(raw["objective"], region, rng)
        x0 = raw.get("x0", "lmo-seed")
        if x0 == "lmo-seed":
            _, g = obj.value_and_gradient(region.center())
            x0 = region.lmo(g)
        elif isinstance(x0, dict) and "vertex_index" in x0:
            x0 = region.vertices()[int(x0["vertex_index"])]
        else:
            x0 = _vector_field(x0, region.dim, rng, region, "x0")
        x_star = raw.get("x_star")
        if x_star is not None:
            x_star = _vector_field(x_star, region.dim, rng, region, "x_star")
        return Problem(region, obj, np.asarray(x0, dtype=float), raw.get("f_star"), x_star, raw)
    except SpecError:
        raise
    except (OSError, KeyError, TypeError, ValueError, FWError) as exc:
        raise SpecError(f"cannot load problem {path!r}: {exc}") from exc


def _atomic_write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".fwkit-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json(obj):
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _solve(problem, rule, max_iter, epsilon, record_iterates=False):
    cfg = SolverConfig(max_iterations=max_iter, epsilon=epsilon, step_rule=rule,
                       record_iterates=record_iterates)
    return run(problem.region, problem.objective, problem.x0, cfg, f_star=problem.f_star)


def cmd_solve(args):
    problem = load_problem(args.spec, args.seed)
    rule = parse_rule(args.step)
    trace = _solve(problem, rule, args.max_iter, args.epsilon)
    _atomic_write(args.out, trace.to_csv(timing=args.timing))
    last = trace.rows[-1]
    log.info("termination=%s t=%d f=%.12g fw_gap=%.6g", trace.termination, last.t, last.f, last.fw_gap)
    return EXIT_OK


def _wide_csv(labels, traces):
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    header = ["t"]
    for lab in labels:
        header += [f"{lab}:f", f"{lab}:primal_gap", f"{lab}:fw_gap"]
    w.writerow(header)
    length = max(len(tr.rows) for tr in traces)
    for t in range(length):
        rec = [str(t)]
        for tr in traces:
            if t < len(tr.rows):
                r = tr.rows[t]
                rec += [repr(r.f), "" if r.primal_gap is None else repr(r.primal_gap), repr(r.fw_gap)]
            else:
                rec += ["", "", ""]
        w.writerow(rec)
    return out.getvalue()


def cmd_compare(args):
    problem = load_problem(args.spec, args.seed)
    labels = [s.strip() for s in args.rules.split(",") if s.strip()]
    rules = [parse_rule(s) for s in labels]
    if len(rules) == 1:
        trace = _solve(problem, rules[0], args.max_iter, args.epsilon)
        _atomic_write(args.out, trace.to_csv(timing=args.timing))
        return EXIT_OK
    with concurrent.futures.ThreadPoolExecutor(max_workers=args.jobs) as pool:
        futures = [pool.submit(_solve, problem, r, args.max_iter, args.epsilon) for r in rules]
        traces = [f.result() for f in futures]
    _atomic_write(args.out, _wide_csv(labels, traces))
    return EXIT_OK


CERTIFICATES = ("convexity", "smoothness", "primal-rate", "dual-rate", "lower-bound",
                "nonconvex", "optimality")


def cmd_certify(args):
    problem = load_problem(args.spec, args.seed)
    with open(args.trace) as fh:
        try:
            trace = RunTrace.from_csv(fh)
        except (ValueError, FWError) as exc:
            raise SpecError(f"bad trace: {exc}") from exc
    f0 = problem.objective.value(problem.x0)
    if not math.isclose(trace.rows[0].f, f0, rel_tol=1e-9, abs_tol=1e-12):
        raise SpecError(f"trace does not match spec: f(x0)={f0!r}, trace t=0 has {trace.rows[0].f!r}")
    which = [w.strip() for w in args.which.split(",") if w.strip()]
    obj, region = problem.objective, problem.region
    L, D = obj.smoothness_L, region.diameter()
    reports = []
    for name in which:
        if name not in CERTIFICATES:
            raise SpecError(f"unknown certificate {name!r}; choose from {', '.join(CERTIFICATES)}")
        if name in ("primal-rate", "nonconvex") and problem.f_star is None:
            raise SpecError(f"{name} needs f_star in the spec")
        if name == "convexity":
            reports.append(cert.check_convexity(obj, cert.sample_pairs(region, args.pairs, args.seed),
                                                seed=args.seed))
        elif name == "smoothness":
            reports.append(cert.check_smoothness(obj, cert.sample_pairs(region, args.pairs, args.seed),
                                                 seed=args.seed))
        elif name == "primal-rate":
            reports.append(cert.certify_primal_rate(trace, L, D, problem.f_star))
        elif name == "dual-rate":
            reports.append(cert.certify_dual_rate(trace, L, D))
        elif name == "lower-bound":
            if region.kind != "simplex":
                raise SpecError("lower-bound certificate needs the simplex instance")
            shifted = bool(np.allclose(obj.p, 1.0 / region.dim)) if obj.p is not None else False
            reports.append(cert.check_lower_bound(trace, region.dim, shifted=shifted))
        elif name == "nonconvex":
            T = trace.rows[-1].t
            h0 = f0 - problem.f_star
            reports.append(cert.certify_nonconvex(trace, h0, L, D, T))
        elif name == "optimality":
            if problem.x_star is None:
                raise SpecError("optimality needs x_star in the spec")
            ok = cert.check_first_order_optimality(region, obj, problem.x_star, args.tol)
            rep = cert.CertificateReport("optimality", checked_points=1)
            if not ok:
                rep.violations.append(cert.Violation("x_star", float("nan"), args.tol, float("nan")))
            reports.append(rep)
    bundle = {"reports": [r.to_dict() for r in reports],
              "passed": all(r.passed for r in reports)}
    _atomic_write(args.out, _json(bundle))
    return EXIT_OK if bundle["passed"] else EXIT_FAILED


def _parse_region(text):
    parts = text.split(":")
    kind, nums = parts[0], parts[1:]
    try:
        if kind == "simplex":
            d = {"n": int(nums[0])}
        elif kind == "box":
            d = {"n": int(nums[0]), "lo": float(nums[1]), "hi": float(nums[2])}
        elif kind == "ksparse":
            d = {"n": int(nums[0]), "K": int(nums[1]), "tau": float(nums[2])}
        elif kind in ("l1ball", "l2ball"):
            d = {"n": int(nums[0]), "r": float(nums[1])}
        else:
            raise SpecError(f"unknown region {kind!r}")
    except (IndexError, ValueError) as exc:
        raise SpecError(f"bad region {text!r}") from exc
    d["kind"] = kind
    return region_from_dict(d)


def _parse_point(text, region, rng):
    if text == "uniform":
        return region.center()
    if text == "random":
        return region.sample(rng, 1)[0]
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError as exc:
        raise SpecError(f"bad point {text!r}") from exc


def _region_and_point(args, flag):
    rng = np.random.default_rng(args.seed)
    if args.spec:
        problem = load_problem(args.spec, args.seed)
        region = problem.region
    else:
        if not args.region:
            raise SpecError("give --region or --spec")
        region = _parse_region(args.region)
    value = getattr(args, flag)
    if value is None:
        if args.spec and problem.objective.p is not None:
            return region, np.array(problem.objective.p)
        raise SpecError(f"give --{flag}")
    point = _parse_point(value, region, rng)
    if point.shape != (region.dim,):
        raise SpecError(f"--{flag} has {point.size} coordinates, region has {region.dim}")
    return region, point


def cmd_caratheodory(args):
    region, target = _region_and_point(args, "target")
    step = parse_rule(args.step) if args.step else None
    try:
        dec = approx_caratheodory(region, target, args.epsilon, args.max_iter, step)
    except PartialResultError as exc:
        _atomic_write(args.out, _json({"error": str(exc), **exc.result.to_dict()}))
        return EXIT_SOLVER
    _atomic_write(args.out, _json(dec.to_dict()))
    return EXIT_OK


def cmd_separate(args):
    region, point = _region_and_point(args, "point")
    step = parse_rule(args.step) if args.step else None
    try:
        res = separate(region, point, args.epsilon, args.max_iter, step)
    except UndecidedError as exc:
        _atomic_write(args.out, _json({"kind": "undecided", "error": str(exc),
                                       "distance_estimate": exc.distance_estimate}))
        return EXIT_UNDECIDED
    _atomic_write(args.out, _json(res.to_dict()))
    return EXIT_OK


def cmd_lowerbound(args):
    spec = lowerbound_spec(args.n, shifted=args.shifted)
    _atomic_write(args.out, _json(spec))
    return EXIT_OK


def _default_seed():
    try:
        return int(os.environ.get("FWKIT_SEED", 42))
    except ValueError:
        return 42


def build_parser():
    parser = argparse.ArgumentParser(prog="fwkit", description="Frank-Wolfe experiment runner")
    parser.add_argument("--seed", type=int, default=_default_seed(),
                        help="seed for randomized constructions (env FWKIT_SEED, default 42)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run Frank-Wolfe and write a CSV trace")
    p.add_argument("spec")
    p.add_argument("--step", default="open2")
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--out", default="-")
    p.add_argument("--timing", action="store_true", help="fill the elapsed_ns column")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("compare", help="run several step rules on one problem")
    p.add_argument("spec")
    p.add_argument("--rules", required=True, help="comma-separated rule list")
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--jobs", type=int, default=4)
    p.add_argument("--out", default="-")
    p.add_argument("--timing", action="store_true")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("certify", help="audit a trace against the convergence guarantees")
    p.add_argument("spec")
    p.add_argument("trace")
    p.add_argument("--which", default="primal-rate,dual-rate")
    p.add_argument("--pairs", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_certify)

    for name, flag, func in (("caratheodory", "target", cmd_caratheodory),
                             ("separate", "point", cmd_separate)):
        p = sub.add_parser(name)
        p.add_argument("--spec")
        p.add_argument("--region", help="simplex:n | box:n:lo:hi | ksparse:n:K:tau | l1ball:n:r | l2ball:n:r")
        p.add_argument(f"--{flag}", help="comma-separated coordinates, 'uniform' or 'random'")
        p.add_argument("--epsilon", type=float, required=True)
        p.add_argument("--max-iter", type=int)
        p.add_argument("--step")
        p.add_argument("--out", default="-")
        p.set_defaults(func=func)

    p = sub.add_parser("lowerbound", help="write the simplex lower-bound problem file")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--shifted", action="store_true",
                   help="use ||x - (1/n, ..., 1/n)||^2 instead of ||x||^2")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_lowerbound)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except SpecError as exc:
        print(f"fwkit: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except FWError as exc:
        kind = "input" if isinstance(exc, ValueError) else "solver"
        print(f"fwkit: {kind} error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT if isinstance(exc, ValueError) else EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
