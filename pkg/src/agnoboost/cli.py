"""Command line interface for agnoboost.

Data files are CSV with a header: ``x,y`` for finite-domain points, or
``f0,...,fk,y`` for feature vectors.  Classes are JSON
``{"domain_size": N, "hypotheses": [[±1, ...], ...]}``.

Exit status: 0 on success, 1 on invalid input, 2 when a budget cap is hit,
3 on I/O errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import bounds, harness, margin_boost, vclab
from .booster import DEFAULT_BUDGET, agnostic_boost
from .core import Dataset, TabulatedClass, WeightedVoter
from .errors import AgnoboostError, BudgetExceededError, CapExceededError
from .weak_learners import erm_weak_learner, faulty_weak_learner, stump_weak_learner

EXIT_INVALID = 1
EXIT_BUDGET = 2
EXIT_IO = 3


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def read_class(path) -> TabulatedClass:
    return TabulatedClass.from_json(read_json(path))


def read_dataset(path, domain_size=None) -> Dataset:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty file")
    header, body = [c.strip() for c in rows[0]], [r for r in rows[1:] if r]
    if header[-1] != "y":
        raise ValueError(f"{path}: last column must be 'y'")
    y = [int(float(r[-1])) for r in body]
    if header == ["x", "y"]:
        return Dataset.finite([int(r[0]) for r in body], y, domain_size)
    X = np.asarray([[float(v) for v in r[:-1]] for r in body]).reshape(len(body), len(header) - 1)
    return Dataset.parametric(X, y)


def write_text(text: str, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def emit_json(obj, out=None):
    write_text(json.dumps(obj, indent=2) + "\n", out)


# --------------------------------------------------------------------------
# commands


def _weak_learner(args, H):
    if args.weak_learner == "stump":
        return stump_weak_learner()
    if H is None:
        raise ValueError(f"--class is required for the {args.weak_learner} learner")
    erm = erm_weak_learner(H)
    if args.weak_learner == "erm":
        return erm
    rate = args.delta0 if args.fail_rate is None else args.fail_rate
    return faulty_weak_learner(erm, rate, H.hypotheses[args.bad_hypothesis_index])


def cmd_boost(args):
    H = read_class(args.class_path) if args.class_path else None
    S = read_dataset(args.data, H.domain_size if H else None)
    W = _weak_learner(args, H)
    res = agnostic_boost(
        S, args.delta, W, args.delta0, args.m0, args.theta, args.dstar, args.seed,
        budget=args.budget, dedup="exact_table" if args.dedup == "exact" else "off",
        multiset_subsamples=args.multiset_subsamples, workers=args.workers, search=args.search,
    )
    emit_json(res.to_json(), args.out)


def cmd_adaboost(args):
    H = read_class(args.class_path)
    S = read_dataset(args.data, H.domain_size)
    run = margin_boost.run(S, args.theta, args.rounds, margin_boost.argmin_provider(H))
    lines = ["round,error,alpha,Z"]
    lines += [f"{r},{rd.error!r},{rd.alpha!r},{rd.Z!r}" for r, rd in enumerate(run.rounds)]
    write_text("\n".join(lines) + "\n", args.out)
    values, counts = np.unique(run.voter.vote_sum(S.x) * S.y.astype(np.int64), return_counts=True)
    hist = ["margin,count"] + [f"{float(v) / run.voter.T!r},{c}" for v, c in zip(values, counts)]
    write_text("\n".join(hist) + "\n", args.hist)


def cmd_vc(args):
    if args.vc_cmd == "dim":
        rep = vclab.vc_dim(read_class(args.class_path), args.cap)
        emit_json({"dimension": rep.dimension, "witness": list(rep.witness), "capped": rep.capped})
    elif args.vc_cmd == "dual":
        dual = vclab.dual_class(read_class(args.class_path))
        rep = vclab.vc_dim(dual)
        emit_json({"dual_dimension": rep.dimension, "witness": list(rep.witness),
                   "dual_class": dual.to_json()})
    elif args.vc_cmd == "avgbound":
        emit_json({"T": args.T, "d": args.d, "bound": vclab.average_class_vc_bound(args.T, args.d)})
    else:
        v = WeightedVoter.from_json(read_json(args.voter))
        S = read_dataset(args.data)
        res = vclab.prune_voter(v, S, args.theta, args.L, args.seed, args.max_attempts)
        emit_json({"attempts": res.attempts, "voter": res.pruned.to_json()}, args.out)


def _bound_result(b):
    return {"value": float(b), "vacuous": b.vacuous}


BOUND_COMMANDS = {
    "maurer": lambda p: _bound_result(bounds.maurer_pontil_bound(p["L_emp"], p["d"], p["n"], p["delta"])),
    "bernstein": lambda p: _bound_result(bounds.bernstein_bound(p["L_pop"], p["n"], p["delta"])),
    "uc": lambda p: _bound_result(bounds.uniform_convergence_bound(p["d"], p["n"], p["delta"])),
    "rademacher": lambda p: _bound_result(bounds.rademacher_vc_bound(p["d"], p["n"])),
    "main": lambda p: _main_bound(p),
    "lower": lambda p: bounds.lower_bound_eval(
        p["d"], p["gamma0"], p["L"], p["m"], p.get("C3"), p.get("C4"))._asdict(),
    "cost": lambda p: _cost(p),
}


def _main_bound(p):
    r = bounds.main_theorem_bound(p["err_star"], p["d"], p["d_star"], p["theta"], p["n"], p["delta"])
    return _bound_result(r.value) | {"T": r.T, "d_prime": r.d_prime}


def _cost(p):
    out = {}
    if "n" in p:
        out["weak_calls"] = bounds.weak_call_count(p["n"], p["m0"], p["theta"], p["delta"], p["delta0"])
    if "pool" in p:
        out["combinations"] = bounds.combo_count(p["pool"], p["T"])
    return out


def cmd_bounds(args):
    params = json.loads(args.json)
    try:
        emit_json(BOUND_COMMANDS[args.which](params))
    except KeyError as e:
        raise ValueError(f"missing parameter {e}") from None


def cmd_experiment(args):
    if args.exp_cmd == "curve":
        cfg = read_json(args.spec)
        spec = harness.SyntheticSpec.from_json(cfg)
        F = TabulatedClass.from_json(cfg["F"]) if "F" in cfg else TabulatedClass.full(spec.domain_size)
        H = TabulatedClass.from_json(cfg["H"]) if "H" in cfg else F
        params = harness.BoostParams(**cfg.get("boost", {}))
        n_grid = [int(v) for v in args.n.split(",") if v]
        res = harness.run_curve(spec, F, H, params, n_grid, args.trials, args.seed, args.workers)
        write_text(res.to_csv(include_timing=args.timing), args.out)
    else:
        res = harness.ExperimentResult.from_csv(Path(args.results).read_text())
        chk = harness.check_bound(res, args.delta)
        report = {"rows": chk.rows, "violations": chk.violations, "frequency": chk.frequency}
        if args.delta is not None:
            report["delta"] = args.delta
            report["within_delta_plus_slack"] = chk.within(args.slack)
        emit_json(report)


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="agnoboost", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True)

    b = sub.add_parser("boost", help="agnostic boosting on a training CSV")
    b.add_argument("--data", required=True)
    b.add_argument("--class", dest="class_path")
    b.add_argument("--weak-learner", choices=["erm", "stump", "faulty"], default="erm")
    b.add_argument("--bad-hypothesis-index", type=int, default=0)
    b.add_argument("--fail-rate", type=float,
                   help="failure probability of the faulty learner (default: --delta0)")
    b.add_argument("--m0", type=int, required=True)
    b.add_argument("--theta", type=float, required=True)
    b.add_argument("--delta", type=float, required=True)
    b.add_argument("--delta0", type=float, required=True)
    b.add_argument("--dstar", type=int, required=True)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--dedup", choices=["exact", "off"], default="exact")
    b.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    b.add_argument("--search", choices=["exhaustive", "greedy"], default="exhaustive")
    b.add_argument("--multiset-subsamples", action="store_true")
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--out")
    b.set_defaults(func=cmd_boost)

    a = sub.add_parser("adaboost", help="equal-weight AdaBoost with the best class member each round")
    a.add_argument("--data", required=True)
    a.add_argument("--class", dest="class_path", required=True)
    a.add_argument("--theta", type=float, required=True)
    a.add_argument("--rounds", type=int, required=True)
    a.add_argument("--out", help="per-round CSV (default stdout)")
    a.add_argument("--hist", help="margin histogram CSV (default stdout)")
    a.set_defaults(func=cmd_adaboost)

    v = sub.add_parser("vc", help="VC-dimension tools")
    vs = v.add_subparsers(dest="vc_cmd", required=True)
    vd = vs.add_parser("dim")
    vd.add_argument("--class", dest="class_path", required=True)
    vd.add_argument("--cap", type=int)
    vu = vs.add_parser("dual")
    vu.add_argument("--class", dest="class_path", required=True)
    va = vs.add_parser("avgbound")
    va.add_argument("--T", type=int, required=True)
    va.add_argument("--d", type=int, required=True)
    vp = vs.add_parser("prune")
    vp.add_argument("--voter", required=True)
    vp.add_argument("--data", required=True)
    vp.add_argument("--theta", type=float, required=True)
    vp.add_argument("--L", type=int, required=True)
    vp.add_argument("--seed", type=int, default=0)
    vp.add_argument("--max-attempts", type=int, default=100)
    vp.add_argument("--out")
    v.set_defaults(func=cmd_vc)

    bd = sub.add_parser("bounds", help="evaluate a closed-form bound")
    bd.add_argument("which", choices=sorted(BOUND_COMMANDS))
    bd.add_argument("--json", required=True, help="parameters as a JSON object")
    bd.set_defaults(func=cmd_bounds)

    e = sub.add_parser("experiment", help="error-versus-n sweeps")
    es = e.add_subparsers(dest="exp_cmd", required=True)
    ec = es.add_parser("curve")
    ec.add_argument("--spec", required=True)
    ec.add_argument("--n", required=True, help="comma-separated sample sizes")
    ec.add_argument("--trials", type=int, default=20)
    ec.add_argument("--seed", type=int, default=0)
    ec.add_argument("--workers", type=int, default=1)
    ec.add_argument("--timing", action="store_true", help="include the wall_ms column")
    ec.add_argument("--out")
    ek = es.add_parser("check-bound")
    ek.add_argument("--results", required=True)
    ek.add_argument("--delta", type=float)
    ek.add_argument("--slack", type=float, default=0.1)
    e.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (BudgetExceededError, CapExceededError) as exc:
        print(f"agnoboost: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except OSError as exc:
        print(f"agnoboost: {exc}", file=sys.stderr)
        return EXIT_IO
    except (AgnoboostError, ValueError, KeyError, TypeError) as exc:
        print(f"agnoboost: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return 0


if __name__ == "__main__":
    sys.exit(main())
