"""Command-line front end.

Exit codes: 0 when the command succeeds and every check passes, 1 when a
check fails (a JSON report naming the failed check goes to stdout), 2 on
bad input.
"""

import argparse
import math
import sys

import numpy as np

from . import io as sio
from .config import RunConfig
from .embedding import audit_distortion, build_snowflake_embedding, min_k_for_epsilon
from .errors import InputError, SnowflakeOTError, SolverNonconvergence, UnknownSubcommand
from .graphs import lambda2, subdivide, subdivision_lower_bound
from .inequalities import (
    FAMILIES,
    evaluate_quadratic,
    lebedeva_petrunin_defect,
    ptolemy_defect,
    reshetnyak_defect,
)
from .markov import c_theta, markov_ratio, snowflake_lower_bound, two_point_identity_check
from .metric import euclidean_metric
from .transport import wasserstein

SUBCOMMANDS = ("embed", "audit", "wass", "ctheta", "markov", "certify", "graph", "suite")

# four-point checks that are not (A, B) inequalities
SCALAR_FAMILIES = {
    "reshetnyak": reshetnyak_defect,
    "lebedeva_petrunin": lebedeva_petrunin_defect,
    "ptolemy": lambda D: ptolemy_defect(D).slack,
}
ALL_FAMILIES = sorted(set(FAMILIES) | set(SCALAR_FAMILIES))


class CheckFailed(Exception):
    def __init__(self, report):
        self.report = report


def _emit(obj, out=None):
    text = sio.dumps(obj)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_params(items):
    params = {}
    for item in items or []:
        key, sep, val = item.partition("=")
        if not sep:
            raise InputError(f"parameter '{item}' is not of the form key=value")
        try:
            params[key] = float(val)
        except ValueError:
            raise InputError(f"parameter '{key}' needs a numeric value, got '{val}'") from None
    return params


def _resolve_K(args, X):
    if args.K is not None:
        return args.K
    if args.eps is None:
        raise InputError("give --K or --eps")
    return min_k_for_epsilon(X, args.p, args.eps)


# subcommands

def cmd_embed(args, cfg):
    X = sio.load_metric(args.metric)
    emb = build_snowflake_embedding(X, args.p, _resolve_K(args, X))
    _emit(emb.to_json(), cfg.out)


def cmd_audit(args, cfg):
    X = sio.load_metric(args.metric)
    if args.eps is None:
        raise InputError("--eps is required for an audit")
    emb = build_snowflake_embedding(X, args.p, _resolve_K(args, X))
    rep = audit_distortion(emb, args.eps, generic=args.generic)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(rep.to_csv())
    if args.format == "csv" and not cfg.out:
        sys.stdout.write(rep.to_csv())
    summary = rep.summary()
    if not rep.passed:
        summary["failed_check"] = "audit ratio band"
        summary["violations"] = [[r.i, r.j, r.ratio] for r in rep.violations()]
        raise CheckFailed(summary)
    if args.format == "json" or cfg.out:
        _emit(summary)


def cmd_wass(args, cfg):
    mu = sio.load_measure(args.mu)
    nu = sio.load_measure(args.nu)
    cost, plan = wasserstein(mu, nu, args.p)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write("row,col,mass\n")
            for r, c, m in plan.to_csv_rows():
                fh.write(f"{r},{c},{m!r}\n")
    _emit({"cost": cost, "p": args.p})


def cmd_ctheta(args, cfg):
    res = c_theta(args.theta)
    report = res.to_json()
    if res.residual > cfg.tol("residual", 1e-10) or not res.monotone:
        report["failed_check"] = "fixed point residual" if res.monotone else "monotonicity on the bracket"
        raise CheckFailed(report)
    _emit(report, cfg.out)


def cmd_markov(args, cfg):
    if args.action == "bound":
        _emit({"bound": snowflake_lower_bound(args.K, args.p, args.theta, args.m, args.alpha)}, cfg.out)
        return
    chain = sio.load_chain(args.chain)
    if args.action == "ratio":
        if args.dist is None:
            raise InputError("markov ratio needs --dist")
        D = np.asarray(sio.load_matrix(args.dist), dtype=float)
        r = markov_ratio(chain, D, args.p, args.m)
        _emit({"ratio": r, "p": args.p, "m": args.m}, cfg.out)
    else:
        if args.psi is None:
            raise InputError("markov identity needs --psi")
        S = np.asarray(sio.load_matrix(args.psi, key="psi"), dtype=float)
        lhs, rhs = two_point_identity_check(chain, S, args.t)
        report = {"lhs": lhs, "rhs": rhs, "t": args.t}
        if abs(lhs - rhs) > cfg.tol("identity", 1e-12) * (1 + abs(lhs)):
            report["failed_check"] = "two-point identity"
            raise CheckFailed(report)
        _emit(report, cfg.out)


def _family_defect(name, D, params):
    if name in SCALAR_FAMILIES:
        return SCALAR_FAMILIES[name](D), None
    rep = evaluate_quadratic(FAMILIES[name](**params), D)
    return rep.defect, rep


def cmd_certify(args, cfg):
    if args.family not in ALL_FAMILIES:
        raise InputError(f"unknown family '{args.family}'; choose from {', '.join(ALL_FAMILIES)}")
    params = _parse_params(args.params)
    tol = cfg.tol("defect", 1e-9)
    if args.sweep is not None:
        if args.sweep < 1:
            raise InputError("--sweep needs a positive count")
        rng = np.random.default_rng(cfg.seed)
        worst, worst_pts = math.inf, None
        for _ in range(args.sweep):
            pts = rng.normal(size=(4, 3))
            D = euclidean_metric(pts)
            defect, _ = _family_defect(args.family, D, params)
            scaled = defect / float((D**2).max())
            if scaled < worst:
                worst, worst_pts = scaled, pts.tolist()
        report = {"family": args.family, "samples": args.sweep, "seed": cfg.seed,
                  "min_scaled_defect": worst, "worst_configuration": worst_pts}
        if worst < -tol:
            report["failed_check"] = f"{args.family} inequality"
            raise CheckFailed(report)
        _emit(report, cfg.out)
        return
    if args.metric is None:
        raise InputError("give --metric or --sweep")
    X = sio.load_metric(args.metric)
    if X.n != 4:
        raise InputError(f"the four-point families need a 4-point metric, got n={X.n}")
    defect, rep = _family_defect(args.family, np.asarray(X.d), params)
    report = rep.to_json() if rep is not None else {"defect": defect}
    report["family"] = args.family
    if defect < -tol * float(X.diameter) ** 2:
        report["failed_check"] = f"{args.family} inequality"
        raise CheckFailed(report)
    _emit(report, cfg.out)


def cmd_graph(args, cfg):
    G = sio.load_graph(args.graph)
    if args.action == "subdivide":
        _emit(subdivide(G, args.k).to_json(), cfg.out)
    elif args.action == "lambda2":
        _emit({"lambda2": lambda2(G), "n": G.n, "degree": G.degree}, cfg.out)
    else:
        _emit(subdivision_lower_bound(G, args.k).to_json(), cfg.out)


def cmd_suite(args, cfg):
    from .suite import CRITERIA, run_suite

    only = None
    if args.only:
        try:
            only = [int(x) for x in args.only.split(",")]
        except ValueError:
            raise InputError("--only takes a comma-separated list of criterion numbers") from None
        bad = [x for x in only if x not in CRITERIA]
        if bad:
            raise InputError(f"no criterion {bad[0]}")
    results = run_suite(cfg.seed, only, on_result=lambda r: print(r.line(), file=sys.stderr, flush=True))
    report = {"seed": cfg.seed, "passed": all(r.passed for r in results), "criteria": [r.to_json() for r in results]}
    if not report["passed"]:
        report["failed_check"] = [r.name for r in results if not r.passed]
        raise CheckFailed(report)
    _emit(report, cfg.out)


# parser

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output file (default: stdout)")

    parser = argparse.ArgumentParser(prog="snowflake-ot", description="Snowflake embeddings into Wasserstein space and metric inequality checks.")
    sub = parser.add_subparsers(dest="command", metavar="{" + ",".join(SUBCOMMANDS) + "}")

    def add(name, help_):
        return sub.add_parser(name, parents=[common], help=help_)

    for name in ("embed", "audit"):
        sp = add(name, "build the embedding" if name == "embed" else "audit W_p distortion of the embedding")
        sp.add_argument("--metric", required=True)
        sp.add_argument("--p", type=float, default=2.0)
        sp.add_argument("--K", type=int)
        sp.add_argument("--eps", type=float)
        if name == "audit":
            sp.add_argument("--generic", action="store_true", help="use the bipartite OT solver")
            sp.add_argument("--format", choices=("json", "csv"), default="json")

    sp = add("wass", "exact W_p between two measures")
    sp.add_argument("--mu", required=True)
    sp.add_argument("--nu", required=True)
    sp.add_argument("--p", type=float, default=2.0)

    sp = add("ctheta", "solve for c(theta)")
    sp.add_argument("--theta", type=float, required=True)

    sp = add("markov", "Markov chain checks")
    sp.add_argument("action", choices=("ratio", "identity", "bound"))
    sp.add_argument("--chain")
    sp.add_argument("--dist")
    sp.add_argument("--psi")
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument("--t", type=int, default=1)
    sp.add_argument("--K", type=float, default=1.0)
    sp.add_argument("--theta", type=float, default=0.5)
    sp.add_argument("--alpha", type=float, default=1.0)

    sp = add("certify", "evaluate a four-point inequality")
    sp.add_argument("--family", required=True)
    sp.add_argument("--metric")
    sp.add_argument("--params", nargs="*", metavar="KEY=VALUE")
    sp.add_argument("--sweep", type=int, metavar="N")

    sp = add("graph", "subdivisions and spectral gaps")
    sp.add_argument("action", choices=("subdivide", "lambda2", "bound"))
    sp.add_argument("--graph", required=True)
    sp.add_argument("--k", type=int, default=2)

    sp = add("suite", "run the acceptance battery")
    sp.add_argument("--only", help="comma-separated criterion numbers")
    return parser


HANDLERS = {
    "embed": cmd_embed, "audit": cmd_audit, "wass": cmd_wass, "ctheta": cmd_ctheta,
    "markov": cmd_markov, "certify": cmd_certify, "graph": cmd_graph, "suite": cmd_suite,
}


def _error(exc, code):
    sys.stderr.write(sio.dumps({"error": type(exc).__name__, "message": str(exc)}))
    return code


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    first = next((a for a in argv if not a.startswith("-")), None)
    if first is not None and first not in SUBCOMMANDS:
        return _error(UnknownSubcommand(f"unknown subcommand '{first}'; expected one of {', '.join(SUBCOMMANDS)}"), 2)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_help(sys.stderr)
        return 2
    cfg = RunConfig(seed=args.seed, out=args.out)
    try:
        HANDLERS[args.command](args, cfg)
    except CheckFailed as exc:
        _emit(exc.report)
        return 1
    except InputError as exc:
        return _error(exc, 2)
    except (SolverNonconvergence, SnowflakeOTError) as exc:
        return _error(exc, 1)
    except OSError as exc:
        return _error(exc, 2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
