"""Command-line front end.

Every subcommand prints either a one-row report or a table, as CSV (header
row, ``%.12e`` floats) or JSON. Information-valued columns honour
``--unit bits``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import classical
from .config import DEFAULT
from .divergences import make_pair, psi, psi_derivatives, relative_entropy
from .errors import QSteinError
from .exponents import phi, strong_converse_exponent, strong_converse_predicate
from .neyman_pearson import beta_star, stein_sweep
from .operators import load_matrix
from .sampling import random_pair
from .verify import run_all

EXIT_VERIFY_FAILED = 1
EXIT_BAD_INPUT = 3


# --- presets -----------------------------------------------------------------

def _rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]])


def preset_pair(name: str, angle: float = math.pi / 4, seed: int = 0):
    """Named ``(rho, sigma)`` matrices."""
    if name == "pure-vs-mixed":
        return np.diag([1.0, 0.0]), np.eye(2) / 2
    if name == "biased-coin":
        return np.diag([0.75, 0.25]), np.eye(2) / 2
    if name == "identical":
        return np.diag([0.75, 0.25]), np.diag([0.75, 0.25])
    if name == "tilted-qubit":
        # same spectrum, Bloch vectors an angle `angle` apart
        rho = np.diag([0.75, 0.25])
        u = _rotation(angle)
        return rho, u @ rho @ u.T
    if name == "random":
        rho, sigma = random_pair(np.random.default_rng(seed), 2)
        return rho.matrix, sigma.matrix
    raise ValueError(f"unknown preset {name!r}")


PRESETS = ("pure-vs-mixed", "biased-coin", "identical", "tilted-qubit", "random")


# --- output ------------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "%.12e" % x
    if isinstance(x, (tuple, list)):
        return " ".join(_fmt(v) for v in x)
    return str(x)


def _jsonable(x):
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def to_unit(rows: list[dict], info_keys, unit: str) -> list[dict]:
    if unit == "nats":
        return rows
    scale = 1.0 / math.log(2)
    return [{k: (v * scale if k in info_keys and isinstance(v, (float, np.floating)) else v)
             for k, v in row.items()} for row in rows]


def render(rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        doc = [{k: _jsonable(v) for k, v in r.items()} for r in rows]
        return json.dumps(doc[0] if len(doc) == 1 else doc, indent=2) + "\n"
    keys = list(rows[0].keys())
    lines = [",".join(keys)]
    lines += [",".join(_fmt(r[k]) for k in keys) for r in rows]
    return "\n".join(lines) + "\n"


def emit(args, rows: list[dict], info_keys=()) -> None:
    text = render(to_unit(rows, set(info_keys), args.unit), args.format)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


# --- commands ----------------------------------------------------------------

def _config(args):
    return DEFAULT.with_(dim_cap=args.dim_cap) if args.dim_cap else DEFAULT


def _pair(args):
    if args.preset:
        rho, sigma = preset_pair(args.preset, args.angle, args.seed)
    else:
        if not (args.rho and args.sigma):
            raise ValueError("give --rho and --sigma files or a --preset")
        rho, sigma = load_matrix(args.rho), load_matrix(args.sigma)
    return make_pair(rho, sigma, _config(args))


def cmd_divergence(args) -> int:
    pair = _pair(args)
    d = relative_entropy(pair)
    d0, _ = psi_derivatives(pair, 0.0)
    emit(args, [{"D": d, "psi_prime_0": d0, "abs_difference": abs(d - d0),
                 "support_condition": True, "commutator_norm": pair.commutator}],
         {"D", "psi_prime_0", "abs_difference"})
    return 0


def _default_rate(pair) -> float:
    d0, _ = psi_derivatives(pair, 0.0)
    d1, _ = psi_derivatives(pair, 1.0)
    return 0.5 * (d0 + 2 * d1 - psi(pair, 1.0))


def cmd_curves(args) -> int:
    pair = _pair(args)
    d = relative_entropy(pair)
    d1, _ = psi_derivatives(pair, 1.0)
    psi1 = psi(pair, 1.0)
    if args.figure == "psi":
        lam = d1 if args.lam is None else args.lam
        rows = []
        for s in np.linspace(0.0, 1.0, args.points):
            rows.append({"s": float(s), "psi": psi(pair, float(s)), "D_s": d * s,
                         "lambda_s": lam * s})
        emit(args, rows, {"psi", "D_s", "lambda_s"})
        return 0
    r = _default_rate(pair) if args.rate is None else args.rate
    lam_star = strong_converse_exponent(pair, r).lambda_star
    edge = 2 * d1 - psi1
    lo = min(0.0, d) - 0.25 * (edge - d + 1e-3)
    hi = edge + 0.25 * (edge - d + 1e-3)
    rows = [{"lambda": float(x), "phi": phi(pair, float(x)).phi, "marker": ""}
            for x in np.linspace(lo, hi, args.points)]
    for name, x in (("D", d), ("lambda_star", lam_star), ("psi_prime_1", d1),
                    ("two_psi_prime_1_minus_psi_1", edge)):
        rows.append({"lambda": x, "phi": phi(pair, x).phi, "marker": name})
    emit(args, rows, {"lambda", "phi"})
    return 0


def cmd_exponent(args) -> int:
    pair = _pair(args)
    res = strong_converse_exponent(pair, args.rate)
    row = asdict(res)
    row["strong_converse"] = strong_converse_predicate(pair, args.rate)
    emit(args, [row], {"r", "lambda_star", "phi_star", "u_parametric", "u_maxform", "residual"})
    return 0


def cmd_beta_star(args) -> int:
    pair = _pair(args)
    pt = beta_star(pair, args.n, args.epsilon)
    row = asdict(pt)
    row["log_beta_over_n"] = math.log(pt.beta_star) / pt.n if pt.beta_star > 0 else -math.inf
    emit(args, [row], {"log_beta_over_n"})
    return 0


def cmd_stein(args) -> int:
    pair = _pair(args)
    rows = [{"n": r.n, "alpha": r.alpha, "beta": r.beta, "log_beta_over_n": r.log_beta_over_n,
             "bound": r.bound, "bound_holds": r.bound_holds, "dual_gap": r.dual_gap,
             "weak_converse_holds": r.weak_converse_holds}
            for r in stein_sweep(pair, args.epsilon, args.n_max, args.delta)]
    emit(args, rows, {"log_beta_over_n", "bound"})
    return 0


def cmd_classical(args) -> int:
    p = classical.load_distribution(args.p)
    q = classical.load_distribution(args.q)
    ut = classical.u_tilde(p, q, args.rate)
    if not args.n:
        emit(args, [asdict(ut)], {"r", "min_form", "parametric", "max_form"})
        return 0
    rows = []
    for n in args.n:
        res = classical.finite_n_optimal(p, q, n, rate=args.rate)
        rows.append({"n": n, "r": args.rate, "alpha_star": res.alpha,
                     "exponent_estimate": -res.log_accept / n, "u_tilde": ut.max_form})
    emit(args, rows, {"r", "exponent_estimate", "u_tilde"})
    return 0


def cmd_verify(args) -> int:
    results = run_all(seed=args.seed, count=args.count, corrupt=args.corrupt)
    failed = None
    for res in results:
        status = "ok" if res.passed else "FAIL"
        print(f"{res.name:22s} {status:4s} count={res.count:4d} "
              f"worst_slack={res.worst_slack:.3e}", file=sys.stderr)
        if not res.passed and failed is None:
            failed = res
    rows = [{"suite": r.name, "count": r.count, "worst_slack": r.worst_slack, "passed": r.passed}
            for r in results]
    emit(args, rows)
    if failed is not None:
        Path(args.counterexample).write_text(json.dumps(_jsonable_tree(failed.counterexample),
                                                        indent=2))
        print(f"counterexample written to {args.counterexample}", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    return 0


def _jsonable_tree(x):
    if isinstance(x, dict):
        return {k: _jsonable_tree(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable_tree(v) for v in x]
    return _jsonable(x)


# --- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--unit", choices=("nats", "bits"), default="nats")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--dim-cap", type=int, default=None)
    common.add_argument("--out", default=None, help="write output to FILE instead of stdout")

    states = argparse.ArgumentParser(add_help=False)
    states.add_argument("--rho", help="matrix JSON file for the null hypothesis")
    states.add_argument("--sigma", help="matrix JSON file for the alternative")
    states.add_argument("--preset", choices=PRESETS)
    states.add_argument("--angle", type=float, default=math.pi / 4,
                        help="Bloch angle for the tilted-qubit preset")

    parser = argparse.ArgumentParser(prog="qstein", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("divergence", parents=[common, states], help="D(rho||sigma) report")
    p.set_defaults(func=cmd_divergence)

    p = sub.add_parser("curves", parents=[common, states], help="psi(s) or phi(lambda) table")
    p.add_argument("--figure", choices=("psi", "phi"), default="psi")
    p.add_argument("--points", type=int, default=101)
    p.add_argument("--lam", type=float, default=None, help="slope of the lambda*s line")
    p.add_argument("--rate", type=float, default=None, help="rate locating lambda*")
    p.set_defaults(func=cmd_curves)

    p = sub.add_parser("exponent", parents=[common, states], help="strong-converse exponent")
    p.add_argument("--rate", type=float, required=True)
    p.set_defaults(func=cmd_exponent)

    p = sub.add_parser("beta-star", parents=[common, states], help="optimal type-II error")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.set_defaults(func=cmd_beta_star)

    p = sub.add_parser("stein", parents=[common, states], help="finite-n Stein sweep")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--delta", type=float, default=0.05)
    p.set_defaults(func=cmd_stein)

    p = sub.add_parser("classical", parents=[common], help="classical exponent and n-sweep")
    p.add_argument("--p", required=True, help="JSON array or file")
    p.add_argument("--q", required=True, help="JSON array or file")
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--n", type=int, nargs="*", default=[])
    p.set_defaults(func=cmd_classical)

    p = sub.add_parser("verify", parents=[common], help="randomized property suites")
    p.add_argument("--count", type=int, default=40)
    p.add_argument("--counterexample", default="counterexample.json")
    p.add_argument("--corrupt", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except QSteinError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
