"""Command-line front end.

Subcommands: tau, simulate, converge, verify-moments, oracle-check.
Exit codes: 0 success/PASS, 1 usage error, 2 verdict FAIL, 3 infeasible
parameters.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Sequence

from .density import InvalidDensity, PeriodicDensity, make_density
from .errors import InfeasibleRadius, RadiusOutOfRange, SampleBudgetTooSmall, TooLargeForOracle
from .experiments import (
    DEFAULT_N_VALUES,
    DEFAULT_REPLICATIONS,
    MOMENT_FIELDS,
    ORDER_FIELDS,
    TREND_SLACK,
    ExperimentGrid,
    LambdaRule,
    PowerLaw,
    Fixed,
    make_rule,
    oracle_check,
    replicate_seed,
    run_convergence,
    simulate_once,
    trend_verdict,
    verify_moments,
)
from .paradox import write_paradox_csv
from .rgg import ORACLE_MAX_N, write_edges_csv, write_nodes_csv
from .theory import TAU_GRID_KAPPAS, TAU_GRID_MUS, MotifKind, expected_fn, tau_f

EXIT_OK, EXIT_USAGE, EXIT_FAIL, EXIT_INFEASIBLE = 0, 1, 2, 3

log = logging.getLogger("rggparadox")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- output helpers --------------------------------------------------------


def _fmt(v: Any) -> Any:
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    return v


def _json_safe(v: Any) -> Any:
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, dict):
        return {k: _json_safe(x) for k, x in v.items()}
    if isinstance(v, list):
        return [_json_safe(x) for x in v]
    return v


def csv_text(rows: Sequence[dict], fields: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for row in rows:
        w.writerow([_fmt(row[f]) for f in fields])
    return buf.getvalue()


def json_text(doc: Any) -> str:
    return json.dumps(_json_safe(doc), indent=2, sort_keys=False) + "\n"


def emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


# -- argument parsing ------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
    g.add_argument("--workers", type=int, default=None, help="worker threads (default 1)")
    g.add_argument("--out", type=Path, default=None, help="write the main output here instead of stdout")
    g.add_argument("--format", choices=("csv", "json"), default="csv")
    g.add_argument("-v", "--verbose", action="store_true")
    return p


def _density_args() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("density")
    g.add_argument("--density", choices=("uniform", "vonmises", "csv"), default=None)
    g.add_argument("--kappa", type=float, default=None)
    g.add_argument("--mu", type=float, default=None, help="phase in radians inside cos(2*pi*x - mu)")
    g.add_argument("--density-file", type=Path, default=None)
    return p


def build_parser() -> argparse.ArgumentParser:
    common, dens = _common(), _density_args()
    parser = _Parser(prog="rggparadox", description="Friendship paradox index on circular random geometric graphs")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("tau", parents=[common], help="tau_f grid for von Mises densities")
    p.add_argument("--kappa", type=float, nargs="+", default=list(TAU_GRID_KAPPAS))
    p.add_argument("--mu", type=float, nargs="+", default=list(TAU_GRID_MUS))
    p.add_argument("--digits", type=int, default=4, help="decimals printed for tau_f (default 4)")

    p = sub.add_parser("simulate", parents=[common, dens], help="one graph: F_n and the prediction")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--nodes-out", type=Path, help="per-node CSV: node, position, degree, delta")
    p.add_argument("--graph-out", type=Path, help="graph dump CSV: node, position, degree")
    p.add_argument("--edges-out", type=Path, help=f"edge list CSV (n <= {ORACLE_MAX_N})")

    p = sub.add_parser("converge", parents=[common, dens], help="replicated study of F_n along an n grid")
    p.add_argument("--config", type=Path, help="JSON document mirroring the experiment grid")
    p.add_argument("--n", type=int, nargs="+", default=None)
    p.add_argument("--rule", choices=("fixed", "powerlaw", "lambda"), default=None)
    p.add_argument("--r", type=float, default=None, help="radius for --rule fixed")
    p.add_argument("--c", type=float, default=None, help="prefactor for --rule powerlaw")
    p.add_argument("--alpha", type=float, default=None, help="exponent for --rule powerlaw")
    p.add_argument("--lam", type=float, default=None, help="n r^3 target for --rule lambda")
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--slack", type=float, default=TREND_SLACK)
    p.add_argument("--timing", action="store_true", help="include wall_time_ms (output no longer reproducible)")

    p = sub.add_parser("verify-moments", parents=[common, dens], help="MC vs exact vs leading-order motif probabilities")
    p.add_argument("--r", type=float, nargs="+", default=[0.04, 0.02, 0.01])
    p.add_argument("--anchors", type=float, nargs="+", default=[0.005, 0.3, 0.995])
    p.add_argument("--motifs", nargs="+", default=[m.value for m in MotifKind], choices=[m.value for m in MotifKind])
    p.add_argument("--samples", type=int, default=10**6)
    p.add_argument("--orders-out", type=Path, help="write the order table here (CSV format only)")

    p = sub.add_parser("oracle-check", parents=[common], help="sweep construction vs brute force")
    p.add_argument("--n", type=int, nargs="+", default=[1000])
    p.add_argument(
        "--densities", nargs="+", default=["uniform", "vonmises:0.5", "vonmises:2"],
        help="uniform, vonmises:KAPPA[:MU] or csv:PATH",
    )
    p.add_argument("--radii", type=float, nargs="+", default=[0.005, 0.02, 0.1])
    p.add_argument("--instances", type=int, default=12, help="instances per (n, density, radius)")
    return parser


def density_from_args(args, cfg: dict | None = None) -> PeriodicDensity:
    spec: dict[str, Any] = dict((cfg or {}).get("density", {"kind": "uniform"}))
    if args.density is not None:
        spec = {"kind": args.density}
    if args.kappa is not None:
        if args.density is None and spec.get("kind") != "vonmises":
            spec = {"kind": "vonmises"}
        spec["kappa"] = args.kappa
    if args.mu is not None:
        spec["mu"] = args.mu
    if args.density_file is not None:
        spec = {"kind": "csv", "path": str(args.density_file)}
    if spec.get("kind") == "vonmises" and "kappa" not in spec:
        raise UsageError("--density vonmises requires --kappa")
    if spec.get("kind") == "csv" and not spec.get("path"):
        raise UsageError("--density csv requires --density-file")
    return make_density(spec)


# -- subcommands -----------------------------------------------------------


def cmd_tau(args) -> int:
    rows = [
        {"kappa": k, "mu": m, "tau_f": round(tau_f(k, m), args.digits)}
        for m in args.mu
        for k in args.kappa
    ]
    if args.format == "json":
        emit(json_text(rows), args.out)
    else:
        text = csv_text([{**r, "tau_f": f"{r['tau_f']:.{args.digits}f}"} for r in rows], ("kappa", "mu", "tau_f"))
        emit(text, args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    d = density_from_args(args)
    if args.n < 1:
        raise UsageError("--n must be positive")
    if not (0.0 < args.r <= 0.5):
        raise RadiusOutOfRange(f"radius must lie in (0, 0.5], got {args.r!r}")
    seed = args.seed if args.seed is not None else 0
    g, res = simulate_once(d, args.n, args.r, replicate_seed(seed, args.n, 0))
    pred = expected_fn(d, args.n, args.r)
    doc = {
        "n": args.n,
        "r": args.r,
        "f_n": res.f_n,
        "n_isolated": res.n_isolated,
        "prediction": pred.mean_fn,
        "regime": str(pred.regime),
        "nr3": pred.nr3,
        "density": d.describe(),
        "seed": seed,
    }
    if args.format == "csv":
        emit(csv_text([doc], ("n", "r", "f_n", "n_isolated", "prediction", "regime", "seed")), args.out)
    else:
        emit(json_text(doc), args.out)
    if args.nodes_out:
        write_paradox_csv(g, res, args.nodes_out)
    if args.graph_out:
        write_nodes_csv(g, args.graph_out)
    if args.edges_out:
        write_edges_csv(g, args.edges_out)
    return EXIT_OK


def _grid_from_args(args) -> ExperimentGrid:
    cfg: dict[str, Any] = {}
    if args.config is not None:
        cfg = json.loads(args.config.read_text())
    density = density_from_args(args, cfg)
    rule_spec = dict(cfg.get("radius_rule", {"kind": "powerlaw", "c": 1.0, "alpha": 0.7}))
    if args.rule is not None:
        rule_spec = {"kind": args.rule}
    for key, val in (("r", args.r), ("c", args.c), ("alpha", args.alpha), ("lambda", args.lam)):
        if val is not None:
            rule_spec[key] = val
    try:
        rule = make_rule(rule_spec)
    except (KeyError, TypeError) as exc:
        raise UsageError(f"incomplete radius rule {rule_spec!r}") from exc
    grid = ExperimentGrid(
        density=density,
        n_values=tuple(args.n or cfg.get("n_values", DEFAULT_N_VALUES)),
        radius_rule=rule,
        replications=args.reps or int(cfg.get("replications", DEFAULT_REPLICATIONS)),
        master_seed=args.seed if args.seed is not None else int(cfg.get("master_seed", 0)),
        workers=args.workers or int(cfg.get("workers", 1)),
    )
    if len(grid.n_values) < 2:
        raise UsageError("converge needs at least two n values")
    if grid.replications < 2:
        raise UsageError("converge needs at least two replications")
    return grid


def _rule_dict(rule) -> dict:
    if isinstance(rule, Fixed):
        return {"kind": "fixed", "r": rule.r}
    if isinstance(rule, PowerLaw):
        return {"kind": "powerlaw", "c": rule.c, "alpha": rule.alpha}
    if isinstance(rule, LambdaRule):
        return {"kind": "lambda", "lambda": rule.lam}
    raise TypeError(rule)


def cmd_converge(args) -> int:
    grid = _grid_from_args(args)
    rows = run_convergence(grid)
    passed = trend_verdict(rows, args.slack)
    verdict = "PASS" if passed else "FAIL"
    dicts = [row.to_dict(args.timing) for row in rows]
    if args.format == "json":
        doc = {
            "density": grid.density.describe(),
            "radius_rule": _rule_dict(grid.radius_rule),
            "master_seed": grid.master_seed,
            "slack": args.slack,
            "rows": dicts,
            "verdict": verdict,
        }
        emit(json_text(doc), args.out)
    else:
        fields = list(rows[0].FIELDS) + (["wall_time_ms"] if args.timing else [])
        emit(csv_text(dicts, fields), args.out)
    print(f"verdict: {verdict}", file=sys.stderr)
    return EXIT_OK if passed else EXIT_FAIL


def cmd_verify_moments(args) -> int:
    d = density_from_args(args)
    if len(args.r) < 2:
        raise UsageError("verify-moments needs at least two radii")
    for r in args.r:
        if not (0.0 < r <= 0.5):
            raise RadiusOutOfRange(f"radius must lie in (0, 0.5], got {r!r}")
    seed = args.seed if args.seed is not None else 0
    moments, orders = verify_moments(d, args.r, args.anchors, args.motifs, args.samples, seed, args.workers or 1)
    if args.format == "json":
        emit(json_text({"density": d.describe(), "seed": seed, "estimates": moments, "orders": orders}), args.out)
        return EXIT_OK
    m_text, o_text = csv_text(moments, MOMENT_FIELDS), csv_text(orders, ORDER_FIELDS)
    if args.orders_out is not None:
        args.orders_out.write_text(o_text)
        emit(m_text, args.out)
    else:
        emit(m_text + "\n" + o_text, args.out)
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    seed = args.seed if args.seed is not None else 0
    results = oracle_check(args.n, args.densities, args.radii, args.instances, seed, args.workers or 1)
    ok = all(res.passed for res in results)
    rows = [
        {
            "n": res.n, "density": res.density, "r": res.r, "instance": res.instance,
            "degrees_equal": res.degrees_equal, "edges_equal": res.edges_equal,
            "fn_equal": res.fn_equal, "f_n": res.f_n, "status": "PASS" if res.passed else "FAIL",
        }
        for res in results
    ]
    if args.format == "json":
        emit(json_text({"results": rows, "verdict": "PASS" if ok else "FAIL"}), args.out)
    else:
        emit(csv_text(rows, list(rows[0]) if rows else ["status"]), args.out)
    print(f"oracle-check: {sum(r.passed for r in results)}/{len(results)} instances PASS", file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {
    "tau": cmd_tau,
    "simulate": cmd_simulate,
    "converge": cmd_converge,
    "verify-moments": cmd_verify_moments,
    "oracle-check": cmd_oracle_check,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    if getattr(args, "workers", None) is not None and args.workers < 1:
        print("rggparadox: error: --workers must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"rggparadox: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InfeasibleRadius, RadiusOutOfRange, TooLargeForOracle, SampleBudgetTooSmall, InvalidDensity) as exc:
        print(f"rggparadox: infeasible parameters: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
