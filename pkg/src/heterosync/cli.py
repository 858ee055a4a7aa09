"""Command-line interface: analyze a configuration, simulate it, or run
the decoupling certificate suite.

Exit codes: 0 success, 2 structural assumption failure, 3 numerical
failure, 4 configuration error.  All floats are written with repr
(shortest round-trip), so identical inputs give byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .decoupling import check_decay, decouple_suite
from .design import design_protocol
from .exceptions import (ArgumentError, AssumptionError, ConvergenceError,
                         HeterosyncError, NumericalError)
from .graph import WeightedGraph, build_laplacian, spectrum
from .rates import estimate_rate, ratio_series
from .simulate import random_initial_states, run

EXIT_OK = 0
EXIT_SUITE_FAILED = 1
EXIT_ASSUMPTION = 2
EXIT_NUMERICAL = 3
EXIT_CONFIG = 4


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    path.write_text("\n".join(lines) + "\n")


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def load_config(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ArgumentError(f"cannot read config {path}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ArgumentError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ArgumentError("config root must be a JSON object")
    for key in ("s_init", "b"):
        if key not in cfg:
            raise ArgumentError(f"config is missing required field {key!r}")
    if "adjacency" not in cfg and "edges" not in cfg:
        raise ArgumentError("config needs either 'adjacency' or 'edges'")
    return cfg


def _graph_from_config(cfg: dict) -> WeightedGraph:
    if "adjacency" in cfg:
        return WeightedGraph(np.asarray(cfg["adjacency"], dtype=float))
    n = cfg.get("n_agents")
    if n is None:
        raise ArgumentError("edge-list config needs 'n_agents'")
    return WeightedGraph.from_edges(int(n), cfg["edges"])


def _design_from_config(cfg: dict):
    graph = _graph_from_config(cfg)
    spec = spectrum(build_laplacian(graph))
    s_init = np.asarray(cfg["s_init"], dtype=float)
    b = np.asarray(cfg["b"], dtype=float)
    p_matrix = np.asarray(cfg["p"], dtype=float) if "p" in cfg else None
    design = design_protocol(s_init, b, spec, c=cfg.get("c"), eta=cfg.get("eta"),
                             p_matrix=p_matrix)
    return spec, s_init, b, design


def _design_report(spec, design) -> dict:
    report = {
        "assumptions": {
            "stabilizable": design.assumptions.stabilizable,
            "unstable_average": design.assumptions.unstable_average,
            "product_gap": design.assumptions.product_gap,
            "lhs_value": design.assumptions.lhs_value,
            "rhs_value": design.assumptions.rhs_value,
        },
        "eigenvalues": spec.eigenvalues,
        "design": {
            "coupling": design.coupling,
            "interval": [design.interval.lower, design.interval.upper],
            "optimal_coupling": design.interval.optimal,
            "contraction": design.contraction,
            "eta": design.eta,
            "p_source": design.p_source,
            "riccati_p": design.riccati_p,
            "limit_gain": design.limit_gain,
            "rate_bound": design.rate_bound,
            "stable_case": design.stable_case,
        },
    }
    return _jsonable(report)


def _emit_report(report: dict, name: str, out_dir: Path | None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True)
    print(text)
    if out_dir is not None:
        (out_dir / f"{name}_report.json").write_text(text + "\n")


def cmd_analyze(args) -> int:
    cfg = load_config(args.config)
    name = cfg.get("name", Path(args.config).stem)
    spec, _, _, design = _design_from_config(cfg)
    out_dir = _ensure_out(args)
    _emit_report(_design_report(spec, design), name, out_dir)
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    name = cfg.get("name", Path(args.config).stem)
    spec, s_init, b, design = _design_from_config(cfg)
    horizon = args.horizon if args.horizon is not None else int(cfg.get("horizon", 100))
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    if args.rates is not None:
        rate_list = [float(r) for r in args.rates.split(",") if r]
    else:
        rate_list = [float(r) for r in cfg.get("rates", [0.9, 0.7])]
    n, p = s_init.shape[0], s_init.shape[2] if s_init.ndim == 3 else s_init.shape[1]
    if "xi_init" in cfg:
        xi_init = np.asarray(cfg["xi_init"], dtype=float)
    else:
        xi_init = random_initial_states(n, p, seed)
    traj = run(spec.laplacian, s_init, xi_init, b, design, horizon)
    out_dir = _ensure_out(args)
    target = out_dir if out_dir is not None else Path(".")

    header = ["t", "sync_error", "dyn_dev"] + [f"dev_agent_{i+1}" for i in range(n)]
    rows = [[t, traj.sync_error[t], traj.dynamics_deviation[t], *traj.agent_deviation[t]]
            for t in range(horizon + 1)]
    _write_csv(target / f"{name}_trajectory.csv", header, rows)

    comp_header = ["t"] + [f"dev_a{i+1}_c{k+1}" for i in range(n) for k in range(p)]
    comp_rows = [[t, *traj.deviations[t].ravel()] for t in range(horizon + 1)]
    _write_csv(target / f"{name}_components.csv", comp_header, comp_rows)

    for r in rate_list:
        ratios = ratio_series(traj.sync_error, r)
        _write_csv(target / f"{name}_ratio_{r!r}.csv",
                   ["t", "value", f"ratio_r{r!r}"],
                   [[t, traj.sync_error[t], ratios[t]] for t in range(horizon + 1)])

    report = _design_report(spec, design)
    sim_report = {
        "horizon": horizon,
        "seed": seed,
        "initial_sync_error": traj.sync_error[0],
        "final_sync_error": traj.sync_error[-1],
    }
    try:
        window = (min(20, (horizon + 1) // 4), horizon + 1)
        sim_report["estimated_rate"] = estimate_rate(traj.sync_error, window).rate
    except ArgumentError:
        sim_report["estimated_rate"] = None
    tail_start = min(20, max(0, horizon - 2))
    cert = check_decay(traj.dynamics_deviation, design.contraction,
                       tail_start=tail_start, slack=0.05)
    sim_report["averaging_certificate"] = {
        "rate": cert.rate,
        "empirical_sup": cert.empirical_sup,
        "passed": cert.passed,
    }
    report["simulation"] = _jsonable(sim_report)
    _emit_report(report, name, out_dir)
    return EXIT_OK


def cmd_decouple_suite(args) -> int:
    if args.trials < 1:
        raise ArgumentError(f"--trials must be >= 1, got {args.trials}")
    seed = args.seed if args.seed is not None else 42
    horizon = args.horizon if args.horizon is not None else 300
    rows = decouple_suite(seed, args.trials, horizon=horizon)
    out_dir = _ensure_out(args)
    target = out_dir if out_dir is not None else Path(".")
    header = ["seed", "rho_As", "rho_Astar", "kappa", "r_tested", "sup_ratio", "passed"]
    _write_csv(target / f"decouple_suite_{seed}.csv", header,
               [[row[h] for h in header] for row in rows])
    hypothesis_rows = [r for r in rows if r["hypothesis_satisfied"]]
    n_failed = sum(1 for r in hypothesis_rows if not r["passed"])
    control_failed = all(not r["passed"] for r in rows if not r["hypothesis_satisfied"])
    print(f"{len(hypothesis_rows) - n_failed}/{len(hypothesis_rows)} "
          f"hypothesis-satisfying trials passed; negative control "
          f"{'failed as expected' if control_failed else 'UNEXPECTEDLY PASSED'}")
    return EXIT_OK if n_failed == 0 else EXIT_SUITE_FAILED


def _ensure_out(args) -> Path | None:
    if args.out is None:
        return None
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heterosync",
        description="Coupling design, simulation, and decay certification "
                    "for heterogeneous multiagent ensembles",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--horizon", type=int, default=None)
        sp.add_argument("--out", default=None, help="output directory")

    sp_analyze = sub.add_parser("analyze", help="design only, no simulation")
    sp_analyze.add_argument("--config", required=True)
    common(sp_analyze)
    sp_analyze.set_defaults(func=cmd_analyze)

    sp_sim = sub.add_parser("simulate", help="design, simulate, write CSV data")
    sp_sim.add_argument("--config", required=True)
    sp_sim.add_argument("--rates", default=None,
                        help="comma-separated comparison rates for ratio CSVs")
    common(sp_sim)
    sp_sim.set_defaults(func=cmd_simulate)

    sp_suite = sub.add_parser("decouple-suite",
                              help="random decay-certificate suite with negative control")
    sp_suite.add_argument("--trials", type=int, default=100)
    common(sp_suite)
    sp_suite.set_defaults(func=cmd_decouple_suite)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except AssumptionError as exc:
        print(f"assumption failure: {exc}", file=sys.stderr)
        return EXIT_ASSUMPTION
    except (ConvergenceError, NumericalError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ArgumentError, HeterosyncError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
