"""Command-line entry point: ``dynerg {analyze,simulate,verify,oracle}``."""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import acceptance
from .config import ConfigError, RunConfig, load_schema
from .graphs import (
    GraphError,
    automorphism_count,
    canonical_form,
    common_subgraph_patterns,
    graph_name,
    resolve_graph,
    subgraph_pattern_count,
)
from .scaling import (
    MAX_ENUMERATION_VERTICES,
    RegimeError,
    ScalingRegime,
    equioptimal,
    format_fraction,
    opt_exponent,
    optimal_common_subgraphs,
    pairing_constant,
)
from .simulator import SimulationConsistencyError, simulate_many
from .stats import MomentAccumulator, compare_covariance, mean_z_scores
from .theory import example_report, exact_covariance_matrix, limiting_covariance, motif_summary

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
PLOT_COLUMNS = ["series", "motif_i", "motif_j", "s", "t", "value"]


class OutputError(RuntimeError):
    pass


def _threads(arg: int | None) -> int:
    if arg is not None:
        return max(1, arg)
    env = os.environ.get("DYNERG_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"DYNERG_THREADS must be an integer, got {env!r}") from None
    return 1


def _out_dir(args, config: RunConfig | None) -> Path:
    out = Path(args.out or (config.output_dir if config else "out"))
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create output directory {out}: {exc.strerror}") from None
    return out


def _write_text(path: Path, text: str) -> None:
    try:
        path.write_text(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror}") from None


def _finite(obj):
    # strict JSON has no NaN/inf
    if isinstance(obj, float):
        return obj if np.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def _write_json(path: Path, payload: dict) -> None:
    _write_text(path, json.dumps(_finite(payload), indent=2, allow_nan=False) + "\n")


def _write_csv(path: Path, header: list[str], rows) -> int:
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\r\n")
            w.writerow(header)
            n = 0
            for row in rows:
                w.writerow(row)
                n += 1
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror}") from None
    return n


def _num(x: float) -> str:
    return repr(float(x))


def _labels(names: list[str], grid) -> list[str]:
    return [f"{name}@{t:g}" for name in names for t in grid]


def _kernel_rows(series: str, matrix: np.ndarray, names: list[str], grid):
    n = len(grid)
    for i, a in enumerate(names):
        for j, b in enumerate(names):
            for x, s in enumerate(grid):
                for y, t in enumerate(grid):
                    yield [series, a, b, _num(s), _num(t), _num(matrix[i * n + x, j * n + y])]


def _load_config(args) -> RunConfig:
    if not args.config:
        raise ConfigError("--config is required for this subcommand")
    config = RunConfig.load(args.config)
    return config.with_overrides(seed=args.seed)


# -- analyze ------------------------------------------------------------------

def _pattern_json(g) -> dict:
    return {"name": str(g), "vertices": g.n_vertices, "edges": g.edge_list()}


def build_report(config: RunConfig) -> dict:
    regime, dyn = config.regime, config.dynamics
    motifs = config.motif_graphs()
    names = [graph_name(H) for H in motifs]
    report = {
        "alpha": format_fraction(regime.alpha),
        "regime_kind": regime.kind,
        "N": config.N,
        "grid": list(config.grid),
        "motifs": [{"name": name, **motif_summary(H, regime)} for name, H in zip(names, motifs)],
        "pairs": [],
    }
    for i, Hi in enumerate(motifs):
        for j in range(i, len(motifs)):
            Hj = motifs[j]
            eq = equioptimal(Hi, Hj, regime)
            constants = []
            for g in sorted(optimal_common_subgraphs(Hi, Hj, regime)):
                joint = Hi.n_vertices + Hj.n_vertices - g.n_vertices
                enum = (format_fraction(pairing_constant(Hi, Hj, g, "enumerate"))
                        if joint <= MAX_ENUMERATION_VERTICES else None)
                closed = (format_fraction(pairing_constant(Hi, Hj, g, "closed-form", regime))
                          if eq else None)
                constants.append({"pattern": str(g), "enumerate": enum, "closed_form": closed})
            report["pairs"].append({
                "i": i, "j": j, "equioptimal": eq,
                "f_opt_exponent": format_fraction(opt_exponent(Hi, Hj, regime)),
                "ocs": [_pattern_json(g) for g in sorted(optimal_common_subgraphs(Hi, Hj, regime))],
                "constants": constants,
            })
    limit = limiting_covariance(motifs, regime, dyn).matrix(config.grid)
    exact = exact_covariance_matrix(motifs, config.N, dyn, config.grid)
    report["sigma"] = {
        "labels": _labels(names, config.grid),
        "limit": limit.tolist(),
        "exact_normalized": exact.tolist(),
    }
    report["example"] = (example_report(regime.alpha, config.lambda_on, config.lambda_off, config.horizon)
                         if 0 < regime.alpha < 1 else None)
    return report


def cmd_analyze(args) -> int:
    config = _load_config(args)
    out = _out_dir(args, config)
    report = build_report(config)
    jsonschema.validate(report, load_schema("report.schema.json"))
    _write_json(out / "report.json", report)
    names = [m["name"] for m in report["motifs"]]
    rows = list(_kernel_rows("sigma_limit", np.array(report["sigma"]["limit"]), names, config.grid))
    rows += _kernel_rows("sigma_exact", np.array(report["sigma"]["exact_normalized"]), names, config.grid)
    _write_csv(out / "plotdata.csv", PLOT_COLUMNS, rows)
    for m in report["motifs"]:
        ocs = ", ".join(p["name"] for p in m["ocs"])
        print(f"{m['name']}: F exponent {m['f_exponent']}, optimal {m['f_opt_exponent']}, "
              f"normalizer N^{m['normalizer_exponent']}, OCS {{{ocs}}}")
    print(f"wrote {out / 'report.json'} and {out / 'plotdata.csv'}")
    return EXIT_OK


# -- simulate -----------------------------------------------------------------

def cmd_simulate(args) -> int:
    config = _load_config(args)
    out = _out_dir(args, config)
    sim = config.to_sim_config()
    names = [graph_name(H) for H in sim.motifs]
    grid = list(config.grid)
    dim = len(names) * len(grid)
    acc = MomentAccumulator(dim)

    def rows():
        for series in simulate_many(sim, _threads(args.threads)):
            acc.accumulate(series.normalized.ravel())
            for i, name in enumerate(names):
                for k, t in enumerate(grid):
                    yield [series.replication, name, _num(t), int(series.raw[i, k]),
                           _num(series.expected[i, k]), _num(series.normalized[i, k])]

    n_rows = _write_csv(out / "counts.csv",
                        ["replication", "motif", "time", "raw", "expected", "normalized"], rows())

    exact = exact_covariance_matrix(sim.motifs, config.N, sim.dynamics, grid)
    limit = limiting_covariance(sim.motifs, sim.dynamics.regime, sim.dynamics).matrix(grid)
    z = config.thresholds["z"]
    summary = {
        "config": config.to_dict(),
        "replications": acc.count,
        "rows": n_rows,
        "labels": _labels(names, grid),
        "mean": acc.mean.tolist(),
        "mean_z": mean_z_scores(acc).tolist(),
        "covariance": acc.covariance().tolist(),
        "skewness": acc.skewness().tolist(),
        "kurtosis": acc.kurtosis().tolist(),
        "exact_covariance": exact.tolist(),
        "limit_covariance": limit.tolist(),
    }
    for key, ref in (("vs_exact", exact), ("vs_limit", limit)):
        if acc.count >= 100:
            cmp = compare_covariance(acc, ref, threshold=z)
            summary[key] = {**cmp.summary(), "z": cmp.z.tolist()}
        else:
            summary[key] = None
    _write_json(out / "summary.json", summary)

    n = len(grid)
    plot = []
    for i, name in enumerate(names):
        for k, t in enumerate(grid):
            d = i * n + k
            plot.append(["empirical_mean", name, name, _num(t), _num(t), _num(acc.mean[d])])
            plot.append(["empirical_variance", name, name, _num(t), _num(t),
                         _num(acc.covariance()[d, d])])
            plot.append(["exact_variance", name, name, _num(t), _num(t), _num(exact[d, d])])
            plot.append(["limit_variance", name, name, _num(t), _num(t), _num(limit[d, d])])
    _write_csv(out / "plotdata.csv", PLOT_COLUMNS, plot)
    print(f"{acc.count} replications, {n_rows} rows -> {out / 'counts.csv'}")
    if summary["vs_exact"] is not None:
        print(f"max |z| vs exact covariance: {summary['vs_exact']['max_abs_z']:.3f}")
    return EXIT_OK


# -- verify -------------------------------------------------------------------

def _parse_criteria(text: str | None) -> list[int] | None:
    if not text:
        return None
    try:
        return [int(c) for c in text.split(",") if c.strip()]
    except ValueError:
        raise ConfigError(f"--criteria expects a comma-separated list of integers, got {text!r}") from None


def cmd_verify(args) -> int:
    config = _load_config(args) if args.config else None
    out = _out_dir(args, config)
    verdicts = acceptance.run_criteria(
        _parse_criteria(args.criteria), quick=args.quick, threads=_threads(args.threads),
        fault=args.inject_fault, on_verdict=lambda v: print(v.line(), flush=True),
    )
    all_passed = all(v.passed for v in verdicts)
    _write_json(out / "verdicts.json", {
        "passed": all_passed,
        "quick": args.quick,
        "verdicts": [v.to_dict() for v in verdicts],
    })
    print(f"{sum(v.passed for v in verdicts)}/{len(verdicts)} criteria passed; "
          f"verdicts in {out / 'verdicts.json'}")
    return EXIT_OK if all_passed else EXIT_FAIL


# -- oracle -------------------------------------------------------------------

def cmd_oracle(args) -> int:
    H, Hs = resolve_graph(args.graph), resolve_graph(args.other)
    regime = ScalingRegime.power_law(args.alpha)
    cs = sorted(common_subgraph_patterns(H, Hs))
    if args.pattern:
        g = canonical_form(resolve_graph(args.pattern))
        if g not in cs:
            raise ConfigError(f"{g} is not a common subgraph of {graph_name(H)} and {graph_name(Hs)}")
        targets = [g]
    else:
        targets = cs
    print(f"A({graph_name(H)}) = {automorphism_count(H)}")
    print(f"A({graph_name(Hs)}) = {automorphism_count(Hs)}")
    print(f"CS = {{{', '.join(str(g) for g in cs)}}}")
    eq = equioptimal(H, Hs, regime)
    print(f"alpha = {format_fraction(regime.alpha)}: "
          f"{'equioptimal' if eq else 'not equioptimal'}, "
          f"OCS = {{{', '.join(str(g) for g in sorted(optimal_common_subgraphs(H, Hs, regime)))}}}")
    for g in targets:
        enum = pairing_constant(H, Hs, g, "enumerate")
        try:
            closed = str(pairing_constant(H, Hs, g, "closed-form", regime))
        except RegimeError as exc:
            closed = f"refused: {exc}"
        print(f"{g}: S({graph_name(H)}) = {subgraph_pattern_count(H, g)}, "
              f"S({graph_name(Hs)}) = {subgraph_pattern_count(Hs, g)}, A = {automorphism_count(g)}, "
              f"C enumerate = {enum}, closed-form = {closed}")
    return EXIT_OK


# -- entry ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dynerg", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required: bool):
        p.add_argument("--config", required=config_required, help="run configuration (JSON)")
        p.add_argument("--out", help="output directory (default: config output_dir)")
        p.add_argument("--threads", type=int, help="worker threads (default: $DYNERG_THREADS or 1)")
        p.add_argument("--seed", type=int, help="override the config seed (unsigned 64-bit)")

    p = sub.add_parser("analyze", help="exponents, optimal subgraphs, constants and covariance kernels")
    common(p, True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="simulate count processes and compare with theory")
    common(p, True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="run the acceptance criteria")
    common(p, False)
    p.add_argument("--criteria", help="comma-separated criterion numbers (default: all)")
    p.add_argument("--quick", action="store_true", help="reduced sample sizes (indicative only)")
    p.add_argument("--inject-fault", choices=["oracle"], help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="brute-force pairing constants next to the closed form")
    p.add_argument("graph", help="preset name, edge-list text or edge-list file")
    p.add_argument("other", help="second graph")
    p.add_argument("pattern", nargs="?", help="intersection pattern (default: every common subgraph)")
    p.add_argument("--alpha", default="0", help="scaling exponent as p/q or decimal (default 0)")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "seed", None) is not None and not 0 <= args.seed < 2**64:
        parser.error("--seed must be an unsigned 64-bit integer")
    try:
        return args.func(args)
    except RegimeError as exc:
        print(f"dynerg: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        if isinstance(exc.__cause__, RegimeError):
            print(f"dynerg: {exc.__cause__}", file=sys.stderr)
        else:
            print(f"dynerg: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GraphError, ValueError) as exc:
        print(f"dynerg: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OutputError, SimulationConsistencyError) as exc:
        print(f"dynerg: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
