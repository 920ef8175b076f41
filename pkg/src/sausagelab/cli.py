"""Batch command-line front end.

Subcommands: simulate, convergence, reference, fit, report.  Outputs are
deterministic: CSV floats use shortest round-trip repr, the manifest lists
every emitted file with its sha256, and wall-clock timing goes to a side
log (run.log) that is excluded from the manifest so that reruns are
byte-identical.  Exit codes: 0 success, 2 configuration error, 3 numeric or
geometry error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import asdict, replace
from pathlib import Path

from . import __version__
from .fitting import FORMS, default_init, fit
from .geometry import GeometryError
from .montecarlo import (
    STATISTICS,
    ExperimentConfig,
    convergence_study,
    run_experiment,
)
from .reference import (
    QuadratureError,
    QuadratureSpec,
    expected_area_with_error,
    expected_perimeter,
    legall_area_asymptote,
    legall_perimeter_asymptote,
)
from .svg import Series, emit_svg

__all__ = ["main", "parse_config", "ConfigError"]

EXIT_CONFIG = 2
EXIT_NUMERIC = 3


class ConfigError(Exception):
    pass


_CONFIG_KEYS = {
    "T": float,
    "k": str,
    "radii": str,
    "N": int,
    "resolution": float,
    "delta": float,
    "seed": int,
    "generator": str,
}


def _parse_float_list(text: str, name: str):
    try:
        return tuple(float(tok) for tok in str(text).split(",") if tok.strip())
    except ValueError as exc:
        raise ConfigError(f"field {name!r}: expected comma-separated numbers") from exc


def _parse_int_list(text: str, name: str):
    try:
        return tuple(int(tok) for tok in str(text).split(",") if tok.strip())
    except ValueError as exc:
        raise ConfigError(f"field {name!r}: expected comma-separated integers") from exc


def read_config_file(path: Path) -> dict:
    """Flat key=value lines; blank lines and # comments ignored."""
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{ln}: expected key=value")
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{ln}: unknown field {key!r}")
        values[key] = val.strip()
    return values


def parse_config(args, file_values: dict | None = None) -> ExperimentConfig:
    """Merge defaults < config file < flags into a validated config."""
    merged: dict = {}
    if file_values:
        merged.update(file_values)
    for key in _CONFIG_KEYS:
        flag = getattr(args, key if key != "seed" else "seed", None)
        if flag is not None:
            merged[key] = flag
    kwargs = {}
    if "T" in merged:
        kwargs["T"] = _coerce(merged, "T", float)
    if "k" in merged:
        ks = _parse_int_list(merged["k"], "k")
        if len(ks) != 1:
            raise ConfigError("field 'k': simulate takes a single step count")
        kwargs["k"] = ks[0]
    if "radii" in merged:
        kwargs["radii"] = _parse_float_list(merged["radii"], "radii")
    if "N" in merged:
        kwargs["N"] = _coerce(merged, "N", int)
    if "resolution" in merged:
        kwargs["resolution"] = _coerce(merged, "resolution", float)
    if "delta" in merged:
        kwargs["delta_pixels"] = _coerce(merged, "delta", float)
    if "seed" in merged:
        kwargs["base_seed"] = _coerce(merged, "seed", int)
    if "generator" in merged:
        kwargs["generator"] = str(merged["generator"])
    try:
        return ExperimentConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _coerce(merged, key, typ):
    try:
        return typ(merged[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"field {key!r}: expected {typ.__name__}, got {merged[key]!r}") from exc


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_csv(path: Path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_bytes(("\n".join(lines) + "\n").encode())


def _config_dict(cfg: ExperimentConfig) -> dict:
    d = asdict(cfg)
    d["radii"] = list(d["radii"])
    return d


def _write_manifest(outdir: Path, cfg_dict: dict, filenames):
    outputs = {}
    for name in sorted(filenames):
        digest = hashlib.sha256((outdir / name).read_bytes()).hexdigest()
        outputs[name] = digest
    manifest = {
        "artifact_version": __version__,
        "config": cfg_dict,
        "outputs": outputs,
    }
    data = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    (outdir / "manifest.json").write_bytes(data.encode())


def _write_runlog(outdir: Path, started: float, threads: int):
    elapsed = time.time() - started
    (outdir / "run.log").write_text(
        f"threads={threads}\nwall_clock_seconds={elapsed:.3f}\n"
    )


def _set_threads(threads: int):
    if threads < 1:
        raise ConfigError("threads must be >= 1")
    import numba

    numba.set_num_threads(threads)


def _cmd_simulate(args) -> int:
    started = time.time()
    file_values = read_config_file(args.config) if args.config else None
    cfg = parse_config(args, file_values)
    _set_threads(args.threads)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    rows = run_experiment(cfg)
    _write_csv(
        outdir / "experiment.csv",
        ("r", "statistic", "mean", "min", "max", "std", "N"),
        [(row.r, row.statistic, row.mean, row.min, row.max, row.std, row.N) for row in rows],
    )
    cfg_dict = _config_dict(cfg)
    (outdir / "config.json").write_bytes(
        (json.dumps(cfg_dict, indent=2, sort_keys=True) + "\n").encode()
    )
    _write_manifest(outdir, cfg_dict, ["experiment.csv", "config.json"])
    _write_runlog(outdir, started, args.threads)
    return 0


def _cmd_convergence(args) -> int:
    started = time.time()
    file_values = read_config_file(args.config) if args.config else None
    ks = _parse_int_list(args.k, "k") if args.k else (64, 256, 1024, 4096)
    base = parse_config(_strip_k(args), file_values)
    if len(base.radii) != 1:
        raise ConfigError("convergence runs at a single radius (pass --radii R)")
    cfg = replace(base, k=max(ks))
    _set_threads(args.threads)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    result = convergence_study(cfg, ks)
    csv_rows = []
    for k, agg in result.rows:
        h = result.hausdorff[k]
        g = result.sup_gap[k]
        csv_rows.append(
            (k, agg.r, agg.statistic, agg.mean, agg.min, agg.max, agg.std,
             float(h.mean()), float(g.mean()), agg.N)
        )
    _write_csv(
        outdir / "convergence.csv",
        ("k", "r", "statistic", "mean", "min", "max", "std",
         "hausdorff_to_finest_mean", "sup_gap_to_finest_mean", "N"),
        csv_rows,
    )
    cfg_dict = _config_dict(cfg)
    cfg_dict["k_list"] = list(result.ks)
    (outdir / "config.json").write_bytes(
        (json.dumps(cfg_dict, indent=2, sort_keys=True) + "\n").encode()
    )
    _write_manifest(outdir, cfg_dict, ["convergence.csv", "config.json"])
    _write_runlog(outdir, started, args.threads)
    return 0


def _strip_k(args):
    class _NS:
        pass

    ns = _NS()
    for key in ("T", "radii", "N", "resolution", "delta", "seed", "generator", "config"):
        setattr(ns, key, getattr(args, key, None))
    ns.k = None
    return ns


def _cmd_reference(args) -> int:
    radii = _parse_float_list(args.r, "r")
    if not radii:
        raise ConfigError("field 'r': at least one radius is required")
    T = args.T if args.T is not None else 1.0
    spec = QuadratureSpec(rel_tol=args.rel_tol)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    rows = []
    for r in radii:
        area, aerr = expected_area_with_error(r, T, spec)
        perim, perr = expected_perimeter(r, T, spec)
        la = legall_area_asymptote(r, T) if 0.0 < r < 1.0 else float("nan")
        lp = legall_perimeter_asymptote(r, T) if 0.0 < r < 1.0 else float("nan")
        rows.append((r, T, area, perim, la, lp, aerr, perr))
    _write_csv(
        outdir / "reference.csv",
        ("r", "T", "expected_area", "expected_perimeter", "legall_area",
         "legall_perimeter", "area_error", "perimeter_error"),
        rows,
    )
    _write_manifest(outdir, {"r": list(radii), "T": T, "rel_tol": args.rel_tol}, ["reference.csv"])
    return 0


def _read_experiment_csv(path: Path):
    lines = path.read_text().strip().splitlines()
    header = lines[0].split(",")
    expect = ["r", "statistic", "mean", "min", "max", "std", "N"]
    if header != expect:
        raise ConfigError(f"{path}: expected header {','.join(expect)}")
    rows = []
    for line in lines[1:]:
        parts = line.split(",")
        rows.append(
            {
                "r": float(parts[0]),
                "statistic": parts[1],
                "mean": float(parts[2]),
                "min": float(parts[3]),
                "max": float(parts[4]),
                "std": float(parts[5]),
                "N": int(parts[6]),
            }
        )
    return rows


def _cmd_fit(args) -> int:
    path = Path(args.input)
    rows = _read_experiment_csv(path)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    summary = {}
    outputs = []
    for stat in args.statistics.split(","):
        stat = stat.strip()
        if stat not in FORMS:
            raise ConfigError(f"no model form for statistic {stat!r}")
        form = FORMS[stat]
        data = [(row["r"], row["mean"]) for row in rows if row["statistic"] == stat]
        if len(data) < form.n_params:
            raise ConfigError(
                f"{stat}: {len(data)} data points < {form.n_params} parameters"
            )
        init = default_init(form, data)
        result = fit(form, data, init)
        name = f"fit_{stat}.csv"
        _write_csv(
            outdir / name,
            ("parameter", "value"),
            [(f"c{i+1}", float(v)) for i, v in enumerate(result.parameters)],
        )
        outputs.append(name)
        summary[stat] = {
            "rss": result.rss,
            "max_rel_error": result.max_rel_error,
            "mean_rel_error": result.mean_rel_error,
            "iterations": result.iterations,
            "converged": result.converged,
        }
    (outdir / "fit_summary.json").write_bytes(
        (json.dumps(summary, indent=2, sort_keys=True) + "\n").encode()
    )
    outputs.append("fit_summary.json")
    _write_manifest(outdir, {"input": str(path), "statistics": args.statistics}, outputs)
    return 0


def _cmd_report(args) -> int:
    path = Path(args.input)
    rows = _read_experiment_csv(path)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    outputs = []
    for stat in STATISTICS:
        sel = [row for row in rows if row["statistic"] == stat]
        if not sel:
            continue
        sel.sort(key=lambda row: row["r"])
        xs = [row["r"] for row in sel]
        series = [
            Series("mean", xs, [row["mean"] for row in sel], line="solid"),
            Series("min", xs, [row["min"] for row in sel], line="dashed"),
            Series("max", xs, [row["max"] for row in sel], line="dotted"),
        ]
        doc = emit_svg(series, title=stat, log_x=args.log_x)
        name = f"report_{stat}.svg"
        (outdir / name).write_bytes(doc)
        outputs.append(name)
    if not outputs:
        raise ConfigError(f"{path}: no known statistics found")
    _write_manifest(outdir, {"input": str(path)}, outputs)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sausagelab",
        description="Monte Carlo intrinsic volumes of dilated planar Brownian paths",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", type=Path, help="key=value config file")
        p.add_argument("--seed", type=int, help="base seed (64-bit)")
        p.add_argument("--T", type=float, help="time horizon")
        p.add_argument("--radii", type=str, help="comma-separated radii")
        p.add_argument("--N", type=int, help="realization count")
        p.add_argument("--resolution", type=float, help="pixel size as fraction of r")
        p.add_argument("--delta", type=float, help="perimeter band half-width in pixels")
        p.add_argument("--generator", type=str, help="increments | haar:LEVEL | segment")
        p.add_argument("--out", type=str, default="out", help="output directory")
        p.add_argument("--threads", type=int, default=1, help="worker threads")

    ps = sub.add_parser("simulate", help="Monte Carlo sweep over radii")
    add_common(ps)
    ps.add_argument("--k", type=str, help="step count")
    ps.set_defaults(func=_cmd_simulate)

    pc = sub.add_parser("convergence", help="coupled discretization study")
    add_common(pc)
    pc.add_argument("--k", type=str, help="comma-separated step counts (finest last)")
    pc.set_defaults(func=_cmd_convergence)

    pr = sub.add_parser("reference", help="closed-form mean area/boundary length")
    pr.add_argument("--r", type=str, required=True, help="comma-separated radii")
    pr.add_argument("--T", type=float, help="time horizon (default 1)")
    pr.add_argument("--rel-tol", type=float, default=1e-8, dest="rel_tol")
    pr.add_argument("--out", type=str, default="out")
    pr.set_defaults(func=_cmd_reference)

    pf = sub.add_parser("fit", help="fit approximation formulae to a simulate CSV")
    pf.add_argument("--input", type=str, required=True, help="experiment.csv path")
    pf.add_argument(
        "--statistics", type=str, default="area,boundary_length", help="comma list"
    )
    pf.add_argument("--out", type=str, default="out")
    pf.set_defaults(func=_cmd_fit)

    pp = sub.add_parser("report", help="render mean/min/max SVG charts from a CSV")
    pp.add_argument("--input", type=str, required=True, help="experiment.csv path")
    pp.add_argument("--log-x", action="store_true", dest="log_x")
    pp.add_argument("--out", type=str, default="out")
    pp.set_defaults(func=_cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (GeometryError, QuadratureError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
