"""Command-line front end: ``znelab {coeffs,sweep,drift,power,analyze}``.

Exit codes: 0 success, 2 usage or configuration error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import hashlib
import io
import json
import logging
import math
import os
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from . import __version__
from .config import DEFAULT_SEED, ConfigError, ExperimentConfig, load_config
from .drift import illusion_report, run_longitudinal
from .exceptions import DegenerateSampleError, InvalidArgumentError
from .seeding import derive_rng
from .stats import (
    PairedSample,
    bootstrap_power,
    cliffs_delta,
    cohens_d,
    mean_confidence_interval,
    paired_t_test,
    wilcoxon_signed_rank,
)
from .sweep import REGIMES, activity_report, classify, run_sweep
from .zne.coefficients import richardson_coefficients, variance_amplification_bound, variance_factor

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 2, 3

HEATMAP_COLUMNS = (
    "noise_preset", "trotter_depth", "axis", "variant", "n_reps", "mean_delta", "cohens_d",
    "cliffs_delta", "p_raw", "p_bonf", "p_bh", "class_raw", "class_bonf", "class_bh",
)
TIMESERIES_COLUMNS = ("session", "time_h", "mean_raw", "ci95_lo", "ci95_hi", "mean_mitigated", "cohens_d", "class")
POWER_COLUMNS = ("n_reps", "power_estimate", "ci95_lo", "ci95_hi")

# standardised effect whose power crosses 0.8 at 20 replicates
MODERATE_EFFECT = 0.7
SYNTHETIC_POOL = 2000

logger = logging.getLogger("znelab")


class UsageError(InvalidArgumentError):
    pass


# -- serialisation ------------------------------------------------------------


def fmt(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".12g")
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(getattr(value, "value", value))


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return float(format(v, ".12g")) if math.isfinite(v) else None
    if isinstance(value, (int, np.integer)):
        return int(value)
    return getattr(value, "value", value)


def to_csv(columns: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def to_json(obj: Any) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=False) + "\n"


def table_text(columns: Sequence[str], rows: Sequence[Sequence[Any]], fmt_name: str) -> str:
    if fmt_name == "json":
        return to_json([dict(zip(columns, r)) for r in rows])
    return to_csv(columns, rows)


def _write(path: Path, text: str) -> str:
    data = text.encode("utf-8")
    path.write_bytes(data)
    return hashlib.sha256(data).hexdigest()


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    now = (
        _dt.datetime.fromtimestamp(int(epoch), _dt.timezone.utc)
        if epoch
        else _dt.datetime.now(_dt.timezone.utc)
    )
    return now.replace(microsecond=0).isoformat()


def write_outputs(out: Path, files: dict[str, str], config: ExperimentConfig) -> dict:
    """Write each file, then a manifest with digests and the resolved config."""
    out.mkdir(parents=True, exist_ok=True)
    sums = {name: _write(out / name, text) for name, text in files.items()}
    manifest = {
        "config_digest": config.digest,
        "tool_version": __version__,
        "timestamp": _timestamp(),
        "seed": config.master_seed,
        "files": sums,
        "config": config.to_dict(),
    }
    _write(out / "manifest.json", to_json(manifest))
    return manifest


# -- verbs --------------------------------------------------------------------


def _floats(text: str, what: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"{what}: expected comma-separated numbers, got {text!r}") from None


def cmd_coeffs(args) -> int:
    factors = _floats(args.factors, "--factors")
    coeffs = richardson_coefficients(factors)
    report = {
        "scale_factors": sorted(factors),
        "coefficients": list(coeffs),
        "sum": float(np.sum(coeffs)),
        "sum_abs": variance_amplification_bound(factors),
        "variance_factor": variance_factor(factors),
    }
    if args.format == "json":
        sys.stdout.write(to_json(report))
        return EXIT_OK
    lines = ["lambda\tc"]
    lines += [f"{fmt(l)}\t{fmt(c)}" for l, c in zip(report["scale_factors"], coeffs)]
    lines += [
        f"sum c\t{fmt(report['sum'])}",
        f"sum |c|\t{fmt(report['sum_abs'])}",
        f"sum c^2\t{fmt(report['variance_factor'])}",
    ]
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def _config(args) -> ExperimentConfig:
    config = load_config(args.config)
    if args.seed is not None:
        config = config.with_seed(args.seed)
    return config


def _out_dir(args, config: ExperimentConfig) -> Path:
    return Path(args.out if args.out is not None else config.output_dir)


def heatmap_rows(results) -> list[tuple]:
    rows = []
    for r in results:
        c = r.config
        rows.append(
            (
                c.noise, c.depth, c.axis or "baseline", c.variant, c.n_reps, r.paired.mean,
                r.cohens_d, None if r.effects is None else r.effects.cliffs_delta,
                None if r.t_result is None else r.t_result.p_value, r.p_bonferroni, r.p_bh,
                r.class_raw, r.class_bonferroni, r.class_bh,
            )
        )
    return rows


def cmd_sweep(args) -> int:
    config = _config(args)
    if config.sweep is None:
        raise ConfigError(f"scenario {config.scenario!r} has no 'sweep' section")
    results, summary = run_sweep(config.sweep, config.master_seed, args.parallelism)
    activity = {regime: activity_report(results, regime) for regime in REGIMES}
    diagnostics = [
        {"noise": r.config.noise, "depth": r.config.depth, "axis": r.config.axis or "baseline",
         "variant": r.config.variant, "message": r.diagnostics}
        for r in results if r.diagnostics
    ]
    report = {"scenario": config.scenario, "summary": summary, "activity": activity, "diagnostics": diagnostics}
    ext = "json" if args.format == "json" else "csv"
    manifest = write_outputs(
        _out_dir(args, config),
        {f"heatmap.{ext}": table_text(HEATMAP_COLUMNS, heatmap_rows(results), args.format), "activity.json": to_json(report)},
        config,
    )
    _log_files(manifest)
    verdicts = ", ".join(f"{a}={v}" for a, v in activity["raw"]["axes"].items())
    logger.info("%d configurations; axes: %s", len(results), verdicts)
    return EXIT_OK


def timeseries_rows(result, session: str) -> list[tuple]:
    rows = []
    for p in result.points:
        lo, hi = mean_confidence_interval(p.raw)
        rows.append((session, p.time, float(np.mean(p.raw)), lo, hi, float(np.mean(p.mitigated)), p.cohens_d, p.cls))
    return rows


def illusion_dict(report) -> dict:
    s = report.severity
    return {
        "eta_squared": s.eta_squared,
        "r1": s.r1,
        "icc": s.icc,
        "n_eff": s.n_eff,
        "d_min": report.d_min,
        "d_max": report.d_max,
        "illusion_ratio": report.ratio_label if report.sign_crossing else report.illusion_ratio,
        "sign_crossing": report.sign_crossing,
        "straddles_boundary": report.straddles_boundary,
        "classes": list(report.classes),
        "effective_classes": list(report.effective_classes),
    }


def cmd_drift(args) -> int:
    config = _config(args)
    spec = config.drift
    if spec is None:
        raise ConfigError(f"scenario {config.scenario!r} has no 'drift' section")
    result = run_longitudinal(spec.point, spec.noise(), spec.schedule, spec.n_reps, config.master_seed)
    report = illusion_report(result, config.alpha)
    ext = "json" if args.format == "json" else "csv"
    body = {"scenario": config.scenario, "session": spec.schedule.session, "n_points": len(result.points),
            "n_reps": spec.n_reps, "e_ideal": result.e_ideal, **illusion_dict(report)}
    manifest = write_outputs(
        _out_dir(args, config),
        {
            f"timeseries.{ext}": table_text(TIMESERIES_COLUMNS, timeseries_rows(result, spec.schedule.session), args.format),
            "illusion.json": to_json(body),
        },
        config,
    )
    _log_files(manifest)
    logger.info("eta^2=%.3f r1=%.3f illusion ratio=%s", report.severity.eta_squared, report.severity.r1, report.ratio_label)
    return EXIT_OK


def read_pairs(path: str) -> PairedSample:
    """Rows of ``raw_error,mitigated_error``; every bad row is reported at once."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    reader = csv.DictReader(io.StringIO(text))
    needed = ("raw_error", "mitigated_error")
    if reader.fieldnames is None or any(c not in reader.fieldnames for c in needed):
        raise UsageError(f"{path}: header must contain columns raw_error, mitigated_error (got {reader.fieldnames})")
    raw, mit, problems = [], [], []
    for line, row in enumerate(reader, start=2):
        values = []
        for col in needed:
            cell = (row.get(col) or "").strip()
            try:
                v = float(cell)
                if not math.isfinite(v):
                    raise ValueError
                values.append(v)
            except ValueError:
                problems.append(f"row {line}: {col} {cell!r} is not a finite number")
        if len(values) == 2:
            raw.append(values[0])
            mit.append(values[1])
    if problems:
        raise UsageError(f"{path}: malformed rows\n  " + "\n  ".join(problems))
    if len(raw) < 2:
        raise UsageError(f"{path}: need at least 2 data rows, got {len(raw)}")
    return PairedSample.from_errors(raw, mit)


def read_deltas(path: str) -> PairedSample:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    header = text.splitlines()[0] if text.strip() else ""
    if "raw_error" in header:
        return read_pairs(path)
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or "delta" not in reader.fieldnames:
        raise UsageError(f"{path}: expected a 'delta' column or raw_error, mitigated_error columns")
    values, problems = [], []
    for line, row in enumerate(reader, start=2):
        try:
            values.append(float(row["delta"]))
        except (TypeError, ValueError):
            problems.append(f"row {line}: delta {row.get('delta')!r} is not a number")
    if problems:
        raise UsageError(f"{path}: malformed rows\n  " + "\n  ".join(problems))
    return PairedSample(np.array(values))


def synthetic_deltas(d: float, n: int, seed: int) -> PairedSample:
    """Normal deltas rescaled to sample mean ``d`` and sample sd 1 exactly."""
    if n < 2:
        raise UsageError("--synthetic needs n >= 2")
    x = derive_rng(seed, "synthetic", n).standard_normal(n)
    x = (x - x.mean()) / x.std(ddof=1)
    return PairedSample(x + d)


def cmd_power(args) -> int:
    if (args.deltas is None) == (args.synthetic is None):
        raise UsageError("power needs exactly one of --deltas FILE or --synthetic d[,n]")
    seed = DEFAULT_SEED if args.seed is None else args.seed
    if args.deltas is not None:
        sample = read_deltas(args.deltas)
    else:
        parts = _floats(args.synthetic, "--synthetic")
        if len(parts) not in (1, 2):
            raise UsageError("--synthetic takes d or d,n")
        n_pool = int(parts[1]) if len(parts) == 2 else SYNTHETIC_POOL
        sample = synthetic_deltas(parts[0], n_pool, seed)
    grid = [int(x) for x in _floats(args.grid, "--grid")]
    curve = bootstrap_power(sample, grid, args.alpha, args.n_boot, derive_rng(seed, "power"))
    rows = list(zip(curve.n_grid, curve.power, curve.ci_low, curve.ci_high))
    text = table_text(POWER_COLUMNS, rows, args.format)
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _write(out / f"power.{'json' if args.format == 'json' else 'csv'}", text)
    else:
        sys.stdout.write(text)
    smallest = curve.smallest_n(0.8)
    logger.info("smallest n with power >= 0.8: %s", smallest if smallest is not None else f"none up to {max(grid)}")
    return EXIT_OK


def analyze_pairs(sample: PairedSample, alpha: float = 0.05) -> dict:
    report: dict = {"n": sample.n, "mean_delta": sample.mean}
    lo, hi = mean_confidence_interval(sample.deltas)
    report["ci95_mean_delta"] = [lo, hi]
    report["cliffs_delta"] = cliffs_delta(sample)
    try:
        t = paired_t_test(sample)
        d = cohens_d(sample)
        report["t_test"] = {"statistic": t.statistic, "p_value": t.p_value, "df": t.df}
        report["cohens_d"] = d
    except DegenerateSampleError as exc:
        t, d = None, None
        report["t_test"] = None
        report["cohens_d"] = None
        report["diagnostics"] = str(exc)
    try:
        w = wilcoxon_signed_rank(sample)
        report["wilcoxon"] = {"statistic": w.statistic, "p_value": w.p_value, "method": w.method}
    except DegenerateSampleError:
        report["wilcoxon"] = None
    cls = classify(t, d, alpha)
    report["classification"] = cls
    report["degenerate"] = t is None
    return report


def cmd_analyze(args) -> int:
    sample = read_pairs(args.pairs)
    text = to_json(analyze_pairs(sample, args.alpha))
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _write(out / "analysis.json", text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _log_files(manifest: dict) -> None:
    for name, sha in manifest["files"].items():
        logger.info("wrote %s (sha256 %s)", name, sha[:16])


# -- entry point --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="znelab", description="Zero-noise extrapolation reproduction lab.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-q", "--quiet", action="store_true", help="only print errors")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int, help=f"master seed (default {DEFAULT_SEED} or the config's)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--parallelism", type=int, default=1, help="worker processes")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("coeffs", parents=[common], help="Richardson coefficients and variance amplification")
    p.add_argument("--factors", required=True, help="comma-separated scale factors, e.g. 1,3,5")
    p.set_defaults(func=cmd_coeffs)

    for verb, func, default in (("sweep", cmd_sweep, "default-sweep"), ("drift", cmd_drift, "weekend-drift")):
        p = sub.add_parser(verb, parents=[common], help=f"run a {verb} scenario")
        p.add_argument("--config", default=default, help=f"YAML file or shipped scenario name (default {default})")
        p.set_defaults(func=func)

    p = sub.add_parser("power", parents=[common], help="bootstrap power curve")
    p.add_argument("--deltas", help="CSV with a 'delta' column or raw_error, mitigated_error columns")
    p.add_argument("--synthetic", help=f"d[,n]: normal deltas with effect d (moderate effect is {MODERATE_EFFECT})")
    p.add_argument("--grid", default="5,10,15,20,25,30", help="comma-separated replicate counts")
    p.add_argument("--n-boot", type=int, default=2000)
    p.add_argument("--alpha", type=float, default=0.05)
    p.set_defaults(func=cmd_power)

    p = sub.add_parser("analyze", parents=[common], help="statistics battery on paired errors")
    p.add_argument("--pairs", required=True, help="CSV with columns raw_error, mitigated_error")
    p.add_argument("--alpha", type=float, default=0.05)
    p.set_defaults(func=cmd_analyze)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.INFO, format="%(message)s", stream=sys.stderr)
    if args.parallelism < 1:
        print("error: --parallelism must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (ConfigError, InvalidArgumentError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - report any runtime failure as exit 3
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
