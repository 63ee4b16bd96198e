"""Command-line interface: calibrate, simulate, sweep, backtest, report.

All data outputs are deterministic for identical inputs and flags.  The
directory-oriented commands index everything they write in a
manifest.json.  The data directory comes from --data, or the
EPIGROWTH_DATA_DIR environment variable, or ./data.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import date
from pathlib import Path

from . import calibration, data_io, plotting, scenarios
from .params import ModelParams


def _data_dir(args) -> Path:
    if getattr(args, "data", None):
        return Path(args.data)
    env = os.environ.get("EPIGROWTH_DATA_DIR")
    if env:
        return Path(env)
    return Path("data")


def _load_params(args, config: data_io.RunConfig) -> ModelParams:
    if getattr(args, "params", None):
        return data_io.read_params(args.params)
    return config.params


def _write_manifest(out_dir: Path, command: str, files: list, extra: dict | None = None) -> None:
    doc = {"command": command, "files": sorted(files)}
    if extra:
        doc.update(extra)
    data_io.write_json(doc, out_dir / "manifest.json")


def _metrics_row(run: scenarios.SweepRun) -> dict:
    sc = run.scenario
    row = {
        "scenario": sc.name,
        "policy_start": sc.schedule.start_date.isoformat() if sc.schedule else "",
        "intensity": sc.schedule.intensity_p if sc.schedule else 0.0,
        "duration_weeks": sc.schedule.duration_days // 7 if sc.schedule else 0,
        "error": run.error or "",
    }
    if run.metrics is not None:
        m = run.metrics.to_dict()
        row.update(
            total_deaths=m["total_deaths"],
            peak_active_infections=m["peak_active_infections"],
            peak_date=m["peak_date"],
            max_output_drop_pct=m["max_output_drop_pct"],
            welfare=m["welfare"],
        )
        for day, ratio in m["output_ratio_at"].items():
            row[f"output_ratio_{day}"] = ratio
    return row


def _write_table(rows: list, path: Path) -> None:
    columns: list[str] = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(str(row.get(c, "")) for c in columns))
    data_io._atomic_write_text("\n".join(lines) + "\n", path)


def cmd_calibrate(args) -> int:
    config = data_io.load_config(args.config)
    data_dir = _data_dir(args)
    manifests = data_io.data_manifests(data_dir, config)
    missing = [str(m.path) for m in manifests.values() if not m.path.exists()]
    if missing:
        raise data_io.DataFormatError(f"missing datasets: {missing}")

    population = data_io.load_annual_series(manifests["population"])
    gdp = data_io.load_annual_series(manifests["gdp"])
    gcf = data_io.load_annual_series(manifests["gcf"])
    cases, repairs = data_io.load_case_series(manifests["cases"])
    shortfall, reduction = data_io.load_tradeoff_panel(manifests["tradeoff"])

    constants = calibration.CalibrationConstants(
        population_fit_years=tuple(config.data["population_fit_years"])
    )
    params, report = calibration.calibrate(
        population, gdp, gcf, cases, shortfall, reduction,
        case_population=float(config.data["case_population"]),
        constants=constants,
    )
    report["case_data_repairs"] = repairs

    out = Path(args.out)
    data_io.write_params(params, out, provenance={
        "source": "epigrowth calibrate",
        "data_dir": str(data_dir),
        "digest": params.digest(),
    })
    report_path = Path(args.report) if args.report else out.with_name(out.stem + "_report.json")
    data_io.write_json(report, report_path)
    print(f"wrote {out} and {report_path}")
    for name, table in report.items():
        if isinstance(table, dict) and "coefficients" in table:
            print(f"  {name}: coefficients={table['coefficients']} "
                  f"r_squared={table['r_squared']:.4f} n={table['n_obs']}")
    return 0


def _resolve_scenario(value: str, config: data_io.RunConfig) -> scenarios.Scenario:
    if value in config.scenarios:
        return config.scenarios[value]
    path = Path(value)
    if path.exists():
        with open(path) as fh:
            raw = json.load(fh)
        name = raw.pop("name", path.stem)
        return data_io._parse_scenario(name, raw, f"{path}")
    raise data_io.DataFormatError(
        f"unknown scenario {value!r} (not a config scenario or a readable file); "
        f"known scenarios: {sorted(config.scenarios)}"
    )


def cmd_simulate(args) -> int:
    config = data_io.load_config(args.config)
    params = _load_params(args, config)
    scenario = _resolve_scenario(args.scenario, config)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    trajectory = scenarios.run_scenario(scenario, params)
    if scenario.name == scenarios.NO_PANDEMIC:
        reference = trajectory
    else:
        reference = scenarios.run_scenario(config.scenario(scenarios.NO_PANDEMIC), params)
    ratio_dates = [d for d in config.ratio_dates()
                   if max(trajectory.dates[0], reference.dates[0]) <= d <= min(trajectory.dates[-1], reference.dates[-1])]
    metrics = scenarios.summarize(trajectory, reference, ratio_dates or None)

    traj_name = f"{scenario.name}_trajectory.csv"
    metrics_name = f"{scenario.name}_metrics.json"
    data_io.write_trajectory(trajectory, out_dir / traj_name)
    data_io.write_json(metrics.to_dict(), out_dir / metrics_name)
    _write_manifest(out_dir, "simulate", [traj_name, metrics_name],
                    {"params_digest": params.digest(), "scenario": scenario.name})
    print(f"{scenario.name}: total deaths {metrics.total_deaths:.6g}, "
          f"peak {metrics.peak_date.isoformat()}, welfare {metrics.welfare:.6g}")
    print(f"wrote {out_dir / traj_name}")
    return 0


def _parse_sweep_values(axis: str, raw: str | None, config: data_io.RunConfig):
    section = config.sweeps[axis]
    if raw is None or raw == "":
        if raw == "":
            raise data_io.DataFormatError("empty --values list")
        return {
            "start": section.get("dates"),
            "intensity": section.get("values"),
            "duration": section.get("weeks"),
        }[axis]
    items = [v for v in raw.split(",") if v != ""]
    if not items:
        raise data_io.DataFormatError("empty --values list")
    if axis == "start":
        return [date.fromisoformat(v) for v in items]
    if axis == "intensity":
        values = [float(v) for v in items]
        bad = [v for v in values if not (0.0 <= v < 1.0)]
        if bad:
            raise data_io.DataFormatError(
                f"intensity values must be fractions in [0, 1), got {bad}; write 5% as 0.05"
            )
        return values
    return [int(v) for v in items]


def cmd_sweep(args) -> int:
    config = data_io.load_config(args.config)
    params = _load_params(args, config)
    values = _parse_sweep_values(args.axis, args.values, config)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    base = config.scenario(scenarios.NO_INTERVENTION)
    reference = scenarios.run_scenario(config.scenario(scenarios.NO_PANDEMIC), params)
    no_intervention = scenarios.run_scenario(config.scenario(scenarios.NO_INTERVENTION), params)
    ratio_dates = [d for d in config.ratio_dates()
                   if max(base.start_date, reference.dates[0]) <= d
                   <= min(base.end_of_interest, reference.dates[-1])] or None
    section = config.sweeps[args.axis]
    common = dict(reference=reference, ratio_dates=ratio_dates, jobs=args.jobs, base=base)
    if args.axis == "start":
        runs = scenarios.sweep_start_dates(
            params, values, intensity=section["intensity"],
            duration_weeks=section["duration_weeks"], **common)
    elif args.axis == "intensity":
        runs = scenarios.sweep_intensity(
            params, values, start_date=section["start_date"],
            duration_weeks=section["duration_weeks"], **common)
    else:
        runs = scenarios.sweep_duration(
            params, values, start_date=section["start_date"],
            intensity=section["intensity"], **common)

    files = []
    rows = [_metrics_row(scenarios.SweepRun(
        scenario=config.scenario(scenarios.NO_INTERVENTION), trajectory=no_intervention,
        metrics=scenarios.summarize(no_intervention, reference, ratio_dates)))]
    plot_series = [reference, no_intervention]
    for run in runs:
        rows.append(_metrics_row(run))
        if run.trajectory is not None:
            name = f"{run.scenario.name}_trajectory.csv"
            data_io.write_trajectory(run.trajectory, out_dir / name)
            files.append(name)
            plot_series.append(run.trajectory)
    _write_table(rows, out_dir / "comparison.csv")
    data_io.write_json(rows, out_dir / "comparison.json")
    files.extend(["comparison.csv", "comparison.json"])
    files.extend(plotting.emit_plots(plot_series, ["I", "D", "Y", "C"], out_dir))
    _write_manifest(out_dir, f"sweep --axis {args.axis}", files,
                    {"params_digest": params.digest()})

    errors = [run for run in runs if run.error]
    for run in errors:
        print(f"error in {run.scenario.name}: {run.error}", file=sys.stderr)
    print(f"wrote {len(files)} files to {out_dir}")
    if len(errors) == len(runs):
        raise RuntimeError("every sweep member failed")
    return 0


def cmd_backtest(args) -> int:
    config = data_io.load_config(args.config)
    params = _load_params(args, config)
    observed_dir = Path(args.observed) if args.observed else _data_dir(args)
    manifests = data_io.data_manifests(observed_dir, config)
    for key in ("population", "gdp", "gcf"):
        if not manifests[key].path.exists():
            raise data_io.DataFormatError(f"missing observed dataset: {manifests[key].path}")
    observed = scenarios.BacktestData(
        population=data_io.load_annual_series(manifests["population"]),
        gdp=data_io.load_annual_series(manifests["gdp"]),
        gcf=data_io.load_annual_series(manifests["gcf"]),
    )
    bt = config.backtest
    trajectory, report = scenarios.backtest(
        params, observed, start_year=bt["start_year"], end_year=bt["end_year"],
        horizon=bt["horizon"],
    )
    tolerance = float(bt["tolerance"])
    report["tolerance"] = tolerance
    report["within_tolerance"] = bool(report["max_abs_gdp_error"] <= tolerance)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    data_io.write_trajectory(trajectory, out_dir / "backtest_trajectory.csv")
    data_io.write_json(report, out_dir / "backtest_report.json")
    _write_table(report["rows"], out_dir / "backtest_table.csv")
    _write_manifest(out_dir, "backtest",
                    ["backtest_trajectory.csv", "backtest_report.json", "backtest_table.csv"],
                    {"params_digest": params.digest()})

    for row in report["rows"]:
        flag = "" if abs(row["gdp_relative_error"]) <= tolerance else "  <-- outside tolerance"
        print(f"{row['year']}: gdp error {row['gdp_relative_error']:+.3%}{flag}")
    print(f"max |gdp error| {report['max_abs_gdp_error']:.3%}, "
          f"drift {report['gdp_error_drift_per_year']:+.4%}/yr, "
          f"systematic drift: {report['systematic_drift']}")
    return 0


def cmd_report(args) -> int:
    variables = [v for v in (args.variables or "").split(",") if v]
    if not variables:
        raise data_io.DataFormatError("no variables given; use --variables Y,C,I")
    trajectories = [data_io.read_trajectory(p) for p in args.trajectories]
    out_dir = Path(args.out)
    files = plotting.emit_plots(trajectories, variables, out_dir)
    _write_manifest(out_dir, "report", files)
    print(f"wrote {len(files)} files to {out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epigrowth",
        description="Pandemic-in-a-growth-economy simulator and policy experiment runner.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("calibrate", help="estimate all model parameters from the bundled datasets")
    p.add_argument("--data", help="dataset directory (default: $EPIGROWTH_DATA_DIR or ./data)")
    p.add_argument("--out", required=True, help="output params JSON file")
    p.add_argument("--report", help="regression report JSON (default: <out>_report.json)")
    p.add_argument("--config", help="configuration overrides (JSON)")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("simulate", help="run one scenario and write its trajectory and metrics")
    p.add_argument("--params", help="params JSON from calibrate (default: built-in values)")
    p.add_argument("--scenario", required=True, help="scenario name or scenario JSON file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--config", help="configuration overrides (JSON)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="run a policy sweep along one axis")
    p.add_argument("--params", help="params JSON from calibrate (default: built-in values)")
    p.add_argument("--axis", required=True, choices=["start", "intensity", "duration"])
    p.add_argument("--values", help="comma-separated values (default: configured grid); "
                                    "dates for start, fractions for intensity, weeks for duration")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--jobs", type=int, default=1, help="parallel scenario processes")
    p.add_argument("--config", help="configuration overrides (JSON)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("backtest", help="historical no-pandemic run scored against observed data")
    p.add_argument("--params", help="params JSON from calibrate (default: built-in values)")
    p.add_argument("--observed", help="directory with observed series (default: data dir)")
    p.add_argument("--data", help="dataset directory fallback")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--config", help="configuration overrides (JSON)")
    p.set_defaults(func=cmd_backtest)

    p = sub.add_parser("report", help="render SVG charts from trajectory CSVs")
    p.add_argument("trajectories", nargs="+", help="trajectory CSV files")
    p.add_argument("--variables", required=True, help="comma-separated trajectory columns")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (data_io.DataFormatError, ValueError, KeyError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
