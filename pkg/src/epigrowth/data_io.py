"""Dataset ingestion, validation, and artifact serialisation.

All loaders either return a fully validated object or raise
DataFormatError naming the offending row or key; they never return a
partial series.  Numeric values are serialised with ``repr`` so CSV and
JSON round-trips are lossless, and dates are ISO-8601.
"""

from __future__ import annotations

import csv
import json
import logging
import os
import tempfile
from dataclasses import dataclass
from datetime import date
from importlib import resources
from pathlib import Path

import numpy as np

from .calibration import AnnualSeries, CaseSeries
from .params import ModelParams
from .scenarios import PolicySchedule, Scenario, Trajectory

log = logging.getLogger(__name__)


class DataFormatError(ValueError):
    """Malformed input data or configuration."""


KIND_COLUMNS = {
    "population": ("year", "value"),
    "gdp": ("year", "value"),
    "gcf": ("year", "value"),
    "cases": ("date", "confirmed", "recovered", "deaths"),
    "tradeoff-panel": ("gdp_shortfall_pct", "infection_reduction_pct"),
}

KIND_UNITS = {
    "population": {"persons": 1.0, "thousands": 1e3, "millions": 1e6},
    "gdp": {"usd": 1.0, "billions_usd": 1e9, "trillions_usd": 1e12},
    "gcf": {"usd": 1.0, "billions_usd": 1e9, "trillions_usd": 1e12},
    "cases": {"persons": 1.0},
    "tradeoff-panel": {"percent": 1.0},
}

DEFAULT_UNITS = {
    "population": "persons",
    "gdp": "usd",
    "gcf": "usd",
    "cases": "persons",
    "tradeoff-panel": "percent",
}

TRAJECTORY_HEADER = ["date", "N", "S", "I", "R", "D", "A", "K", "Y", "C", "H", "p"]


@dataclass(frozen=True)
class DatasetManifest:
    """Where a dataset lives and how to read it: file kind, a mapping from
    the loader's logical column names to the file's actual headers, and the
    value units."""

    path: Path
    kind: str
    columns: dict | None = None
    units: str | None = None

    def __post_init__(self):
        if self.kind not in KIND_COLUMNS:
            raise DataFormatError(f"unknown dataset kind {self.kind!r}; expected one of {sorted(KIND_COLUMNS)}")
        logical = KIND_COLUMNS[self.kind]
        columns = dict(self.columns) if self.columns else {c: c for c in logical}
        unknown = sorted(set(columns) - set(logical))
        if unknown:
            raise DataFormatError(f"manifest maps unknown logical columns {unknown} for kind {self.kind!r}")
        for c in logical:
            columns.setdefault(c, c)
        units = self.units if self.units is not None else DEFAULT_UNITS[self.kind]
        if units not in KIND_UNITS[self.kind]:
            raise DataFormatError(
                f"units {units!r} not allowed for kind {self.kind!r}; expected one of {sorted(KIND_UNITS[self.kind])}"
            )
        object.__setattr__(self, "path", Path(self.path))
        object.__setattr__(self, "columns", columns)
        object.__setattr__(self, "units", units)

    @property
    def unit_factor(self) -> float:
        return KIND_UNITS[self.kind][self.units]


def _read_rows(manifest: DatasetManifest) -> list:
    if not manifest.path.exists():
        raise DataFormatError(f"dataset file not found: {manifest.path}")
    with open(manifest.path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [actual for actual in manifest.columns.values() if actual not in header]
        if missing:
            raise DataFormatError(f"{manifest.path}: missing columns {missing} (header is {header})")
        rows = list(reader)
    if not rows:
        raise DataFormatError(f"{manifest.path}: no data rows")
    return rows


def _parse_float(raw: str, path: Path, row_number: int, column: str) -> float:
    try:
        return float(raw)
    except (TypeError, ValueError):
        raise DataFormatError(f"{path}: row {row_number}: non-numeric {column!r} value {raw!r}") from None


def load_annual_series(manifest: DatasetManifest) -> AnnualSeries:
    """Read and validate a (year, value) series; sorted by year."""
    rows = _read_rows(manifest)
    year_col = manifest.columns["year"]
    value_col = manifest.columns["value"]
    seen: dict[int, int] = {}
    records = []
    for i, row in enumerate(rows):
        row_number = i + 2  # header is row 1
        try:
            year = int(row[year_col])
        except (TypeError, ValueError):
            raise DataFormatError(
                f"{manifest.path}: row {row_number}: non-numeric {year_col!r} value {row[year_col]!r}"
            ) from None
        if year in seen:
            raise DataFormatError(
                f"{manifest.path}: row {row_number}: duplicate year {year} (first seen at row {seen[year]})"
            )
        seen[year] = row_number
        value = _parse_float(row[value_col], manifest.path, row_number, value_col)
        records.append((year, value * manifest.unit_factor))
    records.sort()
    years, values = zip(*records)
    return AnnualSeries(np.array(years), np.array(values))


def load_case_series(manifest: DatasetManifest) -> tuple[CaseSeries, dict]:
    """Read cumulative case counts; repairs non-monotone corrections by
    running maximum and reports the repair count per column."""
    rows = _read_rows(manifest)
    cols = manifest.columns
    dates: list[date] = []
    counts = {name: [] for name in ("confirmed", "recovered", "deaths")}
    for i, row in enumerate(rows):
        row_number = i + 2
        try:
            day = date.fromisoformat(row[cols["date"]])
        except (TypeError, ValueError):
            raise DataFormatError(
                f"{manifest.path}: row {row_number}: unparseable date {row[cols['date']]!r}"
            ) from None
        dates.append(day)
        for name in counts:
            counts[name].append(_parse_float(row[cols[name]], manifest.path, row_number, cols[name]))
    order = np.argsort(dates)
    dates = [dates[i] for i in order]
    repairs = {}
    repaired = {}
    for name, series in counts.items():
        arr = np.asarray(series, dtype=float)[order] * manifest.unit_factor
        running = np.maximum.accumulate(arr)
        repairs[name] = int(np.sum(running != arr))
        repaired[name] = running
    total = sum(repairs.values())
    if total:
        log.info("repaired %d non-monotone cumulative entries in %s: %s", total, manifest.path, repairs)
    try:
        series = CaseSeries(
            dates=dates,
            confirmed=repaired["confirmed"],
            recovered=repaired["recovered"],
            deaths=repaired["deaths"],
        )
    except ValueError as exc:
        raise DataFormatError(f"{manifest.path}: {exc}") from exc
    return series, repairs


def load_tradeoff_panel(manifest: DatasetManifest) -> tuple[np.ndarray, np.ndarray]:
    """Read the (GDP shortfall %, infection-rate reduction %) panel."""
    rows = _read_rows(manifest)
    cols = manifest.columns
    shortfall, reduction = [], []
    for i, row in enumerate(rows):
        row_number = i + 2
        shortfall.append(_parse_float(row[cols["gdp_shortfall_pct"]], manifest.path, row_number,
                                      cols["gdp_shortfall_pct"]))
        reduction.append(_parse_float(row[cols["infection_reduction_pct"]], manifest.path, row_number,
                                      cols["infection_reduction_pct"]))
    return np.array(shortfall), np.array(reduction)


def _atomic_write_text(text: str, path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_trajectory(trajectory: Trajectory, path) -> None:
    """One CSV row per day; floats via repr, so reading back is lossless."""
    lines = [",".join(TRAJECTORY_HEADER)]
    cols = trajectory.columns()
    series = [cols[name] for name in TRAJECTORY_HEADER[1:]]
    for i, day in enumerate(trajectory.dates):
        lines.append(day.isoformat() + "," + ",".join(repr(float(s[i])) for s in series))
    _atomic_write_text("\n".join(lines) + "\n", Path(path))


def read_trajectory(path, scenario_name: str | None = None) -> Trajectory:
    """Inverse of write_trajectory.  Run metadata is not stored in the CSV,
    so the name defaults to the file stem and welfare is NaN."""
    path = Path(path)
    if not path.exists():
        raise DataFormatError(f"trajectory file not found: {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != TRAJECTORY_HEADER:
            raise DataFormatError(f"{path}: unexpected header {header}, want {TRAJECTORY_HEADER}")
        dates, rows = [], []
        for i, row in enumerate(reader):
            if len(row) != len(TRAJECTORY_HEADER):
                raise DataFormatError(f"{path}: row {i + 2}: expected {len(TRAJECTORY_HEADER)} fields")
            try:
                dates.append(date.fromisoformat(row[0]))
                rows.append([float(v) for v in row[1:]])
            except ValueError as exc:
                raise DataFormatError(f"{path}: row {i + 2}: {exc}") from None
    if not rows:
        raise DataFormatError(f"{path}: no data rows")
    data = np.array(rows).T
    named = dict(zip(TRAJECTORY_HEADER[1:], data))
    return Trajectory(
        scenario_name=scenario_name or path.stem,
        params_digest="",
        dates=dates,
        welfare=float("nan"),
        **named,
    )


def write_params(params: ModelParams, path, provenance: dict | None = None) -> None:
    doc = params.to_dict()
    if provenance:
        doc["provenance"] = provenance
    _atomic_write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", Path(path))


def read_params(path) -> ModelParams:
    path = Path(path)
    if not path.exists():
        raise DataFormatError(f"params file not found: {path}")
    with open(path) as fh:
        doc = json.load(fh)
    doc.pop("provenance", None)
    try:
        return ModelParams.from_dict(doc)
    except (TypeError, ValueError) as exc:
        raise DataFormatError(f"{path}: {exc}") from exc


def write_json(obj, path) -> None:
    _atomic_write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", Path(path))


# ---------------------------------------------------------------------------
# Run configuration


def default_config() -> dict:
    """The shipped configuration: published parameter values, baseline
    scenario table, and the default experiment grids."""
    text = resources.files("epigrowth").joinpath("default_config.json").read_text()
    return json.loads(text)


_SCENARIO_KEYS = {"start_date", "n0", "i0", "r0", "d0", "b0", "a0", "k0",
                  "end_of_interest", "horizon", "schedule"}
_SCHEDULE_KEYS = {"start_date", "intensity", "duration_weeks"}
_SWEEP_KEYS = {
    "start": {"dates", "intensity", "duration_weeks"},
    "intensity": {"values", "start_date", "duration_weeks"},
    "duration": {"weeks", "start_date", "intensity"},
}
_DATA_KEYS = {"population", "gdp", "gcf", "cases", "tradeoff", "case_population",
              "population_fit_years"}
_METRICS_KEYS = {"output_ratio_dates"}
_BACKTEST_KEYS = {"start_year", "end_year", "tolerance", "horizon"}


def _check_keys(section: dict, allowed: set, where: str) -> None:
    unknown = sorted(set(section) - allowed)
    if unknown:
        raise DataFormatError(f"unknown configuration key {where}.{unknown[0]!r}")


def _merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def _parse_date(raw, where: str) -> date:
    try:
        return date.fromisoformat(raw)
    except (TypeError, ValueError):
        raise DataFormatError(f"{where}: unparseable date {raw!r}") from None


def _parse_schedule(raw, where: str) -> PolicySchedule | None:
    if raw is None:
        return None
    _check_keys(raw, _SCHEDULE_KEYS, where)
    return PolicySchedule(
        start_date=_parse_date(raw["start_date"], f"{where}.start_date"),
        intensity_p=float(raw["intensity"]),
        duration_days=int(raw["duration_weeks"]) * 7,
    )


def _parse_scenario(name: str, raw: dict, where: str) -> Scenario:
    _check_keys(raw, _SCENARIO_KEYS, where)
    missing = sorted(_SCENARIO_KEYS - {"schedule"} - set(raw))
    if missing:
        raise DataFormatError(f"{where}: missing keys {missing}")
    return Scenario(
        name=name,
        start_date=_parse_date(raw["start_date"], f"{where}.start_date"),
        N0=float(raw["n0"]), I0=float(raw["i0"]), R0=float(raw["r0"]), D0=float(raw["d0"]),
        b0=float(raw["b0"]), A0=float(raw["a0"]), K0=float(raw["k0"]),
        schedule=_parse_schedule(raw.get("schedule"), f"{where}.schedule"),
        end_of_interest=_parse_date(raw["end_of_interest"], f"{where}.end_of_interest"),
        horizon=_parse_date(raw["horizon"], f"{where}.horizon"),
    )


@dataclass(frozen=True)
class RunConfig:
    params: ModelParams
    scenarios: dict
    sweeps: dict
    data: dict
    metrics: dict
    backtest: dict

    def scenario(self, name: str) -> Scenario:
        if name not in self.scenarios:
            raise KeyError(f"unknown scenario {name!r}; known scenarios: {sorted(self.scenarios)}")
        return self.scenarios[name]

    def ratio_dates(self) -> list:
        return list(self.metrics["output_ratio_dates"])


def parse_config(doc: dict) -> RunConfig:
    """Validate a merged configuration document."""
    _check_keys(doc, {"params", "scenarios", "sweeps", "data", "metrics", "backtest"}, "config")

    params = ModelParams.from_dict(doc["params"])

    scenarios = {}
    for name, raw in doc["scenarios"].items():
        scenarios[name] = _parse_scenario(name, raw, f"config.scenarios.{name}")

    sweeps_raw = doc["sweeps"]
    _check_keys(sweeps_raw, set(_SWEEP_KEYS), "config.sweeps")
    sweeps = {}
    for axis, allowed in _SWEEP_KEYS.items():
        section = dict(sweeps_raw[axis])
        _check_keys(section, allowed, f"config.sweeps.{axis}")
        if "dates" in section:
            section["dates"] = [_parse_date(d, f"config.sweeps.{axis}.dates") for d in section["dates"]]
        if "start_date" in section:
            section["start_date"] = _parse_date(section["start_date"], f"config.sweeps.{axis}.start_date")
        sweeps[axis] = section

    data = dict(doc["data"])
    _check_keys(data, _DATA_KEYS, "config.data")

    metrics = dict(doc["metrics"])
    _check_keys(metrics, _METRICS_KEYS, "config.metrics")
    metrics["output_ratio_dates"] = [
        _parse_date(d, "config.metrics.output_ratio_dates") for d in metrics["output_ratio_dates"]
    ]

    backtest = dict(doc["backtest"])
    _check_keys(backtest, _BACKTEST_KEYS, "config.backtest")
    backtest["horizon"] = _parse_date(backtest["horizon"], "config.backtest.horizon")

    return RunConfig(params=params, scenarios=scenarios, sweeps=sweeps, data=data,
                     metrics=metrics, backtest=backtest)


def load_config(path=None) -> RunConfig:
    """Shipped defaults, deep-merged with an optional user JSON document.

    Unknown keys are rejected with their dotted path.
    """
    doc = default_config()
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise DataFormatError(f"config file not found: {path}")
        with open(path) as fh:
            try:
                user = json.load(fh)
            except json.JSONDecodeError as exc:
                raise DataFormatError(f"{path}: invalid JSON: {exc}") from exc
        if not isinstance(user, dict):
            raise DataFormatError(f"{path}: top-level JSON value must be an object")
        doc = _merge(doc, user)
    try:
        return parse_config(doc)
    except DataFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise DataFormatError(f"invalid configuration: {exc}") from exc


def data_manifests(data_dir, config: RunConfig) -> dict:
    """Default manifests for the bundled dataset layout."""
    data_dir = Path(data_dir)
    names = config.data
    return {
        "population": DatasetManifest(path=data_dir / names["population"], kind="population"),
        "gdp": DatasetManifest(path=data_dir / names["gdp"], kind="gdp"),
        "gcf": DatasetManifest(path=data_dir / names["gcf"], kind="gcf"),
        "cases": DatasetManifest(path=data_dir / names["cases"], kind="cases"),
        "tradeoff": DatasetManifest(path=data_dir / names["tradeoff"], kind="tradeoff-panel"),
    }
