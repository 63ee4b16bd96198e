"""Dependency-free SVG line charts plus the exact plotted data as CSV.

The renderer is deliberately minimal and fully deterministic: given the
same inputs it emits byte-identical files (the version string below is
embedded in every SVG so output stability is checkable).
"""

from __future__ import annotations

import csv
import io
from datetime import date
from pathlib import Path

RENDERER_VERSION = "epigrowth-svg/1"

PALETTE = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd",
    "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f",
]

WIDTH, HEIGHT = 960, 540
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 24, 44, 56


def _nice_ticks(lo: float, hi: float, n: int = 5) -> list:
    if lo == hi:
        lo, hi = lo - 1.0, hi + 1.0
    span = hi - lo
    raw = span / n
    mag = 10.0 ** int(f"{raw:e}".split("e")[1])
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    else:
        step = 10.0 * mag
    first = step * (lo // step)
    ticks = []
    v = first
    while v <= hi + 0.5 * step:
        if v >= lo - 0.5 * step:
            ticks.append(v)
        v += step
    return ticks


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def emit_plots(trajectories: list, variables: list, out_dir) -> list:
    """One SVG per variable with one line per trajectory, plus a CSV of the
    plotted columns.  Returns the relative names of the written files."""
    if not trajectories:
        raise ValueError("need at least one trajectory to plot")
    if not variables:
        raise ValueError("variable list is empty")
    valid = set(trajectories[0].columns())
    for var in variables:
        if var not in valid:
            raise ValueError(f"unknown variable {var!r}; valid variables: {sorted(valid)}")
    names = [t.scenario_name for t in trajectories]
    if len(set(names)) != len(names):
        raise ValueError(f"trajectory names must be unique, got {names}")

    from .data_io import _atomic_write_text

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for var in variables:
        svg_name, csv_name = f"{var}.svg", f"{var}_data.csv"
        _write_data_csv(trajectories, var, out_dir / csv_name)
        _atomic_write_text(render_svg(trajectories, var), out_dir / svg_name)
        written.extend([svg_name, csv_name])
    return written


def _write_data_csv(trajectories: list, var: str, path: Path) -> None:
    from .data_io import _atomic_write_text

    all_dates = sorted({d for t in trajectories for d in t.dates})
    lookup = []
    for t in trajectories:
        col = t.columns()[var]
        lookup.append({d: repr(float(col[i])) for i, d in enumerate(t.dates)})
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["date"] + [t.scenario_name for t in trajectories])
    for d in all_dates:
        writer.writerow([d.isoformat()] + [m.get(d, "") for m in lookup])
    _atomic_write_text(buf.getvalue(), path)


def render_svg(trajectories: list, var: str) -> str:
    x_min = min(t.dates[0] for t in trajectories)
    x_max = max(t.dates[-1] for t in trajectories)
    x_span = max((x_max - x_min).days, 1)
    y_min = min(float(min(t.columns()[var])) for t in trajectories)
    y_max = max(float(max(t.columns()[var])) for t in trajectories)
    ticks = _nice_ticks(y_min, y_max)
    y_min = min(y_min, ticks[0])
    y_max = max(y_max, ticks[-1])
    if y_max == y_min:
        y_max = y_min + 1.0

    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B

    def sx(d: date) -> float:
        return MARGIN_L + plot_w * (d - x_min).days / x_span

    def sy(v: float) -> float:
        return MARGIN_T + plot_h * (1.0 - (v - y_min) / (y_max - y_min))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f"<!-- {RENDERER_VERSION} -->",
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{MARGIN_L}" y="24" font-family="sans-serif" font-size="16" '
        f'font-weight="bold">{var}</text>',
    ]

    for v in ticks:
        y = sy(v)
        parts.append(
            f'<line x1="{MARGIN_L}" y1="{y:.2f}" x2="{WIDTH - MARGIN_R}" y2="{y:.2f}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{MARGIN_L - 6}" y="{y + 4:.2f}" font-family="sans-serif" font-size="11" '
            f'text-anchor="end">{_fmt(v)}</text>'
        )

    n_years = x_max.year - x_min.year + 1
    year_step = max(1, (n_years + 9) // 10)
    for year in range(x_min.year, x_max.year + 1, year_step):
        tick_day = date(year, 1, 1)
        if tick_day < x_min or tick_day > x_max:
            continue
        x = sx(tick_day)
        parts.append(
            f'<line x1="{x:.2f}" y1="{MARGIN_T}" x2="{x:.2f}" y2="{HEIGHT - MARGIN_B}" '
            f'stroke="#eeeeee" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{x:.2f}" y="{HEIGHT - MARGIN_B + 18}" font-family="sans-serif" '
            f'font-size="11" text-anchor="middle">{year}</text>'
        )

    parts.append(
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="#333333" stroke-width="1"/>'
    )

    for i, t in enumerate(trajectories):
        color = PALETTE[i % len(PALETTE)]
        col = t.columns()[var]
        points = " ".join(f"{sx(d):.2f},{sy(float(col[k])):.2f}" for k, d in enumerate(t.dates))
        parts.append(
            f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        ly = MARGIN_T + 16 + 16 * i
        parts.append(
            f'<line x1="{MARGIN_L + 10}" y1="{ly - 4}" x2="{MARGIN_L + 34}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{MARGIN_L + 40}" y="{ly}" font-family="sans-serif" '
            f'font-size="12">{t.scenario_name}</text>'
        )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
