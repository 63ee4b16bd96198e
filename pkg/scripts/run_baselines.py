#!/usr/bin/env python3
"""Run the two baseline scenarios and render the headline charts.

Outputs land under out/baselines/ (trajectories, metrics, SVG charts).
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from epigrowth import data_io, plotting, scenarios
from epigrowth.params import default_params


def main() -> None:
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("out/baselines")
    out.mkdir(parents=True, exist_ok=True)
    params = default_params()

    no_pandemic, no_intervention = scenarios.run_baselines(params)
    for trajectory in (no_pandemic, no_intervention):
        data_io.write_trajectory(trajectory, out / f"{trajectory.scenario_name}_trajectory.csv")

    metrics = scenarios.summarize(no_intervention, no_pandemic)
    data_io.write_json(metrics.to_dict(), out / "no-intervention_metrics.json")
    plotting.emit_plots([no_pandemic, no_intervention], ["I", "D", "Y", "C", "N", "K"], out)

    print(f"total deaths {metrics.total_deaths:.4e}, peak {metrics.peak_date}, "
          f"max output drop {metrics.max_output_drop_pct:.1f}%")
    print(f"outputs in {out}/")


if __name__ == "__main__":
    main()
