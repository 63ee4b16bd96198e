#!/usr/bin/env python3
"""Run all three policy sweeps (start date, intensity, duration) with the
default grids and write one output directory per axis."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from epigrowth.cli import main as cli_main


def main() -> None:
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("out/sweeps")
    jobs = sys.argv[2] if len(sys.argv) > 2 else "1"
    for axis in ("start", "intensity", "duration"):
        code = cli_main(["sweep", "--axis", axis, "--out", str(out / axis), "--jobs", jobs])
        if code != 0:
            sys.exit(code)


if __name__ == "__main__":
    main()
