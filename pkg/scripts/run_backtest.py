#!/usr/bin/env python3
"""Calibrate from the bundled datasets, then run the 1990-2010 backtest
with the calibrated parameters."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from epigrowth.cli import main as cli_main

ROOT = Path(__file__).resolve().parent.parent


def main() -> None:
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("out/backtest")
    out.mkdir(parents=True, exist_ok=True)
    params_path = out / "params.json"
    for argv in (
        ["calibrate", "--data", str(ROOT / "data"), "--out", str(params_path)],
        ["backtest", "--params", str(params_path), "--observed", str(ROOT / "data"),
         "--out", str(out)],
    ):
        code = cli_main(argv)
        if code != 0:
            sys.exit(code)


if __name__ == "__main__":
    main()
