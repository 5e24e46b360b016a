#!/usr/bin/env python3
"""Run every canonical experiment config and collect the outputs in one place.

Usage: python scripts/run_all.py [outdir] [--plot]
"""

import sys
from pathlib import Path

from pcwqed.cli import main

REPO = Path(__file__).resolve().parent.parent

RUNS = [
    ("bands", "bands.ini"),
    ("bloch", "bloch.ini"),
    ("gk", "gk.ini"),
    ("boundstate", "boundstate.ini"),
    ("chirality-scan", "chirality_scan.ini"),
    ("coupling-scan", "coupling_scan.ini"),
    ("shift-scan", "shift_scan.ini"),
    ("poles", "poles.ini"),
    ("pump", "pump.ini"),
]


def run(outdir: str, plot: bool) -> int:
    for command, config in RUNS:
        argv = [command, "--config", str(REPO / "configs" / config), "--out", outdir]
        if plot:
            argv.append("--plot")
        print(f"== pcwqed {' '.join(argv)}")
        rc = main(argv)
        if rc != 0:
            return rc
    return 0


if __name__ == "__main__":
    args = [a for a in sys.argv[1:] if a != "--plot"]
    sys.exit(run(args[0] if args else "out", "--plot" in sys.argv))
