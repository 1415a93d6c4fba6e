"""Regenerate the data behind every figure from the bundled presets.

Each preset is run through the CLI into its own subdirectory of ``--out`` so
each result directory carries its own manifest. Example::

    python scripts/reproduce_figures.py --out results --trials 50 --only fig3 fig4
"""

import argparse
import sys
import time
from pathlib import Path

from fflsync.cli import main as cli

RUNS = [
    ("fig2_deterministic", "simulate"),
    ("fig2", "simulate"),
    ("fig2", "sweep"),
    ("fig3", "sweep"),
    ("fig4", "sweep"),
    ("fig4", "isi-density"),
    ("fig5", "sweep"),
    ("fig6", "sweep"),
    ("fig7", "sweep"),
]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--out", default="results")
    parser.add_argument("--trials", type=int, help="override the ensemble size (default: preset value, 200)")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--only", nargs="*", help="preset names to run")
    args = parser.parse_args(argv)

    status = 0
    for preset, command in RUNS:
        if args.only and preset not in args.only:
            continue
        out = Path(args.out) / f"{preset}_{command}"
        cmd = [command, "--preset", preset, "--out", str(out), "--threads", str(args.threads)]
        if args.trials:
            cmd += ["--trials", str(args.trials)]
        if args.seed is not None:
            cmd += ["--seed", str(args.seed)]
        t0 = time.perf_counter()
        code = cli(cmd)
        print(f"[{preset} {command}] exit {code} in {time.perf_counter() - t0:.1f} s", file=sys.stderr)
        status = status or code
    return status


if __name__ == "__main__":
    sys.exit(main())
