"""Run every shipped config through the coopnet CLI and collect the CSVs.

    python3 scripts/reproduce_figures.py [--out results] [--paper-scale] [--jobs N]

Desk scale takes roughly half an hour on one core; --paper-scale is far slower.
"""

import argparse
import subprocess
import sys
import time
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]

RUNS = [
    ("pk_cdf_table", "pk_cdf_table.cfg"),
    ("optimize_density", "optimize_density.cfg"),
    ("fig4_hex_alpha", "fig4_hex_alpha.cfg"),
    ("fig2_normalized_sir", "fig2_normalized_sir.cfg"),
    ("fig3_eta_cdf", "fig3_eta_cdf.cfg"),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--paper-scale", action="store_true")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--only", nargs="*", help="subset of experiment names")
    args = ap.parse_args()

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    status = 0
    for experiment, cfg in RUNS:
        if args.only and experiment not in args.only:
            continue
        target = out_dir / f"{experiment}.csv"
        cmd = [
            sys.executable, "-m", "coopnet.cli", experiment,
            "--config", str(ROOT / "configs" / cfg),
            "--out", str(target),
            "--jobs", str(args.jobs),
        ]
        if args.paper_scale:
            cmd.append("--paper-scale")
        t0 = time.perf_counter()
        rc = subprocess.run(cmd).returncode
        print(f"{experiment:22s} exit={rc} {time.perf_counter() - t0:7.1f}s -> {target}")
        status = status or rc
    return status


if __name__ == "__main__":
    sys.exit(main())
