#!/usr/bin/env python3
"""Run the committed experiment configs and collect CSVs under results/.

The simulate and order runs finish in seconds.  quad_bench at n = 1000
takes a few minutes; phase_sweep at the full 50x50 grid is the slow one
(give it --threads).  Select a subset with --only.

    python scripts/run_experiments.py --only order_constant_damping simulate_excitation
    python scripts/run_experiments.py --threads 8
"""

import argparse
import sys
import time
from pathlib import Path

from presympt.harness import load_config, run_experiment, write_csv

ROOT = Path(__file__).resolve().parents[1]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--only", nargs="*", help="config stems to run (default: all)")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--out-dir", default=str(ROOT / "results"))
    args = parser.parse_args()

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    configs = sorted((ROOT / "configs").glob("*.json"))
    if args.only:
        configs = [c for c in configs if c.stem in set(args.only)]
        if not configs:
            print("no matching configs", file=sys.stderr)
            return 1
    for path in configs:
        cfg = load_config(path)
        out = out_dir / f"{path.stem}.csv"
        started = time.time()
        header, rows = run_experiment(cfg, threads=args.threads)
        write_csv(out, header, rows)
        print(f"{path.stem}: {len(rows)} rows -> {out} ({time.time() - started:.1f}s)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
