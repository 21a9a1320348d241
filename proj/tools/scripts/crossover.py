#!/usr/bin/env python3
"""Long-run comparison of RED and the boundary walk on the fixture model.

Runs both attacks through the red-attack CLI with a large query budget and
prints the best squared-L2 distance each has reached at a few checkpoints,
plus the first query (if any) at which the walk's best is below RED's.

Usage: crossover.py [--cli build/tools/red-attack] [--queries 100000]
                    [--seeds 0,1,2] [--work DIR]
"""

import argparse
import csv
import subprocess
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parents[2]
FIXTURES = ROOT / "tests" / "fixtures"


def run(cli, algorithm, seed, queries, work):
    report = work / f"{algorithm}_{seed}.json"
    subprocess.run(
        [str(cli), "attack",
         "--source", str(FIXTURES / "source.pgm"),
         "--reference", str(FIXTURES / "reference.pgm"),
         "--oracle", f"mlp:{FIXTURES / 'pattern_mlp.json'}",
         "--algorithm", algorithm, "--seed", str(seed),
         "--max-queries", str(queries), "--report", str(report)],
        check=True, stdout=subprocess.DEVNULL)
    best = []
    with open(work / f"{algorithm}_{seed}.trace.csv") as f:
        for row in csv.DictReader(f):
            best.append(float(row["best_l2_sq"]))
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cli", default=str(ROOT / "build" / "tools" / "red-attack"))
    ap.add_argument("--queries", type=int, default=100000)
    ap.add_argument("--seeds", default="0,1,2")
    ap.add_argument("--work", default=None)
    args = ap.parse_args()

    work = Path(args.work or tempfile.mkdtemp(prefix="crossover_"))
    work.mkdir(parents=True, exist_ok=True)
    checkpoints = [c for c in (10, 30, 100, 300, 1000, 3000, 10000, 30000, 100000)
                   if c <= args.queries]

    print("seed  query     red       walk")
    for seed in [int(s) for s in args.seeds.split(",")]:
        red = run(args.cli, "red", seed, args.queries, work)
        walk = run(args.cli, "boundary", seed, args.queries, work)
        for q in checkpoints:
            print(f"{seed:4d}  {q:6d}  {red[q - 1]:9.4f}  {walk[q - 1]:9.4f}")
        cross = next((i + 1 for i, (r, w) in enumerate(zip(red, walk)) if w < r), None)
        print(f"seed {seed}: walk first below RED at query {cross}")


if __name__ == "__main__":
    main()
