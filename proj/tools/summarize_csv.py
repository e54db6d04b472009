#!/usr/bin/env python3
"""Summarize forestwalk experiment CSVs.

Groups rows by (scenario, policy, memory_n, measurement) and prints count,
mean, stddev and standard error per group. For mixing-experiment output
(measurement mean_distance_pct, where the iteration column carries the
checkpoint step) pass --curves to print one distance column per checkpoint
instead.

Only the standard library is used; feed it a file or pipe CSV via stdin:

    forestwalk merge-experiment --config configs/scenario1.json | tools/summarize_csv.py
"""

import argparse
import csv
import math
import sys
from collections import defaultdict


def aggregate(values):
    n = len(values)
    mean = sum(values) / n
    if n < 2:
        return n, mean, 0.0, 0.0
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    sd = math.sqrt(var)
    return n, mean, sd, sd / math.sqrt(n)


def summarize(rows):
    groups = defaultdict(list)
    for row in rows:
        key = (row["scenario"], row["policy"], row["memory_n"], row["measurement"])
        groups[key].append(float(row["value"]))
    header = ("scenario", "policy", "memory_n", "measurement", "n", "mean", "stddev", "stderr")
    print("{:<12} {:<8} {:>8} {:<22} {:>6} {:>10} {:>10} {:>10}".format(*header))
    for key in sorted(groups):
        n, mean, sd, se = aggregate(groups[key])
        print("{:<12} {:<8} {:>8} {:<22} {:>6} {:>10.4f} {:>10.4f} {:>10.4f}".format(
            *key, n, mean, sd, se))


def curves(rows):
    # level -> checkpoint -> value (mixing rows are already run-averaged)
    table = defaultdict(dict)
    checkpoints = set()
    for row in rows:
        if row["measurement"] != "mean_distance_pct":
            continue
        step = int(row["iteration"])
        table[int(row["memory_n"])][step] = float(row["value"])
        checkpoints.add(step)
    if not table:
        sys.exit("no mean_distance_pct rows found; is this mixing-experiment output?")
    steps = sorted(checkpoints)
    print("memory_n " + " ".join(f"{s:>8}" for s in steps))
    for level in sorted(table):
        cells = (f"{table[level][s]:>8.3f}" if s in table[level] else f"{'-':>8}" for s in steps)
        print(f"{level:<8} " + " ".join(cells))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("csv_path", nargs="?", help="CSV file (defaults to stdin)")
    parser.add_argument("--curves", action="store_true",
                        help="print mixing curves as a checkpoint table")
    args = parser.parse_args()

    stream = open(args.csv_path, newline="") if args.csv_path else sys.stdin
    with stream:
        rows = list(csv.DictReader(stream))
    if not rows:
        sys.exit("no rows found")
    if args.curves:
        curves(rows)
    else:
        summarize(rows)


if __name__ == "__main__":
    main()
