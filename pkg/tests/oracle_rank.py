#!/usr/bin/env python3
"""Standalone ranking oracle: sort models by exact composite value.

Reads a pool JSON file and a complete trace CSV directly (no package
imports) and prints one model id per line, best first. Kept independent on
purpose so it can cross-check the packaged brute-force path.
"""
import csv
import json
import sys


def main(pool_path, trace_path, weights_arg):
    w_acc, w_size, w_cplx = (float(x) for x in weights_arg.split(","))

    with open(pool_path, encoding="utf-8") as fh:
        records = json.load(fh)
    ids = [rec["id"] for rec in records]
    sizes = [float(rec["size_mb"]) for rec in records]
    complexities = [float(rec["complexity_mmac"]) for rec in records]

    hits = {mid: 0 for mid in ids}
    totals = {mid: 0 for mid in ids}
    with open(trace_path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            mid = row["model_id"]
            if mid in totals:
                totals[mid] += 1
                hits[mid] += int(row["correct"])

    def inverted_minmax(values):
        lo, hi = min(values), max(values)
        if hi == lo:
            return [1.0] * len(values)
        return [(hi - v) / (hi - lo) for v in values]

    size_scores = inverted_minmax(sizes)
    cplx_scores = inverted_minmax(complexities)

    values = []
    for i, mid in enumerate(ids):
        if totals[mid] == 0:
            raise SystemExit(f"trace has no rows for model {mid}")
        accuracy = hits[mid] / totals[mid]
        values.append(w_acc * accuracy + w_size * size_scores[i] + w_cplx * cplx_scores[i])

    order = sorted(range(len(ids)), key=lambda i: (-values[i], i))
    for i in order:
        print(ids[i])


if __name__ == "__main__":
    if len(sys.argv) != 4:
        raise SystemExit("usage: oracle_rank.py POOL.json TRACE.csv W_ACC,W_SIZE,W_CPLX")
    main(sys.argv[1], sys.argv[2], sys.argv[3])
