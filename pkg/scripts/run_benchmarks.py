#!/usr/bin/env python3
"""Compile the bundled corpus and tabulate baseline vs compiled interconnect
use, flagging which baselines are count-verified against the published suite.

Example:
    python scripts/run_benchmarks.py --repeats 3 --report results.json
"""
import argparse
import json
from pathlib import Path

from dqcc.bench import bench_circuit
from dqcc.corpusgen import PUBLISHED_BASELINES, TABLE_OF_RECORD, verified_reconstruction

ROOT = Path(__file__).resolve().parent.parent


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--corpus", default=str(ROOT / "corpus"))
    parser.add_argument("--dt", type=float, default=None)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--repeats", type=int, default=1)
    parser.add_argument("--report", default=None)
    args = parser.parse_args()

    seeds = [args.seed + i for i in range(args.repeats)]
    rows = []
    header = (f"{'circuit':<16} {'qb':>3} {'base2q':>6} {'triv':>5} "
              f"{'global':>7} {'local':>7} {'epr':>5}  baseline")
    print(header)
    print("-" * len(header))
    for path in sorted(Path(args.corpus).glob("*.qasm")):
        rec = bench_circuit(path.stem, path.read_text(), None, args.dt, seeds)
        agg = rec.aggregate()
        rows.append(agg)
        if rec.error:
            print(f"{path.stem:<16} FAILED: {rec.error}")
            continue
        status = ("count-verified" if verified_reconstruction(path.stem)
                  and path.stem in PUBLISHED_BASELINES else "recorded")
        star = "*" if path.stem in TABLE_OF_RECORD else " "
        print(f"{path.stem:<16}{star}{agg['num_qubits']:>3} {agg['base_total_2q']:>6} "
              f"{agg['base_interqpu_trivial']:>5} {agg['global_interqpu_mean']:>7.1f} "
              f"{agg['local_interqpu_mean']:>7.1f} "
              f"{agg['runs'][0]['epr_consumed']:>5}  {status}")
    print("* = table-of-record suite")
    if args.report:
        Path(args.report).write_text(
            json.dumps({"schema_version": 1, "circuits": rows}, indent=2) + "\n")
        print(f"report written to {args.report}")


if __name__ == "__main__":
    main()
