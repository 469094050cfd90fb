#!/usr/bin/env python3
"""Regenerate the bundled benchmark corpus (QASM files + baselines.json)."""
import argparse
from pathlib import Path

from dqcc.corpusgen import write_corpus


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "corpus"))
    args = parser.parse_args()
    baselines = write_corpus(args.out)
    matched = sum(1 for rec in baselines.values() if rec["matches_published"])
    print(f"wrote {len(baselines)} circuits to {args.out} "
          f"({matched} match the published counts exactly)")


if __name__ == "__main__":
    main()
