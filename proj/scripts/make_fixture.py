#!/usr/bin/env python3
"""Write a verdict file with an exact number of positives.

Example (the fixture pair used in the README):

    scripts/make_fixture.py --n 23679 --positives 108 --out control.csv
    scripts/make_fixture.py --n 23679 --positives 56 --out treatment.csv

Positives are spread with a seeded shuffle so files look like real logs;
the verdict counts are exact regardless of the seed. With --pair-keys each
row gets pair_key = its row index, for paired comparisons.
"""

import argparse
import json
import random
import sys
from pathlib import Path


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--n", type=int, required=True, help="number of rows")
    parser.add_argument("--positives", type=int, help="exact number of verdict=1 rows")
    parser.add_argument("--rate", type=float, help="alternative to --positives: round(rate * n) positives")
    parser.add_argument("--out", type=Path, required=True, help=".csv or .jsonl output path")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--pair-keys", action="store_true", help="add pair_key column")
    args = parser.parse_args()

    if (args.positives is None) == (args.rate is None):
        parser.error("give exactly one of --positives or --rate")
    positives = args.positives if args.positives is not None else round(args.rate * args.n)
    if not 0 <= positives <= args.n:
        parser.error(f"positives must lie in [0, {args.n}]")

    verdicts = [1] * positives + [0] * (args.n - positives)
    random.Random(args.seed).shuffle(verdicts)

    suffix = args.out.suffix
    with args.out.open("w", encoding="utf-8", newline="\n") as f:
        if suffix == ".csv":
            f.write("id,verdict,pair_key\n" if args.pair_keys else "id,verdict\n")
            for i, v in enumerate(verdicts):
                f.write(f"r{i},{v},k{i}\n" if args.pair_keys else f"r{i},{v}\n")
        elif suffix in (".jsonl", ".ndjson"):
            for i, v in enumerate(verdicts):
                rec = {"id": f"r{i}", "verdict": v}
                if args.pair_keys:
                    rec["pair_key"] = f"k{i}"
                f.write(json.dumps(rec) + "\n")
        else:
            parser.error("output must end in .csv or .jsonl")
    print(f"wrote {args.out} ({args.n} rows, {positives} positives)", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
