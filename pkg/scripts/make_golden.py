"""Regenerate tests/golden/single_flip_matches.csv from the Hamming-scan oracle.

One row per (digit, flipped element): the corrupted group, the nearest
table digit, its score, and whether the nearest row is unique.

    python scripts/make_golden.py
"""

import csv
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

from oracles import STRUCT_TABLE, hamming_scan  # noqa: E402

OUT = ROOT / "tests" / "golden" / "single_flip_matches.csv"


def rows():
    for d in range(10):
        for pos in range(9):
            bits = list(STRUCT_TABLE[d])
            bits[pos] ^= 1
            nearest, score, ambiguous = hamming_scan(bits)
            yield d, pos + 1, "".join(map(str, bits)), nearest, score, int(not ambiguous)


def main():
    OUT.parent.mkdir(parents=True, exist_ok=True)
    with OUT.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["digit", "flipped_element", "corrupted", "nearest", "score", "unique"])
        w.writerows(rows())
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
