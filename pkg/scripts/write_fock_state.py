#!/usr/bin/env python3
"""
Write a custom initial state for `continuum --state custom:FILE`.

Each N given on the command line contributes |N> with equal weight and
alternating sign, so `write_fock_state.py cat.json 0 4` gives (|0> - |4>)/sqrt(2).
"""
import argparse
import json
import math
import sys


def amplitudes(numbers):
    size = max(numbers) + 1
    pairs = [[0.0, 0.0] for _ in range(size)]
    weight = 1.0 / math.sqrt(len(numbers))
    for index, n in enumerate(numbers):
        pairs[n][0] += weight * (-1) ** index
    norm = math.sqrt(sum(re * re + im * im for re, im in pairs))
    return [[re / norm, im / norm] for re, im in pairs]


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("path")
    parser.add_argument("numbers", type=int, nargs="+")
    args = parser.parse_args()
    if any(n < 0 for n in args.numbers):
        print("❌ ERROR: photon numbers must be >= 0")
        sys.exit(1)
    with open(args.path, "w", encoding="utf-8") as f:
        json.dump(amplitudes(args.numbers), f)
    print(f"✅ Wrote {len(args.numbers)}-component state to {args.path}")
