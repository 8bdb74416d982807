#!/usr/bin/env python3
"""Convert the MNIST-1D pickle into the CSV layout the qdc tools read.

The upstream file (mnist1d_data.pkl) holds a dict with 'x', 'y', 'x_test',
'y_test'. All 5000 samples are pooled into one CSV with a header row of 40
feature columns plus a final integer 'label' column; the benchmark runner
does its own shuffled splits.

Usage: convert_mnist1d.py mnist1d_data.pkl data/mnist1d.csv
"""

import pickle
import sys


def main() -> int:
    if len(sys.argv) != 3:
        print(__doc__, file=sys.stderr)
        return 2
    with open(sys.argv[1], "rb") as f:
        blob = pickle.load(f)
    xs = list(blob["x"]) + list(blob["x_test"])
    ys = list(blob["y"]) + list(blob["y_test"])
    if len(xs) != len(ys):
        print("feature/label count mismatch", file=sys.stderr)
        return 1
    width = len(xs[0])
    with open(sys.argv[2], "w") as out:
        out.write(",".join(f"f{i}" for i in range(width)) + ",label\n")
        for x, y in zip(xs, ys):
            out.write(",".join(repr(float(v)) for v in x) + f",{int(y)}\n")
    print(f"wrote {len(xs)} samples x {width} features")
    return 0


if __name__ == "__main__":
    sys.exit(main())
