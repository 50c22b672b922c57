"""Regenerate data/example.csv (quadratic trend plus Gaussian noise)."""
import sys
from pathlib import Path

import numpy as np

SEED = 20240611
N = 60


def main(out=Path(__file__).resolve().parent.parent / "data" / "example.csv"):
    rng = np.random.default_rng(SEED)
    x = np.sort(rng.uniform(0.0, 10.0, N))
    y = 2.0 + 0.8 * x - 0.06 * x ** 2 + rng.normal(0.0, 0.4, N)
    with open(out, "w") as fh:
        fh.write("x,y\n")
        for a, b in zip(x, y):
            fh.write(f"{float(a)!r},{float(b)!r}\n")


if __name__ == "__main__":
    main(*map(Path, sys.argv[1:]))
