"""Build a monogenic function from a triple, peel it back and fit polynomials."""

import argparse
import json

import numpy as np

from a3kit.decomposition import fit_polynomial, peel, square_grid
from a3kit.extension import MonogenicTriple
from a3kit.holo import eval_c


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--triple", default='{"F0": "z^3 - 1i*z", "F1": "exp(z)", "F2": "1/(z - 5)"}')
    ap.add_argument("--grid-n", type=int, default=21)
    ap.add_argument("--degree", type=int, default=6)
    args = ap.parse_args()

    T = MonogenicTriple.from_json_obj(json.loads(args.triple))
    grid = square_grid(args.grid_n)
    table = peel(T, grid, degree=args.degree)
    truth = np.array([eval_c(F, grid) * np.ones_like(grid) for F in T.parts])
    print("table error vs generator per component:", np.max(np.abs(table.values - truth), axis=1))
    print("summary:", json.dumps(table.summary()))
    cert = fit_polynomial(table, args.degree)
    print("fit residuals:", cert.residuals)


if __name__ == "__main__":
    main()
