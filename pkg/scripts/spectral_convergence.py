"""Contour-quadrature error against the jet route as the node count doubles."""

import argparse

import numpy as np

from a3kit.algebra import A3Element, norm, random_elements
from a3kit.extension import Contour, extend_contour, extend_jet
from a3kit.holo import parse_expr

FUNCTIONS = ["z^2 - 1", "(0.5-1i)*z^5 + z^3 - 2*z + 1i", "exp(z)", "sin(z)", "cos(z)", "1/(z - 5)", "1/(z^2 + 9)"]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=100)
    ap.add_argument("--radius", type=float, default=2.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    z = rng.uniform(-1, 1, args.points) + 1j * rng.uniform(-1, 1, args.points)
    r = random_elements(rng, args.points)
    zeta = A3Element(z, r.b, r.c)
    nodes = [8, 16, 32, 64, 128, 256, 512]
    print(f"{'function':36s}" + "".join(f"{n:>10d}" for n in nodes))
    for text in FUNCTIONS:
        F = parse_expr(text)
        ref = extend_jet(F, zeta)
        errs = [np.max(norm(extend_contour(F, zeta, Contour(0, args.radius, n)) - ref) / (1 + norm(ref)))
                for n in nodes]
        print(f"{text:36s}" + "".join(f"{e:10.1e}" for e in errs))


if __name__ == "__main__":
    main()
