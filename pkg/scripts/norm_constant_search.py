"""Search for the best constant C in ||x y|| <= C ||x|| ||y||.

Random sampling gives a lower bound; local optimisation from the best
samples converges to the supremum 4/3, attained at x = y = (2 + 2 rho + rho^2)/3
(up to scaling and phase).
"""

import argparse

import numpy as np
from scipy.optimize import minimize

from a3kit.algebra import A3Element, mul, norm, random_elements


def ratio(x, y):
    return norm(mul(x, y)) / (norm(x) * norm(y))


def unpack(v):
    c = v[:6] + 1j * v[6:]
    return A3Element(*c[:3]), A3Element(*c[3:])


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=10**6)
    ap.add_argument("--starts", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    x, y = random_elements(rng, args.samples), random_elements(rng, args.samples)
    r = ratio(x, y)
    print(f"random search over {args.samples} pairs: max ratio {r.max():.6f}")

    best = None
    for k in np.argsort(r)[-args.starts:]:
        v0 = np.concatenate([x[k].to_array().real, y[k].to_array().real, x[k].to_array().imag, y[k].to_array().imag])
        res = minimize(lambda v: -ratio(*unpack(v)), v0, method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 20000, "maxfev": 40000})
        if best is None or res.fun < best.fun:
            best = res
    bx, by = unpack(best.x)
    print(f"optimised ratio {-best.fun:.12f} (4/3 = {4 / 3:.12f}, sqrt(3) = {np.sqrt(3):.12f})")
    print("maximiser x / x.a:", (bx * (1 / bx.a)).to_json_obj())
    print("maximiser y / y.a:", (by * (1 / by.a)).to_json_obj())
    s = A3Element(2, 2, 1) * (1 / 3)
    print(f"closed-form candidate (2 + 2 rho + rho^2)/3: ratio {ratio(s, s):.15f}")


if __name__ == "__main__":
    main()
