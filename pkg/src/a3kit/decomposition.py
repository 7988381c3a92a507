"""Recovery of the analytic components (F0, F1, F2) of a monogenic function.

Peeling works one Cartan component at a time.  The scalar component of
``Phi`` is constant along each fibre ``f(zeta) = z`` and equals ``F0(z)``;
subtracting the principal extension of (a polynomial fit of) ``F0`` leaves
``ext(F1) rho + ext(F2) rho^2``, whose rho-component gives ``F1``, and so on.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P

from . import algebra as alg
from .algebra import A3Element
from .errors import FiberInconsistent, IllConditionedFit, InterpolationFailed, NotMonogenic
from .frame import E3Frame, canonical_triple
from .monogenicity import as_sampler, check_monogenic_many, frame_directions, standard_directions

FIBER_TOL = 1e-8
FIBER_RADIUS = 0.1
DEFAULT_DEGREE = 6
MAX_DEGREE = 12
COND_LIMIT = 1e12


# -- polynomial fits ----------------------------------------------------------


@dataclass(frozen=True)
class PolyFit:
    """Least-squares polynomial in the scaled variable ``u = (z - center) / scale``."""

    coeffs: np.ndarray
    center: complex
    scale: float
    condition: float
    max_residual: float

    def derivatives(self, z):
        u = (np.asarray(z, dtype=complex) - self.center) / self.scale
        d1 = P.polyder(self.coeffs)
        d2 = P.polyder(d1)
        return (
            P.polyval(u, self.coeffs),
            P.polyval(u, d1) / self.scale,
            P.polyval(u, d2) / self.scale**2,
        )

    def __call__(self, z):
        return self.derivatives(z)[0]

    def extend(self, zeta: A3Element) -> A3Element:
        """Principal extension ``p(z) + p'(z) n + p''(z) n^2 / 2``."""
        p0, p1, p2 = self.derivatives(zeta.a)
        return A3Element(p0, p1 * zeta.b, p1 * zeta.c + 0.5 * p2 * zeta.b * zeta.b)

    def monomial_coeffs(self) -> np.ndarray:
        """Coefficients in powers of z (ascending)."""
        # p(u) with u = (z - c)/s, expanded by Horner in z
        lin = np.array([-self.center / self.scale, 1 / self.scale])
        out = np.array([0j])
        for c in self.coeffs[::-1]:
            out = P.polyadd(P.polymul(out, lin), [c])
        return out


def poly_fit(z, values, degree: int) -> PolyFit:
    z = np.asarray(z, dtype=complex).ravel()
    values = np.asarray(values, dtype=complex).ravel()
    if degree < 0 or degree > MAX_DEGREE:
        raise ValueError(f"degree must be in 0..{MAX_DEGREE}")
    if len(z) < degree + 1:
        raise InterpolationFailed("fewer sample points than coefficients")
    lo = complex(z.real.min(), z.imag.min())
    hi = complex(z.real.max(), z.imag.max())
    center = (lo + hi) / 2
    scale = float(np.max(np.abs(z - center))) or 1.0
    V = P.polyvander((z - center) / scale, degree)
    cond = float(np.linalg.cond(V))
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise IllConditionedFit(f"Vandermonde condition number {cond:.3g} exceeds {COND_LIMIT:g}")
    coeffs, *_ = np.linalg.lstsq(V, values, rcond=None)
    resid = float(np.max(np.abs(V @ coeffs - values))) if len(values) else 0.0
    return PolyFit(coeffs, center, scale, cond, resid)


# -- fibres -------------------------------------------------------------------


def fiber_points(z, count: int, rng: np.random.Generator, frame: E3Frame | None = None,
                 radius: float = FIBER_RADIUS) -> A3Element:
    """``count`` points over each ``z`` (shape ``(count, *z.shape)``).

    Without a frame: ``z + n`` with random radical ``n``, ``|n| <= radius``.
    With a frame: ``Re z * a + Im z * b + t * c`` with ``|t| <= radius``.
    """
    z = np.asarray(z, dtype=complex)
    shape = (count,) + z.shape
    if frame is None:
        n = rng.standard_normal(shape + (4,))
        n /= np.linalg.norm(n, axis=-1, keepdims=True)
        n *= radius * rng.uniform(0, 1, shape + (1,))
        return A3Element(np.broadcast_to(z, shape), n[..., 0] + 1j * n[..., 1], n[..., 2] + 1j * n[..., 3])
    ct = canonical_triple(frame)
    t = rng.uniform(-radius, radius, shape)
    x, y = z.real, z.imag
    return A3Element(*(x * ea + y * eb + t * ec for ea, eb, ec in zip(ct.a.components, ct.b.components,
                                                                        ct.c.components)))


def fiber_constancy(phi, z, samples: int = 20, component: int = 0, frame: E3Frame | None = None,
                    seed: int = 0, radius: float = FIBER_RADIUS) -> float:
    """Largest deviation of one Cartan component of ``phi`` across the fibre over ``z``."""
    phi = as_sampler(phi)
    rng = np.random.default_rng(seed)
    pts = fiber_points(complex(z), samples, rng, frame, radius)
    vals = phi(pts).components[component]
    return float(np.max(np.abs(vals - vals[0])))


# -- peeling ------------------------------------------------------------------


@dataclass
class ComponentTable:
    z: np.ndarray
    values: np.ndarray  # (3, N): F0, F1, F2 at z
    residual: np.ndarray  # (N,) max componentwise reconstruction error
    fits: tuple = ()
    fiber_deviation: np.ndarray = field(default_factory=lambda: np.zeros(3))
    stage_leftover: tuple = ()  # max |component 0| after stage 2, max |rho part| after stage 3

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residual)) if self.residual.size else 0.0

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())

    def to_csv(self) -> str:
        lines = ["z_re,z_im,F0_re,F0_im,F1_re,F1_im,F2_re,F2_im,residual"]
        for k, z in enumerate(self.z):
            row = [z.real, z.imag]
            for F in self.values[:, k]:
                row += [F.real, F.imag]
            row.append(self.residual[k])
            lines.append(",".join(repr(float(v)) for v in row))
        return "\n".join(lines) + "\n"

    @classmethod
    def read_csv(cls, path) -> ComponentTable:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r]
        header, body = rows[0], np.array([[float(v) for v in r] for r in rows[1:]])
        if header[0] != "z_re" or body.shape[1] != 9:
            raise ValueError("not a component table CSV")
        z = body[:, 0] + 1j * body[:, 1]
        vals = np.array([body[:, 2 + 2 * k] + 1j * body[:, 3 + 2 * k] for k in range(3)])
        return cls(z, vals, body[:, 8])

    def summary(self) -> dict:
        return {
            "points": int(len(self.z)),
            "max_residual": self.max_residual,
            "fiber_deviation": [float(v) for v in self.fiber_deviation],
            "stage_leftover": [float(v) for v in self.stage_leftover],
        }


def _derivative_bounds(fit: PolyFit) -> tuple:
    """Markov-type bounds on the first and second derivative error of ``fit``.

    The value misfit on the grid, scaled by d^2 / scale per derivative, bounds
    how far ``fit``'s derivatives may be from the sampled function's.
    """
    d = max(len(fit.coeffs) - 1, 1)
    m1 = d * d / fit.scale * fit.max_residual
    m2 = d * d * max(d - 1, 1) ** 2 / fit.scale**2 * fit.max_residual
    return m1, m2


def _check_fiber(name, a, b, tol, allowance=0.0):
    dev = np.abs(a - b)
    bad = dev > tol * np.maximum(1.0, np.abs(a)) + allowance
    if np.any(bad):
        k = int(np.argmax(dev))
        raise FiberInconsistent(f"{name} differs by {dev[k]:.3g} between two points of one fibre")
    return float(np.max(dev)) if dev.size else 0.0


def peel(phi, grid, frame: E3Frame | None = None, degree: int = DEFAULT_DEGREE, seed: int = 0,
         precheck: bool = True, fiber_tol: float = FIBER_TOL, monogenic_tol: float = 1e-6) -> ComponentTable:
    """Recover ``(F0, F1, F2)`` on the points ``grid`` of D = f(Omega).

    Every stage reads its component at two independent fibre points and
    requires them to agree (``FiberInconsistent`` otherwise).  Stages 2 and 3
    allow extra disagreement for the interpolants' derivative error, which is
    negligible on polynomial data.
    """
    phi = as_sampler(phi)
    z = np.asarray(grid, dtype=complex).ravel()
    rng = np.random.default_rng(seed)
    pts = fiber_points(z, 2, rng, frame)
    first, second = pts[0], pts[1]

    if precheck:
        dirs = standard_directions() if frame is None else frame_directions(frame)
        failed = [r for r in check_monogenic_many(phi, first, dirs, monogenic_tol) if not r.passed]
        if failed:
            r = failed[0]
            raise NotMonogenic(f"{len(failed)} grid points fail the Gateaux check; first at {r.zeta} "
                               f"(residual {r.worst_residual:.3g} along {r.worst_direction})")

    vals = phi(pts)
    dev = np.zeros(3)

    # stage 1: scalar component
    F0 = vals.a[0]
    dev[0] = _check_fiber("F0", F0, vals.a[1], fiber_tol)
    fit0 = poly_fit(z, F0, degree)

    # stage 2: remove ext(F0), read the rho component
    psi = vals - fit0.extend(pts)
    leftover0 = float(np.max(np.abs(psi.a)))
    F1 = psi.b[0]
    r = float(np.max(alg.norm(alg.radical_part(pts).to_a3()))) if len(z) else 0.0
    m01, m02 = _derivative_bounds(fit0)
    dev[1] = _check_fiber("F1", F1, psi.b[1], fiber_tol, 2 * r * m01)
    fit1 = poly_fit(z, F1, degree)

    # stage 3: remove ext(F1) rho, read the rho^2 component
    theta = psi - alg.mul(fit1.extend(pts), alg.RHO)
    leftover1 = float(np.max(np.abs(theta.b)))
    F2 = theta.c[0]
    m11, _ = _derivative_bounds(fit1)
    dev[2] = _check_fiber("F2", F2, theta.c[1], fiber_tol, 2 * r * (m01 + m11) + r * r * m02)
    fit2 = poly_fit(z, F2, degree)

    rebuilt = fit0.extend(pts) + alg.mul(fit1.extend(pts), alg.RHO) + alg.mul(fit2.extend(pts), alg.RHO2)
    err = np.abs((rebuilt - vals).to_array())  # (2, N, 3)
    residual = err.max(axis=(0, 2))
    return ComponentTable(z, np.array([F0, F1, F2]), residual, (fit0, fit1, fit2), dev, (leftover0, leftover1))


@dataclass
class PolynomialCertificate:
    coefficients: list  # three ascending coefficient arrays (powers of z)
    residuals: list
    conditions: list
    degree: int

    def to_json_obj(self) -> dict:
        return {
            "degree": self.degree,
            "coefficients": {
                f"F{k}": [[float(c.real), float(c.imag)] for c in coeffs] for k, coeffs in enumerate(self.coefficients)
            },
            "fit_residual": {f"F{k}": float(r) for k, r in enumerate(self.residuals)},
            "condition": [float(c) for c in self.conditions],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2, sort_keys=True)


def fit_polynomial(table: ComponentTable, degree: int) -> PolynomialCertificate:
    if degree > MAX_DEGREE:
        raise ValueError(f"degree must be <= {MAX_DEGREE}")
    if len(table.z) < (degree + 1) ** 2:
        raise ValueError(f"need at least {(degree + 1) ** 2} grid points for degree {degree}")
    fits = [poly_fit(table.z, table.values[k], degree) for k in range(3)]
    return PolynomialCertificate(
        [f.monomial_coeffs() for f in fits],
        [f.max_residual for f in fits],
        [f.condition for f in fits],
        degree,
    )


def square_grid(n: int = 21, half_width: float = 1.0, center: complex = 0j) -> np.ndarray:
    """``n x n`` uniform grid over the square of the given half width, flattened row-major."""
    t = np.linspace(-half_width, half_width, n)
    X, Y = np.meshgrid(t, t)
    return (center + X + 1j * Y).ravel()
