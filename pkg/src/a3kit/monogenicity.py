"""Numerical Gateaux derivatives and monogenicity checks.

The one-sided limit ``lim_{d -> 0+} (Phi(zeta + d h) - Phi(zeta)) / d`` is
estimated on the fixed schedule ``d_k = 0.1 * 2**-k`` (k = 0..16) with one
level of Richardson extrapolation.  A function passes the monogenicity check
at ``zeta`` when every limit equals ``h * Phi'(zeta)`` for the chosen finite
direction set.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import algebra as alg
from .algebra import A3Element
from .errors import (
    A3Error,
    ConfigError,
    DomainExit,
    GridTooSmall,
    HypothesisViolated,
    LimitNotConverged,
    NonFiniteSample,
    NotMonogenicAt,
)
from .frame import E3Frame, CanonicalTriple, canonical_triple, from_real_coords, real_coords

STEPS = 0.1 * 2.0 ** -np.arange(17)
LIMIT_RTOL = 1e-8
MONOGENIC_TOL = 1e-6
RADICAL_TOL = 1e-8


# -- domains ------------------------------------------------------------------


@dataclass(frozen=True)
class Box:
    """Axis-aligned box in the 6 real coordinates of A3, or in frame coordinates of E3.

    Boxes are convex, so their sections by planes (or lines) parallel to the
    radical are connected.
    """

    lower: tuple
    upper: tuple
    frame: E3Frame | None = None

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lower)
        hi = tuple(float(v) for v in self.upper)
        dim = 6 if self.frame is None else 3
        if len(lo) != dim or len(hi) != dim:
            raise ConfigError(f"box needs {dim} lower and upper bounds")
        if any(not l < h for l, h in zip(lo, hi)):
            raise ConfigError("box bounds must satisfy lower < upper")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def cube(cls, half_width: float = 1.0, frame: E3Frame | None = None) -> Box:
        dim = 6 if frame is None else 3
        return cls((-half_width,) * dim, (half_width,) * dim, frame)

    @property
    def dim(self) -> int:
        return len(self.lower)

    def coordinates(self, zeta: A3Element):
        if self.frame is None:
            return real_coords(zeta), np.zeros(zeta.shape)
        return self.frame.coordinates(zeta)

    def point(self, coords) -> A3Element:
        coords = np.asarray(coords, dtype=float)
        if self.frame is None:
            return from_real_coords(coords)
        return self.frame.embed(coords[..., 0], coords[..., 1], coords[..., 2])

    def contains(self, zeta: A3Element, tol: float = 1e-12):
        coords, resid = self.coordinates(zeta)
        lo, hi = np.array(self.lower), np.array(self.upper)
        inside = np.all((coords >= lo - tol) & (coords <= hi + tol), axis=-1)
        return inside & (resid <= 1e-9 * (1 + alg.norm(zeta)))

    def grid(self, resolution: int) -> A3Element:
        axes = [np.linspace(l, h, resolution) for l, h in zip(self.lower, self.upper)]
        coords = np.array(list(itertools.product(*axes)))
        return self.point(coords)

    def sample(self, rng: np.random.Generator, n: int, margin: float = 0.0) -> A3Element:
        lo = np.array(self.lower) + margin
        hi = np.array(self.upper) - margin
        if np.any(lo >= hi):
            raise ConfigError("margin leaves an empty box")
        return self.point(rng.uniform(lo, hi, size=(n, self.dim)))


@dataclass
class FieldSampler:
    """A function Phi: Omega -> A3 together with its declared domain."""

    func: Callable[[A3Element], A3Element]
    box: Box | None = None
    vectorized: bool = True
    name: str = ""

    def __call__(self, zeta: A3Element) -> A3Element:
        if self.vectorized or not zeta.is_batch:
            out = self.func(zeta)
            if out.shape != zeta.shape:
                out = A3Element(*(np.broadcast_to(v, zeta.shape) for v in out.components))
            return out
        vals = [self.func(zeta[idx]).to_array() for idx in np.ndindex(zeta.shape)]
        return A3Element.from_array(np.array(vals).reshape(*zeta.shape, 3))

    def require_inside(self, zeta: A3Element):
        if self.box is not None and not np.all(self.box.contains(zeta)):
            raise DomainExit("a sampled point leaves the declared domain box")


def as_sampler(phi) -> FieldSampler:
    return phi if isinstance(phi, FieldSampler) else FieldSampler(phi)


# -- direction sets -----------------------------------------------------------


@dataclass(frozen=True)
class DirectionSet:
    tag: str
    vectors: tuple
    labels: tuple
    base: A3Element  # direction used to read off Phi'

    def __iter__(self):
        return iter(zip(self.labels, self.vectors))

    def __len__(self):
        return len(self.vectors)


def _signed(pairs):
    labels, vectors = [], []
    for name, v in pairs:
        labels += [f"+{name}", f"-{name}"]
        vectors += [v, -v]
    return tuple(labels), tuple(vectors)


def standard_directions() -> DirectionSet:
    pairs = [
        ("1", alg.ONE),
        ("i", A3Element(1j)),
        ("rho", alg.RHO),
        ("i*rho", A3Element(0, 1j)),
        ("rho^2", alg.RHO2),
        ("i*rho^2", A3Element(0, 0, 1j)),
    ]
    labels, vectors = _signed(pairs)
    return DirectionSet("standard", vectors, labels, alg.ONE)


def frame_directions(triple: CanonicalTriple | E3Frame) -> DirectionSet:
    if isinstance(triple, E3Frame):
        triple = canonical_triple(triple)
    labels, vectors = _signed([("a", triple.a), ("b", triple.b), ("c", triple.c)])
    return DirectionSet("frame", vectors, labels, triple.a)


# -- limits -------------------------------------------------------------------


@dataclass
class LimitEstimate:
    limit: A3Element
    raw: np.ndarray  # (steps, *shape, 3) difference quotients
    extrapolants: np.ndarray  # (steps - 1, *shape, 3)
    converged: np.ndarray | bool


def _limits(phi: FieldSampler, zeta: A3Element, h: A3Element, phi0: A3Element | None = None) -> LimitEstimate:
    shape = zeta.shape
    d = STEPS.reshape((-1,) + (1,) * len(shape))
    moved = A3Element(zeta.a + d * h.a, zeta.b + d * h.b, zeta.c + d * h.c)
    phi.require_inside(zeta)
    phi.require_inside(moved)
    if phi0 is None:
        phi0 = phi(zeta)
    vals = phi(moved).to_array()
    base = phi0.to_array()
    D = (vals - base[None]) / d[..., None]
    R = 2 * D[1:] - D[:-1]
    # roundoff in D grows like eps * |Phi| / d, so |Phi| sets the scale
    scale = np.maximum(np.linalg.norm(R[-1], axis=-1), np.linalg.norm(base, axis=-1))
    scale = np.maximum(scale, np.finfo(float).tiny)
    last = R[-3:]
    spread = np.max(
        [np.linalg.norm(last[i] - last[j], axis=-1) for i, j in ((0, 1), (0, 2), (1, 2))], axis=0
    )
    converged = spread <= LIMIT_RTOL * scale
    # report the extrapolant where successive values are closest
    jumps = np.linalg.norm(np.diff(R, axis=0), axis=-1)
    best = np.asarray(np.argmin(jumps, axis=0) + 1)
    picked = np.take_along_axis(R, best[None, ..., None], axis=0)[0]
    return LimitEstimate(A3Element.from_array(picked), D, R, converged)


def directional_limit(phi, zeta: A3Element, h: A3Element) -> LimitEstimate:
    return _limits(as_sampler(phi), alg.as_a3(zeta), alg.as_a3(h))


def directional_derivative(phi, zeta: A3Element, h: A3Element) -> A3Element:
    """Extrapolated one-sided Gateaux limit along ``h``.

    Raises LimitNotConverged when the last three extrapolants disagree.
    """
    est = directional_limit(phi, zeta, h)
    if not np.all(est.converged):
        raise LimitNotConverged(f"difference quotients along {h} do not stabilise")
    return est.limit


# -- monogenicity check -------------------------------------------------------


@dataclass
class DirectionResult:
    label: str
    direction: A3Element
    limit: A3Element
    expected: A3Element
    residual: float
    converged: bool
    raw: np.ndarray = field(repr=False, default=None)

    def to_json_obj(self, include_raw: bool = False) -> dict:
        obj = {
            "direction": self.label,
            "limit": self.limit.to_json_obj(),
            "residual": float(self.residual),
            "converged": bool(self.converged),
        }
        if include_raw and self.raw is not None:
            obj["raw"] = [[[c.real, c.imag] for c in row] for row in self.raw]
        return obj


@dataclass
class DerivativeReport:
    zeta: A3Element
    derivative: A3Element
    directions: list
    tolerance: float
    passed: bool = field(init=False)
    worst_residual: float = field(init=False)
    worst_direction: str = field(init=False)

    def __post_init__(self):
        res = [r.residual if r.converged else np.inf for r in self.directions]
        k = int(np.argmax(res))
        self.worst_residual = float(res[k])
        self.worst_direction = self.directions[k].label
        self.passed = all(r.converged for r in self.directions) and self.worst_residual <= self.tolerance

    def result(self, label: str) -> DirectionResult:
        return next(r for r in self.directions if r.label == label)

    def raise_for_failure(self):
        if self.passed:
            return
        bad = next(r for r in self.directions if not r.converged or r.residual == self.worst_residual)
        if not bad.converged:
            raise LimitNotConverged(f"limit along {bad.label} did not converge at {self.zeta}")
        raise NotMonogenicAt(self.zeta, bad.label, bad.residual)

    def to_json_obj(self, include_raw: bool = False) -> dict:
        return {
            "zeta": self.zeta.to_json_obj(),
            "passed": self.passed,
            "worst_residual": self.worst_residual,
            "worst_direction": self.worst_direction,
            "derivative": self.derivative.to_json_obj(),
            "directions": [r.to_json_obj(include_raw) for r in self.directions],
        }


def _residual(limit: A3Element, expected: A3Element):
    return alg.norm(limit - expected) / np.maximum(1.0, alg.norm(expected))


def check_monogenic_many(phi, points: A3Element, dirs: DirectionSet, tol: float = MONOGENIC_TOL) -> list:
    """Vectorised :func:`check_monogenic` over a batch of points."""
    phi = as_sampler(phi)
    points = alg.as_a3(points)
    if not points.is_batch:
        points = A3Element(*(np.atleast_1d(v) for v in points.components))
    phi0 = phi(points)
    base_est = _limits(phi, points, dirs.base, phi0)
    derivative = alg.mul(alg.invert(dirs.base), base_est.limit)
    per_dir = []
    for label, h in dirs:
        est = base_est if h == dirs.base else _limits(phi, points, h, phi0)
        expected = alg.mul(h, derivative)
        per_dir.append((label, h, est, expected, _residual(est.limit, expected)))
    reports = []
    for i in range(len(points)):
        results = [
            DirectionResult(
                label, h, est.limit[i], expected[i], float(res[i]), bool(np.asarray(est.converged)[i]), est.raw[:, i]
            )
            for label, h, est, expected, res in per_dir
        ]
        reports.append(DerivativeReport(points[i], derivative[i], results, tol))
    return reports


def check_monogenic(phi, zeta: A3Element, dirs: DirectionSet | None = None, tol: float = MONOGENIC_TOL,
                    strict: bool = False) -> DerivativeReport:
    """Verify ``limit(h) = h * Phi'(zeta)`` for every ``h`` in ``dirs``.

    ``Phi'`` is read off the base direction (1, or ``a`` for frame sets).
    With ``strict=True`` a failure raises NotMonogenicAt / LimitNotConverged.
    """
    dirs = standard_directions() if dirs is None else dirs
    report = check_monogenic_many(phi, zeta, dirs, tol)[0]
    if strict:
        report.raise_for_failure()
    return report


# -- radical directions -------------------------------------------------------

RADICAL_DIRECTIONS = tuple(
    (label, h) for label, h in standard_directions() if "rho" in label
)


@dataclass
class RadicalReport:
    zeta: A3Element
    limits: dict
    max_norm: float
    passed: bool

    def to_json_obj(self) -> dict:
        return {
            "zeta": self.zeta.to_json_obj(),
            "limits": {k: v.to_json_obj() for k, v in self.limits.items()},
            "max_norm": self.max_norm,
            "passed": self.passed,
        }


def _require_rho2_form(vals: A3Element):
    tol = 1e-14 * (1 + alg.norm(vals))
    if np.any(np.abs(vals.a) > tol) or np.any(np.abs(vals.b) > tol):
        raise HypothesisViolated("function has a nonzero scalar or rho component; expected rho^2 * Phi_2")


def radical_direction_vanishing(phi, zeta: A3Element, tol: float = RADICAL_TOL,
                                strict: bool = False) -> RadicalReport:
    """For ``Phi = rho^2 Phi_2``: limits along +-rho, +-i rho, +-rho^2, +-i rho^2 must vanish."""
    phi = as_sampler(phi)
    zeta = alg.as_a3(zeta)
    _require_rho2_form(phi(zeta))
    limits = {}
    worst = 0.0
    for label, h in RADICAL_DIRECTIONS:
        d = STEPS.reshape((-1,) + (1,) * len(zeta.shape))
        moved = A3Element(zeta.a + d * h.a, zeta.b + d * h.b, zeta.c + d * h.c)
        _require_rho2_form(phi(moved))
        est = _limits(phi, zeta, h)
        if not np.all(est.converged):
            raise LimitNotConverged(f"limit along {label} did not converge")
        limits[label] = est.limit
        worst = max(worst, float(np.max(alg.norm(est.limit))))
    passed = worst <= tol
    if strict and not passed:
        label = max(limits, key=lambda k: float(np.max(alg.norm(limits[k]))))
        raise NotMonogenicAt(zeta, label, worst)
    return RadicalReport(zeta, limits, worst, passed)


# -- Cauchy-Riemann grid residual ---------------------------------------------


@dataclass
class TolstovResult:
    residual: np.ndarray  # (ny - 2, nx - 2) values of dF/dy - i dF/dx
    max_abs: float
    mean_abs: float

    def to_json_obj(self) -> dict:
        return {"max_abs_residual": self.max_abs, "mean_abs_residual": self.mean_abs,
                "interior_nodes": int(self.residual.size)}


def tolstov_residual(F, spacing: float) -> TolstovResult:
    """Central-difference residual of ``dF/dy = i dF/dx`` at interior nodes.

    ``F[j, k]`` is the sample at ``x = x0 + k*spacing``, ``y = y0 + j*spacing``.
    """
    F = np.asarray(F, dtype=complex)
    if F.ndim != 2 or min(F.shape) < 3:
        raise GridTooSmall("need at least 3 points per axis")
    h2 = 2.0 * spacing
    dx = (F[1:-1, 2:] - F[1:-1, :-2]) / h2
    dy = (F[2:, 1:-1] - F[:-2, 1:-1]) / h2
    r = dy - 1j * dx
    mag = np.abs(r)
    return TolstovResult(r, float(mag.max()), float(mag.mean()))


def read_grid_csv(path) -> tuple:
    """Read rows ``x, y, re, im`` (optional header) into ``(x, y, F, spacing)``."""
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row:
                continue
            try:
                rows.append([float(v) for v in row[:4]])
            except ValueError:
                if rows:
                    raise ConfigError(f"non-numeric grid row: {row}")
                continue  # header
    data = np.array(rows)
    if data.ndim != 2 or data.shape[1] != 4:
        raise ConfigError("grid CSV needs four columns x, y, re, im")
    xs, ix = np.unique(data[:, 0], return_inverse=True)
    ys, iy = np.unique(data[:, 1], return_inverse=True)
    if len(xs) < 3 or len(ys) < 3:
        raise GridTooSmall("need at least 3 points per axis")
    if len(data) != len(xs) * len(ys):
        raise ConfigError("grid CSV is not a full rectangular grid")
    F = np.full((len(ys), len(xs)), np.nan + 0j)
    F[iy, ix] = data[:, 2] + 1j * data[:, 3]
    hx = (xs[-1] - xs[0]) / (len(xs) - 1)
    hy = (ys[-1] - ys[0]) / (len(ys) - 1)
    if not (np.allclose(np.diff(xs), hx, rtol=1e-9) and np.allclose(np.diff(ys), hy, rtol=1e-9)
            and np.isclose(hx, hy, rtol=1e-9)):
        raise ConfigError("grid spacing must be uniform and equal on both axes")
    return xs, ys, F, hx


def write_grid_csv(path, xs, ys, F) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y", "re", "im"])
        for j, y in enumerate(ys):
            for k, x in enumerate(xs):
                v = complex(F[j, k])
                w.writerow([repr(float(x)), repr(float(y)), repr(v.real), repr(v.imag)])


# -- local boundedness --------------------------------------------------------


@dataclass
class BoundednessReport:
    bounded: bool
    max_norm: float
    samples: int

    def to_json_obj(self) -> dict:
        return {"bounded": self.bounded, "max_norm": self.max_norm, "samples": self.samples}


def local_boundedness(phi, box: Box, resolution: int, limit: float = np.inf) -> BoundednessReport:
    """Sample ``phi`` on a ``resolution``-per-axis grid of ``box``.

    Raises NonFiniteSample if any sample is NaN/inf or cannot be evaluated;
    ``bounded`` is False when the largest norm exceeds ``limit``.
    """
    phi = as_sampler(phi)
    pts = box.grid(resolution)
    try:
        vals = phi(pts)
    except A3Error as exc:
        raise NonFiniteSample(f"evaluation failed inside the box: {exc}") from exc
    norms = alg.norm(vals)
    if not np.all(np.isfinite(norms)):
        raise NonFiniteSample("NaN or infinite value inside the box")
    mx = float(np.max(norms))
    return BoundednessReport(mx <= limit, mx, int(norms.size))


# -- reference functions ------------------------------------------------------


def _conj_scalar(zeta):
    return A3Element(np.conj(zeta.a), np.zeros_like(zeta.b), np.zeros_like(zeta.c))


PATHOLOGICAL = {
    "identity": lambda zeta: zeta,
    "scalar-f": lambda zeta: A3Element(zeta.a, np.zeros_like(zeta.b), np.zeros_like(zeta.c)),
    "conj-scalar": _conj_scalar,
    "conj": lambda zeta: A3Element(np.conj(zeta.a), np.conj(zeta.b), np.conj(zeta.c)),
    "radical-only": lambda zeta: A3Element(np.zeros_like(zeta.a), np.zeros_like(zeta.b), zeta.a),
    "rho-times-f": lambda zeta: A3Element(np.zeros_like(zeta.a), zeta.a, np.zeros_like(zeta.c)),
    "inverse": alg.invert,
}
