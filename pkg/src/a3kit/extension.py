"""Principal extension of analytic functions into A3.

Two independent routes compute the same element:

* :func:`extend_jet` uses the exact second-order Taylor formula
  ``F(z) + F'(z) n + F''(z) n^2 / 2`` with ``z = f(zeta)`` and ``n`` the
  radical part of ``zeta``;
* :func:`extend_contour` evaluates the Cauchy integral
  ``(1/2 pi i) \\oint F(t) (t - zeta)^{-1} dt`` over a circle with the
  trapezoidal rule, which converges geometrically for periodic analytic
  integrands.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import algebra as alg
from .algebra import A3Element
from .errors import ContourDoesNotEnclose, QuadratureNotConverged, ResolventSingular
from .holo import HoloExpr, as_expr, diff, eval_c, jet, singularities, to_text

PROXIMITY = 1e-3
CONVERGENCE_RTOL = 1e-12
MAX_NODES = 2**16


@dataclass(frozen=True)
class Contour:
    center: complex = 0j
    radius: float = 1.0
    nodes: int = 256

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if not self.radius > 0:
            raise ValueError("contour radius must be positive")
        n = int(self.nodes)
        if n < 8 or n & (n - 1):
            raise ValueError("contour nodes must be a power of two >= 8")
        object.__setattr__(self, "nodes", n)

    def with_nodes(self, n: int) -> Contour:
        return Contour(self.center, self.radius, n)

    def points(self, n: int | None = None) -> np.ndarray:
        n = self.nodes if n is None else n
        theta = 2 * np.pi * np.arange(n) / n
        return self.center + self.radius * np.exp(1j * theta)

    def to_json_obj(self) -> dict:
        return {"center": [self.center.real, self.center.imag], "radius": self.radius, "nodes": self.nodes}

    @classmethod
    def from_json_obj(cls, obj: dict) -> Contour:
        if set(obj) - {"center", "radius", "nodes"}:
            raise ValueError(f"unknown contour keys: {sorted(set(obj) - {'center', 'radius', 'nodes'})}")
        c = obj.get("center", [0.0, 0.0])
        return cls(complex(c[0], c[1]), obj.get("radius", 1.0), obj.get("nodes", 256))


@dataclass
class ConvergenceRecord:
    nodes: list = field(default_factory=list)
    deltas: list = field(default_factory=list)
    converged: bool = False

    def to_json_obj(self) -> dict:
        return {"nodes": list(self.nodes), "deltas": [float(d) for d in self.deltas], "converged": self.converged}


@dataclass(frozen=True)
class MonogenicTriple:
    F0: HoloExpr
    F1: HoloExpr
    F2: HoloExpr

    def __post_init__(self):
        for name in ("F0", "F1", "F2"):
            object.__setattr__(self, name, as_expr(getattr(self, name)))

    @property
    def parts(self) -> tuple:
        return (self.F0, self.F1, self.F2)

    def derivative(self) -> MonogenicTriple:
        return MonogenicTriple(*(diff(F) for F in self.parts))

    def singularities(self) -> list[complex]:
        return sorted({s for F in self.parts for s in singularities(F)}, key=lambda w: (w.real, w.imag))

    def check_analytic(self, z) -> None:
        """Raise SingularEvaluation if any component is singular at the sample points."""
        for F in self.parts:
            vals = eval_c(F, z)
            if not np.all(np.isfinite(vals)):
                from .errors import SingularEvaluation

                raise SingularEvaluation(f"{to_text(F)} is not finite on the sampled domain")

    def __call__(self, zeta: A3Element) -> A3Element:
        return build_monogenic(self, zeta)

    def to_json_obj(self) -> dict:
        return {"F0": to_text(self.F0), "F1": to_text(self.F1), "F2": to_text(self.F2)}

    @classmethod
    def from_json_obj(cls, obj: dict) -> MonogenicTriple:
        if set(obj) != {"F0", "F1", "F2"}:
            raise ValueError(f"triple JSON needs exactly keys F0, F1, F2; got {sorted(obj)}")
        return cls(obj["F0"], obj["F1"], obj["F2"])

    @classmethod
    def from_json(cls, text: str) -> MonogenicTriple:
        return cls.from_json_obj(json.loads(text))


def resolvent(t, zeta: A3Element) -> A3Element:
    """``(t - zeta)^{-1}`` in closed form."""
    w = t - zeta.a
    diff_el = A3Element(w, -zeta.b, -zeta.c)
    if not np.all(alg.is_invertible(diff_el)):
        raise ResolventSingular("t coincides (numerically) with f(zeta)")
    iw = 1 / w
    iw2 = iw * iw
    return A3Element(iw, zeta.b * iw2, zeta.c * iw2 + zeta.b * zeta.b * iw2 * iw)


def extend_jet(F, zeta: A3Element) -> A3Element:
    F = as_expr(F)
    zeta = alg.as_a3(zeta)
    j = jet(F, zeta.a)
    n1, n2 = zeta.b, zeta.c
    return A3Element(j.v0, j.v1 * n1, j.v1 * n2 + 0.5 * j.v2 * n1 * n1)


def default_contour(z, poles=(), nodes: int = 256) -> Contour:
    """Circle centred at ``z`` with radius half the distance to the nearest pole (1 if none)."""
    z = complex(z)
    if len(poles):
        radius = 0.5 * min(abs(p - z) for p in poles)
    else:
        radius = 1.0
    return Contour(z, radius, nodes)


def _check_encloses(zeta: A3Element, contour: Contour):
    dist = np.abs(np.asarray(zeta.a) - contour.center)
    if np.any(dist > contour.radius * (1 - PROXIMITY)):
        raise ContourDoesNotEnclose(
            f"f(zeta) must lie inside the circle, at least {PROXIMITY} * radius away from it"
        )


def _quadrature(Ft, t, zeta: A3Element, contour: Contour):
    """Trapezoidal sum; returns the element and the mean summand magnitude."""
    shape = zeta.shape
    expand = (slice(None),) + (None,) * len(shape)
    tt = t[expand]
    R = resolvent(tt, zeta)
    weight = (Ft * (t - contour.center) / len(t))[expand]
    terms = [weight * comp for comp in R.components]
    # np.sum over axis 0 is a fixed pairwise reduction: bit-reproducible
    value = A3Element(*(np.sum(np.broadcast_to(c, (len(t),) + shape), axis=0) for c in terms))
    scale = sum(np.mean(np.abs(c), axis=0) for c in terms)
    return value, scale


def extend_contour(F, zeta: A3Element, contour: Contour, *, adaptive: bool = False):
    """Cauchy-integral extension by trapezoidal quadrature on ``contour``.

    With ``adaptive=True`` the node count is doubled from ``contour.nodes``
    until successive results agree to 1e-12 relative (up to 2^16 nodes) and
    ``(value, ConvergenceRecord)`` is returned.
    """
    F = as_expr(F)
    zeta = alg.as_a3(zeta)
    _check_encloses(zeta, contour)
    n = contour.nodes
    t = contour.points(n)
    value, _ = _quadrature(eval_c(F, t), t, zeta, contour)
    if not adaptive:
        return value
    record = ConvergenceRecord(nodes=[n])
    while n < MAX_NODES:
        n *= 2
        t = contour.points(n)
        new, scale = _quadrature(eval_c(F, t), t, zeta, contour)
        delta = alg.norm(new - value)
        # relative to the result or, for near-zero results, to the summand size
        ref = np.maximum(np.maximum(alg.norm(new), scale), np.finfo(float).tiny)
        record.nodes.append(n)
        record.deltas.append(float(np.max(delta)))
        value = new
        if np.all(delta <= CONVERGENCE_RTOL * ref):
            record.converged = True
            return value, record
    raise QuadratureNotConverged(f"no stabilisation up to {MAX_NODES} nodes; last delta {record.deltas[-1]:.3g}")


def _times_rho(x: A3Element, power: int) -> A3Element:
    return alg.mul(x, alg.RHO if power == 1 else alg.RHO2)


def build_monogenic(triple: MonogenicTriple, zeta: A3Element, method: str = "jet", contour: Contour | None = None):
    """Monogenic function with components given by ``triple``.

    Returns ``ext(F0) + ext(F1) rho + ext(F2) rho^2`` where ``ext`` is the
    principal extension computed by ``method`` ("jet" or "contour").  For
    the contour route without an explicit ``contour`` a default circle is
    chosen per point from the triple's known singularities.
    """
    zeta = alg.as_a3(zeta)
    if method == "jet":
        parts = [extend_jet(F, zeta) for F in triple.parts]
    elif method == "contour":
        if contour is None:
            if zeta.is_batch:
                flat = [build_monogenic(triple, zeta[idx], "contour") for idx in np.ndindex(zeta.shape)]
                arr = np.array([e.to_array() for e in flat]).reshape(*zeta.shape, 3)
                return A3Element.from_array(arr)
            contour = default_contour(zeta.a, triple.singularities())
        parts = [extend_contour(F, zeta, contour) for F in triple.parts]
    else:
        raise ValueError(f"unknown method {method!r}")
    return parts[0] + _times_rho(parts[1], 1) + _times_rho(parts[2], 2)
