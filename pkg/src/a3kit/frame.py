"""Real three-dimensional subspaces E3 of A3 with f(E3) = C."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import A3Element, norm
from .errors import DegenerateFrame, NonSurjectiveFrame

RANK_RTOL = 1e-8


def real_coords(x: A3Element) -> np.ndarray:
    """The six real coordinates (Re a, Im a, Re b, Im b, Re c, Im c)."""
    arr = x.to_array()
    return np.stack([arr.real, arr.imag], axis=-1).reshape(*arr.shape[:-1], 6)


def from_real_coords(v) -> A3Element:
    v = np.asarray(v, dtype=float)
    return A3Element(v[..., 0] + 1j * v[..., 1], v[..., 2] + 1j * v[..., 3], v[..., 4] + 1j * v[..., 5])


@dataclass(frozen=True)
class E3Frame:
    e1: A3Element
    e2: A3Element
    e3: A3Element
    # certificate
    singular_values: tuple = field(default=(), compare=False)
    independence_singular_values: tuple = field(default=(), compare=False)

    @property
    def vectors(self) -> tuple:
        return (self.e1, self.e2, self.e3)

    @property
    def f_matrix(self) -> np.ndarray:
        """Real 2x3 matrix of (x, y, z) -> f(x e1 + y e2 + z e3)."""
        fv = np.array([e.a for e in self.vectors])
        return np.vstack([fv.real, fv.imag])

    @property
    def basis_matrix(self) -> np.ndarray:
        """Real 6x3 matrix whose columns are the frame vectors."""
        return np.column_stack([real_coords(e) for e in self.vectors])

    def embed(self, x, y, z) -> A3Element:
        return embed(self, x, y, z)

    def coordinates(self, zeta: A3Element):
        """Least-squares frame coordinates and the out-of-span residual."""
        B = self.basis_matrix
        v = real_coords(zeta)
        flat = v.reshape(-1, 6).T
        coef, *_ = np.linalg.lstsq(B, flat, rcond=None)
        resid = np.linalg.norm(B @ coef - flat, axis=0)
        shape = v.shape[:-1]
        return coef.T.reshape(*shape, 3), resid.reshape(shape)

    def to_json_obj(self) -> dict:
        return {"e1": self.e1.to_json_obj(), "e2": self.e2.to_json_obj(), "e3": self.e3.to_json_obj()}


@dataclass(frozen=True)
class CanonicalTriple:
    a: A3Element
    b: A3Element
    c: A3Element
    coords: tuple = field(default=(), compare=False)  # frame coordinates of a, b, c

    def to_json_obj(self, frame: E3Frame | None = None) -> dict:
        obj = {"a": self.a.to_json_obj(), "b": self.b.to_json_obj(), "c": self.c.to_json_obj()}
        if frame is not None:
            obj["certificate"] = {
                "singular_values": list(frame.singular_values),
                "independence_singular_values": list(frame.independence_singular_values),
            }
        return obj


def validate_frame(e1: A3Element, e2: A3Element, e3: A3Element) -> E3Frame:
    draft = E3Frame(e1, e2, e3)
    # surjectivity first: a frame failing both tests reports NonSurjectiveFrame
    sv = np.linalg.svd(draft.f_matrix, compute_uv=False)
    if sv[0] == 0 or sv[-1] < RANK_RTOL * sv[0]:
        raise NonSurjectiveFrame(f"f maps the span onto a line or point (singular values {sv})")
    ind = np.linalg.svd(draft.basis_matrix, compute_uv=False)
    if ind[-1] < RANK_RTOL * ind[0]:
        raise DegenerateFrame(f"frame vectors are linearly dependent over R (singular values {ind})")
    return E3Frame(e1, e2, e3, tuple(float(s) for s in sv), tuple(float(s) for s in ind))


def frame_from_json_obj(obj: dict) -> E3Frame:
    if set(obj) != {"e1", "e2", "e3"}:
        raise ValueError(f"frame JSON needs exactly keys e1, e2, e3; got {sorted(obj)}")
    return validate_frame(*(A3Element.from_json_obj(obj[k]) for k in ("e1", "e2", "e3")))


def embed(frame: E3Frame, x, y, z) -> A3Element:
    x, y, z = (np.asarray(t, dtype=float) for t in (x, y, z))
    e1, e2, e3 = frame.vectors
    return A3Element(
        x * e1.a + y * e2.a + z * e3.a,
        x * e1.b + y * e2.b + z * e3.b,
        x * e1.c + y * e2.c + z * e3.c,
    )


def _check(frame: E3Frame):
    if not frame.singular_values:
        frame = validate_frame(*frame.vectors)
    return frame


def kernel_coords(frame: E3Frame) -> np.ndarray:
    _check(frame)
    _, _, vt = np.linalg.svd(frame.f_matrix)
    k = vt[-1]
    first = k[np.flatnonzero(np.abs(k) > 1e-15)[0]]
    return k if first > 0 else -k


def canonical_triple(frame: E3Frame) -> CanonicalTriple:
    frame = _check(frame)
    M = frame.f_matrix
    pinv = np.linalg.pinv(M)
    ca = pinv @ np.array([1.0, 0.0])
    cb = pinv @ np.array([0.0, 1.0])
    ck = kernel_coords(frame)
    c = embed(frame, *ck)
    scale = float(norm(c))
    ck = ck / scale
    return CanonicalTriple(
        embed(frame, *ca),
        embed(frame, *cb),
        embed(frame, *ck),
        coords=tuple(tuple(float(t) for t in v) for v in (ca, cb, ck)),
    )


def fiber_direction(frame: E3Frame) -> A3Element:
    """Unit-norm direction of the fibre lines f^{-1}(z) inside E3."""
    return canonical_triple(frame).c
