"""Arithmetic in the algebra A3 = span_C{1, rho, rho^2} with rho^3 = 0.

Elements are stored in the Cartan basis as complex triples ``(a, b, c)``
meaning ``a + b*rho + c*rho^2``.  Components may be Python/numpy complex
scalars or equally shaped numpy arrays; every operation here is written
elementwise, so a single :class:`A3Element` can carry a whole batch of
points.

Multiplication is lower-triangular Toeplitz::

    (a1, b1, c1) * (a2, b2, c2) = (a1 a2, a1 b2 + b1 a2, a1 c2 + b1 b2 + c1 a2)

so every analytic function is evaluated exactly by its second-order Taylor
polynomial around the scalar part.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import NotInvertible

ABS_FLOOR = 1e-300
REL_THRESHOLD = 1e-12
DEFAULT_TOL = 1e-12


def _scalar(v):
    """Collapse 0-d numpy values to Python complex; leave arrays alone."""
    if isinstance(v, np.ndarray):
        return v if v.ndim else complex(v)
    return complex(v)


@dataclass(frozen=True, slots=True, eq=False)
class A3Element:
    a: Any = 0j
    b: Any = 0j
    c: Any = 0j

    __array_ufunc__ = None  # keep numpy from broadcasting over us

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, _scalar(getattr(self, name)))

    # construction helpers -------------------------------------------------
    @classmethod
    def scalar(cls, z) -> A3Element:
        return cls(z, 0j, 0j)

    @classmethod
    def from_array(cls, arr) -> A3Element:
        arr = np.asarray(arr, dtype=complex)
        return cls(arr[..., 0], arr[..., 1], arr[..., 2])

    @classmethod
    def stack(cls, elements) -> A3Element:
        elements = list(elements)
        return cls(
            np.array([e.a for e in elements], dtype=complex),
            np.array([e.b for e in elements], dtype=complex),
            np.array([e.c for e in elements], dtype=complex),
        )

    def to_array(self) -> np.ndarray:
        return np.stack(np.broadcast_arrays(*(np.asarray(v, dtype=complex) for v in self.components)), axis=-1)

    @property
    def components(self) -> tuple:
        return (self.a, self.b, self.c)

    @property
    def shape(self) -> tuple:
        return np.broadcast_shapes(*(np.shape(v) for v in self.components))

    @property
    def is_batch(self) -> bool:
        return self.shape != ()

    def __len__(self):
        return self.shape[0]

    def __getitem__(self, idx) -> A3Element:
        shape = self.shape
        return A3Element(*(np.broadcast_to(v, shape)[idx] for v in self.components))

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        other = as_a3(other)
        return A3Element(self.a + other.a, self.b + other.b, self.c + other.c)

    __radd__ = __add__

    def __sub__(self, other):
        other = as_a3(other)
        return A3Element(self.a - other.a, self.b - other.b, self.c - other.c)

    def __rsub__(self, other):
        return as_a3(other) - self

    def __neg__(self):
        return A3Element(-self.a, -self.b, -self.c)

    def __mul__(self, other):
        if isinstance(other, A3Element):
            return mul(self, other)
        if isinstance(other, (int, float, complex, np.number, np.ndarray)):
            return A3Element(self.a * other, self.b * other, self.c * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, A3Element):
            return mul(self, invert(other))
        return A3Element(self.a / other, self.b / other, self.c / other)

    def __rtruediv__(self, other):
        return mul(as_a3(other), invert(self))

    def __pow__(self, k: int):
        return powi_a3(self, k)

    def __eq__(self, other):
        if not isinstance(other, A3Element):
            return NotImplemented
        return all(np.array_equal(x, y) for x, y in zip(self.components, other.components))

    def __hash__(self):
        if self.is_batch:
            raise TypeError("batched A3Element is unhashable")
        return hash(self.components)

    def isclose(self, other, tol: float = DEFAULT_TOL) -> bool:
        return bool(np.all(norm(self - as_a3(other)) <= tol))

    def __repr__(self):
        return f"A3Element(a={self.a!r}, b={self.b!r}, c={self.c!r})"

    # serialization --------------------------------------------------------
    def to_json_obj(self) -> dict:
        if self.is_batch:
            raise TypeError("only scalar elements serialize to JSON")
        return {k: [v.real, v.imag] for k, v in zip("abc", self.components)}

    @classmethod
    def from_json_obj(cls, obj: dict) -> A3Element:
        if set(obj) != {"a", "b", "c"}:
            raise ValueError(f"A3Element JSON needs exactly keys a, b, c; got {sorted(obj)}")
        vals = []
        for k in "abc":
            re_im = obj[k]
            if len(re_im) != 2:
                raise ValueError(f"component {k!r} must be [re, im]")
            vals.append(complex(float(re_im[0]), float(re_im[1])))
        return cls(*vals)

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json(cls, text: str) -> A3Element:
        return cls.from_json_obj(json.loads(text))


@dataclass(frozen=True, slots=True)
class RadicalElement:
    """Nilpotent element ``b*rho + c*rho^2`` of the maximal ideal."""

    b: Any = 0j
    c: Any = 0j

    def to_a3(self) -> A3Element:
        return A3Element(0j, self.b, self.c)

    def square(self) -> RadicalElement:
        return RadicalElement(0j, self.b * self.b)


ONE = A3Element(1, 0, 0)
ZERO = A3Element(0, 0, 0)
RHO = A3Element(0, 1, 0)
RHO2 = A3Element(0, 0, 1)


def as_a3(x) -> A3Element:
    if isinstance(x, A3Element):
        return x
    if isinstance(x, RadicalElement):
        return x.to_a3()
    return A3Element(x, 0j, 0j)


def add(x: A3Element, y: A3Element) -> A3Element:
    return x + y


def mul(x: A3Element, y: A3Element) -> A3Element:
    # the outer pair is summed first so that swapping scalar x and y is bit-exact;
    # numpy's vectorised complex product may differ from its swap by an ulp
    return A3Element(
        x.a * y.a,
        x.a * y.b + x.b * y.a,
        (x.a * y.c + x.c * y.a) + x.b * y.b,
    )


def functional_f(x: A3Element):
    """The multiplicative functional ``a + b rho + c rho^2 -> a``."""
    return x.a


def norm(x: A3Element):
    m = np.maximum(np.maximum(np.abs(x.a), np.abs(x.b)), np.abs(x.c))
    safe = np.where(m > 0, m, 1.0)
    # rescaled to avoid underflow/overflow of the squares
    out = m * np.sqrt((np.abs(x.a) / safe) ** 2 + (np.abs(x.b) / safe) ** 2 + (np.abs(x.c) / safe) ** 2)
    return float(out) if np.ndim(out) == 0 else out


def radical_part(x: A3Element) -> RadicalElement:
    return RadicalElement(x.b, x.c)


def is_invertible(x: A3Element) -> bool | np.ndarray:
    mod = abs(x.a)
    return (mod > ABS_FLOOR) & (mod > REL_THRESHOLD * norm(x))


def _require_invertible(x: A3Element, what: str = "element"):
    ok = is_invertible(x)
    if not np.all(ok):
        raise NotInvertible(f"{what} lies in (or numerically next to) the radical: |a| too small relative to norm")


def invert(x: A3Element) -> A3Element:
    _require_invertible(x)
    inv_a = 1 / x.a
    inv_a2 = inv_a * inv_a
    return A3Element(inv_a, -x.b * inv_a2, (x.b * x.b - x.a * x.c) * inv_a2 * inv_a)


def _taylor(x: A3Element, g0, g1, g2) -> A3Element:
    # n = b rho + c rho^2, n^2 = b^2 rho^2, n^3 = 0
    return A3Element(g0, g1 * x.b, g1 * x.c + 0.5 * g2 * x.b * x.b)


def exp_a3(x: A3Element) -> A3Element:
    e = np.exp(x.a)
    return _taylor(x, e, e, e)


def sin_a3(x: A3Element) -> A3Element:
    s, c = np.sin(x.a), np.cos(x.a)
    return _taylor(x, s, c, -s)


def cos_a3(x: A3Element) -> A3Element:
    s, c = np.sin(x.a), np.cos(x.a)
    return _taylor(x, c, -s, -c)


def log_a3(x: A3Element) -> A3Element:
    """Principal-branch logarithm on the scalar part."""
    _require_invertible(x, "log argument")
    inv = 1 / x.a
    return _taylor(x, np.log(x.a), inv, -inv * inv)


def binary_power(x, k: int, one):
    """``x**k`` for ``k >= 0`` by repeated squaring with the operand's own ``*``."""
    if k < 0:
        raise ValueError("binary_power needs a non-negative exponent")
    result = one
    base = x
    first = True
    while k:
        if k & 1:
            result = base if first else result * base
            first = False
        k >>= 1
        if k:
            base = base * base
    return result


def powi_a3(x: A3Element, k: int) -> A3Element:
    k = int(k)
    if k < 0:
        return binary_power(invert(x), -k, ONE)
    return binary_power(x, k, ONE)


def random_elements(rng: np.random.Generator, size, scale: float = 1.0) -> A3Element:
    """Batch of elements with independent standard complex normal components."""
    z = rng.standard_normal((*np.atleast_1d(size), 3)) + 1j * rng.standard_normal((*np.atleast_1d(size), 3))
    return A3Element.from_array(scale * z / math.sqrt(2))
