import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from a3kit.algebra import A3Element, ONE, RHO, RHO2, ZERO, norm
from a3kit.errors import DegenerateFrame, NonSurjectiveFrame
from a3kit.frame import canonical_triple, embed, fiber_direction, frame_from_json_obj, validate_frame

from conftest import EPS

I = A3Element(1j)
STANDARD = (ONE, I, RHO)
SKEW = (A3Element(1, 1), I, RHO + RHO2)


def test_validate_examples():
    validate_frame(ONE, I, RHO)
    validate_frame(ONE, I, RHO2)
    with pytest.raises(NonSurjectiveFrame):
        validate_frame(ONE, A3Element(2), RHO)
    with pytest.raises(DegenerateFrame):
        validate_frame(ONE, I, A3Element(2, 0, 0))


def test_certificate_rank_oracle():
    # f-images 1, 2, 0 are collinear: the 2x3 real matrix has rank 1
    M = np.array([[1, 2, 0], [0, 0, 0]], dtype=float)
    assert np.linalg.matrix_rank(M) == 1
    fr = validate_frame(*SKEW)
    assert len(fr.singular_values) == 2 and min(fr.singular_values) > 0


def test_canonical_examples():
    ct = canonical_triple(validate_frame(*STANDARD))
    assert (ct.a, ct.b, ct.c) == (ONE, I, RHO)
    ct = canonical_triple(validate_frame(A3Element(1, 1), I, RHO2))
    assert ct.a.isclose(A3Element(1, 1), 1e-15) and abs(ct.a.a - 1) <= 1e-12
    ct = canonical_triple(validate_frame(*SKEW))
    assert ct.c.isclose((RHO + RHO2) * (1 / math.sqrt(2)), 1e-15)


def test_fiber_direction_examples(rng):
    assert fiber_direction(validate_frame(*STANDARD)) == RHO
    fr = validate_frame(*SKEW)
    c = fiber_direction(fr)
    assert c.isclose((RHO + RHO2) * (1 / math.sqrt(2)), 1e-15)
    zeta = embed(fr, 0.3, -0.2, 0.9)
    for t in rng.uniform(-5, 5, 10):
        assert abs((zeta + c * t).a - zeta.a) <= 1e-15


def test_embed_examples():
    fr = validate_frame(*STANDARD)
    assert embed(fr, 2, 3, 1) == A3Element(2 + 3j, 1, 0)
    assert embed(fr, 0, 0, 0) == ZERO


def random_frame(rng):
    while True:
        v = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        try:
            return validate_frame(*(A3Element(*row) for row in v))
        except (DegenerateFrame, NonSurjectiveFrame):
            continue


@given(st.integers(0, 10**6))
def test_frame_invariants(seed):
    rng = np.random.default_rng(seed)
    fr = random_frame(rng)
    ct = canonical_triple(fr)
    assert abs(ct.a.a - 1) <= 1e-12 and abs(ct.b.a - 1j) <= 1e-12 and abs(ct.c.a) <= 1e-12
    assert norm(ct.c) == pytest.approx(1, abs=1e-14)
    # a, b, c lie in the real span of the frame
    for el in (ct.a, ct.b, ct.c):
        _, resid = fr.coordinates(el)
        assert resid <= 1e-12 * (1 + norm(el))
    # linearity of f on the span
    x, y, z = rng.uniform(-3, 3, (3, 100))
    lhs = embed(fr, x, y, z).a
    rhs = x * fr.e1.a + y * fr.e2.a + z * fr.e3.a
    assert np.all(np.abs(lhs - rhs) <= 4 * EPS * (np.abs(x * fr.e1.a) + np.abs(y * fr.e2.a) + np.abs(z * fr.e3.a)))


def test_kernel_sign_convention():
    ct = canonical_triple(validate_frame(ONE, I, -RHO))
    # kernel coordinate vector has positive first nonzero entry
    assert ct.coords[2][2] > 0
    assert ct.c == -RHO


def test_frame_json_roundtrip():
    fr = validate_frame(*SKEW)
    again = frame_from_json_obj(fr.to_json_obj())
    assert again.vectors == fr.vectors
    obj = canonical_triple(fr).to_json_obj(fr)
    assert set(obj) == {"a", "b", "c", "certificate"}
