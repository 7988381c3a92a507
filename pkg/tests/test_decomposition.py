import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from a3kit.algebra import A3Element, RHO, RHO2, mul, norm
from a3kit.cli import random_polynomial_triple
from a3kit.errors import FiberInconsistent, IllConditionedFit, InterpolationFailed, NotMonogenic
from a3kit.extension import MonogenicTriple, build_monogenic
from a3kit.frame import validate_frame
from a3kit.holo import eval_c
from a3kit.decomposition import (
    ComponentTable, fiber_constancy, fiber_points, fit_polynomial, peel, poly_fit, square_grid,
)

GRID = square_grid(21)
SKEW = validate_frame(A3Element(1, 1), A3Element(1j), RHO + RHO2)


def truth(T, z):
    return np.array([eval_c(F, z) * np.ones_like(z) for F in T.parts])


def test_fiber_constancy_examples():
    T = MonogenicTriple("z^2", "0", "0")
    assert fiber_constancy(T, 1 + 1j, 20) <= 1e-12
    scalar = lambda zeta: A3Element(zeta.a, 0 * zeta.b, 0 * zeta.c)  # noqa: E731
    assert fiber_constancy(scalar, 0.5, 20) == 0
    assert fiber_constancy(lambda zeta: zeta, 0.5, 20, component=1) > 0


def test_fiber_points_have_the_right_scalar(rng):
    z = np.array([0.1 + 0.2j, -0.7j])
    pts = fiber_points(z, 5, rng)
    assert pts.shape == (5, 2) and np.all(pts.a == z)
    assert np.all(norm(A3Element(0 * pts.a, pts.b, pts.c)) <= 0.1 + 1e-15)
    pts = fiber_points(z, 5, rng, SKEW)
    assert np.all(np.abs(pts.a - z) <= 1e-15)
    _, resid = SKEW.coordinates(pts)
    assert np.all(resid <= 1e-14)


def test_peel_identity():
    table = peel(MonogenicTriple("z", "0", "0"), GRID)
    assert np.max(np.abs(table.values[0] - GRID)) <= 1e-10
    assert np.max(np.abs(table.values[1:])) <= 1e-10
    assert table.max_residual <= 1e-10


def test_peel_rho2_scalar():
    phi = lambda zeta: mul(RHO2, A3Element(zeta.a, 0 * zeta.b, 0 * zeta.c))  # noqa: E731
    table = peel(phi, GRID)
    assert np.max(np.abs(table.values[:2])) <= 1e-12
    assert np.max(np.abs(table.values[2] - GRID)) <= 1e-12


@settings(max_examples=10)
@given(st.integers(0, 10**6))
def test_peel_random_triples(seed):
    T = random_polynomial_triple(np.random.default_rng(seed))
    table = peel(T, GRID, seed=seed)
    assert np.max(np.abs(table.values - truth(T, GRID))) <= 1e-8
    assert table.max_residual <= 1e-8
    # stage leftovers and two-point fibre agreement
    assert max(table.stage_leftover) <= 1e-10
    assert np.max(table.fiber_deviation) <= 1e-10


def test_peel_in_frame(rng):
    T = random_polynomial_triple(rng)
    table = peel(T, GRID, frame=SKEW)
    assert np.max(np.abs(table.values - truth(T, GRID))) <= 1e-8
    assert table.max_residual <= 1e-8


def test_peel_transcendental_reports_fit_error():
    # exp is not a polynomial: F0 is read exactly, later stages inherit the
    # degree-6 interpolant's derivative error times the radical size
    T = MonogenicTriple("exp(z)", "sin(z)", "1")
    table = peel(T, GRID)
    err = np.max(np.abs(table.values - truth(T, GRID)), axis=1)
    assert err[0] == 0
    assert np.all(err[1:] < 1e-2)
    assert 1e-10 < table.max_residual < 1e-2


def test_peel_rejects_non_monogenic():
    conj = lambda zeta: A3Element(np.conj(zeta.a), 0 * zeta.b, 0 * zeta.c)  # noqa: E731
    with pytest.raises(NotMonogenic):
        peel(conj, GRID)


def test_peel_detects_fibre_variation():
    # component 0 depends on the radical part, so two fibre points disagree
    phi = lambda zeta: A3Element(zeta.a + zeta.b, 0 * zeta.b, 0 * zeta.c)  # noqa: E731
    with pytest.raises(FiberInconsistent):
        peel(phi, GRID, precheck=False)


def test_fit_examples():
    T = MonogenicTriple("z^2", "1i*z", "3")
    cert = fit_polynomial(peel(T, GRID), 2)
    expect = [[0, 0, 1], [0, 1j, 0], [3, 0, 0]]
    for got, want in zip(cert.coefficients, expect):
        assert np.max(np.abs(np.asarray(got) - want)) <= 1e-8
    const = ComponentTable(GRID, np.full((3, len(GRID)), 2 - 1j), np.zeros(len(GRID)))
    cert = fit_polynomial(const, 0)
    assert max(cert.residuals) <= 1e-14
    assert np.allclose([c[0] for c in cert.coefficients], 2 - 1j, atol=1e-14)
    cert = fit_polynomial(peel(MonogenicTriple("exp(z)", "0", "0"), GRID), 2)
    assert cert.residuals[0] > 1e-3


def test_fit_preconditions():
    table = peel(MonogenicTriple("z", "0", "0"), square_grid(5))
    with pytest.raises(ValueError):
        fit_polynomial(table, 5)  # 25 < 36 points
    with pytest.raises(ValueError):
        fit_polynomial(table, 13)
    with pytest.raises(InterpolationFailed):
        poly_fit(np.array([0, 1]), np.array([0, 1]), 3)
    with pytest.raises(IllConditionedFit):
        poly_fit(np.append(np.linspace(0, 1e-3, 40), 1.0), np.ones(41), 12)


def test_fit_certificate_json():
    cert = fit_polynomial(peel(MonogenicTriple("z^2", "1i*z", "3"), GRID), 2)
    obj = cert.to_json_obj()
    assert obj["degree"] == 2 and set(obj["coefficients"]) == {"F0", "F1", "F2"}
    assert obj["coefficients"]["F1"][1] == pytest.approx([0, 1], abs=1e-8)


def test_table_csv_roundtrip(tmp_path):
    table = peel(MonogenicTriple("exp(z)", "z^2", "1i"), square_grid(5))
    path = tmp_path / "t.csv"
    table.write_csv(path)
    assert path.read_text().splitlines()[0] == "z_re,z_im,F0_re,F0_im,F1_re,F1_im,F2_re,F2_im,residual"
    back = ComponentTable.read_csv(path)
    assert np.array_equal(back.z, table.z) and np.array_equal(back.values, table.values)
    assert np.array_equal(back.residual, table.residual)


def test_reconstruction_matches_build(rng):
    T = random_polynomial_triple(rng)
    table = peel(T, GRID)
    zeta = A3Element(GRID, 0.05 + 0 * GRID, -0.03j + 0 * GRID)
    f0, f1, f2 = table.fits
    approx = f0.extend(zeta) + mul(f1.extend(zeta), RHO) + mul(f2.extend(zeta), RHO2)
    assert np.max(norm(approx - build_monogenic(T, zeta))) <= 1e-8
