import numpy as np
import pytest
from hypothesis import settings, strategies as st

from a3kit.algebra import A3Element

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

EPS = np.finfo(float).eps

finite = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)
complexes = st.builds(complex, finite, finite)
elements = st.builds(A3Element, complexes, complexes, complexes)


def toeplitz(x: A3Element) -> np.ndarray:
    """Regular representation: multiplication by x as a 3x3 matrix (independent of algebra.mul)."""
    return np.array([[x.a, 0, 0], [x.b, x.a, 0], [x.c, x.b, x.a]], dtype=complex)


def from_column(col) -> A3Element:
    return A3Element(col[0], col[1], col[2])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# polynomials up to degree 5, exp, sin, cos and rationals with poles outside |z| = 2
CORPUS = [
    "3 + 2i",
    "z",
    "z^2 - 1",
    "(0.5-1i)*z^5 + z^3 - 2*z + 1i",
    "exp(z)",
    "sin(z)",
    "cos(z)",
    "1/(z - 5)",
    "1/(z^2 + 9)",
]


_ACCEPTANCE = []


def record_acceptance(number: int, title: str, passed: bool, detail: str) -> None:
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title} -- {detail}"
    _ACCEPTANCE.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
