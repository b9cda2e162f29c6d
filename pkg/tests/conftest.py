import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

finite = st.floats(-1.0, 1.0, allow_nan=False, allow_infinity=False)


@st.composite
def unit_vectors(draw, dim=2):
    """Random normalized complex vectors, rejecting the near-zero draws."""
    re = draw(st.lists(finite, min_size=dim, max_size=dim))
    im = draw(st.lists(finite, min_size=dim, max_size=dim))
    v = np.array(re) + 1j * np.array(im)
    n = np.linalg.norm(v)
    if n < 1e-3:
        v = np.zeros(dim, dtype=complex)
        v[0] = 1.0
        return v
    return v / n


@st.composite
def density_matrices(draw, dim=2):
    vecs = [draw(unit_vectors(dim)) for _ in range(dim)]
    w = np.array(draw(st.lists(st.floats(0.0, 1.0), min_size=dim, max_size=dim))) + 1e-9
    w = w / w.sum()
    return sum(wk * np.outer(v, v.conj()) for wk, v in zip(w, vecs))


def haar_states(n, dim=2, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        out.append(v / np.linalg.norm(v))
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


SQRT1_2 = 1 / math.sqrt(2)

# criterion number -> summary line, filled by test_acceptance.py
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
