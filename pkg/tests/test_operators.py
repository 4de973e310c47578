import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bkmflow.operators import (
    BkmSpec,
    Chart,
    CompanionMatrix,
    INFINITY,
    Sign,
    companion,
    m_infinity,
    m_lambda,
    sigma_poly,
    w_poly,
    zeta,
)
from bkmflow.poly import Poly

vec = st.lists(st.floats(-2, 2), min_size=1, max_size=4)


@given(vec)
def test_companion_char_poly_is_w(w):
    M = companion(w)
    # det(mu - M) = w(mu) at a few sample points
    for mu in (-1.3, 0.2, 2.1):
        assert np.isclose(np.linalg.det(mu * np.eye(len(w)) - M), w_poly(w)(mu), atol=1e-9)


@given(vec)
def test_companion_matrix_signs(u):
    plus = CompanionMatrix(tuple(u), Sign.PLUS_U)
    minus = CompanionMatrix(tuple(u), Sign.MINUS_W)
    np.testing.assert_array_equal(minus.dense(), companion(u))
    for mu in (-0.7, 1.1):
        n = len(u)
        assert np.isclose(np.linalg.det(mu * np.eye(n) - plus.dense()), plus.char_poly()(mu), atol=1e-9)


def test_sigma_chart_conventions():
    u = [0.3, -0.5]
    fc = sigma_poly(u, Chart.FIRST_COMPANION)
    kb = sigma_poly(u, Chart.KB_FORM)
    assert fc.tolist() == [0.5, -0.3, 1.0]
    assert kb.tolist() == [-0.5, 0.3, 1.0]


def test_m_lambda_and_infinity_shapes():
    w = np.array([0.2, -0.1, 0.4])
    assert m_lambda(w, 1.5).shape == (3, 3)
    assert m_infinity(w).shape == (3, 3)


def test_zeta_for_constant_m_first_companion():
    # n = 1, m = m_0: zeta = -m_0
    z = zeta([0.7], Poly([2.0]))
    np.testing.assert_allclose(z, [-2.0])


def test_bkm_spec_validation():
    with pytest.raises(ValueError):
        BkmSpec(1, Poly([1.0, 0.0, 1.0]), INFINITY)
    with pytest.raises(ValueError):
        BkmSpec(0, Poly([1.0]), INFINITY)
    spec = BkmSpec(2, Poly([1.0, 0.0, 3.0]), INFINITY)
    assert spec.infinite and spec.m_top == 3.0
