import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bkmflow.errors import DegenerateEigenvalues, SingularMmatrix
from bkmflow.operators import INFINITY
from bkmflow.poly import Poly
from bkmflow.stackel import (
    PhasePoint,
    bracket_matrix,
    eigen_to_companion,
    flow_weights,
    grad_f,
    grad_h,
    hamiltonian_h,
    integral_coefficients,
    integral_f,
    integral_jacobians,
    repair_c,
    stackel_check,
)

C = Poly([0.2, -0.1, 0.3, 0.5, -0.4, 0.1, 1.0])  # degree 6: N = 2, n = 2
M1 = Poly([-1.0])
M2 = Poly([0.5, 0.0, -1.0])


def point(rng, N=2):
    return PhasePoint(rng.uniform(-0.8, 0.8, N), rng.uniform(-0.8, 0.8, N))


def test_phase_point_validation():
    with pytest.raises(ValueError):
        PhasePoint([0.0, 1.0], [0.0])
    with pytest.raises(ValueError):
        PhasePoint([np.nan], [0.0])
    pt = PhasePoint.from_state([1.0, 2.0, 3.0, 4.0])
    assert pt.N == 2 and pt.p.tolist() == [3.0, 4.0]


@pytest.mark.parametrize("m", [M1, M2])
def test_jacobians_match_finite_differences(rng, m):
    pt = point(rng)
    a, dw, dp = integral_jacobians(pt, C, m)
    h = 1e-6
    for k in range(2):
        e = np.zeros(2)
        e[k] = h
        up = integral_jacobians(PhasePoint(pt.w + e, pt.p), C, m)[0]
        dn = integral_jacobians(PhasePoint(pt.w - e, pt.p), C, m)[0]
        np.testing.assert_allclose(dw[:, k], (up - dn) / (2 * h), atol=1e-7)
        up = integral_jacobians(PhasePoint(pt.w, pt.p + e), C, m)[0]
        dn = integral_jacobians(PhasePoint(pt.w, pt.p - e), C, m)[0]
        np.testing.assert_allclose(dp[:, k], (up - dn) / (2 * h), atol=1e-7)


@settings(max_examples=40)
@given(st.integers(1, 4), st.integers(0, 2**31))
def test_integrals_commute(N, seed):
    rng = np.random.default_rng(seed)
    c = Poly(np.r_[rng.uniform(-1, 1, 2 * N + 2), 1.0])
    pt = point(rng, N)
    B = bracket_matrix(pt, c, M2)
    assert np.max(np.abs(B)) <= 1e-9 * (1.0 + np.max(np.abs(integral_jacobians(pt, c, M2)[1])) ** 2)


def test_direct_integrals_agree_with_coefficients(rng):
    pt = point(rng)
    a = integral_coefficients(pt, C, M1)
    assert hamiltonian_h(pt, C, M1) == pytest.approx(-a.values[0], abs=1e-12)
    assert integral_f(pt, 0.7, C, M1) == pytest.approx(a.at(0.7), abs=1e-12)
    assert integral_f(pt, INFINITY, C, M1) == pytest.approx(-a.values[1], abs=1e-12)


def test_flow_weights_and_gradients(rng):
    np.testing.assert_array_equal(flow_weights(2.0, 3), [4.0, 2.0, 1.0])
    np.testing.assert_array_equal(flow_weights(INFINITY, 3), [0.0, -1.0, 0.0])
    pt = point(rng)
    gw, gp = grad_h(pt, C, M1)
    _, dw, dp = integral_jacobians(pt, C, M1)
    np.testing.assert_allclose(gw, -dw[0])
    fw, fp = grad_f(pt, 0.3, C, M1)
    np.testing.assert_allclose(fp, 0.3 * dp[0] + dp[1])


@pytest.mark.parametrize("m", [M1, M2])
def test_repair_puts_point_on_zero_level(rng, m):
    pt = point(rng)
    c_new = repair_c(C, m, pt)
    assert c_new.degree == C.degree and c_new.lead == 1.0
    assert integral_coefficients(pt, c_new, m).max_abs() < 1e-12


def test_stackel_identity(rng):
    q = np.array([-0.6, 0.4])
    p_q = rng.uniform(-1, 1, 2)
    assert stackel_check(q, p_q, C, M2) < 1e-10
    with pytest.raises(DegenerateEigenvalues):
        stackel_check(np.array([0.1, 0.1]), p_q, C, M2)


def test_eigen_to_companion_roots():
    pt = eigen_to_companion([-0.5, 0.25], [0.0, 0.0])
    np.testing.assert_allclose(sorted(np.roots(np.r_[1.0, pt.w])), [-0.5, 0.25])


def test_singular_m_matrix_detected():
    m = Poly([-0.5, 1.0])  # root 0.5 is an eigenvalue of M below
    pt = eigen_to_companion([0.5, -0.3], [0.1, 0.2])
    with pytest.raises(SingularMmatrix):
        integral_jacobians(pt, Poly([0.0, 0.0, 0.0, 0.0, 0.0, 1.0]), m)
