import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from bkmflow.errors import EvaluationAtEigenvalue, SharedRoot
from bkmflow.operators import BkmSpec, Chart, INFINITY, w_poly
from bkmflow.poly import Poly
from bkmflow.rho import map_r, rho_by_interpolation, solve_rho

small = st.floats(-1, 1)


@settings(max_examples=60)
@given(st.integers(1, 3), st.integers(1, 4), st.data())
def test_rho_identity_holds(n, N, data):
    w = np.array(data.draw(st.lists(small, min_size=N, max_size=N)))
    c = Poly(data.draw(st.lists(small, min_size=2 * N + n, max_size=2 * N + n)) + [1.0])
    m = Poly(data.draw(st.lists(small, min_size=1, max_size=n + 1)))
    assume(not m.is_zero() and np.max(np.abs(m.coeffs)) > 0.1)
    try:
        res = solve_rho(c, m, w)
    except SharedRoot:
        assume(False)
    wp = w_poly(w)
    lhs = res.rho * wp * wp - m * res.q
    assert lhs.allclose(c, rtol=0, atol=1e-8)
    assert res.rho.degree == n and res.rho.lead == 1.0
    assert res.q.degree <= 2 * N - 1


def test_u_is_twice_w1_for_kdv():
    spec = BkmSpec(1, Poly([1.0]), INFINITY)
    c = Poly.from_roots([-1.0, 0.0, 1.0])  # c_1 = 0
    w = np.array([0.37])
    assert map_r(w, spec, c)[0] == pytest.approx(0.74, abs=1e-12)


def test_interpolation_path_matches():
    c = Poly([0.3, -0.2, 0.1, 0.4, -0.6, 0.2, 1.0])
    roots = [-1.2, 0.9]
    w = np.array([0.25, -0.4])
    a = solve_rho(c, Poly.from_roots(roots), w).rho
    b = rho_by_interpolation(c, roots, w)
    assert a.allclose(b, rtol=0, atol=1e-12)


def test_shared_root_raises():
    # eigenvalue of M equal to the root of m = mu - 0.5
    w = Poly.from_roots([0.5]).coeffs[-2::-1]
    with pytest.raises(SharedRoot):
        solve_rho(Poly([0.0, 0.0, 0.0, 1.0]), Poly([-0.5, 1.0]), w)
    with pytest.raises(EvaluationAtEigenvalue):
        rho_by_interpolation(Poly([0.0, 0.0, 0.0, 1.0]), [0.5], w)


def test_kb_chart_flips_sign():
    c = Poly([0.1, 0.0, 0.3, 0.0, -0.2, 0.0, 1.0])
    w = np.array([0.2, -0.3])
    fc = map_r(w, BkmSpec(2, Poly([1.0]), INFINITY, Chart.FIRST_COMPANION), c)
    kb = map_r(w, BkmSpec(2, Poly([1.0]), INFINITY, Chart.KB_FORM), c)
    np.testing.assert_allclose(fc, -kb)
