import numpy as np
import pytest

from bkmflow import presets
from bkmflow import verify as V
from bkmflow.errors import EigenvalueCollision, GridTooCoarse, MuEqualsLambda, NonpositiveCLambda
from bkmflow.flows import PhaseGrid
from bkmflow.operators import BkmSpec, INFINITY
from bkmflow.pipeline import build_solution, run_scenario
from bkmflow.poly import Poly
from bkmflow.scenario import parse_scenario
from bkmflow.synth import SolutionGrid, closed_form_kb, consistency_check


def test_closed_form_kb_at_origin_and_far_field():
    q1, q2, u1, u2 = closed_form_kb(0.0, 0.0)
    assert (q1, q2, u1, u2) == (0.0, 0.0, 0.0, -2.0)
    # no overflow at large |x|
    _, _, u1, u2 = closed_form_kb(np.array([0.0, 0.0]), np.array([-400.0, 400.0]))
    assert np.all(np.isfinite(u1)) and np.all(np.isfinite(u2))


def test_kb_solution_matches_closed_form(kb_run):
    sol = kb_run.solution
    assert sol.u.shape == (2, 41, 101)
    assert V.kb_closed_form_error(sol).max_abs < 1e-8
    assert consistency_check(sol) < 1e-10


def test_finite_lambda_scale_factor(preset_runs):
    sol = preset_runs["bkm-finite-demo"].solution
    assert sol.a**2 == pytest.approx(sol.c_new(sol.spec.lam), rel=1e-12)
    # q = w(lambda) / a on every node
    lam, N = sol.spec.lam, sol.N
    w_lam = lam**N + sol.phase.w @ lam ** np.arange(N - 1, -1, -1)
    np.testing.assert_allclose(sol.q, w_lam / sol.a, rtol=1e-12)


def test_galilean_rows_when_c1_nonzero(preset_runs):
    sol = preset_runs["kdv-cnoidal-n1"].solution
    c1 = sol.c_new.coef(sol.c_new.degree - 1)
    assert c1 != 0.0
    rows = sol.phase.x_rows
    np.testing.assert_allclose(rows[:, 0], sol.x_nodes[0] - 0.5 * c1 * sol.t_nodes)
    np.testing.assert_allclose(sol.q, sol.phase.w[..., 0] - 0.5 * c1)


def test_nonpositive_c_lambda_aborts():
    d = presets.preset_dict("bkm-finite-demo")
    d["bkm"]["lam"] = 0.0
    d["checks"] = {}
    with pytest.raises(NonpositiveCLambda):
        build_solution(parse_scenario(d))


def test_solution_grid_shape_validation():
    spec = BkmSpec(1, Poly([-1.0]), INFINITY)
    with pytest.raises(ValueError):
        SolutionGrid(np.zeros(3), np.zeros(4), np.zeros((1, 4, 3)), np.zeros((3, 4)), spec, Poly([1.0]), 1)


# --- finite differences ------------------------------------------------

def test_stencils_exact_on_quartics():
    x = np.linspace(-1, 1, 21)
    h = x[1] - x[0]
    f = 3 * x**4 - x**3 + 2 * x
    inner = V.interior(x)
    np.testing.assert_allclose(V.d1(f, h), 12 * inner**3 - 3 * inner**2 + 2, atol=1e-10)
    np.testing.assert_allclose(V.d2(f, h), 36 * inner**2 - 6 * inner, atol=1e-9)
    np.testing.assert_allclose(V.d3(f, h), 72 * inner - 6, atol=1e-7)


def test_fourth_order_convergence_of_d3():
    errs, hs = [], []
    for n in (41, 81, 161):
        x = np.linspace(0, 2, n)
        h = x[1] - x[0]
        errs.append(np.max(np.abs(V.d3(np.sin(x), h) + np.cos(V.interior(x)))))
        hs.append(h)
    assert abs(V.fit_order(hs, errs) - 4.0) < 0.3


def test_convergence_study_uses_common_window():
    hs = [0.1, 0.05, 0.025]
    for h in hs:
        nodes = V.padded_axis(-1.0, 1.0, h)
        np.testing.assert_allclose(V.interior(nodes)[[0, -1]], [-1.0, 1.0], atol=1e-12)
    rep = V.convergence_study(lambda h: V.ResidualReport("toy", 5 * h**3, h**3), hs)
    assert rep.convergence_order == pytest.approx(3.0)
    assert rep.max_abs == pytest.approx(5 * 0.025**3)


def test_too_coarse_grid():
    with pytest.raises(GridTooCoarse):
        V._spacing(np.linspace(0, 1, 5), "x")


def test_report_invariant():
    with pytest.raises(ValueError):
        V.ResidualReport("bad", 1.0, 2.0)


# --- residual oracles ------------------------------------------------------

def test_kb_residuals_small(kb_run):
    sol = kb_run.solution
    ev, con = V.residual_pde(sol)
    assert ev.max_abs < 1e-3 and con.max_abs < 1e-12
    assert "algebraic" in con.notes
    sep = V.separation_oracle(sol.phase, sol.c_new, sol.spec.m)
    assert not sep.inconclusive and sep.max_abs < 1e-3


def test_solitonic_rejects_mu_equal_lambda(preset_runs):
    sol = preset_runs["bkm-finite-demo"].solution
    with pytest.raises(MuEqualsLambda):
        V.residual_solitonic(sol.phase, sol.spec.lam, sol.spec.lam)
    assert V.residual_solitonic(sol.phase, -2.0, sol.spec.lam).max_abs < 1e-3


def test_eigenvalue_collision_detected():
    t = np.linspace(0, 0.6, 7)
    x = np.linspace(-1, 1, 9)
    spec = BkmSpec(1, Poly([-1.0]), 0.5)
    u = np.broadcast_to(x, (7, 9))[None].copy()  # sigma(0.5, u) = 0.5 - u changes sign
    sol = SolutionGrid(t, x, u, np.ones((7, 9)), spec, Poly([1.0, 0.0, 0.0, 1.0]), 1)
    with pytest.raises(EigenvalueCollision):
        V.residual_bkm_finite(sol)


def test_separation_inconclusive_on_complex_eigenvalues():
    w = np.zeros((1, 9, 2))
    w[..., 1] = 1.0  # mu^2 + 1
    g = PhaseGrid(np.zeros(1), np.tile(np.linspace(0, 1, 9), (1, 1)), w, np.zeros_like(w), INFINITY)
    rep = V.separation_oracle(g, Poly([0, 0, 0, 0, 0, 1.0]), Poly([-1.0]))
    assert rep.inconclusive


def test_asymptotic_report(preset_runs):
    rep = V.asymptotic_report(preset_runs["kdv-2soliton"].solution)
    assert rep.max_abs < 1e-3


def test_kdv_residual_requires_scalar(kb_run):
    with pytest.raises(ValueError):
        V.residual_kdv(kb_run.solution)


def test_run_reports_bkm2_identity(small_scenario):
    res = run_scenario(small_scenario)
    assert res.check("bkm2_q").value < 1e-12
