import numpy as np
import pytest

from bkmflow import presets
from bkmflow.errors import BlowUp, OffLevelSet
from bkmflow.flows import FlowConfig, H_FLOW, Method, build_grid, integrate_flow, sweep_rows
from bkmflow.poly import Poly
from bkmflow.stackel import PhasePoint, integral_coefficients, repair_c
from bkmflow.verify import commutativity_report

CFG = FlowConfig(rel_tol=1e-12, abs_tol=1e-14)


@pytest.fixture(scope="module")
def kb():
    scn = presets.preset("kb-exact")
    spec = scn.bkm_spec()
    start = scn.start_point()
    return start, repair_c(scn.reduction_spec().c, spec.m, start), spec


@pytest.fixture(scope="module")
def finite():
    scn = presets.preset("bkm-finite-demo")
    spec = scn.bkm_spec()
    start = scn.start_point()
    return start, repair_c(scn.reduction_spec().c, spec.m, start), spec


def test_config_validation():
    with pytest.raises(ValueError):
        FlowConfig(rel_tol=0.0)
    with pytest.raises(ValueError):
        FlowConfig(blowup_norm=0.5)
    assert FlowConfig(method="rk45").method is Method.ADAPTIVE_RK45
    assert Method.ADAPTIVE_RK78.scipy_name == "DOP853"


@pytest.mark.parametrize("flow", [H_FLOW, np.inf, 1.5])
def test_integrals_conserved_both_directions(kb, flow):
    start, c, spec = kb
    targets = np.array([-0.8, -0.1, 0.0, 0.3, 0.9])
    states, warnings = integrate_flow(start, flow, targets, CFG, c, spec.m)
    assert warnings == []
    np.testing.assert_array_equal(states[2], start.state())
    for y in states:
        assert integral_coefficients(PhasePoint.from_state(y), c, spec.m).max_abs() < 1e-9


def test_forward_then_back_returns(kb):
    start, c, spec = kb
    fwd, _ = integrate_flow(start, H_FLOW, [0.7], CFG, c, spec.m)
    back, _ = integrate_flow(PhasePoint.from_state(fwd[0]), H_FLOW, [-0.7], CFG, c, spec.m)
    np.testing.assert_allclose(back[0], start.state(), atol=1e-10)


def test_off_level_start_rejected(kb):
    _, c, spec = kb
    with pytest.raises(OffLevelSet):
        build_grid(PhasePoint([0.3, 0.1], [0.2, 0.0]), [0.0], [0.0, 0.1], spec.lam, CFG, c, spec.m)


def test_blowup_detected():
    m = Poly([-1.0])
    pt = PhasePoint([0.5], [1.0])
    c = repair_c(Poly([0.0, 0.0, 0.0, 1.0]), m, pt)
    with pytest.raises(BlowUp) as exc:
        integrate_flow(pt, H_FLOW, [5.0, 10.0], FlowConfig(blowup_norm=1e3), c, m)
    assert 0 < exc.value.context["at"] < 5.0
    assert exc.value.module == "flow-integrator"


def test_grid_orders_commute(finite):
    start, c, spec = finite
    rep = commutativity_report(start, 0.3, 0.3, spec.lam, CFG, c, spec.m, count=5)
    assert rep.max_abs < 1e-8


def test_parallel_merge_is_bit_identical(kb):
    start, c, spec = kb
    t, x = np.linspace(-0.5, 0.5, 5), np.linspace(-1, 1, 6)
    serial = build_grid(start, t, x, spec.lam, CFG, c, spec.m, workers=1)
    parallel = build_grid(start, t, x, spec.lam, CFG, c, spec.m, workers=3)
    np.testing.assert_array_equal(serial.w, parallel.w)
    np.testing.assert_array_equal(serial.p, parallel.p)


def test_sweep_rows_with_shifts(kb):
    start, c, spec = kb
    t = np.array([0.0, 0.5])
    rows = np.array([[0.0, 0.2, 0.4], [-0.1, 0.1, 0.3]])
    g = sweep_rows(start, t, rows, spec.lam, CFG, c, spec.m, workers=1)
    assert g.shape == (2, 3)
    with pytest.raises(ValueError):
        g.x_nodes
    np.testing.assert_array_equal(g.w[0, 0], start.w)
    assert np.max(g.drift) < 1e-9


def test_env_var_sets_workers(monkeypatch):
    from bkmflow.flows import default_workers

    monkeypatch.setenv("BKMFLOW_WORKERS", "4")
    assert default_workers() == 4
    monkeypatch.delenv("BKMFLOW_WORKERS")
    assert default_workers() == 1
