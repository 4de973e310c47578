"""Integration of the commuting flows of H (time x) and F_lambda (time t)."""

from __future__ import annotations

import enum
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import BkmError, BlowUp, OffLevelSet, SingularityError, SingularityHit, ToleranceFailure
from .poly import Poly
from .stackel import PhasePoint, flow_weights, integral_jacobians, integral_parts, m_matrix_condition

log = logging.getLogger(__name__)

H_FLOW = "H"
WARN_COND = 1e10
LEVEL_TOL = 1e-8


class Method(str, enum.Enum):
    ADAPTIVE_RK45 = "rk45"
    ADAPTIVE_RK78 = "rk78"

    @property
    def scipy_name(self) -> str:
        return "RK45" if self is Method.ADAPTIVE_RK45 else "DOP853"


@dataclass(frozen=True)
class FlowConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = np.inf
    blowup_norm: float = 1e8
    method: Method = Method.ADAPTIVE_RK78

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.blowup_norm <= 1:
            raise ValueError("blowup_norm must exceed 1")
        object.__setattr__(self, "method", Method(self.method))


def default_workers() -> int:
    return max(1, int(os.environ.get("BKMFLOW_WORKERS", "1")))


class _Vectorfield:
    def __init__(self, weights, c: Poly, m: Poly, N: int):
        self.weights = weights
        self.c = c
        self.m = m
        self.N = N
        self.max_cond = 1.0
        self.track_cond = m.degree > 0

    def __call__(self, _s, y):
        w, p = y[: self.N], y[self.N :]
        _, da_dw, da_dp = integral_parts(w, p, self.c, self.m)
        if self.track_cond:
            self.max_cond = max(self.max_cond, m_matrix_condition(w, self.m))
        return np.concatenate([self.weights @ da_dp, -(self.weights @ da_dw)])


def _weights(flow, N: int) -> np.ndarray:
    if flow == H_FLOW:
        wts = np.zeros(N)
        wts[0] = -1.0
        return wts
    return flow_weights(flow, N)


def _integrate_one_side(field_, y0, targets, cfg: FlowConfig, max_step):
    span = targets[-1]
    limit = cfg.blowup_norm

    def blowup(_s, y):
        return limit - np.max(np.abs(y))

    blowup.terminal = True
    try:
        sol = solve_ivp(
            field_,
            (0.0, span),
            y0,
            method=cfg.method.scipy_name,
            t_eval=targets,
            rtol=cfg.rel_tol,
            atol=cfg.abs_tol,
            max_step=max_step,
            events=blowup,
        )
    except SingularityError as exc:
        raise SingularityHit(f"integration hit a singular point: {exc}", **exc.context) from exc
    if sol.status == 1:
        raise BlowUp("phase point norm exceeded blowup_norm", at=float(sol.t_events[0][0]), limit=limit)
    if sol.status != 0:
        raise ToleranceFailure(f"integrator failed: {sol.message}", reached=float(sol.t[-1]) if sol.t.size else 0.0)
    return sol.y.T


def integrate_flow(start: PhasePoint, flow, targets, cfg: FlowConfig, c: Poly, m: Poly):
    """Points on the trajectory of ``flow`` (H_FLOW, a real lambda, or inf) at ``targets``.

    Returns (states, warnings) with states of shape (len(targets), 2N).
    """
    targets = np.asarray(targets, dtype=float)
    N = start.N
    y0 = start.state()
    out = np.empty((targets.size, 2 * N))
    warnings = []
    wts = _weights(flow, N)
    for sgn in (1.0, -1.0):
        idx = np.nonzero(sgn * targets > 0)[0]
        if idx.size == 0:
            continue
        order = idx[np.argsort(sgn * targets[idx])]
        t_sorted = targets[order]
        field_ = _Vectorfield(wts, c, m, N)
        ys = _integrate_one_side(field_, y0, t_sorted, cfg, cfg.max_step)
        if field_.max_cond > WARN_COND:
            capped = min(cfg.max_step, abs(t_sorted[-1]) / 1000.0)
            warnings.append(
                f"flow {flow}: m(M) condition {field_.max_cond:.2e} exceeded {WARN_COND:.0e}; "
                f"re-integrated with max_step={capped:.3g}"
            )
            field_ = _Vectorfield(wts, c, m, N)
            ys = _integrate_one_side(field_, y0, t_sorted, cfg, capped)
        out[order] = ys
    out[targets == 0.0] = y0
    return out, warnings


def flow_h(start: PhasePoint, x_targets, cfg: FlowConfig, c: Poly, m: Poly) -> list[PhasePoint]:
    states, _ = integrate_flow(start, H_FLOW, x_targets, cfg, c, m)
    return [PhasePoint.from_state(y) for y in states]


def flow_f(start: PhasePoint, lam, t_targets, cfg: FlowConfig, c: Poly, m: Poly) -> list[PhasePoint]:
    states, _ = integrate_flow(start, lam, t_targets, cfg, c, m)
    return [PhasePoint.from_state(y) for y in states]


@dataclass
class PhaseGrid:
    """Phase-space samples (w, p) on a (t, x) grid.

    ``x_rows[i]`` holds the x-nodes of row i; rows coincide unless the grid
    was assembled with per-row shifts.
    """

    t_nodes: np.ndarray
    x_rows: np.ndarray
    w: np.ndarray
    p: np.ndarray
    lam: float
    drift: np.ndarray = None
    warnings: list = field(default_factory=list)

    @property
    def N(self) -> int:
        return self.w.shape[-1]

    @property
    def shape(self):
        return self.w.shape[:2]

    @property
    def x_nodes(self) -> np.ndarray:
        if not np.all(self.x_rows == self.x_rows[0]):
            raise ValueError("grid rows use shifted x-nodes")
        return self.x_rows[0]

    def point(self, i: int, j: int) -> PhasePoint:
        return PhasePoint(self.w[i, j], self.p[i, j])


def _level_check(start: PhasePoint, c: Poly, m: Poly):
    a = integral_jacobians(start, c, m)[0]
    if np.max(np.abs(a)) > LEVEL_TOL:
        raise OffLevelSet(
            "start point is not on the zero level of the integrals; apply repair_c first",
            max_coefficient=float(np.max(np.abs(a))),
        )
    return a


def _sweep(args):
    start_state, flow, targets, cfg, c, m = args
    return integrate_flow(PhasePoint.from_state(start_state), flow, targets, cfg, c, m)


def _run_sweeps(jobs, workers):
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep, jobs))
    return [_sweep(j) for j in jobs]


def _annotate(exc: BkmError, **where):
    exc.context.update(where)
    return exc


def build_grid(
    start: PhasePoint,
    t_nodes,
    x_nodes,
    lam,
    cfg: FlowConfig,
    c: Poly,
    m: Poly,
    order: str = "xt",
    workers: int | None = None,
    check_level: bool = True,
) -> PhaseGrid:
    """Orbit of the R^2-action of (H, F_lam) through ``start`` on a rectangular grid.

    ``order="xt"`` integrates H along x first and then F_lam from each x-slice;
    ``order="tx"`` does the reverse.
    """
    t_nodes = np.asarray(t_nodes, dtype=float)
    x_nodes = np.asarray(x_nodes, dtype=float)
    if order == "tx":
        return sweep_rows(start, t_nodes, np.tile(x_nodes, (t_nodes.size, 1)), lam, cfg, c, m, workers, check_level)
    if order != "xt":
        raise ValueError(f"unknown sweep order {order!r}")
    workers = default_workers() if workers is None else workers
    a0 = _level_check(start, c, m) if check_level else None
    N = start.N
    try:
        xs, warnings = integrate_flow(start, H_FLOW, x_nodes, cfg, c, m)
    except BkmError as exc:
        raise _annotate(exc, sweep="x") from None
    jobs = [(xs[j], lam, t_nodes, cfg, c, m) for j in range(x_nodes.size)]
    try:
        results = _run_sweeps(jobs, workers)
    except BkmError as exc:
        raise _annotate(exc, sweep="t") from None
    states = np.empty((t_nodes.size, x_nodes.size, 2 * N))
    for j, (ys, warn) in enumerate(results):
        states[:, j, :] = ys
        warnings.extend(f"x[{j}]: {msg}" for msg in warn)
    return _finish(states, t_nodes, np.tile(x_nodes, (t_nodes.size, 1)), lam, warnings, a0, c, m)


def sweep_rows(start, t_nodes, x_rows, lam, cfg, c, m, workers=None, check_level=True) -> PhaseGrid:
    """F_lam along t first, then H along x to the per-row nodes ``x_rows[i]``."""
    t_nodes = np.asarray(t_nodes, dtype=float)
    x_rows = np.asarray(x_rows, dtype=float)
    workers = default_workers() if workers is None else workers
    a0 = _level_check(start, c, m) if check_level else None
    N = start.N
    try:
        ts, warnings = integrate_flow(start, lam, t_nodes, cfg, c, m)
    except BkmError as exc:
        raise _annotate(exc, sweep="t") from None
    jobs = [(ts[i], H_FLOW, x_rows[i], cfg, c, m) for i in range(t_nodes.size)]
    try:
        results = _run_sweeps(jobs, workers)
    except BkmError as exc:
        raise _annotate(exc, sweep="x") from None
    states = np.empty((t_nodes.size, x_rows.shape[1], 2 * N))
    for i, (ys, warn) in enumerate(results):
        states[i] = ys
        warnings.extend(f"t[{i}]: {msg}" for msg in warn)
    return _finish(states, t_nodes, x_rows, lam, warnings, a0, c, m)


def _finish(states, t_nodes, x_rows, lam, warnings, a0, c, m) -> PhaseGrid:
    N = states.shape[-1] // 2
    if not np.all(np.isfinite(states)):
        raise BlowUp("non-finite phase values in grid")
    w = states[..., :N]
    p = states[..., N:]
    drift = np.zeros(states.shape[:2])
    base = integral_jacobians(PhasePoint(w[0, 0], p[0, 0]), c, m)[0] if a0 is None else a0
    for i in range(states.shape[0]):
        for j in range(states.shape[1]):
            a = integral_jacobians(PhasePoint(w[i, j], p[i, j]), c, m)[0]
            drift[i, j] = np.max(np.abs(a - base))
    for msg in warnings:
        log.warning(msg)
    return PhaseGrid(t_nodes=t_nodes, x_rows=x_rows, w=w, p=p, lam=lam, drift=drift, warnings=warnings)
