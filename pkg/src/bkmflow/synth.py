"""Solutions u(t, x), q(t, x) of BKM systems from phase grids."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import NonpositiveCLambda
from .flows import FlowConfig, PhaseGrid, build_grid, sweep_rows
from .operators import BkmSpec, sigma_poly
from .poly import Poly
from .rho import solve_rho
from .stackel import PhasePoint

GridFn = Callable[[np.ndarray, np.ndarray], PhaseGrid]


@dataclass
class SolutionGrid:
    """u has shape (n, len(t), len(x)); q has shape (len(t), len(x))."""

    t_nodes: np.ndarray
    x_nodes: np.ndarray
    u: np.ndarray
    q: np.ndarray
    spec: BkmSpec
    c_new: Poly
    N: int
    a: float | None = None
    phase: PhaseGrid | None = None
    rho_cond: np.ndarray | None = None
    warnings: list = field(default_factory=list)

    def __post_init__(self):
        nt, nx = self.t_nodes.size, self.x_nodes.size
        if self.u.shape != (self.spec.n, nt, nx) or self.q.shape != (nt, nx):
            raise ValueError("solution field shapes do not match the grid")
        if self.a is not None and not np.isclose(self.a**2, self.c_new(self.spec.lam), rtol=1e-12):
            raise ValueError("scale factor a must satisfy a^2 = c_new(lambda)")

    @property
    def n(self) -> int:
        return self.spec.n


def grid_factory(start: PhasePoint, lam, cfg: FlowConfig, c: Poly, m: Poly, workers=None) -> GridFn:
    """Callable (t_nodes, x_rows) -> PhaseGrid integrating directly to the requested nodes."""

    def make(t_nodes, x_rows):
        x_rows = np.asarray(x_rows, dtype=float)
        if np.all(x_rows == x_rows[0]):
            return build_grid(start, t_nodes, x_rows[0], lam, cfg, c, m, workers=workers)
        return sweep_rows(start, t_nodes, x_rows, lam, cfg, c, m, workers=workers)

    return make


def _u_field(phase: PhaseGrid, spec: BkmSpec, c_new: Poly):
    nt, nx = phase.shape
    u = np.empty((spec.n, nt, nx))
    cond = np.empty((nt, nx))
    for i in range(nt):
        for j in range(nx):
            res = solve_rho(c_new, spec.m, phase.w[i, j])
            u[:, i, j] = spec.chart.from_rho(res.tail)
            cond[i, j] = res.condition_number
    return u, cond


def synthesize_finite(grid_fn: GridFn, spec: BkmSpec, c_new: Poly, t_nodes, x_nodes) -> SolutionGrid:
    """u(t,x) = R(w(t/a, x)), q = w(lam)(t/a, x) / a with a = sqrt(c_new(lam)).

    The phase grid is integrated directly to the internal times t/a.
    """
    if spec.infinite:
        raise ValueError("synthesize_finite needs a finite lambda")
    t_nodes = np.asarray(t_nodes, dtype=float)
    x_nodes = np.asarray(x_nodes, dtype=float)
    c_lam = c_new(spec.lam)
    if not c_lam > 0:
        raise NonpositiveCLambda("c_new(lambda) must be positive for a real time scale", c_lambda=float(c_lam))
    a = float(np.sqrt(c_lam))
    phase = grid_fn(t_nodes / a, np.tile(x_nodes, (t_nodes.size, 1)))
    u, cond = _u_field(phase, spec, c_new)
    powers = spec.lam ** np.arange(phase.N - 1, -1, -1)
    q = (spec.lam**phase.N + phase.w @ powers) / a
    return SolutionGrid(t_nodes, x_nodes, u, q, spec, c_new, phase.N, a, phase, cond, list(phase.warnings))


def synthesize_infinite(grid_fn: GridFn, spec: BkmSpec, c_new: Poly, t_nodes, x_nodes) -> SolutionGrid:
    """u(t,x) = R(w(t, x - c_1 t / 2)) and q = w_1 - c_1/2 at the same phase point."""
    if not spec.infinite:
        raise ValueError("synthesize_infinite needs lambda = inf")
    t_nodes = np.asarray(t_nodes, dtype=float)
    x_nodes = np.asarray(x_nodes, dtype=float)
    c1 = c_new.coef(c_new.degree - 1)
    x_rows = x_nodes[None, :] - 0.5 * c1 * t_nodes[:, None]
    phase = grid_fn(t_nodes, x_rows)
    u, cond = _u_field(phase, spec, c_new)
    q = phase.w[..., 0] - 0.5 * c1
    return SolutionGrid(t_nodes, x_nodes, u, q, spec, c_new, phase.N, None, phase, cond, list(phase.warnings))


def synthesize(grid_fn: GridFn, spec: BkmSpec, c_new: Poly, t_nodes, x_nodes) -> SolutionGrid:
    if spec.infinite:
        return synthesize_infinite(grid_fn, spec, c_new, t_nodes, x_nodes)
    return synthesize_finite(grid_fn, spec, c_new, t_nodes, x_nodes)


def consistency_check(sol: SolutionGrid, samples: int = 5, seed: int = 0) -> float:
    """Max relative gap between sigma(mu, u) and rho(mu, w) at random mu."""
    rng = np.random.default_rng(seed)
    mus = rng.uniform(-2.0, 2.0, samples)
    worst = 0.0
    nt, nx = sol.q.shape
    for i in range(nt):
        for j in range(nx):
            rho = solve_rho(sol.c_new, sol.spec.m, sol.phase.w[i, j]).rho
            sig = sigma_poly(sol.u[:, i, j], sol.spec.chart)
            r, s = rho(mus), sig(mus)
            worst = max(worst, float(np.max(np.abs(r - s) / (1.0 + np.abs(r)))))
    return worst


def closed_form_kb(t, x):
    """Exact KB solution for c = mu^6 - 2 mu^4 + mu^2 with q1(0,0) = q2(0,0) = 0.

    Returns (q1, q2, u1, u2). Both fractions are rewritten with every
    exponential divided by the largest one, so no overflow occurs.
    """
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    s = np.sqrt(2.0)
    # q1 = -(e^{s(x-t)} - e^{-s(x+t)}) / (e^{s(x-t)} + e^{-s(x+t)} + 2)
    e1, e2 = s * (x - t), -s * (x + t)
    k = np.maximum(np.maximum(e1, e2), 0.0)
    q1 = -(np.exp(e1 - k) - np.exp(e2 - k)) / (np.exp(e1 - k) + np.exp(e2 - k) + 2.0 * np.exp(-k))
    # q2 = (e^{2sx} - 1) / (2 e^{s(x-t)} + e^{2sx} + 1)
    f1, f2 = 2.0 * s * x, s * (x - t)
    k = np.maximum(np.maximum(f1, f2), 0.0)
    q2 = (np.exp(f1 - k) - np.exp(-k)) / (2.0 * np.exp(f2 - k) + np.exp(f1 - k) + np.exp(-k))
    u1 = 2.0 * q1 + 2.0 * q2
    u2 = 3.0 * q1**2 + 4.0 * q1 * q2 + 3.0 * q2**2 - 2.0
    return q1, q2, u1, u2

