"""Finite-difference residual checks of synthesized solutions and phase grids."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import EigenvalueCollision, GridTooCoarse, MuEqualsLambda
from .flows import FlowConfig, PhaseGrid, build_grid
from .operators import Chart, CompanionMatrix, Sign, is_infinite, sigma_poly, zeta
from .poly import Poly
from .rho import solve_rho
from .stackel import PhasePoint
from .synth import SolutionGrid

SKIP_LIMIT = 0.2


@dataclass
class ResidualReport:
    name: str
    max_abs: float
    rms: float
    dt: float | None = None
    dx: float | None = None
    convergence_order: float | None = None
    notes: str = ""
    inconclusive: bool = False

    def __post_init__(self):
        self.max_abs = float(self.max_abs)
        self.rms = float(self.rms)
        if not (self.max_abs >= self.rms >= 0.0) and np.isfinite(self.max_abs):
            raise ValueError("report requires max_abs >= rms >= 0")

    def to_dict(self) -> dict:
        return asdict(self)


def _report(name, values, dt=None, dx=None, **kw) -> ResidualReport:
    v = np.abs(np.asarray(values, dtype=float)).ravel()
    if v.size == 0:
        return ResidualReport(name, 0.0, 0.0, dt, dx, notes="no interior samples", inconclusive=True)
    return ResidualReport(name, float(v.max()), float(np.sqrt(np.mean(v**2))), dt, dx, **kw)


# 4th-order central stencils; ``f`` is differentiated along ``axis`` and the
# result keeps only nodes at distance >= 3 from either end.
def _shift(f, k, axis):
    n = f.shape[axis]
    return np.take(f, np.arange(3 + k, n - 3 + k), axis=axis)


def d1(f, h, axis=-1):
    s = lambda k: _shift(f, k, axis)
    return (s(-2) - 8 * s(-1) + 8 * s(1) - s(2)) / (12 * h)


def d2(f, h, axis=-1):
    s = lambda k: _shift(f, k, axis)
    return (-s(-2) + 16 * s(-1) - 30 * s(0) + 16 * s(1) - s(2)) / (12 * h * h)


def d3(f, h, axis=-1):
    s = lambda k: _shift(f, k, axis)
    return (s(-3) - 8 * s(-2) + 13 * s(-1) - 13 * s(1) + 8 * s(2) - s(3)) / (8 * h**3)


def interior(f, axis=-1):
    return _shift(f, 0, axis)


def _spacing(nodes, label) -> float:
    nodes = np.asarray(nodes, dtype=float)
    if nodes.size < 7:
        raise GridTooCoarse(f"need at least 7 {label}-nodes for the 7-point stencils", count=int(nodes.size))
    h = np.diff(nodes)
    if not np.allclose(h, h[0], rtol=1e-9, atol=0.0):
        raise ValueError(f"{label}-nodes must be uniformly spaced")
    return float(h[0])


def fit_order(hs, errors) -> float:
    """Least-squares slope of log(error) against log(h)."""
    return float(np.polyfit(np.log(np.asarray(hs, float)), np.log(np.asarray(errors, float)), 1)[0])


def _solution_derivs(sol: SolutionGrid):
    dt = _spacing(sol.t_nodes, "t")
    dx = _spacing(sol.x_nodes, "x")
    u = np.stack([sol.spec.chart.to_first_companion(sol.u[:, i, j]) for i in range(sol.q.shape[0]) for j in range(sol.q.shape[1])])
    u = np.moveaxis(u.reshape(sol.q.shape + (sol.n,)), -1, 0)
    inner = lambda f: interior(interior(f, -1), -2)
    return {
        "dt": dt,
        "dx": dx,
        "u": inner(u),
        "u_t": interior(d1(u, dt, -2), -1),
        "u_x": interior(d1(u, dx, -1), -2),
        "q": inner(sol.q),
        "q_x": interior(d1(sol.q, dx, -1), -2),
        "q_xx": interior(d2(sol.q, dx, -1), -2),
        "q_xxx": interior(d3(sol.q, dx, -1), -2),
    }


def residual_bkm_finite(sol: SolutionGrid):
    """Evolution and constraint residuals of the finite-lambda BKM system.

    Returns (evolution, constraint) reports, both in first-companion coordinates.
    """
    spec = sol.spec
    if spec.infinite:
        raise ValueError("residual_bkm_finite needs a finite lambda")
    D = _solution_derivs(sol)
    lam, n = spec.lam, spec.n
    m_lam = spec.m(lam)
    sig_all = np.array([[sigma_poly(sol.spec.chart.to_first_companion(sol.u[:, i, j]))(lam) for j in range(sol.q.shape[1])] for i in range(sol.q.shape[0])])
    # a sign change means an eigenvalue of L crossed lambda between nodes
    if np.min(np.abs(sig_all)) < 1e-8 or np.min(sig_all) * np.max(sig_all) < 0:
        k = np.unravel_index(np.argmin(np.abs(sig_all)), sig_all.shape)
        raise EigenvalueCollision(
            "lambda is an eigenvalue of L(u) on the grid", t_index=int(k[0]), x_index=int(k[1]), sigma=float(sig_all[k])
        )
    ev, con = [], []
    nt, nx = D["q"].shape
    for i in range(nt):
        for j in range(nx):
            u = D["u"][:, i, j]
            sig = sig_all[i + 3, j + 3]
            A = CompanionMatrix(tuple(u), Sign.PLUS_U).dense() - lam * np.eye(n)
            z = zeta(u, spec.m)
            rhs = D["q_xxx"][i, j] * np.linalg.solve(A, z) + D["q"][i, j] * np.linalg.solve(A, D["u_x"][:, i, j])
            ev.append(np.max(np.abs(D["u_t"][:, i, j] - rhs)))
            q, qx, qxx = D["q"][i, j], D["q_x"][i, j], D["q_xx"][i, j]
            con.append(m_lam * (qxx * q - 0.5 * qx * qx) + sig * q * q - 1.0)
    return (
        _report("bkm_finite_evolution", ev, D["dt"], D["dx"]),
        _report("bkm_finite_constraint", con, D["dt"], D["dx"]),
    )


def residual_bkm_infinite(sol: SolutionGrid):
    """Evolution and constraint residuals of the lambda = inf system.

    With m_n = 0 the constraint is algebraic (q = tr L / 2) and is checked on
    every node without derivatives.
    """
    spec = sol.spec
    if not spec.infinite:
        raise ValueError("residual_bkm_infinite needs lambda = inf")
    D = _solution_derivs(sol)
    m_n = spec.m_top
    ev = []
    nt, nx = D["q"].shape
    for i in range(nt):
        for j in range(nx):
            u = D["u"][:, i, j]
            L = CompanionMatrix(tuple(u), Sign.PLUS_U).dense()
            rhs = D["q_xxx"][i, j] * zeta(u, spec.m) + (L + D["q"][i, j] * np.eye(spec.n)) @ D["u_x"][:, i, j]
            ev.append(np.max(np.abs(D["u_t"][:, i, j] - rhs)))
    if m_n == 0.0:
        tr = spec.chart.to_first_companion(np.moveaxis(sol.u, 0, -1))[..., 0]
        con = 2.0 * sol.q - tr
        note = "algebraic constraint q = tr L / 2"
    else:
        con = 2.0 * D["q"] + m_n * D["q_xx"] - D["u"][0]
        note = ""
    return (
        _report("bkm_infinite_evolution", ev, D["dt"], D["dx"]),
        _report("bkm_infinite_constraint", con, D["dt"], D["dx"], notes=note),
    )


def residual_pde(sol: SolutionGrid):
    return residual_bkm_infinite(sol) if sol.spec.infinite else residual_bkm_finite(sol)


def residual_kdv(sol: SolutionGrid) -> ResidualReport:
    """u_t - u_xxx/2 - 3/2 u u_x for a scalar (n = 1) solution in first-companion form."""
    if sol.n != 1:
        raise ValueError("residual_kdv needs a scalar solution")
    D = _solution_derivs(sol)
    u = sol.spec.chart.to_first_companion(sol.u[0])
    u_xxx = interior(d3(u, D["dx"], -1), -2)
    r = D["u_t"][0] - 0.5 * u_xxx - 1.5 * D["u"][0] * D["u_x"][0]
    return _report("kdv", r, D["dt"], D["dx"])


def _w_values(grid: PhaseGrid, mu):
    """w(t, x, mu) for every grid node."""
    N = grid.N
    return mu**N + grid.w @ (mu ** np.arange(N - 1, -1, -1, dtype=float))


def residual_base(grid: PhaseGrid, mus, c_new: Poly, m: Poly) -> ResidualReport:
    """m(mu)(w_xx w - w_x^2/2) + rho(mu) w^2 - c(mu) along every row."""
    nt, nx = grid.shape
    dx = _spacing(grid.x_rows[0], "x")
    rho_vals = np.empty((nt, nx, len(mus)))
    for i in range(nt):
        for j in range(nx):
            rho = solve_rho(c_new, m, grid.w[i, j]).rho
            rho_vals[i, j] = rho(np.asarray(mus, dtype=float))
    out = []
    for k, mu in enumerate(mus):
        W = _w_values(grid, mu)
        Wx, Wxx, Wi = d1(W, dx), d2(W, dx), interior(W)
        r = m(mu) * (Wxx * Wi - 0.5 * Wx**2) + interior(rho_vals[..., k]) * Wi**2 - c_new(mu)
        out.append(r)
    return _report("base_equation", np.array(out), dx=dx)


def residual_solitonic(grid: PhaseGrid, mu: float, lam) -> ResidualReport:
    """Universal solitonic equation for w(mu) along the flow of F_lam."""
    if not is_infinite(lam) and abs(mu - lam) < 1e-12:
        raise MuEqualsLambda("mu must differ from lambda", mu=float(mu))
    x = grid.x_nodes
    dx = _spacing(x, "x")
    dt = _spacing(grid.t_nodes, "t")
    W = _w_values(grid, mu)
    Wt = interior(d1(W, dt, 0), 1)
    Wx = interior(d1(W, dx, 1), 0)
    Wi = interior(interior(W, 0), 1)
    if is_infinite(lam):
        w1 = grid.w[..., 0]
        w1x = interior(d1(w1, dx, 1), 0)
        rhs = mu * Wx + Wx * interior(interior(w1, 0), 1) - Wi * w1x
    else:
        Wl = _w_values(grid, lam)
        Wlx = interior(d1(Wl, dx, 1), 0)
        rhs = (Wx * interior(interior(Wl, 0), 1) - Wi * Wlx) / (mu - lam)
    return _report("solitonic", Wt - rhs, dt=dt, dx=dx)


def _real_roots(w, gap):
    r = np.roots(np.concatenate([[1.0], w]))
    scale = 1.0 + np.max(np.abs(r))
    if np.max(np.abs(r.imag)) > 1e-9 * scale:
        return None
    y = np.sort(r.real)
    if y.size > 1 and np.min(np.diff(y)) < gap:
        return None
    return y


def separation_oracle(grid: PhaseGrid, c_new: Poly, m: Poly, gap: float = 1e-6) -> ResidualReport:
    """1/2 (y'_a prod_{i != a}(y_a - y_i))^2 + c(y_a)/m(y_a) at eigenvalues y of M.

    Nodes with complex or nearly coincident eigenvalues are skipped, together
    with every stencil that would touch them.
    """
    nt, nx = grid.shape
    N = grid.N
    dx = _spacing(grid.x_rows[0], "x")
    Y = np.full((nt, nx, N), np.nan)
    for i in range(nt):
        for j in range(nx):
            y = _real_roots(grid.w[i, j], gap)
            if y is not None:
                Y[i, j] = y
    Yx = d1(Y, dx, 1)
    Yi = interior(Y, 1)
    res = []
    for a in range(N):
        prod = np.ones(Yi.shape[:2])
        for k in range(N):
            if k != a:
                prod = prod * (Yi[..., a] - Yi[..., k])
        ya = Yi[..., a]
        res.append(0.5 * (Yx[..., a] * prod) ** 2 + c_new(ya) / m(ya))
    res = np.array(res)
    valid = np.all(np.isfinite(res), axis=0)
    skipped = int(valid.size - valid.sum())
    frac = skipped / valid.size
    return _report(
        "separation",
        res[:, valid],
        dx=dx,
        notes=f"skipped {skipped} of {valid.size} nodes",
        inconclusive=frac > SKIP_LIMIT,
    )


def conservation_report(grid: PhaseGrid) -> ResidualReport:
    return _report("conservation", grid.drift)


def commutativity_report(start: PhasePoint, t_span: float, x_span: float, lam, cfg: FlowConfig, c: Poly, m: Poly, count: int = 5) -> ResidualReport:
    """Phase-point gap between x-then-t and t-then-x assembly on a count x count grid."""
    t = np.linspace(0.0, t_span, count)
    x = np.linspace(0.0, x_span, count)
    g1 = build_grid(start, t, x, lam, cfg, c, m, order="xt", workers=1, check_level=False)
    g2 = build_grid(start, t, x, lam, cfg, c, m, order="tx", workers=1, check_level=False)
    gap = np.maximum(np.max(np.abs(g1.w - g2.w), axis=-1), np.max(np.abs(g1.p - g2.p), axis=-1))
    return _report("commutativity", gap, dt=t[1] - t[0], dx=x[1] - x[0])


def kb_closed_form_error(sol: SolutionGrid) -> ResidualReport:
    """Max error against the exact KB solution (kb-form chart)."""
    from .synth import closed_form_kb

    T, X = np.meshgrid(sol.t_nodes, sol.x_nodes, indexing="ij")
    _, _, u1, u2 = closed_form_kb(T, X)
    u = sol.u if sol.spec.chart is Chart.KB_FORM else -sol.u
    err = np.maximum(np.abs(u[0] - u1), np.abs(u[1] - u2))
    return _report("kb_closed_form", err)


def asymptotic_report(sol: SolutionGrid) -> ResidualReport:
    """|u(t, +-x_max) - u(0, x_max)| over all t rows, for solitons."""
    ref = sol.u[:, int(np.argmin(np.abs(sol.t_nodes))), -1]
    left = np.abs(sol.u[:, :, 0] - ref[:, None])
    right = np.abs(sol.u[:, :, -1] - ref[:, None])
    return _report("asymptotics", np.concatenate([left.ravel(), right.ravel()]))



def padded_axis(lo: float, hi: float, h: float) -> np.ndarray:
    """Uniform nodes on [lo - 3h, hi + 3h]; the stencil interior is then exactly [lo, hi]."""
    count = int(round((hi - lo) / h)) + 7
    return lo - 3 * h + h * np.arange(count)


def convergence_study(residual, hs) -> ResidualReport:
    """Run ``residual(h)`` for each spacing and return the finest report with the fitted order.

    Use padded axes so every run is measured on the same physical window.
    """
    hs = sorted((float(h) for h in hs), reverse=True)
    reports = [residual(h) for h in hs]
    finest = reports[-1]
    finest.convergence_order = fit_order(hs, [r.max_abs for r in reports])
    finest.notes = "; ".join(f"h={h:.4g}: {r.max_abs:.3e}" for h, r in zip(hs, reports))
    return finest
