"""Reconstruction map w -> u via the divisibility condition rho*w^2 - c = m*Q."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EvaluationAtEigenvalue, SharedRoot
from .operators import BkmSpec, w_poly
from .poly import Poly, lagrange

COND_LIMIT = 1e12


@dataclass(frozen=True)
class RhoResult:
    rho: Poly
    q: Poly
    condition_number: float

    @property
    def tail(self) -> np.ndarray:
        """(rho_1, ..., rho_n), the non-leading coefficients, highest power first."""
        c = self.rho.coeffs
        return np.asarray(c[-2::-1], dtype=float)


def rho_system(c: Poly, m: Poly, w) -> tuple[np.ndarray, np.ndarray, int]:
    """Linear system for the unknowns (rho_1..rho_n, Q_0..Q_{2N-1}).

    Rows index powers mu^0 .. mu^(2N+n-1).
    """
    w = np.asarray(w, dtype=float)
    N = w.size
    n = c.degree - 2 * N
    if n < 1:
        raise ValueError(f"deg c = {c.degree} is too small for N = {N}")
    size = 2 * N + n
    w2 = (w_poly(w) * w_poly(w)).coeffs
    A = np.zeros((size, size))
    for i in range(1, n + 1):
        shift = n - i
        A[shift : shift + w2.size, i - 1] = w2
    mc = m.coeffs
    for j in range(2 * N):
        hi = min(size, j + mc.size)
        A[j:hi, n + j] = -mc[: hi - j]
    rhs = np.zeros(size)
    rhs[: min(size, c.coeffs.size)] = c.coeffs[:size]
    rhs[n : n + w2.size - 1] -= w2[:-1]
    return A, rhs, n


def solve_rho(c: Poly, m: Poly, w) -> RhoResult:
    """Unique monic rho of degree n and Q of degree <= 2N-1 with rho w^2 - m Q = c."""
    A, rhs, n = rho_system(c, m, w)
    cond = float(np.linalg.cond(A))
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SharedRoot(
            "rho system singular: an eigenvalue of M is (near) a root of m",
            condition_number=cond,
        )
    sol = np.linalg.solve(A, rhs)
    rho = Poly(np.concatenate([sol[:n][::-1], [1.0]]))
    q = Poly(sol[n:])
    wp = w_poly(w)
    lhs = rho * wp * wp
    mq = m * q
    resid = (lhs - mq - c).coeffs
    scale = max(np.max(np.abs(c.coeffs)), np.max(np.abs(lhs.coeffs)), np.max(np.abs(mq.coeffs)))
    if np.max(np.abs(resid)) > 1e-9 * scale:
        raise SharedRoot("rho identity not reproduced after solve", condition_number=cond)
    return RhoResult(rho=rho, q=q, condition_number=cond)


def rho_by_interpolation(c: Poly, m_roots: Sequence[float], w) -> Poly:
    """rho from its values c(l)/w(l)^2 at the n distinct roots of m."""
    roots = np.asarray(m_roots, dtype=float)
    n = roots.size
    wp = w_poly(w)
    N = wp.degree
    pts = []
    for lam in roots:
        wl = wp(lam)
        if abs(wl) < 1e-10 * (1.0 + abs(lam) ** N):
            raise EvaluationAtEigenvalue("w vanishes at a root of m", root=float(lam))
        pts.append((lam, c(lam) / wl**2 - lam**n))
    return Poly.monomial(n) + lagrange(pts)


def map_r(w, spec: BkmSpec, c: Poly) -> np.ndarray:
    """u = R(w) in the chart of ``spec``."""
    res = solve_rho(c, spec.m, w)
    return spec.chart.from_rho(res.tail)
