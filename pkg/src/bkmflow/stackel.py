"""Reduced integrable system on T*R^N: metric g0, potentials, H, F_mu, brackets.

Integral coefficients follow the convention

    F_mu(w, p) = 1/2 g0^{-1}(M_mu^* p, p) - V_mu(w) = a_0 mu^(N-1) + ... + a_{N-1},

so that H = -a_0 and F_inf = -a_1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateEigenvalues, SingularMmatrix
from .operators import companion, is_infinite, m_infinity, m_lambda
from .poly import Poly

COND_LIMIT = 1e12


@dataclass(frozen=True)
class PhasePoint:
    w: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        w = np.array(self.w, dtype=float).reshape(-1)
        p = np.array(self.p, dtype=float).reshape(-1)
        if w.shape != p.shape:
            raise ValueError(f"w and p dimensions differ: {w.size} vs {p.size}")
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(p))):
            raise ValueError("phase point has non-finite entries")
        w.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "p", p)

    @property
    def N(self) -> int:
        return self.w.size

    def state(self) -> np.ndarray:
        return np.concatenate([self.w, self.p])

    @classmethod
    def from_state(cls, y) -> "PhasePoint":
        y = np.asarray(y, dtype=float)
        k = y.size // 2
        return cls(y[:k], y[k:])


@dataclass(frozen=True)
class IntegralVector:
    """Coefficients a_0..a_{N-1} of F_mu = a_0 mu^(N-1) + ... + a_{N-1}."""

    values: np.ndarray

    def at(self, mu: float) -> float:
        return float(Poly(self.values[::-1]).eval(mu))

    def as_poly(self) -> Poly:
        return Poly(self.values[::-1])

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


def g0_inverse(w) -> np.ndarray:
    """Anti-diagonal Hankel matrix with entries 1, w_1, w_2, ... below the anti-diagonal."""
    w = np.asarray(w, dtype=float)
    N = w.size
    ext = np.concatenate([[1.0], w])
    G = np.zeros((N, N))
    for i in range(N):
        for j in range(N):
            s = i + j - (N - 1)
            if s >= 0:
                G[i, j] = ext[s]
    return G


def _matpoly_vec(f: Poly, M: np.ndarray, v: np.ndarray):
    """f(M) v and its Jacobian in w for fixed v (dM/dw_k = -e_k e_1^T)."""
    N = M.shape[0]
    coeffs = f.coeffs
    y = coeffs[-1] * v
    dY = np.zeros((N, N))
    eye = np.eye(N)
    for a in coeffs[-2::-1]:
        dY = M @ dY - y[0] * eye
        y = M @ y + a * v
    return y, dY


def _m_matrix(m: Poly, M: np.ndarray) -> np.ndarray:
    A = m.eval_matrix(M)
    if m.degree > 0:
        cond = float(np.linalg.cond(A))
        if not np.isfinite(cond) or cond > COND_LIMIT:
            raise SingularMmatrix(
                "m(M) is singular: an eigenvalue of M is (near) a root of m",
                condition_number=cond,
            )
    return A


def m_matrix_condition(w, m: Poly) -> float:
    if m.degree == 0:
        return 1.0
    return float(np.linalg.cond(m.eval_matrix(companion(w))))


def potentials(w, c: Poly, m: Poly) -> np.ndarray:
    """(U_0, ..., U_{N-1}) from c(M) m(M)^{-1} = sum_k U_k M^(N-1-k)."""
    return potentials_and_jacobian(w, c, m)[0]


def potentials_and_jacobian(w, c: Poly, m: Poly, M=None):
    w = np.asarray(w, dtype=float)
    N = w.size
    M = companion(w) if M is None else M
    e_last = np.zeros(N)
    e_last[-1] = 1.0
    yc, dyc = _matpoly_vec(c, M, e_last)
    if m.degree == 0:
        return yc / m.coeffs[0], dyc / m.coeffs[0]
    A = _m_matrix(m, M)
    x = np.linalg.solve(A, yc)
    _, dz = _matpoly_vec(m, M, x)
    dx = np.linalg.solve(A, dyc - dz)
    return x, dx


def _kinetic_layers(w, p, M):
    """Kinetic parts K_i = 1/2 p^T B_i G p with B_i the adjugate layers of (mu - M).

    Returns K (N,), dK/dw (N, N) and dK/dp (N, N).
    """
    N = w.size
    G = g0_inverse(w)
    v = G @ p
    eye = np.eye(N)
    s = v.copy()
    r = p.copy()
    dS = np.zeros((N, N))
    K = np.empty(N)
    dK_dw = np.empty((N, N))
    dK_dp = np.empty((N, N))
    for i in range(N):
        if i > 0:
            dS = M @ dS - s[0] * eye
            dS[:, i - 1] += v
            s = M @ s + w[i - 1] * v
            r = M.T @ r + w[i - 1] * p
        K[i] = 0.5 * p @ s
        conv = np.convolve(r, p)
        metric_part = np.array([conv[N + k] if N + k < conv.size else 0.0 for k in range(N)])
        dK_dw[i] = 0.5 * (p @ dS + metric_part)
        dK_dp[i] = s
    return K, dK_dw, dK_dp


def integral_jacobians(pt: PhasePoint, c: Poly, m: Poly):
    """Integral coefficients a (N,) with da/dw and da/dp, each (N, N) indexed [i, k]."""
    return integral_parts(pt.w, pt.p, c, m)


def integral_parts(w, p, c: Poly, m: Poly):
    """Unvalidated core of integral_jacobians for raw float arrays."""
    M = companion(w)
    U, dU = potentials_and_jacobian(w, c, m, M)
    K, dK_dw, dK_dp = _kinetic_layers(w, p, M)
    return -K - U, -dK_dw - dU, -dK_dp


def integral_coefficients(pt: PhasePoint, c: Poly, m: Poly) -> IntegralVector:
    return IntegralVector(integral_jacobians(pt, c, m)[0])


def flow_weights(lam, N: int) -> np.ndarray:
    """Weights expressing F_lam (or F_inf) as a combination of the a_i."""
    if is_infinite(lam):
        wts = np.zeros(N)
        if N > 1:
            wts[1] = -1.0
        return wts
    return np.array([lam ** (N - 1 - i) for i in range(N)], dtype=float)


def hamiltonian_h(pt: PhasePoint, c: Poly, m: Poly) -> float:
    G = g0_inverse(pt.w)
    return float(0.5 * pt.p @ G @ pt.p + potentials(pt.w, c, m)[0])


def integral_f(pt: PhasePoint, mu, c: Poly, m: Poly) -> float:
    """F_mu evaluated directly from M_mu and V_mu (F_inf for mu = inf)."""
    w, p = pt.w, pt.p
    G = g0_inverse(w)
    U = potentials(w, c, m)
    N = w.size
    if is_infinite(mu):
        u1 = U[1] if N > 1 else 0.0
        return float(0.5 * p @ m_infinity(w) @ G @ p + u1)
    V = sum(U[k] * mu ** (N - 1 - k) for k in range(N))
    return float(0.5 * p @ m_lambda(w, mu) @ G @ p - V)


def grad_h(pt: PhasePoint, c: Poly, m: Poly):
    _, da_dw, da_dp = integral_jacobians(pt, c, m)
    return -da_dw[0], -da_dp[0]


def grad_f(pt: PhasePoint, mu, c: Poly, m: Poly):
    _, da_dw, da_dp = integral_jacobians(pt, c, m)
    wts = flow_weights(mu, pt.N)
    return wts @ da_dw, wts @ da_dp


def canonical_bracket(grad_a, grad_b) -> float:
    (aw, ap), (bw, bp) = grad_a, grad_b
    return float(aw @ bp - ap @ bw)


def poisson_bracket(i: int, j: int, pt: PhasePoint, c: Poly, m: Poly) -> float:
    """{a_i, a_j} for integral coefficients a_i, a_j."""
    _, da_dw, da_dp = integral_jacobians(pt, c, m)
    return canonical_bracket((da_dw[i], da_dp[i]), (da_dw[j], da_dp[j]))


def bracket_matrix(pt: PhasePoint, c: Poly, m: Poly) -> np.ndarray:
    _, da_dw, da_dp = integral_jacobians(pt, c, m)
    return da_dw @ da_dp.T - da_dp @ da_dw.T


def repair_c(c: Poly, m: Poly, pt: PhasePoint) -> Poly:
    """c + m * F(pt), after which every integral coefficient vanishes at pt."""
    return c + m * integral_coefficients(pt, c, m).as_poly()


def eigen_to_companion(q, p_q) -> PhasePoint:
    """Cotangent lift of the change from eigenvalue coordinates q to companion w."""
    q = np.asarray(q, dtype=float)
    p_q = np.asarray(p_q, dtype=float)
    N = q.size
    w = Poly.from_roots(q).coeffs[-2::-1]
    J = np.empty((N, N))
    for i in range(N):
        # d w(mu) / d q_i = -prod_{j != i} (mu - q_j); row k-1 holds the mu^(N-k) coefficient
        J[:, i] = -Poly.from_roots(np.delete(q, i)).coeffs[::-1]
    p = np.linalg.solve(J.T, p_q)
    return PhasePoint(w, p)


def stackel_check(q, p_q, c: Poly, m: Poly) -> float:
    """Max violation of the Vandermonde identity sum_i a_i q_a^(N-1-i) = -p_a^2/2 - c(q_a)/m(q_a)."""
    q = np.asarray(q, dtype=float)
    p_q = np.asarray(p_q, dtype=float)
    N = q.size
    if N > 1:
        gaps = np.abs(q[:, None] - q[None, :])[~np.eye(N, dtype=bool)]
        if gaps.min() < 1e-8:
            raise DegenerateEigenvalues("eigenvalue coordinates are not separated", min_gap=float(gaps.min()))
    pt = eigen_to_companion(q, p_q)
    a = integral_coefficients(pt, c, m).values
    vander = np.vander(q, N)
    lhs = vander @ a
    rhs = -0.5 * p_q**2 - c(q) / m(q)
    scale = 1.0 + np.max(np.abs(rhs))
    return float(np.max(np.abs(lhs - rhs)) / scale)
