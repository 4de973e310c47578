"""Companion-form operators L(u) and M(w), the field zeta, and the pencil M_lambda."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .poly import Poly, div_rem

INFINITY = math.inf


def is_infinite(lam) -> bool:
    return lam is not None and math.isinf(lam)


class Chart(str, enum.Enum):
    """Sign convention for reported u-coordinates.

    ``FIRST_COMPANION``: sigma(mu, u) = mu^n - u_1 mu^(n-1) - ... - u_n.
    ``KB_FORM``: sigma(mu, u) = mu^n + u_1 mu^(n-1) + ... + u_n.
    """

    FIRST_COMPANION = "first-companion"
    KB_FORM = "kb-form"

    def from_rho(self, rho_coeffs):
        """u-vector from the non-leading coefficients (rho_1..rho_n) of sigma."""
        r = np.asarray(rho_coeffs, dtype=float)
        return -r if self is Chart.FIRST_COMPANION else r.copy()

    def to_first_companion(self, u):
        u = np.asarray(u, dtype=float)
        return u if self is Chart.FIRST_COMPANION else -u


class Sign(str, enum.Enum):
    PLUS_U = "plus-u"
    MINUS_W = "minus-w"


@dataclass(frozen=True)
class BkmSpec:
    n: int
    m: Poly
    lam: float
    chart: Chart = Chart.FIRST_COMPANION

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("component count n must be positive")
        if self.m.is_zero():
            raise ValueError("m must not be the zero polynomial")
        if self.m.degree > self.n:
            raise ValueError(f"deg m = {self.m.degree} exceeds n = {self.n}")

    @property
    def infinite(self) -> bool:
        return is_infinite(self.lam)

    @property
    def m_top(self) -> float:
        """Coefficient m_n (may be zero)."""
        return self.m.coef(self.n)


@dataclass(frozen=True)
class ReductionSpec:
    N: int
    c: Poly

    def validate(self, n: int):
        if self.N < 1:
            raise ValueError("reduction degree N must be positive")
        if self.c.degree != 2 * self.N + n:
            raise ValueError(f"c must have degree 2N+n = {2 * self.N + n}, got {self.c.degree}")
        if self.c.lead != 1.0:
            raise ValueError("c must be monic")

    @property
    def c1(self) -> float:
        return self.c.coef(self.c.degree - 1)


@dataclass(frozen=True)
class CompanionMatrix:
    first_column: tuple
    sign: Sign

    @property
    def size(self) -> int:
        return len(self.first_column)

    def dense(self) -> np.ndarray:
        k = self.size
        A = np.eye(k, k, 1)
        col = np.asarray(self.first_column, dtype=float)
        A[:, 0] += col if self.sign is Sign.PLUS_U else -col
        return A

    def char_poly(self) -> Poly:
        col = np.asarray(self.first_column, dtype=float)
        tail = -col if self.sign is Sign.PLUS_U else col
        return Poly(np.concatenate([tail[::-1], [1.0]]))


def char_poly(M: CompanionMatrix) -> Poly:
    return M.char_poly()


def companion(w) -> np.ndarray:
    """Dense M(w): superdiagonal ones, first column -w."""
    w = np.asarray(w, dtype=float)
    A = np.eye(w.size, w.size, 1)
    A[:, 0] -= w
    return A


def w_poly(w) -> Poly:
    """w(mu) = mu^N + w_1 mu^(N-1) + ... + w_N."""
    w = np.asarray(w, dtype=float)
    return Poly(np.concatenate([w[::-1], [1.0]]))


def zeta(u, m: Poly, chart: Chart = Chart.FIRST_COMPANION) -> np.ndarray:
    """The field zeta with L_zeta sigma = m - m_n sigma, in the given chart."""
    u = np.asarray(u, dtype=float)
    n = u.size
    m_n = m.coef(n)
    u_fc = chart.to_first_companion(u)
    z = -(m_n * u_fc + np.array([m.coef(n - i) for i in range(1, n + 1)]))
    return z if chart is Chart.FIRST_COMPANION else -z


def sigma_poly(u, chart: Chart = Chart.FIRST_COMPANION) -> Poly:
    """sigma(mu, u) = det(mu Id - L(u))."""
    u_fc = chart.to_first_companion(u)
    return CompanionMatrix(tuple(u_fc), Sign.PLUS_U).char_poly()


def quotient_poly(w, lam: float) -> Poly:
    """d(mu) = (w(mu) - w(lam)) / (mu - lam), computed by synthetic division."""
    q, _ = div_rem(w_poly(w), Poly([-lam, 1.0]))
    return q


def m_lambda(w, lam: float) -> np.ndarray:
    """det(lam Id - M)(M - lam Id)^{-1}, continuous through eigenvalues of M."""
    w = np.asarray(w, dtype=float)
    return -quotient_poly(w, lam).eval_matrix(companion(w))


def m_infinity(w) -> np.ndarray:
    """M - tr M Id, using tr M = -w_1."""
    w = np.asarray(w, dtype=float)
    return companion(w) + w[0] * np.eye(w.size)
