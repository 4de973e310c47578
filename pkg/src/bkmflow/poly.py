"""Dense real polynomials in ascending-coefficient form."""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import DivisionByZeroPoly, DuplicateNode


def _trimmed(coeffs, eps=0.0):
    arr = np.atleast_1d(np.asarray(coeffs, dtype=float)).copy()
    if arr.ndim != 1:
        raise ValueError("polynomial coefficients must be one-dimensional")
    if arr.size == 0:
        arr = np.zeros(1)
    k = arr.size
    while k > 1 and abs(arr[k - 1]) <= eps:
        k -= 1
    if k == 1 and abs(arr[0]) <= eps:
        arr[0] = 0.0
    out = arr[:k]
    out.setflags(write=False)
    return out


class Poly:
    """Real polynomial, ``coeffs[k]`` multiplies ``mu**k``.

    Instances are immutable. Trailing coefficients with magnitude at most
    ``eps`` are dropped on construction (exact zeros only by default).
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable[float] | float, eps: float = 0.0):
        self._c = _trimmed(list(coeffs) if not np.isscalar(coeffs) else [coeffs], eps)

    @classmethod
    def from_roots(cls, roots: Sequence[float], lead: float = 1.0) -> "Poly":
        p = cls([lead])
        for r in roots:
            p = p * cls([-r, 1.0])
        return p

    @classmethod
    def monomial(cls, k: int, coef: float = 1.0) -> "Poly":
        c = np.zeros(k + 1)
        c[k] = coef
        return cls(c)

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def degree(self) -> int:
        return self._c.size - 1

    @property
    def lead(self) -> float:
        return float(self._c[-1])

    def is_zero(self) -> bool:
        return self._c.size == 1 and self._c[0] == 0.0

    def coef(self, k: int) -> float:
        return float(self._c[k]) if 0 <= k < self._c.size else 0.0

    def trim(self, eps: float) -> "Poly":
        return Poly(self._c, eps=eps)

    def eval(self, x):
        """Horner evaluation; ``x`` may be a scalar or an array."""
        acc = np.zeros_like(np.asarray(x, dtype=float)) + self._c[-1]
        for a in self._c[-2::-1]:
            acc = acc * x + a
        return float(acc) if np.ndim(acc) == 0 else acc

    __call__ = eval

    def eval_matrix(self, A: np.ndarray) -> np.ndarray:
        A = np.asarray(A, dtype=float)
        out = self._c[-1] * np.eye(A.shape[0])
        for a in self._c[-2::-1]:
            out = out @ A
            out[np.diag_indices_from(out)] += a
        return out

    def __add__(self, other):
        other = _as_poly(other)
        n = max(self._c.size, other._c.size)
        out = np.zeros(n)
        out[: self._c.size] += self._c
        out[: other._c.size] += other._c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(-self._c)

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        return Poly(np.convolve(self._c, other._c))

    __rmul__ = __mul__

    def deriv(self) -> "Poly":
        if self._c.size == 1:
            return Poly([0.0])
        return Poly(self._c[1:] * np.arange(1, self._c.size))

    def divmod(self, divisor: "Poly") -> tuple["Poly", "Poly"]:
        return div_rem(self, divisor)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self._c.size == other._c.size and bool(np.all(self._c == other._c))

    def __hash__(self):
        return hash(tuple(self._c))

    def allclose(self, other: "Poly", rtol=1e-12, atol=0.0) -> bool:
        n = max(self._c.size, other._c.size)
        a = np.zeros(n)
        b = np.zeros(n)
        a[: self._c.size] = self._c
        b[: other._c.size] = other._c
        return bool(np.allclose(a, b, rtol=rtol, atol=atol))

    def tolist(self) -> list[float]:
        return [float(v) for v in self._c]

    def __repr__(self):
        return f"Poly({self.tolist()})"


def _as_poly(x) -> Poly:
    return x if isinstance(x, Poly) else Poly([float(x)])


def eval_poly(p: Poly, x):
    return p.eval(x)


def mul(a: Poly, b: Poly) -> Poly:
    return a * b


def add(a: Poly, b: Poly) -> Poly:
    return a + b


def derivative(p: Poly) -> Poly:
    return p.deriv()


def div_rem(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    """Long division ``a = b*q + r`` with ``deg r < deg b``."""
    if b.is_zero():
        raise DivisionByZeroPoly("division by the zero polynomial")
    num = np.array(a.coeffs, dtype=float)
    den = b.coeffs
    db = den.size - 1
    if num.size - 1 < db:
        return Poly([0.0]), a
    quot = np.zeros(num.size - db)
    for k in range(num.size - 1, db - 1, -1):
        f = num[k] / den[-1]
        quot[k - db] = f
        num[k - db : k + 1] -= f * den
        num[k] = 0.0
    rem = num[:db] if db > 0 else np.zeros(1)
    return Poly(quot), Poly(rem)


def lagrange(points: Sequence[tuple[float, float]]) -> Poly:
    """Interpolating polynomial of degree < len(points)."""
    nodes = np.array([p[0] for p in points], dtype=float)
    values = np.array([p[1] for p in points], dtype=float)
    if nodes.size == 0:
        raise ValueError("lagrange needs at least one point")
    scale = max(float(np.max(np.abs(nodes))), 1e-300)
    for i in range(nodes.size):
        for j in range(i):
            if abs(nodes[i] - nodes[j]) <= 1e-12 * scale:
                raise DuplicateNode(
                    "interpolation nodes coincide", i=j, j=i, node=float(nodes[i])
                )
    out = Poly([0.0])
    for i, (xi, yi) in enumerate(zip(nodes, values)):
        basis = Poly([1.0])
        denom = 1.0
        for j, xj in enumerate(nodes):
            if j != i:
                basis = basis * Poly([-xj, 1.0])
                denom *= xi - xj
        out = out + basis * (yi / denom)
    return out
