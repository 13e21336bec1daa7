"""Real spherical harmonics as homogeneous harmonic polynomials.

A harmonic ``Y`` of degree ``l`` is stored as the solid harmonic
``q(x) = |x|^l Y(x/|x|)``, a polynomial, so its gradient and Hessian are
exact.  On S^2 the normalisation is orthonormal with respect to the surface
measure; on S^1 the harmonics are ``Re, Im (x + iy)^l`` scaled the same way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import InputError

__all__ = ["Polynomial", "solid_harmonic", "HarmonicTerm", "MAX_DEGREE"]

MAX_DEGREE = 6


class Polynomial:
    """Sparse real polynomial ``{exponent tuple: coefficient}`` in ``dim`` variables."""

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: dict | None = None):
        self.dim = dim
        self.terms = {e: c for e, c in (terms or {}).items() if c != 0}

    @classmethod
    def variable(cls, dim: int, i: int) -> "Polynomial":
        e = [0] * dim
        e[i] = 1
        return cls(dim, {tuple(e): 1.0})

    @classmethod
    def constant(cls, dim: int, c: float) -> "Polynomial":
        return cls(dim, {(0,) * dim: float(c)})

    def __add__(self, other: "Polynomial") -> "Polynomial":
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0.0) + c
        return Polynomial(self.dim, out)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Polynomial(self.dim, {e: c * other for e, c in self.terms.items()})
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0.0) + c1 * c2
        return Polynomial(self.dim, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        out = Polynomial.constant(self.dim, 1.0)
        for _ in range(k):
            out = out * self
        return out

    def diff(self, i: int) -> "Polynomial":
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                d = list(e)
                d[i] -= 1
                out[tuple(d)] = c * e[i]
        return Polynomial(self.dim, out)

    def __call__(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.zeros(len(X))
        if not self.terms:
            return out
        # powers[i][k] = X[:, i]**k, shared by all monomials
        top = max(max(e) for e in self.terms)
        powers = [[np.ones(len(X))] for _ in range(self.dim)]
        for i in range(self.dim):
            for _ in range(top):
                powers[i].append(powers[i][-1] * X[:, i])
        for e, c in self.terms.items():
            term = c * powers[0][e[0]]
            for i in range(1, self.dim):
                if e[i]:
                    term = term * powers[i][e[i]]
            out += term
        return out

    def hessian(self):
        return [[self.diff(i).diff(j) for j in range(self.dim)] for i in range(self.dim)]

    def laplacian(self) -> "Polynomial":
        out = Polynomial(self.dim)
        for i in range(self.dim):
            out = out + self.diff(i).diff(i)
        return out


def _legendre_part(l: int, m: int) -> Polynomial:
    """``sum_k (-1)^k 2^-l C(l,k) C(2l-2k,l) (l-2k)!/(l-2k-m)! r^2k z^(l-2k-m)``."""
    x, y, z = (Polynomial.variable(3, i) for i in range(3))
    r2 = x * x + y * y + z * z
    out = Polynomial(3)
    for k in range((l - m) // 2 + 1):
        coef = ((-1) ** k * 2.0**-l * math.comb(l, k) * math.comb(2 * l - 2 * k, l)
                * math.factorial(l - 2 * k) / math.factorial(l - 2 * k - m))
        out = out + (r2**k) * (z ** (l - 2 * k - m)) * coef
    return out


def _planar_power(m: int, dim: int) -> tuple[Polynomial, Polynomial]:
    """Real and imaginary parts of ``(x + iy)^m`` in ``dim`` variables."""
    re, im = Polynomial.constant(dim, 1.0), Polynomial(dim)
    x, y = Polynomial.variable(dim, 0), Polynomial.variable(dim, 1)
    for _ in range(m):
        re, im = re * x + im * y * -1.0, re * y + im * x
    return re, im


def solid_harmonic(l: int, m: int, dim: int = 3) -> Polynomial:
    """Orthonormal real harmonic of degree ``l`` and order ``m`` as a polynomial.

    ``m > 0`` selects the cosine type and ``m < 0`` the sine type.  In
    dimension 2 only ``|m| = l`` exists.
    """
    if l < 0 or abs(m) > l:
        raise InputError(f"invalid harmonic indices l={l}, m={m}")
    if dim == 2:
        if l == 0:
            return Polynomial.constant(2, 1 / math.sqrt(2 * math.pi))
        if abs(m) != l:
            raise InputError(f"on S^1 the degree-{l} harmonics have m = +-{l}, got m={m}")
        re, im = _planar_power(l, 2)
        return (re if m > 0 else im) * (1 / math.sqrt(math.pi))
    if dim != 3:
        raise InputError(f"harmonics are implemented for n = 2, 3, not {dim}")
    am = abs(m)
    norm = math.sqrt((2 * l + 1) / (4 * math.pi)) * math.sqrt(
        (2 - (am == 0)) * math.factorial(l - am) / math.factorial(l + am)
    )
    re, im = _planar_power(am, 3)
    return _legendre_part(l, am) * (re if m >= 0 else im) * norm


@dataclass(frozen=True)
class HarmonicTerm:
    """``coeff * Y_lm`` on the sphere, extended 1-homogeneously.

    The tangent form at a unit ``u`` is ``coeff (∇²q(u) + (1-l) q(u) Id)``,
    exact because ``q`` is a polynomial.
    """

    l: int
    m: int
    coeff: float
    dim: int = 3

    def __post_init__(self):
        if self.l % 2:
            raise InputError(f"harmonic degree must be even for an even function, got l={self.l}")
        if self.l > MAX_DEGREE:
            raise InputError(f"harmonic degree {self.l} exceeds the supported maximum {MAX_DEGREE}")
        object.__setattr__(self, "_poly", solid_harmonic(self.l, self.m, self.dim))
        object.__setattr__(self, "_hess", self._poly.hessian())

    def values(self, U) -> np.ndarray:
        return self.coeff * self._poly(U)

    def form(self, U) -> np.ndarray:
        U = np.atleast_2d(np.asarray(U, dtype=float))
        N, n = U.shape
        H = np.empty((N, n, n))
        for i in range(n):
            for j in range(n):
                H[:, i, j] = self._hess[i][j](U)
        H += ((1 - self.l) * self._poly(U))[:, None, None] * np.eye(n)
        return self.coeff * H
