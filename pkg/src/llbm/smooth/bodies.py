"""Smooth origin-symmetric bodies given by closed-form support functions.

Every body and test function here exposes two evaluators on unit vectors:

* ``values(U)``: the function on the sphere;
* ``form(U)``: an ``n x n`` matrix per node whose restriction to ``u^perp``
  is ``∇²_S h + h Id``, the tangent Hessian of the 1-homogeneous extension.

The curvature density of a body is the determinant of that restriction.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import BodyInvalidError, InputError
from .harmonics import HarmonicTerm
from .quadrature import QuadratureGrid, circle_grid, sphere_grid, tangent_frames

__all__ = [
    "SmoothBody",
    "Ellipsoid",
    "PerturbedBall",
    "EllipsoidSum",
    "SmoothFunction",
    "restrict_form",
    "curvature_density",
    "mixed_discriminant",
    "as_smooth_function",
]


def restrict_form(M: np.ndarray, U: np.ndarray) -> np.ndarray:
    """Tangent blocks ``E^T M E`` of shape (N, n-1, n-1)."""
    E = tangent_frames(U)
    return np.einsum("nia,nij,njb->nab", E, M, E)


def mixed_discriminant(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Symmetric bilinear extension of ``det`` on stacks of 2x2 blocks, so ``D(A, A) = det A``."""
    return 0.5 * (A[:, 0, 0] * B[:, 1, 1] + A[:, 1, 1] * B[:, 0, 0]
                  - A[:, 0, 1] * B[:, 1, 0] - A[:, 1, 0] * B[:, 0, 1])


# Grids for the convexity certificate at construction time.
_CHECK = {2: circle_grid(128), 3: sphere_grid(24, 48)}


class SmoothBody:
    """Base class: subclasses define ``dim``, ``values`` and ``form``."""

    dim: int

    def support(self, U) -> np.ndarray:
        return self.values(U)

    def density(self, U) -> np.ndarray:
        U = np.atleast_2d(np.asarray(U, dtype=float))
        T = restrict_form(self.form(U), U)
        return T[:, 0, 0] if self.dim == 2 else np.linalg.det(T)

    def validate(self, grid: QuadratureGrid | None = None) -> None:
        """Raise :class:`BodyInvalidError` unless ``h > 0`` and the density is positive on the grid."""
        grid = grid or _CHECK[self.dim]
        if np.min(self.values(grid.nodes)) <= 0:
            raise BodyInvalidError(f"{self!r}: support function is not positive")
        dens = self.density(grid.nodes)
        if np.min(dens) <= 0:
            raise BodyInvalidError(
                f"{self!r}: curvature density {np.min(dens):.3g} <= 0; the perturbation is too large"
            )

    def as_function(self) -> "SmoothFunction":
        return SmoothFunction(((1.0, self),))

    def __rmul__(self, c):
        return SmoothFunction(((float(c), self),))

    def __sub__(self, other):
        return as_smooth_function(self) - other

    def __add__(self, other):
        return as_smooth_function(self) + other


class Ellipsoid(SmoothBody):
    """``h(u) = sqrt(u^T Q u)`` for a symmetric positive-definite ``Q``."""

    def __init__(self, matrix):
        Q = np.array(matrix, dtype=float)
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
            raise InputError("ellipsoid matrix must be square")
        if Q.shape[0] not in (2, 3):
            raise InputError(f"smooth bodies live in R^2 or R^3, got R^{Q.shape[0]}")
        if not np.allclose(Q, Q.T, rtol=0, atol=1e-12 * np.abs(Q).max()):
            raise InputError("ellipsoid matrix must be symmetric")
        Q = (Q + Q.T) / 2
        if np.linalg.eigvalsh(Q).min() <= 0:
            raise BodyInvalidError("ellipsoid matrix must be positive definite")
        Q.setflags(write=False)
        self.matrix = Q
        self.dim = Q.shape[0]

    @classmethod
    def ball(cls, dim: int, radius: float = 1.0) -> "Ellipsoid":
        return cls(radius**2 * np.eye(dim))

    def values(self, U) -> np.ndarray:
        U = np.atleast_2d(np.asarray(U, dtype=float))
        return np.sqrt(np.einsum("ni,ij,nj->n", U, self.matrix, U))

    def form(self, U) -> np.ndarray:
        U = np.atleast_2d(np.asarray(U, dtype=float))
        h = self.values(U)
        QU = U @ self.matrix
        return self.matrix[None] / h[:, None, None] - np.einsum("ni,nj->nij", QU, QU) / h[:, None, None] ** 3

    def density_closed_form(self, U) -> np.ndarray:
        """``det Q / h^(n+1)``, the reciprocal Gauss curvature at normal ``u``."""
        return np.linalg.det(self.matrix) / self.values(U) ** (self.dim + 1)

    def __repr__(self):
        return f"Ellipsoid({self.matrix.tolist()})"


class PerturbedBall(SmoothBody):
    """``h = r + sum_k c_k Y_{l_k m_k}`` with even harmonics of degree at most 6."""

    def __init__(self, dim: int, radius: float, harmonics: Sequence = ()):
        if dim not in (2, 3):
            raise InputError(f"smooth bodies live in R^2 or R^3, got R^{dim}")
        if not radius > 0:
            raise InputError(f"base radius must be positive, got {radius}")
        terms = []
        for t in harmonics:
            if isinstance(t, HarmonicTerm):
                terms.append(t)
            elif isinstance(t, dict):
                terms.append(HarmonicTerm(int(t["l"]), int(t["m"]), float(t["coeff"]), dim))
            else:
                l, m, c = t
                terms.append(HarmonicTerm(int(l), int(m), float(c), dim))
        if any(t.dim != dim for t in terms):
            raise InputError("harmonic term dimension does not match the body")
        self.dim = dim
        self.radius = float(radius)
        self.harmonics = tuple(terms)
        self.validate()

    def values(self, U) -> np.ndarray:
        U = np.atleast_2d(np.asarray(U, dtype=float))
        out = np.full(len(U), self.radius)
        for t in self.harmonics:
            out += t.values(U)
        return out

    def form(self, U) -> np.ndarray:
        U = np.atleast_2d(np.asarray(U, dtype=float))
        M = self.radius * (np.eye(self.dim)[None] - np.einsum("ni,nj->nij", U, U))
        for t in self.harmonics:
            M = M + t.form(U)
        return M

    def __repr__(self):
        hs = ", ".join(f"({t.l},{t.m},{t.coeff:.4g})" for t in self.harmonics)
        return f"PerturbedBall(dim={self.dim}, r={self.radius}, [{hs}])"


class EllipsoidSum(SmoothBody):
    """Minkowski sum of ellipsoids; ``h`` and the form add."""

    def __init__(self, parts: Sequence[Ellipsoid]):
        parts = tuple(parts)
        if not parts:
            raise InputError("an ellipsoid sum needs at least one summand")
        dims = {p.dim for p in parts}
        if len(dims) != 1:
            raise InputError(f"summands of different dimensions {sorted(dims)}")
        self.parts = parts
        self.dim = dims.pop()

    @classmethod
    def rounded_zonotope(cls, generators, eps: float) -> "EllipsoidSum":
        """Replace each segment ``[-g, g]`` by the ellipsoid ``h = sqrt(<g,u>^2 + eps^2)``."""
        G = np.atleast_2d(np.asarray(generators, dtype=float))
        n = G.shape[1]
        return cls([Ellipsoid(np.outer(g, g) + eps**2 * np.eye(n)) for g in G])

    def values(self, U) -> np.ndarray:
        return sum(p.values(U) for p in self.parts)

    def form(self, U) -> np.ndarray:
        return sum(p.form(U) for p in self.parts)

    def __repr__(self):
        return f"EllipsoidSum({len(self.parts)} parts)"


class SmoothFunction:
    """Finite linear combination of smooth support functions and harmonics."""

    __slots__ = ("components", "dim")

    def __init__(self, components):
        comps = tuple((float(c), obj) for c, obj in components)
        dims = {obj.dim for _, obj in comps}
        if len(dims) != 1:
            raise InputError(f"components of different dimensions {sorted(dims)}")
        self.components = comps
        self.dim = dims.pop()

    def values(self, U) -> np.ndarray:
        U = np.atleast_2d(np.asarray(U, dtype=float))
        return sum(c * obj.values(U) for c, obj in self.components)

    def form(self, U) -> np.ndarray:
        U = np.atleast_2d(np.asarray(U, dtype=float))
        return sum(c * obj.form(U) for c, obj in self.components)

    __call__ = values

    def __add__(self, other) -> "SmoothFunction":
        return SmoothFunction(self.components + as_smooth_function(other).components)

    def __sub__(self, other) -> "SmoothFunction":
        return self + (-1.0) * as_smooth_function(other)

    def __mul__(self, c) -> "SmoothFunction":
        return SmoothFunction(tuple((float(c) * k, obj) for k, obj in self.components))

    __rmul__ = __mul__

    def __repr__(self):
        return " + ".join(f"{c:.4g}*{obj!r}" for c, obj in self.components)


def as_smooth_function(f) -> SmoothFunction:
    if isinstance(f, SmoothFunction):
        return f
    if isinstance(f, (SmoothBody, HarmonicTerm)):
        return SmoothFunction(((1.0, f),))
    raise InputError(f"cannot use {type(f).__name__} as a smooth test function")


def curvature_density(body: SmoothBody, u) -> float | np.ndarray:
    """``det(∇²_S h + h Id)`` at unit ``u`` (a single vector or rows)."""
    U = np.asarray(u, dtype=float)
    single = U.ndim == 1
    U = np.atleast_2d(U)
    if U.shape[1] != body.dim:
        raise InputError(f"direction in R^{U.shape[1]} for a body in R^{body.dim}")
    if not np.allclose(np.linalg.norm(U, axis=1), 1.0, atol=1e-12):
        raise InputError("curvature density needs unit directions")
    d = body.density(U)
    if np.any(d <= 0):
        raise BodyInvalidError(f"{body!r}: nonpositive curvature density {d.min():.3g}")
    return float(d[0]) if single else d
