"""Product quadrature on S^1 and S^2."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import InputError

__all__ = [
    "QuadratureGrid",
    "sphere_grid",
    "circle_grid",
    "default_grid",
    "sphere_area",
    "ball_volume",
    "tangent_frames",
    "completion_basis",
]

DEFAULT_THETA = 64
DEFAULT_PHI = 128
DEFAULT_CIRCLE = 256


def sphere_area(n: int) -> float:
    """Surface area of S^{n-1}."""
    return 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)


def ball_volume(n: int) -> float:
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def completion_basis(axis: np.ndarray) -> np.ndarray:
    """Rows ``e_1, ..., e_n`` orthonormal with ``e_n = axis / |axis|``."""
    a = np.asarray(axis, dtype=float)
    a = a / np.linalg.norm(a)
    n = a.size
    rows = [a]
    for i in np.argsort(np.abs(a)):
        v = np.eye(n)[i]
        for r in rows:
            v = v - (v @ r) * r
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            rows.append(v / norm)
        if len(rows) == n:
            break
    return np.array(rows[1:] + rows[:1])


@dataclass(frozen=True)
class QuadratureGrid:
    """Nodes on S^{n-1} with positive weights, closed under ``u -> -u``.

    ``counts`` records the construction so that :meth:`refined` can double
    the resolution per axis.
    """

    dim: int
    nodes: np.ndarray
    weights: np.ndarray
    counts: tuple[int, ...]
    axis: tuple[float, ...] | None = None
    split: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for arr in (self.nodes, self.weights):
            arr.setflags(write=False)
        area = sphere_area(self.dim)
        if abs(self.weights.sum() - area) > 1e-10 * area:
            raise InputError(f"grid weights sum to {self.weights.sum()}, not the sphere area {area}")
        if np.any(self.weights <= 0):
            raise InputError("grid weights must be positive")

    def __len__(self):
        return len(self.weights)

    def integrate(self, values) -> float:
        return math.fsum(self.weights * np.asarray(values, dtype=float))

    def refined(self) -> "QuadratureGrid":
        counts = tuple(2 * c for c in self.counts)
        if self.dim == 2:
            return circle_grid(counts[0], axis=self.axis)
        return sphere_grid(*counts, axis=self.axis, split=self.split)

    def is_symmetric(self, atol: float = 1e-12) -> bool:
        # Sorting quantised rows makes u and -u line up if the node set is
        # symmetric; raw floats would tie-break on rounding noise.
        def order(X):
            q = np.round(X, 9) + 0.0  # + 0.0 folds -0.0 into 0.0
            return np.lexsort(q.T[::-1])

        ia, ib = order(self.nodes), order(-self.nodes)
        return bool(np.allclose(self.nodes[ia], -self.nodes[ib], atol=atol, rtol=0)
                    and np.allclose(self.weights[ia], self.weights[ib], rtol=1e-12, atol=0))


def sphere_grid(n_theta: int = DEFAULT_THETA, n_phi: int = DEFAULT_PHI, axis=None,
                split: bool = False) -> QuadratureGrid:
    """Gauss-Legendre in ``cos(theta)`` times the uniform rule in ``phi``.

    ``axis`` is the polar axis (default ``e_3``).  With ``split`` the
    Gauss-Legendre rule is applied separately on each hemisphere, which keeps
    spectral accuracy for integrands with a kink on the equator of ``axis``.
    """
    if n_theta < 2 or n_phi < 2 or n_phi % 2:
        raise InputError("sphere grid needs n_theta >= 2 and an even n_phi >= 2")
    if split:
        if n_theta % 2:
            raise InputError("a split grid needs an even n_theta")
        x, w = np.polynomial.legendre.leggauss(n_theta // 2)
        x = np.concatenate([(x - 1) / 2, (x + 1) / 2])
        w = np.concatenate([w, w]) / 2
    else:
        x, w = np.polynomial.legendre.leggauss(n_theta)
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    s = np.sqrt(1 - x**2)
    X = np.stack([np.outer(s, np.cos(phi)), np.outer(s, np.sin(phi)), np.outer(x, np.ones(n_phi))], axis=-1)
    nodes = X.reshape(-1, 3)
    weights = np.outer(w, np.full(n_phi, 2 * np.pi / n_phi)).ravel()
    ax = None
    if axis is not None:
        basis = completion_basis(axis)
        nodes = nodes @ basis
        ax = tuple(float(v) for v in basis[-1])
    return QuadratureGrid(3, nodes, weights, (n_theta, n_phi), ax, split)


def circle_grid(n: int = DEFAULT_CIRCLE, axis=None) -> QuadratureGrid:
    """Uniform rule on S^1; ``axis`` fixes the angle origin."""
    if n < 2 or n % 2:
        raise InputError("circle grid needs an even node count")
    phi = 2 * np.pi * np.arange(n) / n
    nodes = np.stack([np.cos(phi), np.sin(phi)], axis=1)
    ax = None
    if axis is not None:
        a = np.asarray(axis, dtype=float)
        a = a / np.linalg.norm(a)
        R = np.array([[a[0], a[1]], [-a[1], a[0]]])
        nodes = nodes @ R
        ax = tuple(float(v) for v in a)
    return QuadratureGrid(2, nodes, np.full(n, 2 * np.pi / n), (n,), ax)


def default_grid(dim: int) -> QuadratureGrid:
    if dim == 2:
        return circle_grid()
    if dim == 3:
        return sphere_grid()
    raise InputError(f"smooth quadrature is available for n = 2, 3, not n = {dim}")


def tangent_frames(U: np.ndarray) -> np.ndarray:
    """Orthonormal bases of ``u^perp`` as an array of shape (N, n, n-1)."""
    U = np.asarray(U, dtype=float)
    N, n = U.shape
    if n == 2:
        return np.stack([-U[:, 1], U[:, 0]], axis=1)[:, :, None]
    if n != 3:
        raise InputError("tangent frames are implemented for n = 2, 3")
    helper = np.zeros_like(U)
    helper[np.arange(N), np.argmin(np.abs(U), axis=1)] = 1.0
    e1 = helper - np.sum(helper * U, axis=1, keepdims=True) * U
    e1 /= np.linalg.norm(e1, axis=1, keepdims=True)
    e2 = np.cross(U, e1)
    return np.stack([e1, e2], axis=2)
