"""Mixed volumes and mixed area measures of zonotope tuples.

For zonotopes every mixed functional is a finite sum over choices of one
generator per slot:

    V(Z_1, ..., Z_n) = 2^n / n! * sum |det(g_1, ..., g_n)|,

and the mixed area measure ``S_{Z_1..Z_{n-1}}`` puts mass
``2^(n-1) vol_{n-1}(g_1, ..., g_{n-1}) / (n-1)!`` on the unit normal of each
independent choice.  Repeated slots are enumerated as combinations and
weighted by ``k!``.

Atoms are stored one per ``±u`` pair; integrating an even function counts
the pair as ``2 * mass * f(u)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import InputError, OracleUnreliableError, UnsupportedInstanceError
from .geometry import (
    PARALLEL_TOL,
    Segment,
    SupportDifference,
    Zonotope,
    as_zonotope,
    linear_image,
    project,
    stack_bodies,
)

__all__ = [
    "AtomicMeasure",
    "MixedVolumeQuery",
    "zonotope_volume",
    "mixed_volume",
    "mixed_area_measure",
    "functional_mixed_volume",
    "bilinear_functional_mixed_volume",
    "oracle_mixed_volume",
    "shoelace_area",
    "projection_identity_check",
    "covariance_check",
]

# choices whose (n-1)-volume is below this fraction of the product of
# generator lengths are treated as linearly dependent
DEPENDENT_TOL = 1e-13


@dataclass(frozen=True)
class MixedVolumeQuery:
    """Slots of a mixed volume written with multiplicities, ``K[k]``."""

    slots: tuple[tuple[object, int], ...]

    @classmethod
    def of(cls, *slots) -> "MixedVolumeQuery":
        parsed = []
        for s in slots:
            body, k = s if isinstance(s, tuple) else (s, 1)
            if k < 0:
                raise InputError("slot multiplicity must be nonnegative")
            parsed.append((body, int(k)))
        return cls(tuple(parsed))

    def expand(self) -> list:
        return [body for body, k in self.slots for _ in range(k)]


def _as_body_list(q) -> list[Zonotope]:
    if isinstance(q, MixedVolumeQuery):
        q = q.expand()
    return stack_bodies(q)


def _group(bodies: Sequence[Zonotope]) -> list[tuple[Zonotope, int]]:
    groups: list[list] = []
    for b in bodies:
        for g in groups:
            if g[0] is b or g[0] == b:
                g[1] += 1
                break
        else:
            groups.append([b, 1])
    return [(b, k) for b, k in groups]


def _choices(bodies: Sequence[Zonotope]):
    """Stacked generators, index matrix of choices (lexicographic), multiplicity."""
    groups = _group(bodies)
    n = bodies[0].dim
    stacked = np.vstack([b.generators for b, _ in groups]) if groups else np.zeros((0, n))
    idx = np.zeros((1, 0), dtype=np.intp)
    mult = 1
    offset = 0
    for body, k in groups:
        m = body.num_generators
        combos = np.array(list(itertools.combinations(range(m), k)), dtype=np.intp).reshape(-1, k)
        combos += offset
        offset += m
        mult *= math.factorial(k)
        idx = np.hstack([np.repeat(idx, len(combos), axis=0), np.tile(combos, (len(idx), 1))])
    return stacked, idx, mult


def _det_fraction(rows) -> Fraction:
    a = [list(r) for r in rows]
    size = len(a)
    det = Fraction(1)
    for col in range(size):
        pivot = next((r for r in range(col, size) if a[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        p = a[col][col]
        det *= p
        for r in range(col + 1, size):
            if a[r][col] != 0:
                factor = a[r][col] / p
                a[r] = [x - factor * y for x, y in zip(a[r], a[col])]
    return det


def _to_fractions(M: np.ndarray):
    return [[Fraction(float(x)) for x in row] for row in M]


def zonotope_volume(Z, exact: bool = False):
    """``Vol(Z) = 2^n * sum over n-subsets S of |det g_S|``.

    With ``exact=True`` the sum is carried out in rationals over the exact
    binary values of the generators and a :class:`Fraction` is returned.
    """
    Z = as_zonotope(Z)
    n, m = Z.dim, Z.num_generators
    if not Z.full_dimensional:
        return Fraction(0) if exact else 0.0
    subsets = np.array(list(itertools.combinations(range(m), n)), dtype=np.intp)
    blocks = Z.generators[subsets]
    if exact:
        return 2**n * sum(abs(_det_fraction(_to_fractions(B))) for B in blocks)
    return 2.0**n * math.fsum(np.abs(np.linalg.det(blocks)))


def mixed_volume(q, exact: bool = False):
    """Mixed volume of ``n`` zonotopes/segments by multilinear expansion.

    ``q`` is a list of bodies or a :class:`MixedVolumeQuery`.
    """
    bodies = _as_body_list(q)
    if not bodies:
        raise InputError("mixed volume of an empty tuple")
    n = bodies[0].dim
    if len(bodies) != n:
        raise InputError(f"mixed volume in R^{n} needs {n} slots, got {len(bodies)}")
    stacked, idx, mult = _choices(bodies)
    coeff = Fraction(2**n * mult, math.factorial(n))
    if len(idx) == 0:
        return Fraction(0) if exact else 0.0
    blocks = stacked[idx]
    if exact:
        return coeff * sum(abs(_det_fraction(_to_fractions(B))) for B in blocks)
    return float(coeff) * math.fsum(np.abs(np.linalg.det(blocks)))


def _cofactor_normals(blocks: np.ndarray) -> np.ndarray:
    """Generalised cross products of the ``n-1`` rows of each block."""
    N, k, n = blocks.shape
    out = np.empty((N, n))
    cols = np.arange(n)
    for i in range(n):
        sub = blocks[:, :, cols != i]
        out[:, i] = (-1) ** i * (np.linalg.det(sub) if k else 1.0)
    return out


def _canonical_rows(U: np.ndarray) -> np.ndarray:
    significant = np.abs(U) > 1e-12
    first = np.argmax(significant, axis=1)
    signs = np.sign(U[np.arange(len(U)), first])
    signs[signs == 0] = 1.0
    return U * signs[:, None]


def raw_atoms(bodies: Sequence[Zonotope], dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Unmerged atoms ``(directions, masses)`` of ``S_{bodies}`` in ``R^dim``."""
    if len(bodies) != dim - 1:
        raise InputError(f"mixed area measure in R^{dim} needs {dim - 1} bodies, got {len(bodies)}")
    if dim == 1:
        return np.ones((1, 1)), np.ones(1)
    if any(b.dim != dim for b in bodies):
        raise InputError("dimension mismatch among mixed area measure arguments")
    stacked, idx, mult = _choices(bodies)
    if len(idx) == 0:
        return np.zeros((0, dim)), np.zeros(0)
    blocks = stacked[idx]
    normals = _cofactor_normals(blocks)
    vol = np.linalg.norm(normals, axis=1)
    lengths = np.prod(np.linalg.norm(blocks, axis=2), axis=1)
    keep = vol > DEPENDENT_TOL * lengths
    normals, vol = normals[keep], vol[keep]
    U = _canonical_rows(normals / vol[:, None])
    masses = vol * (2.0 ** (dim - 1) * mult / math.factorial(dim - 1))
    return U, masses


@dataclass(frozen=True)
class AtomicMeasure:
    """Finite even measure on ``S^{n-1}``: one atom per ``±u`` pair."""

    dim: int
    directions: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        if self.directions.shape != (len(self.masses), self.dim):
            raise InputError("atom directions and masses disagree in shape")
        if np.any(self.masses < 0):
            raise InputError("atom masses must be nonnegative")

    @classmethod
    def from_raw(cls, dim: int, U: np.ndarray, masses: np.ndarray) -> "AtomicMeasure":
        """Merge atoms whose directions agree up to sign (sin^2 below the parallel tolerance)."""
        if len(masses) == 0:
            return cls(dim, np.zeros((0, dim)), np.zeros(0))
        U = _canonical_rows(U)
        gram = U @ U.T
        close = 1.0 - np.minimum(gram * gram, 1.0) < PARALLEL_TOL
        taken = np.zeros(len(masses), dtype=bool)
        dirs, ms = [], []
        for i in range(len(masses)):
            if taken[i]:
                continue
            members = np.flatnonzero(~taken & close[i])
            taken[members] = True
            dirs.append(U[i])
            ms.append(math.fsum(masses[members]))
        dirs = np.array(dirs)
        order = np.lexsort(dirs.T[::-1])
        return cls(dim, dirs[order], np.array(ms)[order])

    @property
    def total_mass(self) -> float:
        """Mass of the whole sphere (both atoms of every pair)."""
        return 2.0 * math.fsum(self.masses)

    def integrate(self, f) -> float:
        """``∫ f dS`` for an even ``f``."""
        if len(self.masses) == 0:
            return 0.0
        return 2.0 * math.fsum(self.masses * np.asarray(f(self.directions), dtype=float))

    def centroid(self) -> np.ndarray:
        """``∑ mass * u`` over the full ``±`` expansion (zero for any body)."""
        full_dirs = np.vstack([self.directions, -self.directions])
        full_mass = np.concatenate([self.masses, self.masses])
        return np.array([math.fsum(full_mass * full_dirs[:, i]) for i in range(self.dim)])

    def __len__(self):
        return len(self.masses)


def mixed_area_measure(bodies: Sequence, dim: int | None = None, exact: bool = False) -> AtomicMeasure:
    """Atomic mixed area measure ``S_{C_1, ..., C_{n-1}}`` of zonotopes/segments.

    ``dim`` is needed only when ``bodies`` is empty (``n = 1``).  With
    ``exact=True`` the Gram determinants are accumulated in rationals and
    only the final square root is taken in floating point.
    """
    zs = stack_bodies(bodies)
    n = zs[0].dim if zs else dim
    if n is None:
        raise InputError("dimension required for an empty tuple of bodies")
    if dim is not None and dim != n:
        raise InputError(f"bodies live in R^{n}, expected R^{dim}")
    if not exact or n == 1:
        return AtomicMeasure.from_raw(n, *raw_atoms(zs, n))
    stacked, idx, mult = _choices(zs)
    blocks = stacked[idx]
    U, masses = [], []
    for B in blocks:
        rows = _to_fractions(B)
        cof = [(-1) ** i * _det_fraction([r[:i] + r[i + 1:] for r in rows]) for i in range(n)]
        gram = sum(c * c for c in cof)
        if gram == 0:
            continue
        root = math.sqrt(gram)
        U.append([float(c) / root for c in cof])
        masses.append(root * 2.0 ** (n - 1) * mult / math.factorial(n - 1))
    return AtomicMeasure.from_raw(n, np.array(U).reshape(-1, n), np.array(masses))


def _integrate_raw(U: np.ndarray, masses: np.ndarray, values: np.ndarray, dim: int) -> float:
    if len(masses) == 0:
        return 0.0
    return (2.0 / dim) * math.fsum(masses * values)


def functional_mixed_volume(f, bodies: Sequence) -> float:
    """``V(f, C_1, ..., C_{n-1}) = (1/n) ∫ f dS_{C_1..C_{n-1}}``."""
    zs = stack_bodies(bodies)
    n = f.dim
    if zs and zs[0].dim != n:
        raise InputError(f"function on S^{n - 1} paired with bodies in R^{zs[0].dim}")
    U, masses = raw_atoms(zs, n)
    return _integrate_raw(U, masses, np.asarray(f(U), dtype=float) if len(U) else np.zeros(0), n)


def bilinear_functional_mixed_volume(f, g, bodies: Sequence) -> float:
    """``V(f, g, C_1, ..., C_{n-2})`` for a support difference ``f``.

    Expanded as ``V(plus, g, ...) - V(minus, g, ...)``.  When ``g`` is a
    support difference as well the two expansion orders are compared.
    """
    if not isinstance(f, SupportDifference):
        raise UnsupportedInstanceError("V(f, g, ...) needs f given as a difference of support functions")
    zs = stack_bodies(bodies)
    if f.dim < 2:
        raise InputError("V(f, g, C_1..C_{n-2}) needs n >= 2")
    value = functional_mixed_volume(g, zs + [f.plus]) - functional_mixed_volume(g, zs + [f.minus])
    if isinstance(g, SupportDifference) and g is not f:
        swapped = functional_mixed_volume(f, zs + [g.plus]) - functional_mixed_volume(f, zs + [g.minus])
        scale = 1.0 + abs(value) + abs(swapped)
        if abs(value - swapped) > 1e-9 * scale:
            raise AssertionError(f"V(f, g, ...) is not symmetric: {value!r} vs {swapped!r}")
    return value


def shoelace_area(Z) -> float:
    """Area of a planar zonotope from its vertex cycle (no determinant sums)."""
    Z = as_zonotope(Z)
    if Z.dim != 2:
        raise InputError("shoelace area needs a planar zonotope")
    G = Z.generators
    if len(G) < 2:
        return 0.0
    # canonical generators point into the half-plane x > 0 (or along +y)
    order = np.argsort(np.arctan2(G[:, 1], G[:, 0]), kind="stable")
    edges = np.vstack([2 * G[order], -2 * G[order]])
    verts = -G.sum(axis=0) + np.vstack([np.zeros(2), np.cumsum(edges, axis=0)[:-1]])
    x, y = verts[:, 0], verts[:, 1]
    return 0.5 * abs(math.fsum(x * np.roll(y, -1)) - math.fsum(np.roll(x, -1) * y))


def oracle_mixed_volume(Z1, Z2, k: int) -> float:
    """``V(Z1[n-k], Z2[k])`` from volumes of ``t1 Z1 + t2 Z2`` on a grid.

    Fits ``Vol(t1 Z1 + t2 Z2) = sum_j C(n,j) V_j t1^(n-j) t2^j`` on
    ``t1, t2 in {1..n+1}/(n+1)`` by least squares.  In the plane every grid
    volume is recomputed from the vertex cycle as well.
    """
    a, b = as_zonotope(Z1), as_zonotope(Z2)
    if a.dim != b.dim:
        raise InputError(f"dimension mismatch: {a.dim} vs {b.dim}")
    n = a.dim
    if not 0 <= k <= n:
        raise InputError(f"k={k} outside [0, {n}]")
    ts = np.arange(1, n + 2) / (n + 1)
    rows, vols = [], []
    for t1, t2 in itertools.product(ts, ts):
        body = Zonotope(np.vstack([t1 * a.generators, t2 * b.generators]), dim=n)
        vol = zonotope_volume(body)
        if n == 2:
            alt = shoelace_area(body)
            if abs(alt - vol) > 1e-10 * max(1.0, abs(vol)):
                raise OracleUnreliableError(f"shoelace area {alt!r} disagrees with determinant volume {vol!r}")
        rows.append([math.comb(n, j) * t1 ** (n - j) * t2**j for j in range(n + 1)])
        vols.append(vol)
    A, y = np.array(rows), np.array(vols)
    cond = np.linalg.cond(A)
    if cond > 1e8:
        raise OracleUnreliableError(f"interpolation system condition number {cond:.3g} exceeds 1e8")
    coeffs, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = np.linalg.norm(A @ coeffs - y)
    if resid > 1e-9 * max(1.0, np.linalg.norm(y)):
        raise OracleUnreliableError(f"interpolation residual {resid:.3g} too large")
    return float(coeffs[k])


def projection_identity_check(I: Segment, bodies: Sequence) -> tuple[float, float]:
    """Both sides of ``V(I, C_1..C_{n-1}) = |I|/n V(P C_1, ..., P C_{n-1})``."""
    zs = stack_bodies(bodies)
    n = I.dim
    if n < 2:
        raise InputError("the projection formula needs n >= 2")
    if len(zs) != n - 1 or any(z.dim != n for z in zs):
        raise InputError(f"projection identity in R^{n} needs {n - 1} bodies in R^{n}")
    lhs = mixed_volume([I.as_zonotope()] + zs)
    projected = [project(z, I)[0] for z in zs]
    rhs = I.length / n * mixed_volume(projected)
    return lhs, rhs


def covariance_check(A, q) -> tuple[float, float]:
    """Both sides of ``V(A C_1, ..., A C_n) = |det A| V(C_1, ..., C_n)``."""
    bodies = _as_body_list(q)
    A.require_invertible()
    lhs = mixed_volume([linear_image(b, A) for b in bodies])
    rhs = abs(A.det) * mixed_volume(bodies)
    return lhs, rhs
