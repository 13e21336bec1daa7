"""Origin-symmetric zonotopes, segments and even functions on the sphere.

A zonotope is stored by its generators ``g_1, ..., g_m``; it stands for the
Minkowski sum of the symmetric segments ``[-g_i, g_i]`` and has support
function ``h(u) = sum_i |<g_i, u>|``.  Every constructor returns the
canonical form: zero generators removed, parallel generators merged, each
generator's first significant coordinate positive, rows sorted.

All objects are immutable; the generator arrays are read-only views.
"""

from __future__ import annotations

from typing import Callable, Sequence, Union

import numpy as np

from .errors import DegenerateBodyError, InputError, UnsupportedInstanceError

__all__ = [
    "PARALLEL_TOL",
    "Zonotope",
    "Segment",
    "SupportDifference",
    "ClosedForm",
    "LinearMap",
    "OrthonormalFrame",
    "as_zonotope",
    "support",
    "support_function",
    "minkowski_sum",
    "minkowski_diff_summand",
    "project",
    "restrict_function",
    "linear_image",
    "check_even",
    "frame_for",
]

# sin^2 of the angle between two generators below which they are merged
PARALLEL_TOL = 1e-12
# generators shorter than this fraction of the longest one are dropped
ZERO_TOL = 1e-12
# a coordinate counts as "first nonzero" once it exceeds this fraction of the norm
SIGN_TOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _canonical_sign(G: np.ndarray) -> np.ndarray:
    if G.size == 0:
        return G
    norms = np.linalg.norm(G, axis=1, keepdims=True)
    significant = np.abs(G) > SIGN_TOL * norms
    first = np.argmax(significant, axis=1)
    signs = np.sign(G[np.arange(G.shape[0]), first])
    signs[signs == 0] = 1.0
    return G * signs[:, None]


def canonicalize(G: np.ndarray) -> np.ndarray:
    """Canonical generator matrix for the zonotope spanned by the rows of ``G``."""
    G = np.asarray(G, dtype=float)
    if G.ndim != 2:
        raise InputError("generator matrix must be two-dimensional")
    if not np.all(np.isfinite(G)):
        raise InputError("generators must be finite")
    n = G.shape[1]
    if G.shape[0] == 0:
        return np.zeros((0, n))
    norms = np.linalg.norm(G, axis=1)
    keep = norms > ZERO_TOL * norms.max()
    G, norms = G[keep], norms[keep]
    if G.shape[0] == 0:
        return np.zeros((0, n))
    G = _canonical_sign(G)
    U = G / norms[:, None]
    gram = U @ U.T
    defect = 1.0 - np.minimum(gram * gram, 1.0)
    m = G.shape[0]
    taken = np.zeros(m, dtype=bool)
    merged = []
    for i in range(m):
        if taken[i]:
            continue
        members = np.flatnonzero(~taken & (defect[i] < PARALLEL_TOL))
        taken[members] = True
        # parallel members may carry opposite signs when a coordinate sits
        # right at the sign threshold
        signs = np.sign(gram[i, members])
        merged.append((G[members] * signs[:, None]).sum(axis=0))
    G = _canonical_sign(np.array(merged))
    order = np.lexsort(G.T[::-1])
    return G[order]


class Zonotope:
    """Origin-symmetric zonotope ``sum_i [-g_i, g_i]`` in canonical form."""

    __slots__ = ("dim", "generators", "_full")

    def __init__(self, generators, dim: int | None = None):
        G = np.asarray(generators, dtype=float)
        if G.size == 0:
            if dim is None:
                raise InputError("dimension required for a zonotope with no generators")
            G = np.zeros((0, dim))
        elif G.ndim == 1:
            G = G.reshape(1, -1)
        if dim is not None and G.shape[1] != dim:
            raise InputError(f"generators have dimension {G.shape[1]}, expected {dim}")
        if G.shape[1] < 1:
            raise InputError("dimension must be at least 1")
        object.__setattr__(self, "generators", _frozen(canonicalize(G)))
        object.__setattr__(self, "dim", int(G.shape[1]))
        object.__setattr__(self, "_full", None)

    def __setattr__(self, name, value):
        raise AttributeError("Zonotope is immutable")

    @classmethod
    def empty(cls, dim: int) -> "Zonotope":
        """The one-point body {0}."""
        return cls(np.zeros((0, dim)), dim=dim)

    @classmethod
    def cube(cls, dim: int, half_width: float = 1.0) -> "Zonotope":
        return cls(half_width * np.eye(dim))

    @property
    def num_generators(self) -> int:
        return self.generators.shape[0]

    @property
    def full_dimensional(self) -> bool:
        if self._full is None:
            full = (
                self.num_generators >= self.dim
                and np.linalg.matrix_rank(self.generators) == self.dim
            )
            object.__setattr__(self, "_full", bool(full))
        return self._full

    def support(self, u):
        u = np.asarray(u, dtype=float)
        if u.shape[-1] != self.dim:
            raise InputError(f"direction of dimension {u.shape[-1]} for a body in R^{self.dim}")
        return np.abs(u @ self.generators.T).sum(axis=-1)

    __call__ = support

    def scaled(self, factor: float) -> "Zonotope":
        """``factor * Z``; negative factors give the same body as ``|factor| * Z``."""
        return Zonotope(abs(factor) * self.generators, dim=self.dim)

    def require_full_dimensional(self, what: str = "body") -> None:
        if not self.full_dimensional:
            raise DegenerateBodyError(
                f"{what} is not full-dimensional (rank < {self.dim}); "
                "the deficit is only defined for bodies with interior"
            )

    def isclose(self, other: "Zonotope", rtol: float = 1e-10) -> bool:
        """Same body up to ``rtol`` (relative to the longest generator)."""
        if not isinstance(other, Zonotope) or other.dim != self.dim:
            return False
        if other.num_generators != self.num_generators:
            return False
        if self.num_generators == 0:
            return True
        scale = max(np.abs(self.generators).max(), np.abs(other.generators).max())
        unused = list(range(other.num_generators))
        for g in self.generators:
            for pos, j in enumerate(unused):
                if np.allclose(g, other.generators[j], rtol=0.0, atol=rtol * scale):
                    del unused[pos]
                    break
            else:
                return False
        return True

    def __eq__(self, other):
        if not isinstance(other, Zonotope):
            return NotImplemented
        return self.dim == other.dim and np.array_equal(self.generators, other.generators)

    def __hash__(self):
        return hash((self.dim, self.generators.tobytes()))

    def __repr__(self):
        return f"Zonotope(dim={self.dim}, generators={self.generators.tolist()})"


class Segment:
    """The symmetric segment ``[-g, g]``, ``g != 0``."""

    __slots__ = ("generator",)

    def __init__(self, generator):
        g = np.asarray(generator, dtype=float).reshape(-1)
        if g.size == 0 or not np.all(np.isfinite(g)):
            raise InputError("segment generator must be a finite nonempty vector")
        if not np.any(g):
            raise InputError("segment generator must be nonzero (zero-length segment)")
        object.__setattr__(self, "generator", _frozen(_canonical_sign(g[None, :])[0]))

    def __setattr__(self, name, value):
        raise AttributeError("Segment is immutable")

    @property
    def dim(self) -> int:
        return self.generator.size

    @property
    def length(self) -> float:
        return 2.0 * float(np.linalg.norm(self.generator))

    @property
    def direction(self) -> np.ndarray:
        return self.generator / np.linalg.norm(self.generator)

    def support(self, u):
        u = np.asarray(u, dtype=float)
        if u.shape[-1] != self.dim:
            raise InputError(f"direction of dimension {u.shape[-1]} for a segment in R^{self.dim}")
        return np.abs(u @ self.generator)

    __call__ = support

    def scaled(self, factor: float) -> "Segment":
        return Segment(abs(factor) * self.generator)

    def as_zonotope(self) -> Zonotope:
        return Zonotope(self.generator[None, :])

    def __eq__(self, other):
        if not isinstance(other, Segment):
            return NotImplemented
        return np.array_equal(self.generator, other.generator)

    def __hash__(self):
        return hash(self.generator.tobytes())

    def __repr__(self):
        return f"Segment({self.generator.tolist()})"


Body = Union[Zonotope, Segment]


def as_zonotope(body: Body) -> Zonotope:
    if isinstance(body, Zonotope):
        return body
    if isinstance(body, Segment):
        return body.as_zonotope()
    raise InputError(f"expected a zonotope or segment, got {type(body).__name__}")


def support(body: Body, u):
    """Support function of a zonotope or segment at ``u`` (one vector or a stack)."""
    u = np.asarray(u, dtype=float)
    if not np.all(np.any(u != 0, axis=-1)):
        raise InputError("support direction must be nonzero")
    return body.support(u)


def _check_dims(*dims: int) -> int:
    if len(set(dims)) != 1:
        raise InputError(f"dimension mismatch: {sorted(set(dims))}")
    return dims[0]


def minkowski_sum(Z1: Body, Z2: Body) -> Zonotope:
    a, b = as_zonotope(Z1), as_zonotope(Z2)
    n = _check_dims(a.dim, b.dim)
    return Zonotope(np.vstack([a.generators, b.generators]), dim=n)


def _parallel_index(Z: Zonotope, g: np.ndarray) -> int | None:
    if Z.num_generators == 0:
        return None
    d = g / np.linalg.norm(g)
    U = Z.generators / np.linalg.norm(Z.generators, axis=1, keepdims=True)
    cos = U @ d
    defect = 1.0 - np.minimum(cos * cos, 1.0)
    j = int(np.argmin(defect))
    return j if defect[j] < PARALLEL_TOL else None


def minkowski_diff_summand(Z: Zonotope, I: Segment, t: float) -> Zonotope:
    """``(Z ÷ I) + t I`` for a segment ``I`` that is a summand of ``Z``.

    The generator of ``Z`` parallel to ``I`` is shortened by ``(1 - t)|g|``;
    no other Minkowski difference is supported.
    """
    n = _check_dims(Z.dim, I.dim)
    if not 0.0 <= t <= 1.0:
        raise InputError(f"summand parameter t={t} outside [0, 1]")
    j = _parallel_index(Z, I.generator)
    if j is None:
        raise UnsupportedInstanceError(
            f"segment {I.generator.tolist()} is not parallel to any generator "
            "of the zonotope, so it is not a structural Minkowski summand"
        )
    gj = Z.generators[j]
    ratio = (1.0 - t) * np.linalg.norm(I.generator) / np.linalg.norm(gj)
    if ratio > 1.0 + 1e-12:
        raise UnsupportedInstanceError(
            f"segment of length {I.length:.17g} is longer than the parallel "
            f"summand (length {2 * np.linalg.norm(gj):.17g})"
        )
    G = np.array(Z.generators)
    keep = 1.0 - ratio
    if keep <= 1e-12:
        G = np.delete(G, j, axis=0)
    else:
        G[j] = keep * gj
    return Zonotope(G, dim=n)


class OrthonormalFrame:
    """Orthonormal basis (rows of ``basis``) of the hyperplane ``normal``⊥."""

    __slots__ = ("normal", "basis")

    def __init__(self, normal: np.ndarray, basis: np.ndarray):
        object.__setattr__(self, "normal", _frozen(normal))
        object.__setattr__(self, "basis", _frozen(basis))

    def __setattr__(self, name, value):
        raise AttributeError("OrthonormalFrame is immutable")

    @property
    def dim(self) -> int:
        return self.normal.size

    def lift(self, v):
        """Frame coordinates -> ambient vectors."""
        return np.asarray(v, dtype=float) @ self.basis

    def coordinates(self, x):
        """Ambient vectors -> frame coordinates (orthogonal projection)."""
        return np.asarray(x, dtype=float) @ self.basis.T


def frame_for(I: Segment) -> OrthonormalFrame:
    """Deterministic frame of ``I``⊥: Gram-Schmidt on e_1, ..., e_n after ``I``."""
    n = I.dim
    if n < 2:
        raise InputError("the orthogonal complement of a segment needs n >= 2")
    d = I.direction
    accepted = [d]
    for i in range(n):
        w = np.zeros(n)
        w[i] = 1.0
        for _ in range(2):  # second pass restores orthogonality lost to cancellation
            for a in accepted:
                w = w - (a @ w) * a
        nrm = np.linalg.norm(w)
        if nrm > 1e-3:
            accepted.append(w / nrm)
        if len(accepted) == n:
            break
    if len(accepted) != n:
        raise InputError("could not complete an orthonormal frame")
    return OrthonormalFrame(d, np.array(accepted[1:]))


def project(Z: Body, I: Segment) -> tuple[Zonotope, OrthonormalFrame]:
    """Orthogonal projection of ``Z`` onto ``I``⊥, in frame coordinates."""
    Z = as_zonotope(Z)
    _check_dims(Z.dim, I.dim)
    if Z.dim < 2:
        raise InputError("projection needs dimension n >= 2")
    frame = frame_for(I)
    return _project_with(Z, frame), frame


def _project_with(Z: Zonotope, frame: OrthonormalFrame) -> Zonotope:
    G = Z.generators
    if G.shape[0]:
        U = G / np.linalg.norm(G, axis=1, keepdims=True)
        cos = U @ frame.normal
        G = G[1.0 - np.minimum(cos * cos, 1.0) >= PARALLEL_TOL]
    return Zonotope(frame.coordinates(G).reshape(-1, Z.dim - 1), dim=Z.dim - 1)


class SupportDifference:
    """``f = h_plus - h_minus`` restricted to the sphere (always even)."""

    __slots__ = ("plus", "minus")

    def __init__(self, plus: Body, minus: Body | None = None):
        plus = as_zonotope(plus)
        minus = Zonotope.empty(plus.dim) if minus is None else as_zonotope(minus)
        _check_dims(plus.dim, minus.dim)
        object.__setattr__(self, "plus", plus)
        object.__setattr__(self, "minus", minus)

    def __setattr__(self, name, value):
        raise AttributeError("SupportDifference is immutable")

    @property
    def dim(self) -> int:
        return self.plus.dim

    def __call__(self, u):
        return self.plus.support(u) - self.minus.support(u)

    def scaled(self, factor: float) -> "SupportDifference":
        if factor >= 0:
            return SupportDifference(self.plus.scaled(factor), self.minus.scaled(factor))
        return SupportDifference(self.minus.scaled(-factor), self.plus.scaled(-factor))

    def __repr__(self):
        return f"SupportDifference(plus={self.plus!r}, minus={self.minus!r})"


class ClosedForm:
    """An even function on the sphere given by a vectorised evaluator.

    ``func`` maps an ``(k, n)`` stack of unit vectors to ``k`` values.
    Evenness is checked on random directions at construction.
    """

    __slots__ = ("func", "dim", "name")

    def __init__(self, func: Callable[[np.ndarray], np.ndarray], dim: int, name: str = "closed_form",
                 check: bool = True):
        object.__setattr__(self, "func", func)
        object.__setattr__(self, "dim", int(dim))
        object.__setattr__(self, "name", name)
        if check:
            check_even(self)

    def __setattr__(self, name, value):
        raise AttributeError("ClosedForm is immutable")

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        if u.shape[-1] != self.dim:
            raise InputError(f"direction of dimension {u.shape[-1]} for a function on S^{self.dim - 1}")
        if u.ndim == 1:
            return float(np.asarray(self.func(u[None, :]))[0])
        return np.asarray(self.func(u), dtype=float)

    def __repr__(self):
        return f"ClosedForm({self.name}, dim={self.dim})"


TestFunction = Union[SupportDifference, ClosedForm]


def support_function(body: Body) -> SupportDifference:
    """``h_body`` as a test function."""
    return SupportDifference(body)


def check_even(f, samples: int = 64, rtol: float = 1e-12, seed: int = 0) -> None:
    """Raise :class:`InputError` unless ``f(u) == f(-u)`` on random unit ``u``."""
    rng = np.random.default_rng(seed)
    U = rng.standard_normal((samples, f.dim))
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    a, b = np.asarray(f(U), dtype=float), np.asarray(f(-U), dtype=float)
    if a.shape != (samples,):
        raise InputError("evaluator must map (k, n) directions to k values")
    scale = max(1.0, float(np.abs(a).max()))
    if np.abs(a - b).max() > rtol * scale:
        raise InputError("test function is not even: f(u) != f(-u)")


def restrict_function(f: TestFunction, frame: OrthonormalFrame) -> TestFunction:
    """``f`` restricted to the great sphere ``frame.normal``⊥, in frame coordinates."""
    if f.dim != frame.dim:
        raise InputError(f"function on S^{f.dim - 1} restricted with a frame in R^{frame.dim}")
    if isinstance(f, SupportDifference):
        return SupportDifference(_project_with(f.plus, frame), _project_with(f.minus, frame))
    inner = f.func
    return ClosedForm(lambda V: inner(frame.lift(V)), frame.dim - 1, name=f"{f.name}|perp", check=False)


class LinearMap:
    """An ``n x n`` matrix with its determinant cached."""

    __slots__ = ("matrix", "det")

    def __init__(self, matrix):
        A = np.asarray(matrix, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise InputError("linear map must be a square matrix")
        object.__setattr__(self, "matrix", _frozen(A))
        object.__setattr__(self, "det", float(np.linalg.det(A)))

    def __setattr__(self, name, value):
        raise AttributeError("LinearMap is immutable")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def require_invertible(self) -> None:
        if self.det == 0.0 or np.linalg.cond(self.matrix) > 1e12:
            raise InputError("linear map is singular")

    def inverse(self) -> "LinearMap":
        self.require_invertible()
        return LinearMap(np.linalg.inv(self.matrix))


def linear_image(Z: Body, A: LinearMap) -> Zonotope:
    """``A(Z)``; generators map to ``A g``."""
    Z = as_zonotope(Z)
    _check_dims(Z.dim, A.dim)
    A.require_invertible()
    return Zonotope(Z.generators @ A.matrix.T, dim=Z.dim)


def stack_bodies(bodies: Sequence[Body]) -> list[Zonotope]:
    zs = [as_zonotope(b) for b in bodies]
    if zs:
        _check_dims(*(z.dim for z in zs))
    return zs
