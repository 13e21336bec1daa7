"""Deficit, derivative split and equality scan for smooth bodies by quadrature.

With ``T_g`` the tangent form of ``g`` (``∇²_S g + g Id`` restricted to
``u^perp``) the mixed functionals are

    V(K[n-1], g) = (1/n) ∫ g det T_K,
    V(K, f, f)   = (1/3) ∫ f D(T_f, T_K)        (n = 3),
    V(f, f)      = (1/2) ∫ f T_f                (n = 2),

where ``D`` is the symmetric bilinear extension of the 2x2 determinant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from ..deficit import DeficitReport, _combine, deficit as zonotope_deficit
from ..errors import InputError
from ..geometry import Segment, SupportDifference, Zonotope
from .bodies import (
    EllipsoidSum,
    SmoothBody,
    SmoothFunction,
    as_smooth_function,
    mixed_discriminant,
    restrict_form,
)
from .quadrature import (
    QuadratureGrid,
    completion_basis,
    default_grid,
    sphere_grid,
)

__all__ = [
    "SmoothTerms",
    "smooth_terms",
    "smooth_deficit",
    "smooth_volume",
    "SmoothDerivativeReport",
    "smooth_normalization_constant",
    "smooth_derivative_check",
    "EqualityScanReport",
    "equality_scan",
    "ball_deficit_identity",
    "rounded_zonotope_trend",
]

DEFAULT_STEPS = (1e-2, 5e-3, 2.5e-3, 1.25e-3)
EQUATOR_NODES = 512


def _check_dims(K, f, grid: QuadratureGrid):
    if K.dim != f.dim or K.dim != grid.dim:
        raise InputError(f"body in R^{K.dim}, function on S^{f.dim - 1}, grid on S^{grid.dim - 1}")


@dataclass(frozen=True)
class SmoothTerms:
    """Raw mixed functionals of ``(K, f)`` on one grid."""

    dim: int
    volume: float
    mixed_f: float
    mixed_ff: float
    mixed_ratio: float

    def report(self, **extra) -> DeficitReport:
        return _combine(self.dim, self.volume, self.mixed_f, self.mixed_ff, self.mixed_ratio, **extra)


def smooth_terms(K: SmoothBody, f, grid: QuadratureGrid) -> SmoothTerms:
    f = as_smooth_function(f)
    _check_dims(K, f, grid)
    n, U = K.dim, grid.nodes
    hK = K.values(U)
    TK = restrict_form(K.form(U), U)
    Tf = restrict_form(f.form(U), U)
    fU = f.values(U)
    if n == 2:
        dens, bil = TK[:, 0, 0], Tf[:, 0, 0]
    else:
        dens, bil = np.linalg.det(TK), mixed_discriminant(Tf, TK)
    if np.min(dens) <= 0:
        K.validate(grid)
    return SmoothTerms(
        dim=n,
        volume=grid.integrate(hK * dens) / n,
        mixed_f=grid.integrate(fU * dens) / n,
        mixed_ff=grid.integrate(fU * bil) / n,
        mixed_ratio=grid.integrate(fU * fU / hK * dens) / n,
    )


def smooth_volume(K: SmoothBody, grid: QuadratureGrid | None = None) -> float:
    grid = grid or default_grid(K.dim)
    return smooth_terms(K, K, grid).volume


def smooth_deficit(K: SmoothBody, f, grid: QuadratureGrid | None = None, tol: float = 1e-8,
                   refine: bool = True) -> DeficitReport:
    """``Δ(K, f)`` by quadrature.

    With ``refine`` the terms are recomputed on the grid with twice the
    nodes per axis; ``error_estimate`` is the change in ``Δ`` and
    ``accuracy_warning`` is set when it exceeds ``tol``.
    """
    grid = grid or default_grid(K.dim)
    K.validate(grid)
    base = smooth_terms(K, f, grid).report()
    if not refine:
        return base
    fine = smooth_terms(K, f, grid.refined()).report()
    err = abs(fine.deficit - base.deficit)
    return replace(base, error_estimate=err, accuracy_warning=err > tol)


def ball_deficit_identity(f, grid: QuadratureGrid) -> float:
    """Independent value of ``Δ(B, f)`` for the unit ball.

    For ``K = B`` every term reduces to spherical integrals of ``f``:
    ``(∫f)^2/(n|S|) + (1/n^2)∫|∇_S f|^2 - (1/n)∫f^2``, using
    ``∫ f Δ_S f = -∫|∇_S f|^2``.  The tangent form gives
    ``tr T_f = Δ_S f + (n-1) f``.
    """
    f = as_smooth_function(f)
    n, U = grid.dim, grid.nodes
    fU = f.values(U)
    lap = np.trace(restrict_form(f.form(U), U), axis1=1, axis2=2) - (n - 1) * fU
    area = grid.integrate(np.ones(len(U)))
    grad2 = -grid.integrate(fU * lap)
    return grid.integrate(fU) ** 2 / (n * area) + grad2 / n**2 - grid.integrate(fU * fU) / n


# Derivative along K + tI, one-sided.

def _equator(axis: np.ndarray, count: int):
    """Uniform nodes on the great circle ``axis^perp`` and its in-plane tangents."""
    basis = completion_basis(axis)
    phi = 2 * np.pi * np.arange(count) / count
    c, s = np.cos(phi)[:, None], np.sin(phi)[:, None]
    nodes = c * basis[0] + s * basis[1]
    tangents = -s * basis[0] + c * basis[1]
    return nodes, tangents, 2 * np.pi / count


def _circle_form(M: np.ndarray, tangents: np.ndarray) -> np.ndarray:
    return np.einsum("ni,nij,nj->n", tangents, M, tangents)


@dataclass
class _Expansion:
    """Pieces of ``t -> Δ(K + tI, f)``, exact polynomials in ``t`` up to the ratio term."""

    n: int
    vol: float
    v_kki: float
    v_kkf: float
    v_kif: float
    v_kff: float
    v_iff: float
    ratio_eq: float  # (|I|/3)(1/2) ∫_eq f^2/h_K T_PK
    f2: np.ndarray
    dens: np.ndarray
    hK: np.ndarray
    hI: np.ndarray
    grid: QuadratureGrid

    def deficit(self, t: float) -> float:
        vol = self.vol + 3 * t * self.v_kki
        v1 = self.v_kkf + 2 * t * self.v_kif
        vff = self.v_kff + t * self.v_iff
        vr = self.grid.integrate(self.f2 / (self.hK + t * self.hI) * self.dens) / 3 + 2 * t * self.ratio_eq
        return v1 * v1 / vol - (2 / 3) * vff - vr / 3


def _planar_deficit(h, Th, g, Tg, w):
    """``Δ`` of a planar body with support ``h`` for the function ``g`` on S^1."""
    vol = 0.5 * w * math.fsum(h * Th)
    v1 = 0.5 * w * math.fsum(g * Th)
    vff = 0.5 * w * math.fsum(g * Tg)
    vr = 0.5 * w * math.fsum(g * g / h * Th)
    return v1 * v1 / vol - 0.5 * vff - 0.5 * vr, vol, v1


def smooth_normalization_constant(K: SmoothBody, I: Segment, f, grid: QuadratureGrid | None = None) -> float:
    """``c = n V(K[n-1],f)/Vol(K) - (n-1) V(K[n-2],I,f)/V(K[n-1],I)`` for ``n = 3`` by quadrature."""
    exp = _expand(K, I, as_smooth_function(f), grid, EQUATOR_NODES)
    return 3 * exp.v_kkf / exp.vol - 2 * exp.v_kif / exp.v_kki


def _expand(K: SmoothBody, I: Segment, f: SmoothFunction, grid, n_eq: int) -> _Expansion:
    if K.dim != 3 or f.dim != 3 or I.dim != 3:
        raise InputError("the smooth derivative check is implemented for n = 3")
    g = I.generator
    length = I.length
    grid = grid or sphere_grid(axis=g, split=True)
    U = grid.nodes
    hK, fU = K.values(U), f.values(U)
    TK = restrict_form(K.form(U), U)
    Tf = restrict_form(f.form(U), U)
    dens = np.linalg.det(TK)
    if np.min(dens) <= 0:
        K.validate(grid)
    E, tang, w = _equator(g, n_eq)
    hE, fE = K.values(E), f.values(E)
    TPK = _circle_form(K.form(E), tang)
    TPf = _circle_form(f.form(E), tang)
    if np.min(TPK) <= 0:
        raise InputError("equator quadrature sees a nonpositive planar density")
    planar = lambda a, b: 0.5 * w * math.fsum(a * b)  # noqa: E731
    return _Expansion(
        n=3,
        vol=grid.integrate(hK * dens) / 3,
        v_kki=length / 3 * planar(hE, TPK),
        v_kkf=grid.integrate(fU * dens) / 3,
        v_kif=length / 3 * planar(fE, TPK),
        v_kff=grid.integrate(fU * mixed_discriminant(Tf, TK)) / 3,
        v_iff=length / 3 * planar(fE, TPf),
        ratio_eq=length / 3 * planar(fE * fE / hE, TPK),
        f2=fU * fU,
        dens=dens,
        hK=hK,
        hI=I.support(U),
        grid=grid,
    )


def _neville_at_zero(h: Sequence[float], y: Sequence[float]) -> float:
    """Value at 0 of the interpolating polynomial through ``(h_i, y_i)``."""
    p = list(y)
    m = len(h)
    for k in range(1, m):
        for i in range(m - k):
            p[i] = (h[i + k] * p[i] - h[i] * p[i + 1]) / (h[i + k] - h[i])
    return p[0]


@dataclass
class SmoothDerivativeReport:
    term_projected: float
    term_positive: float
    term_square: float
    rhs_total: float
    fd_value: float | None
    fd_step: float | None
    forward_differences: list[float] = field(default_factory=list)
    steps: list[float] = field(default_factory=list)
    extrapolated: float = 0.0
    deviation: float = 0.0
    fd_budget: float = 0.0  # |C| * smallest step, the raw forward-difference error scale
    scale: float = 1.0
    tolerance: float = 0.0
    c: float | None = None

    @property
    def passed(self) -> bool:
        return self.deviation <= self.tolerance

    def as_dict(self) -> dict:
        return dict(self.__dict__, passed=self.passed)


def smooth_derivative_check(K: SmoothBody, I, f, steps: Sequence[float] = DEFAULT_STEPS,
                            grid: QuadratureGrid | None = None, rtol: float = 1e-4,
                            n_equator: int = EQUATOR_NODES) -> SmoothDerivativeReport:
    """Compare one-sided differences of ``Δ(K + tI, f)`` with the three-term split at ``t = 0``.

    ``K + tI`` is not smooth, so ``Δ`` along the path is assembled from the
    exact expansion of each mixed functional in ``t``: parts with only ``K``
    by sphere quadrature, parts with one ``I`` by the projection formula on
    the equator ``I^perp``; parts with two ``I`` vanish.  The forward
    differences are extrapolated to ``step -> 0`` by polynomial
    interpolation and compared with the split within ``rtol * scale``.
    """
    steps = [float(s) for s in steps]
    if not steps:
        raise InputError("the step list is empty")
    if any(s <= 0 for s in steps) or any(a <= b for a, b in zip(steps, steps[1:])):
        raise InputError("steps must be positive and strictly decreasing")
    if not isinstance(I, Segment):
        v = np.asarray(I, dtype=float)
        if np.linalg.norm(v) == 0:
            # A zero-length segment leaves K fixed: derivative and split vanish.
            return SmoothDerivativeReport(0.0, 0.0, 0.0, 0.0, 0.0, steps[-1], [0.0] * len(steps), steps)
        I = Segment(v)
    f = as_smooth_function(f)
    exp = _expand(K, I, f, grid, n_equator)

    d0 = exp.deficit(0.0)
    fds = [(exp.deficit(h) - d0) / h for h in steps]
    extrapolated = _neville_at_zero(steps, fds)

    # Split at t = 0.
    E, tang, w = _equator(I.generator, n_equator)
    hE, fE = K.values(E), f.values(E)
    projected, _, _ = _planar_deficit(hE, _circle_form(K.form(E), tang), fE, _circle_form(f.form(E), tang), w)
    term_projected = 4 / 9 * I.length * projected
    term_positive = exp.grid.integrate(exp.f2 * exp.hI / exp.hK**2 * exp.dens) / 9
    gap = exp.v_kkf / exp.vol - (2 / 3) * exp.v_kif / exp.v_kki
    term_square = -3 * exp.v_kki * gap * gap
    rhs = term_projected + term_positive + term_square

    base = _combine(3, exp.vol, exp.v_kkf, exp.v_kff,
                    exp.grid.integrate(exp.f2 / exp.hK * exp.dens) / 3)
    slope = abs(fds[0] - fds[-1]) / (steps[0] - steps[-1]) if len(steps) > 1 else 0.0
    c = 3 * exp.v_kkf / exp.vol - 2 * exp.v_kif / exp.v_kki
    return SmoothDerivativeReport(
        term_projected=term_projected,
        term_positive=term_positive,
        term_square=term_square,
        rhs_total=rhs,
        fd_value=extrapolated,
        fd_step=steps[-1],
        forward_differences=fds,
        steps=steps,
        extrapolated=extrapolated,
        deviation=abs(extrapolated - rhs),
        fd_budget=slope * steps[-1],
        scale=base.scale,
        tolerance=rtol * base.scale,
        c=c,
    )


# Equality cases.

@dataclass
class EqualityScanReport:
    dilates: list[dict]
    candidates: list[dict]
    dilate_tol: float
    margin_threshold: float

    @property
    def passed(self) -> bool:
        return all(d["pass"] for d in self.dilates) and all(c["pass"] for c in self.candidates)

    def as_dict(self) -> dict:
        return {"dilates": self.dilates, "candidates": self.candidates, "dilate_tol": self.dilate_tol,
                "margin_threshold": self.margin_threshold, "passed": self.passed}


def equality_scan(K: SmoothBody, candidates: Sequence[SmoothBody], grid: QuadratureGrid | None = None,
                  dilate_tol: float = 1e-8, margin_threshold: float = 1e-6,
                  homothety_tol: float = 1e-6) -> EqualityScanReport:
    """``Δ(K, h_L)`` over candidates, separating dilates of ``K`` from the rest.

    ``c*`` minimises the grid norm ``‖h_L - c h_K‖``; a candidate whose
    relative distance is below ``homothety_tol`` is treated as a dilate and
    must have ``Δ <= dilate_tol``.  Others must have ``Δ > margin_threshold``
    (the evidenced strict positivity).
    """
    grid = grid or default_grid(K.dim)
    K.validate(grid)
    U = grid.nodes
    hK = K.values(U)
    kk = grid.integrate(hK * hK)
    dilates = []
    for c in (0.5, 1.0, 2.0):
        d = smooth_terms(K, c * K, grid).report().deficit
        dilates.append({"c": c, "deficit": d, "tolerance": dilate_tol, "pass": abs(d) <= dilate_tol})
    rows = []
    for idx, L in enumerate(candidates):
        if L.dim != K.dim:
            raise InputError(f"candidate {idx} lives in R^{L.dim}, K in R^{K.dim}")
        L.validate(grid)
        hL = L.values(U)
        cstar = grid.integrate(hL * hK) / kk
        dist2 = grid.integrate((hL - cstar * hK) ** 2)
        d = smooth_terms(K, L, grid).report().deficit
        homothetic = dist2 <= (homothety_tol**2) * grid.integrate(hL * hL)
        if homothetic:
            ok = abs(d) <= dilate_tol
        else:
            ok = d > margin_threshold
        rows.append({
            "index": idx,
            "candidate": repr(L),
            "deficit": d,
            "c_star": cstar,
            "distance": math.sqrt(dist2),
            "margin": d / dist2 if dist2 > 0 else None,
            "homothetic": bool(homothetic),
            "tolerance": dilate_tol if homothetic else margin_threshold,
            "pass": bool(ok),
        })
    return EqualityScanReport(dilates, rows, dilate_tol, margin_threshold)


def rounded_zonotope_trend(Z: Zonotope, f: SupportDifference, eps_values: Sequence[float] = (0.4, 0.2, 0.1, 0.05),
                           grid: QuadratureGrid | None = None) -> dict:
    """Quadrature ``Δ`` of smoothed ``Z`` and ``f`` against the exact atomic ``Δ(Z, f)``.

    Each segment is replaced by an ellipsoid of thickness ``eps``; as
    ``eps -> 0`` the smoothed value should approach the atomic one.  This is
    a trend report: no tolerance is asserted.
    """
    if Z.dim not in (2, 3):
        raise InputError("rounded zonotopes are available in R^2 and R^3")
    exact = zonotope_deficit(Z, f).deficit
    grid = grid or (sphere_grid(128, 256) if Z.dim == 3 else default_grid(2).refined().refined())
    rows = []
    for eps in eps_values:
        K = EllipsoidSum.rounded_zonotope(Z.generators, eps)
        parts = [(1.0, EllipsoidSum.rounded_zonotope(f.plus.generators, eps))] if f.plus.num_generators else []
        if f.minus.num_generators:
            parts.append((-1.0, EllipsoidSum.rounded_zonotope(f.minus.generators, eps)))
        value = smooth_terms(K, SmoothFunction(parts), grid).report().deficit if parts else 0.0
        rows.append({"eps": eps, "smooth_deficit": value, "gap": value - exact})
    return {"atomic_deficit": exact, "rows": rows,
            "monotone_gap": all(abs(b["gap"]) <= abs(a["gap"]) for a, b in zip(rows, rows[1:]))}
