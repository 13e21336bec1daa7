"""The LLBM deficit of a zonotope and the segment-addition machinery.

For a full-dimensional zonotope ``K`` and an even test function ``f``

    Δ(K, f) = V(K[n-1], f)^2 / Vol(K)
              - (n-1)/n V(K[n-2], f, f)
              - 1/n V(K[n-1], f^2 / h_K),

all three mixed functionals evaluated exactly on the atoms of the mixed
area measures.  Along ``K_t = K + tI`` the derivative splits into a
projected deficit, a nonnegative term and a nonpositive square; the helpers
here evaluate that split, check it by finite differences, and walk the
monotone chains obtained by peeling segments off ``K``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateBodyError, InputError, UnsupportedInstanceError
from .geometry import (
    ClosedForm,
    Segment,
    SupportDifference,
    Zonotope,
    minkowski_diff_summand,
    minkowski_sum,
    project,
    restrict_function,
)
from .mixed import (
    functional_mixed_volume,
    mixed_volume,
    raw_atoms,
    zonotope_volume,
)

__all__ = [
    "DeficitReport",
    "DerivativeReport",
    "FiniteDifference",
    "Station",
    "MonotonicityChainReport",
    "CubeCaseReport",
    "deficit",
    "normalization_constant",
    "normalized_function",
    "derivative_terms",
    "fd_derivative",
    "monotonicity_check",
    "theorem3_chain",
    "cube_case",
    "dim1_case",
    "body_at",
    "DerivativeConvergence",
    "derivative_convergence",
]

SHIFT_RTOL = 1e-10
MONOTONE_TOL = 1e-9


@dataclass(frozen=True)
class DeficitReport:
    dim: int
    volume: float
    mixed_f: float  # V(K[n-1], f)
    mixed_ff: float  # V(K[n-2], f, f); zero in dimension 1
    mixed_ratio: float  # V(K[n-1], f^2 / h_K)
    term_sq: float
    term_bilinear: float
    term_ratio: float
    deficit: float
    error_estimate: float | None = None
    accuracy_warning: bool = False

    @property
    def scale(self) -> float:
        """Magnitude used for relative tolerances: sum of |terms| + 1."""
        return abs(self.term_sq) + abs(self.term_bilinear) + abs(self.term_ratio) + 1.0

    @property
    def normalized(self) -> float:
        return self.deficit / self.scale

    def as_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d["scale"] = self.scale
        return d


def _combine(n: int, volume: float, v1: float, vff: float, vratio: float, **extra) -> DeficitReport:
    term_sq = v1 * v1 / volume
    term_bilinear = (n - 1) / n * vff
    term_ratio = vratio / n
    return DeficitReport(
        dim=n,
        volume=volume,
        mixed_f=v1,
        mixed_ff=vff,
        mixed_ratio=vratio,
        term_sq=term_sq,
        term_bilinear=term_bilinear,
        term_ratio=term_ratio,
        deficit=term_sq - term_bilinear - term_ratio,
        **extra,
    )


def _check_pair(K: Zonotope, f) -> int:
    if not isinstance(K, Zonotope):
        raise InputError(f"base body must be a zonotope, got {type(K).__name__}")
    if f.dim != K.dim:
        raise InputError(f"function on S^{f.dim - 1} with a body in R^{K.dim}")
    K.require_full_dimensional("base body K")
    return K.dim


def deficit(K: Zonotope, f) -> DeficitReport:
    """``Δ(K, f)`` for a full-dimensional zonotope ``K``.

    ``f`` must be a :class:`SupportDifference` when ``n >= 2`` (the bilinear
    term is defined through it); in dimension 1 any even evaluator works.
    """
    n = _check_pair(K, f)
    volume = zonotope_volume(K)
    U, w = raw_atoms([K] * (n - 1), n)
    fU = np.asarray(f(U), dtype=float)
    hK = K.support(U)
    v1 = (2.0 / n) * math.fsum(w * fU)
    vratio = (2.0 / n) * math.fsum(w * fU * fU / hK)
    if n == 1:
        vff = 0.0
    else:
        if not isinstance(f, SupportDifference):
            raise UnsupportedInstanceError(
                "V(K[n-2], f, f) needs f given as a difference of support functions"
            )
        rest = [K] * (n - 2)
        vff = functional_mixed_volume(f, rest + [f.plus]) - functional_mixed_volume(f, rest + [f.minus])
    return _combine(n, volume, v1, vff, vratio)


def _segment_volumes(K: Zonotope, I: Segment, f):
    n = K.dim
    vki = mixed_volume([K] * (n - 1) + [I.as_zonotope()])
    if vki <= 1e-14 * zonotope_volume(K) / max(I.length, 1e-300):
        raise InputError("V(K[n-1], I) vanishes; the normalisation constant is undefined")
    vkif = functional_mixed_volume(f, [K] * (n - 2) + [I.as_zonotope()])
    return vki, vkif


def normalization_constant(K: Zonotope, I: Segment, f) -> float:
    """``c = n V(K[n-1],f)/Vol(K) - (n-1) V(K[n-2],I,f)/V(K[n-1],I)``.

    Shifting ``f`` by ``-c h_K`` zeroes the square term of the derivative
    along ``K + tI``.
    """
    n = _check_pair(K, f)
    if n < 2:
        raise InputError("the normalisation constant needs n >= 2")
    if I.dim != n:
        raise InputError(f"segment in R^{I.dim} with a body in R^{n}")
    vol = zonotope_volume(K)
    v1 = functional_mixed_volume(f, [K] * (n - 1))
    vki, vkif = _segment_volumes(K, I, f)
    return n * v1 / vol - (n - 1) * vkif / vki


def normalized_function(f, c: float, K: Zonotope):
    """``f - c h_K``, still a support difference when ``f`` is one."""
    if f.dim != K.dim:
        raise InputError(f"function on S^{f.dim - 1} shifted by a body in R^{K.dim}")
    if c == 0:
        return f
    if isinstance(f, SupportDifference):
        if c > 0:
            return SupportDifference(f.plus, minkowski_sum(f.minus, K.scaled(c)))
        return SupportDifference(minkowski_sum(f.plus, K.scaled(-c)), f.minus)
    inner = f.func
    return ClosedForm(lambda U: inner(U) - c * K.support(U), f.dim, name=f"{f.name}-c*h_K", check=False)


@dataclass(frozen=True)
class DerivativeReport:
    term_projected: float
    term_positive: float
    term_square: float
    rhs_total: float
    fd_value: float | None = None
    fd_step: float | None = None
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        d = {k: getattr(self, k) for k in ("term_projected", "term_positive", "term_square",
                                           "rhs_total", "fd_value", "fd_step")}
        d.update(self.extra)
        return d


def derivative_terms(K: Zonotope, I: Segment, f) -> DerivativeReport:
    """The three-term split of ``d/dt Δ(K + tI, f)`` at ``t = 0``."""
    n = _check_pair(K, f)
    if n < 2:
        raise InputError("the derivative split needs n >= 2")
    if I.dim != n:
        raise InputError(f"segment in R^{I.dim} with a body in R^{n}")
    vol = zonotope_volume(K)
    U, w = raw_atoms([K] * (n - 1), n)
    fU = np.asarray(f(U), dtype=float)
    hK = K.support(U)
    v1 = (2.0 / n) * math.fsum(w * fU)
    vki, vkif = _segment_volumes(K, I, f)

    PK, frame = project(K, I)
    if not PK.full_dimensional:
        raise DegenerateBodyError("projection of K along I is degenerate")
    projected = deficit(PK, restrict_function(f, frame)).deficit
    term_projected = (n - 1) ** 2 / n**2 * I.length * projected
    weighted = w * fU * fU * I.support(U) / (hK * hK)
    term_positive = (1.0 / n) * (2.0 / n) * math.fsum(weighted)
    gap = v1 / vol - (n - 1) / n * vkif / vki
    term_square = -n * vki * gap * gap
    return DerivativeReport(
        term_projected=term_projected,
        term_positive=term_positive,
        term_square=term_square,
        rhs_total=term_projected + term_positive + term_square,
        extra={"projected_deficit": projected},
    )


def body_at(K: Zonotope, I: Segment, t: float) -> Zonotope:
    """``K + tI``; negative ``t`` shrinks the parallel summand of ``K``."""
    if t == 0:
        return K
    if t > 0:
        return minkowski_sum(K, I.scaled(t))
    return minkowski_diff_summand(K, I, 1.0 + t)


@dataclass(frozen=True)
class FiniteDifference:
    value: float
    step: float
    one_sided: bool


def fd_derivative(K: Zonotope, I: Segment, f, t0: float = 0.0, step: float = 1e-3) -> FiniteDifference:
    """Central difference of ``t -> Δ(K + tI, f)`` at ``t0``.

    When ``t0 - step < 0`` the left point needs ``I`` to be a summand of
    ``K``; if it is not, a forward difference is returned and flagged.
    """
    if not step > 0:
        raise InputError(f"finite-difference step must be positive, got {step}")
    if I.dim != K.dim:
        raise InputError(f"segment in R^{I.dim} with a body in R^{K.dim}")
    center = deficit(body_at(K, I, t0), f).deficit
    right = deficit(body_at(K, I, t0 + step), f).deficit
    try:
        left_body = body_at(K, I, t0 - step)
    except UnsupportedInstanceError:
        return FiniteDifference((right - center) / step, step, True)
    left = deficit(left_body, f).deficit
    return FiniteDifference((right - left) / (2.0 * step), step, False)


@dataclass(frozen=True)
class Station:
    label: str
    t: float | None
    body: Zonotope
    function: object
    report: DeficitReport

    @property
    def deficit(self) -> float:
        return self.report.deficit

    def as_dict(self) -> dict:
        return {
            "label": self.label,
            "t": self.t,
            "body_generators": self.body.generators.tolist(),
            "function": _describe(self.function),
            "deficit": self.report.deficit,
            "scale": self.report.scale,
        }


def _describe(f) -> str:
    if isinstance(f, SupportDifference):
        return f"h[{f.plus.num_generators} gens] - h[{f.minus.num_generators} gens]"
    return repr(f)


@dataclass
class MonotonicityChainReport:
    stations: list[Station]
    c_values: list[float]
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks.values())

    @property
    def deficits(self) -> list[float]:
        return [s.deficit for s in self.stations]

    def as_dict(self) -> dict:
        return {
            "stations": [s.as_dict() for s in self.stations],
            "c_values": list(self.c_values),
            "checks": self.checks,
            "passed": self.passed,
        }


def _check(value: float, tolerance: float, ok: bool) -> dict:
    return {"value": float(value), "tolerance": float(tolerance), "pass": bool(ok)}


def monotonicity_check(K: Zonotope, I: Segment, f, steps: int = 11) -> MonotonicityChainReport:
    """Evaluate ``Δ(K_t, f̄)`` on ``K_t = (K ÷ I) + tI`` for ``t`` on a grid of ``[0, 1]``.

    ``f̄ = f - c h_K`` with the normalisation constant of ``(K, I, f)``.
    The report checks ``Δ(K, f) = Δ(K, f̄)``, that the square term of the
    derivative vanishes for ``f̄``, and that the profile is non-decreasing.
    """
    n = _check_pair(K, f)
    if n < 2:
        raise InputError("the monotonicity chain needs n >= 2")
    if steps < 2:
        raise InputError("the t-grid needs at least two points")
    base = minkowski_diff_summand(K, I, 0.0)
    if not base.full_dimensional:
        raise DegenerateBodyError("K ÷ I is not full-dimensional; the chain would leave the class of bodies")
    c = normalization_constant(K, I, f)
    fbar = normalized_function(f, c, K)
    original = deficit(K, f)
    shifted = deficit(K, fbar)
    square = derivative_terms(K, I, fbar).term_square

    stations = [Station("K, f", 1.0, K, f, original), Station("K, fbar", 1.0, K, fbar, shifted)]
    grid = []
    for t in np.linspace(0.0, 1.0, steps):
        body = K if t == 1.0 else minkowski_diff_summand(K, I, float(t))
        st = Station(f"K_t, fbar (t={t:.6g})", float(t), body, fbar, deficit(body, fbar))
        grid.append(st)
    stations.extend(grid)

    shift_scale = max(original.scale, shifted.scale)
    worst_drop, drop_tol_ok = 0.0, True
    for a, b in zip(grid, grid[1:]):
        drop = a.deficit - b.deficit
        tol = MONOTONE_TOL * max(a.report.scale, b.report.scale)
        worst_drop = max(worst_drop, drop)
        drop_tol_ok &= drop <= tol
    checks = {
        "shift_invariance": _check(
            abs(original.deficit - shifted.deficit), SHIFT_RTOL * shift_scale,
            abs(original.deficit - shifted.deficit) <= SHIFT_RTOL * shift_scale,
        ),
        "square_term_vanishes": _check(abs(square), 1e-12 * shifted.scale, abs(square) <= 1e-12 * shifted.scale),
        "non_decreasing_in_t": _check(worst_drop, MONOTONE_TOL * shifted.scale, drop_tol_ok),
        "endpoint_is_K_div_I": _check(
            abs(grid[0].deficit - deficit(base, fbar).deficit), 1e-12 * grid[0].report.scale,
            abs(grid[0].deficit - deficit(base, fbar).deficit) <= 1e-12 * grid[0].report.scale,
        ),
    }
    return MonotonicityChainReport(stations, [c], checks)


def theorem3_chain(K0: Zonotope, segments: Sequence[Segment], f) -> MonotonicityChainReport:
    """Peel ``I_l, ..., I_1`` off ``K0 + I_1 + ... + I_l``, normalising before each peel.

    Stations record ``Δ`` of the current body and function; the report
    checks that the deficits never increase and that the last one, at
    ``K0``, is nonnegative.
    """
    _check_pair(K0, f)
    for I in segments:
        if I.dim != K0.dim:
            raise InputError(f"segment in R^{I.dim} with a body in R^{K0.dim}")
    body = K0
    for I in segments:
        body = minkowski_sum(body, I)
    current = f
    stations = [Station(f"K0+I1..I{len(segments)}, f", None, body, current, deficit(body, current))]
    c_values = []
    for j in range(len(segments), 0, -1):
        I = segments[j - 1]
        if K0.dim < 2:
            raise InputError("peeling segments needs n >= 2")
        c = normalization_constant(body, I, current)
        c_values.append(c)
        current = normalized_function(current, c, body)
        body = minkowski_diff_summand(body, I, 0.0)
        if not body.full_dimensional:
            raise DegenerateBodyError(f"station after removing I{j} is degenerate")
        stations.append(Station(f"K0+I1..I{j - 1}, f~{len(segments) - j + 1}", None, body, current,
                                deficit(body, current)))
    worst_rise, ok = 0.0, True
    for a, b in zip(stations, stations[1:]):
        rise = b.deficit - a.deficit
        worst_rise = max(worst_rise, rise)
        ok &= rise <= MONOTONE_TOL * max(a.report.scale, b.report.scale)
    last = stations[-1].report
    checks = {
        "non_increasing_under_peeling": _check(worst_rise, MONOTONE_TOL * stations[0].report.scale, ok),
        "final_nonnegative": _check(last.deficit, -MONOTONE_TOL * last.scale, last.deficit >= -MONOTONE_TOL * last.scale),
    }
    return MonotonicityChainReport(stations, c_values, checks)


@dataclass
class CubeCaseReport:
    dim: int
    slab_functional: float  # V(C0[n-1], f)
    slab_expected: float  # 2^(n-1)/n (f(e_n) + f(-e_n))
    slab_segment: object  # V(C0[n-1], J), exact rational
    slab_segment_expected: object
    c: float
    f_en: float
    fbar_at_poles: tuple[float, float]
    report: DeficitReport
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks.values())

    def as_dict(self) -> dict:
        return {
            "dim": self.dim,
            "slab_functional": self.slab_functional,
            "slab_expected": self.slab_expected,
            "slab_segment": str(self.slab_segment),
            "slab_segment_expected": str(self.slab_segment_expected),
            "c": self.c,
            "f_en": self.f_en,
            "fbar_at_poles": list(self.fbar_at_poles),
            "deficit": self.report.as_dict(),
            "checks": self.checks,
            "passed": self.passed,
        }


def cube_case(n: int, f) -> CubeCaseReport:
    """The cube quantities: slab functionals, ``c = f(e_n)`` and ``Δ(C, f) >= 0``."""
    from fractions import Fraction

    if n < 2:
        raise InputError("the cube case needs n >= 2")
    if f.dim != n:
        raise InputError(f"function on S^{f.dim - 1} for the cube in R^{n}")
    C = Zonotope.cube(n)
    C0 = Zonotope(np.eye(n)[: n - 1])
    J = Segment(np.eye(n)[n - 1])
    en = np.eye(n)[n - 1]
    f_en, f_men = float(f(en[None, :])[0]), float(f(-en[None, :])[0])

    slab_f = functional_mixed_volume(f, [C0] * (n - 1))
    slab_expected = 2.0 ** (n - 1) / n * (f_en + f_men)
    slab_j = mixed_volume([C0] * (n - 1) + [J.as_zonotope()], exact=True)
    slab_j_expected = Fraction(2**n, n)
    c = normalization_constant(C, J, f)
    fbar = normalized_function(f, c, C)
    poles = (float(fbar(en[None, :])[0]), float(fbar(-en[None, :])[0]))
    rep = deficit(C, f)
    fscale = max(1.0, abs(f_en))
    checks = {
        "slab_functional": _check(abs(slab_f - slab_expected), 1e-12 * max(1.0, abs(slab_expected)),
                                  abs(slab_f - slab_expected) <= 1e-12 * max(1.0, abs(slab_expected))),
        "slab_segment_exact": _check(float(abs(slab_j - slab_j_expected)), 0.0, slab_j == slab_j_expected),
        "c_equals_f_en": _check(abs(c - f_en), 1e-12 * fscale, abs(c - f_en) <= 1e-12 * fscale),
        "fbar_vanishes_at_poles": _check(max(map(abs, poles)), 1e-12 * fscale, max(map(abs, poles)) <= 1e-12 * fscale),
        "deficit_nonnegative": _check(rep.deficit, -1e-10 * rep.scale, rep.deficit >= -1e-10 * rep.scale),
    }
    return CubeCaseReport(n, slab_f, slab_expected, slab_j, slab_j_expected, c, f_en, poles, rep, checks)


def dim1_case(a: float, f) -> float:
    """``Δ([-a, a], f)``; ``f`` is a test function on ``S^0`` or the value ``f(1)``."""
    if not a > 0:
        raise InputError(f"half-length a must be positive, got {a}")
    if isinstance(f, (int, float)):
        value = float(f)
        f = ClosedForm(lambda U: np.full(len(U), value), 1, name=f"const {value!r}", check=False)
    if f.dim != 1:
        raise InputError("dim1_case needs a function on S^0")
    return deficit(Zonotope([[a]]), f).deficit


@dataclass
class DerivativeConvergence:
    """Central differences at several steps against the three-term split."""

    report: DerivativeReport
    steps: list[float]
    fd_values: list[float]
    errors: list[float]
    orders: list[float]
    scale: float
    terminal_tolerance: float
    min_order: float
    one_sided: bool

    @property
    def order(self) -> float:
        return min(self.orders) if self.orders else float("inf")

    @property
    def passed(self) -> bool:
        return self.errors[-1] <= self.terminal_tolerance and self.order >= self.min_order

    def as_dict(self) -> dict:
        return {
            **self.report.as_dict(),
            "steps": self.steps,
            "fd_values": self.fd_values,
            "errors": self.errors,
            "orders": self.orders,
            "order": self.order,
            "scale": self.scale,
            "terminal_tolerance": self.terminal_tolerance,
            "min_order": self.min_order,
            "one_sided": self.one_sided,
            "passed": self.passed,
        }


def derivative_convergence(K: Zonotope, I: Segment, f, steps: Sequence[float] = (1e-2, 5e-3, 2.5e-3),
                           rtol: float = 1e-6, min_order: float = 1.9,
                           floor: float = 1e-11) -> DerivativeConvergence:
    """Empirical order of the central differences towards ``rhs_total``.

    Orders come from consecutive step pairs; a pair whose smaller error is
    already below ``floor * scale`` (rounding level) is left out, since
    its ratio carries no information about the truncation error.
    """
    steps = [float(s) for s in steps]
    if not steps or any(s <= 0 for s in steps):
        raise InputError("steps must be a nonempty list of positive numbers")
    terms = derivative_terms(K, I, f)
    fds = [fd_derivative(K, I, f, step=h) for h in steps]
    errors = [abs(d.value - terms.rhs_total) for d in fds]
    scale = deficit(K, f).scale
    orders = []
    for (h1, e1), (h2, e2) in zip(zip(steps, errors), zip(steps[1:], errors[1:])):
        if e2 > floor * scale and e1 > 0:
            orders.append(math.log(e1 / e2) / math.log(h1 / h2))
    report = DerivativeReport(terms.term_projected, terms.term_positive, terms.term_square, terms.rhs_total,
                              fds[-1].value, steps[-1], terms.extra)
    return DerivativeConvergence(report, steps, [d.value for d in fds], errors, orders, scale,
                                 rtol * scale, min_order, any(d.one_sided for d in fds))
