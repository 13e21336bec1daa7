"""Smooth bodies in R^2 and R^3 with closed-form support functions."""

from .bodies import (
    Ellipsoid,
    EllipsoidSum,
    PerturbedBall,
    SmoothBody,
    SmoothFunction,
    as_smooth_function,
    curvature_density,
    mixed_discriminant,
)
from .functional import (
    ball_deficit_identity,
    equality_scan,
    rounded_zonotope_trend,
    smooth_deficit,
    smooth_derivative_check,
    smooth_normalization_constant,
    smooth_terms,
    smooth_volume,
)
from .harmonics import HarmonicTerm, solid_harmonic
from .quadrature import QuadratureGrid, ball_volume, circle_grid, default_grid, sphere_area, sphere_grid

__all__ = [
    "Ellipsoid", "EllipsoidSum", "PerturbedBall", "SmoothBody", "SmoothFunction", "as_smooth_function",
    "curvature_density", "mixed_discriminant", "ball_deficit_identity", "equality_scan",
    "rounded_zonotope_trend", "smooth_deficit", "smooth_derivative_check", "smooth_normalization_constant",
    "smooth_terms", "smooth_volume", "HarmonicTerm", "solid_harmonic", "QuadratureGrid", "ball_volume",
    "circle_grid", "default_grid", "sphere_area", "sphere_grid",
]
