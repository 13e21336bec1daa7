"""Seeded random instances and the zonoid sweep.

Every trial draws from its own generator seeded by
``SeedSequence([seed, n, m, trial])``, so results do not depend on the trial
order or on how trials are spread over worker processes.
"""

from __future__ import annotations

import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .deficit import deficit
from .errors import InputError
from .geometry import Segment, SupportDifference, Zonotope, minkowski_sum, support_function
from .mixed import mixed_volume, zonotope_volume

__all__ = [
    "trial_rng",
    "random_zonotope",
    "random_support_difference",
    "random_segment",
    "summand_instance",
    "resolve_gen_count",
    "SweepRow",
    "SweepSummary",
    "zonoid_sweep",
    "default_threads",
]

VIOLATION_TOL = 1e-9
PLANTED_TOL = 1e-11


def trial_rng(seed: int, *keys: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, keys)]))


def random_zonotope(rng: np.random.Generator, n: int, m: int, full: bool = True,
                    max_tries: int = 1000) -> Zonotope:
    """``m`` generators with entries uniform in [-1, 1], redrawn until full rank."""
    if full and m < n:
        raise InputError(f"{m} generators cannot span R^{n}")
    for _ in range(max_tries):
        Z = Zonotope(rng.uniform(-1.0, 1.0, size=(m, n)), dim=n)
        if not full or Z.full_dimensional:
            return Z
    raise InputError(f"no full-rank draw with {m} generators in R^{n}")


def random_support_difference(rng: np.random.Generator, n: int, lo: int = 2, hi: int = 5) -> SupportDifference:
    """``h_{Z1} - h_{Z2}`` with 2 to 5 random generators in each body."""
    a, b = rng.integers(lo, hi + 1, size=2)
    return SupportDifference(random_zonotope(rng, n, int(a), full=False),
                             random_zonotope(rng, n, int(b), full=False))


def random_segment(rng: np.random.Generator, n: int, length: tuple[float, float] = (0.2, 1.0)) -> Segment:
    """Uniform direction, half-length uniform in ``length``."""
    while True:
        v = rng.standard_normal(n)
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            return Segment(v / norm * rng.uniform(*length))


def summand_instance(rng: np.random.Generator, n: int, extra_gens: int = 2,
                     rate: tuple[float, float] = (0.05, 0.3)):
    """``(K0, I, K0 + I, f)`` with ``I`` a structural summand of ``K0 + I``.

    The length of ``I`` is set through the relative volume growth
    ``n V(K0[n-1], I) / Vol(K0)``, drawn uniformly from ``rate``, so the
    path ``t -> K0 + (1+t) I`` moves at a comparable speed whatever the
    shape of ``K0``.
    """
    K0 = random_zonotope(rng, n, n + int(rng.integers(0, extra_gens + 1)))
    f = random_support_difference(rng, n)
    unit = random_segment(rng, n, (1.0, 1.0))
    speed = n * mixed_volume([K0] * (n - 1) + [unit.as_zonotope()]) / zonotope_volume(K0)
    I = unit.scaled(rng.uniform(*rate) / speed)
    return K0, I, minkowski_sum(K0, I), f


_REL = re.compile(r"^\s*n\s*([+-]\s*\d+)?\s*$")


def resolve_gen_count(spec, n: int) -> int:
    """Generator count from an int or from text such as ``"n+2"``."""
    if isinstance(spec, (int, np.integer)):
        return int(spec)
    text = str(spec)
    if text.strip().lstrip("-").isdigit():
        return int(text)
    match = _REL.match(text)
    if not match:
        raise InputError(f"cannot read generator count {spec!r}; use an integer or n+k")
    return n + (int(match.group(1).replace(" ", "")) if match.group(1) else 0)


@dataclass(frozen=True)
class SweepRow:
    dim: int
    gens: int
    trial: int
    seed: int
    deficit: float
    scale: float
    normalized: float
    planted: float  # Δ(K, h_K), zero up to rounding
    verdict: str

    CSV_FIELDS = ("dim", "gens", "trial", "seed", "deficit", "scale", "normalized", "planted", "verdict")


@dataclass
class SweepSummary:
    rows: list[SweepRow]
    seed: int
    tolerance: float = VIOLATION_TOL
    planted_tolerance: float = PLANTED_TOL
    cells: dict = field(default_factory=dict)

    @property
    def violations(self) -> list[SweepRow]:
        return [r for r in self.rows if r.verdict != "pass"]

    @property
    def min_normalized(self) -> float:
        return min((r.normalized for r in self.rows), default=float("nan"))

    @property
    def max_planted(self) -> float:
        return max((abs(r.planted) / r.scale for r in self.rows), default=0.0)

    @property
    def passed(self) -> bool:
        return not self.violations

    def as_dict(self, include_rows: bool = False) -> dict:
        d = {
            "trials": len(self.rows),
            "seed": self.seed,
            "tolerance": self.tolerance,
            "planted_tolerance": self.planted_tolerance,
            "min_normalized_deficit": self.min_normalized,
            "max_planted_normalized": self.max_planted,
            "violations": len(self.violations),
            "violation_rows": [r.__dict__ for r in self.violations],
            "cells": self.cells,
            "passed": self.passed,
        }
        if include_rows:
            d["rows"] = [r.__dict__ for r in self.rows]
        return d


def _run_trial(job: tuple[int, int, int, int, float]) -> SweepRow:
    seed, n, m, trial, tol = job
    rng = trial_rng(seed, n, m, trial)
    K = random_zonotope(rng, n, m)
    f = random_support_difference(rng, n)
    rep = deficit(K, f)
    planted = deficit(K, support_function(K)).deficit
    scale = rep.scale
    normalized = rep.deficit / scale
    bad = normalized < -tol or abs(planted) > PLANTED_TOL * scale
    return SweepRow(n, m, trial, seed, rep.deficit, scale, normalized, planted, "violation" if bad else "pass")


def default_threads() -> int:
    raw = os.environ.get("LLBM_THREADS", "")
    try:
        return max(1, int(raw)) if raw else 1
    except ValueError:
        raise InputError(f"LLBM_THREADS must be an integer, got {raw!r}") from None


def zonoid_sweep(dims: Sequence[int], gen_counts: Iterable, trials: int, seed: int,
                 threads: int | None = None, tol: float = VIOLATION_TOL) -> SweepSummary:
    """Falsification sweep of ``Δ(K, f) >= 0`` over random zonotopes.

    ``gen_counts`` items are integers or ``"n+k"`` strings resolved per
    dimension.  Each trial also evaluates the planted case ``f = h_K``.
    With ``threads > 1`` trials run in worker processes; rows come back in
    trial order either way.
    """
    if trials < 1:
        raise InputError("trials must be at least 1")
    gen_counts = list(gen_counts)
    jobs, cells = [], {}
    for n in dims:
        if n < 1:
            raise InputError(f"dimension must be positive, got {n}")
        for g in gen_counts:
            m = resolve_gen_count(g, n)
            if m < n:
                raise InputError(f"{m} generators cannot give a full-dimensional zonotope in R^{n}")
            if f"n={n},m={m}" in cells:
                continue
            cells[f"n={n},m={m}"] = None
            jobs.extend((seed, n, m, t, tol) for t in range(trials))
    threads = default_threads() if threads is None else threads
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_run_trial, jobs, chunksize=max(1, len(jobs) // (8 * threads))))
    else:
        rows = [_run_trial(j) for j in jobs]
    for key in cells:
        sel = [r for r in rows if f"n={r.dim},m={r.gens}" == key]
        cells[key] = {
            "trials": len(sel),
            "min_normalized_deficit": min(r.normalized for r in sel),
            "violations": sum(r.verdict != "pass" for r in sel),
        }
    return SweepSummary(rows, seed, tol, PLANTED_TOL, cells)
