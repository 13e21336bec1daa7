"""The twelve acceptance criteria at their stated tolerances.

Each test prints one PASS/FAIL line; the terminal summary repeats them in
order.  Instances are seeded so every run sees the same draws.
"""

import math
import time
from fractions import Fraction

import numpy as np

from llbm.deficit import (
    cube_case,
    deficit,
    derivative_convergence,
    dim1_case,
    monotonicity_check,
    normalized_function,
    theorem3_chain,
)
from llbm.geometry import LinearMap, Segment, Zonotope
from llbm.mixed import (
    covariance_check,
    mixed_volume,
    oracle_mixed_volume,
    projection_identity_check,
    shoelace_area,
    zonotope_volume,
)
from llbm.smooth import (
    Ellipsoid,
    HarmonicTerm,
    PerturbedBall,
    ball_volume,
    default_grid,
    equality_scan,
    smooth_deficit,
    smooth_derivative_check,
    smooth_terms,
    smooth_volume,
    sphere_area,
    sphere_grid,
)
from llbm.sweep import random_segment, random_support_difference, random_zonotope, summand_instance, trial_rng, zonoid_sweep

SEED = 20240611
DIMS = (2, 3, 4)


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def random_spd(rng, lo=0.4, hi=2.0):
    Q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    return Q @ np.diag(rng.uniform(lo, hi, 3)) @ Q.T


def random_perturbed_ball(rng, size=0.06):
    terms = [(l, m, rng.uniform(-size, size) / l**2)
             for l in (2, 4, 6) for m in range(-l, l + 1) if rng.random() < 0.3]
    return PerturbedBall(3, rng.uniform(0.8, 1.5), terms)


def random_smooth_body(rng):
    return Ellipsoid(random_spd(rng)) if rng.random() < 0.5 else random_perturbed_ball(rng)


def test_ac1_zonoid_sweep(acceptance_line):
    start = time.perf_counter()
    s = zonoid_sweep([2, 3, 4, 5], ["n", "n+2", "n+4"], 1000, seed=SEED)
    elapsed = time.perf_counter() - start
    ok = len(s.rows) == 12000 and not s.violations and elapsed <= 120
    acceptance_line("ac1", ok, f"trials={len(s.rows)} violations={len(s.violations)} "
                    f"min_normalized={s.min_normalized:.3e} max_planted={s.max_planted:.1e} "
                    f"runtime={elapsed:.1f}s")
    assert ok


def test_ac2_shift_invariance(acceptance_line):
    worst = 0.0
    for t in range(1000):
        n = DIMS[t % 3]
        rng = trial_rng(SEED, 2, t)
        K = random_zonotope(rng, n, n + int(rng.integers(0, 4)))
        f = random_support_difference(rng, n)
        c = float(rng.uniform(-5, 5))
        a, b = deficit(K, f).deficit, deficit(K, normalized_function(f, c, K)).deficit
        worst = max(worst, abs(b - a) / (1 + abs(a) + c * c * zonotope_volume(K)))
    ok = worst <= 1e-10
    acceptance_line("ac2", ok, f"cases=1000 worst |dΔ|/(1+|Δ|+c²Vol)={worst:.2e} (tol 1e-10)")
    assert ok


def summand_cases():
    for t in range(100):
        n = DIMS[t % 3]
        yield summand_instance(trial_rng(SEED, 3, t), n)


def test_ac3_derivative_split(acceptance_line):
    worst_err, worst_order, failures = 0.0, math.inf, 0
    for K0, I, K, f in summand_cases():
        conv = derivative_convergence(K, I, f, steps=(1e-2, 5e-3, 2.5e-3), rtol=1e-6, min_order=1.9)
        assert not conv.one_sided
        worst_err = max(worst_err, conv.errors[-1] / conv.scale)
        worst_order = min(worst_order, conv.order)
        failures += not conv.passed
    ok = failures == 0
    acceptance_line("ac3", ok, f"cases=100 failures={failures} worst terminal error={worst_err:.2e}·scale "
                    f"(tol 1e-6) min order={worst_order:.3f} (min 1.9)")
    assert ok


def test_ac4_normalized_monotonicity(acceptance_line):
    worst = {"shift_invariance": 0.0, "square_term_vanishes": 0.0, "non_decreasing_in_t": 0.0}
    failures = 0
    for K0, I, K, f in summand_cases():
        rep = monotonicity_check(K, I, f, steps=11)
        scale = rep.stations[1].report.scale
        for key in worst:
            worst[key] = max(worst[key], rep.checks[key]["value"] / scale)
        failures += not all(rep.checks[k]["pass"] for k in worst)
    ok = failures == 0
    acceptance_line("ac4", ok, f"cases=100 failures={failures} shift={worst['shift_invariance']:.1e} "
                    f"square={worst['square_term_vanishes']:.1e} drop={worst['non_decreasing_in_t']:.1e} (·scale)")
    assert ok


def test_ac5_cube_case(acceptance_line):
    failures, exact_ok, worst_c = 0, True, 0.0
    for n in (2, 3, 4):
        for t in range(200):
            rep = cube_case(n, random_support_difference(trial_rng(SEED, 5, n, t), n))
            exact_ok &= rep.slab_segment == Fraction(2**n, n)
            worst_c = max(worst_c, abs(rep.c - rep.f_en))
            failures += not rep.passed
    ok = failures == 0 and exact_ok and worst_c <= 1e-12
    acceptance_line("ac5", ok, f"cases=600 failures={failures} V(C0[n-1],J)=2^n/n exact={exact_ok} "
                    f"max|c-f(e_n)|={worst_c:.1e}")
    assert ok


def test_ac6_dimension_one(acceptance_line):
    worst = 0.0
    for t in range(100):
        rng = trial_rng(SEED, 6, t)
        a, f1 = float(rng.uniform(0.01, 100)), float(rng.uniform(-10, 10))
        worst = max(worst, abs(dim1_case(a, f1)) / (f1 * f1 / a))
    ok = worst <= 1e-14
    acceptance_line("ac6", ok, f"cases=100 worst |Δ|/(f(1)²/a)={worst:.1e} (tol 1e-14)")
    assert ok


def test_ac7_projection_and_covariance(acceptance_line):
    worst_p = worst_c = 0.0
    for t in range(200):
        n = DIMS[t % 3]
        rng = trial_rng(SEED, 7, t)
        I = random_segment(rng, n)
        bodies = [random_zonotope(rng, n, int(rng.integers(1, n + 3)), full=False) for _ in range(n - 1)]
        worst_p = max(worst_p, rel(*projection_identity_check(I, bodies)))
        A = LinearMap(rng.uniform(-1, 1, (n, n)) + np.eye(n))
        bodies = [random_zonotope(rng, n, int(rng.integers(n, n + 3))) for _ in range(n)]
        worst_c = max(worst_c, rel(*covariance_check(A, bodies)))
    ok = worst_p <= 1e-10 and worst_c <= 1e-10
    acceptance_line("ac7", ok, f"cases=200+200 projection rel={worst_p:.1e} covariance rel={worst_c:.1e} (tol 1e-10)")
    assert ok


def test_ac8_oracle(acceptance_line):
    worst = worst_s = 0.0
    for t in range(100):
        n = DIMS[t % 3]
        rng = trial_rng(SEED, 8, t)
        Z1 = random_zonotope(rng, n, n + int(rng.integers(0, 3)))
        Z2 = random_zonotope(rng, n, n + int(rng.integers(0, 3)))
        for k in range(n + 1):
            worst = max(worst, rel(mixed_volume([Z1] * (n - k) + [Z2] * k), oracle_mixed_volume(Z1, Z2, k)))
        if n == 2:
            for Z in (Z1, Z2, Zonotope(np.vstack([Z1.generators, Z2.generators]))):
                worst_s = max(worst_s, rel(zonotope_volume(Z), shoelace_area(Z)))
    ok = worst <= 1e-8 and worst_s <= 1e-10
    acceptance_line("ac8", ok, f"pairs=100 oracle rel={worst:.1e} (tol 1e-8) shoelace rel={worst_s:.1e} (tol 1e-10)")
    assert ok


def test_ac9_alexandrov_fenchel(acceptance_line):
    # slack measured against |V1^2| + Vol*|Vff| + 1, the magnitude of the two sides
    worst = math.inf
    for t in range(500):
        n = DIMS[t % 3]
        rng = trial_rng(SEED, 9, t)
        r = deficit(random_zonotope(rng, n, n + int(rng.integers(0, 4))), random_support_difference(rng, n))
        lhs, rhs = r.mixed_f**2, r.volume * r.mixed_ff
        worst = min(worst, (lhs - rhs) / (abs(lhs) + abs(rhs) + 1))
    ok = worst >= -1e-9
    acceptance_line("ac9", ok, f"cases=500 min (V1²-Vol·Vff)/scale={worst:.2e} (tol -1e-9)")
    assert ok


def test_ac10_peeling_chain(acceptance_line):
    failures, worst_final = 0, math.inf
    for t in range(50):
        n = DIMS[t % 3]
        rng = trial_rng(SEED, 10, t)
        K0 = random_zonotope(rng, n, n + int(rng.integers(0, 3)))
        segs = [random_segment(rng, n) for _ in range(1 + t % 4)]
        rep = theorem3_chain(K0, segs, random_support_difference(rng, n))
        failures += not rep.passed
        last = rep.stations[-1].report
        worst_final = min(worst_final, last.deficit / last.scale)
    ok = failures == 0
    acceptance_line("ac10", ok, f"chains=50 failures={failures} min final Δ/scale={worst_final:.2e}")
    assert ok


def test_ac11_smooth_calibration(acceptance_line):
    vol_err = max(rel(smooth_volume(Ellipsoid.ball(n)), ball_volume(n)) for n in (2, 3))
    # surface area = n V(B[n-1], B)
    surf_err = max(rel(n * smooth_terms(Ellipsoid.ball(n), Ellipsoid.ball(n), default_grid(n)).mixed_f,
                       sphere_area(n)) for n in (2, 3))
    worst_self = 0.0
    for t in range(20):
        K = random_smooth_body(trial_rng(SEED, 11, t))
        worst_self = max(worst_self, abs(smooth_deficit(K, K).deficit))

    B = Ellipsoid.ball(3)
    grid = sphere_grid()
    hB = B.values(grid.nodes)
    cands = []
    t = 0
    while len(cands) < 100:
        rng = trial_rng(SEED, 111, t)
        t += 1
        if rng.random() < 0.5:
            L = Ellipsoid(random_spd(rng, 0.3, 3.0))
        else:
            L = PerturbedBall(3, rng.uniform(0.8, 1.5), [(2, m, rng.uniform(-0.1, 0.1)) for m in range(-2, 3)]
                              + [(4, int(rng.integers(-4, 5)), rng.uniform(-0.02, 0.02))])
        hL = L.values(grid.nodes)
        cstar = grid.integrate(hL * hB) / grid.integrate(hB * hB)
        if math.sqrt(grid.integrate((hL - cstar * hB) ** 2)) >= 0.1:
            cands.append(L)
    rep = equality_scan(B, cands, dilate_tol=1e-8, margin_threshold=1e-6)
    min_cand = min(c["deficit"] for c in rep.candidates)
    max_dilate = max(abs(d["deficit"]) for d in rep.dilates)
    ok = vol_err <= 1e-8 and surf_err <= 1e-8 and worst_self <= 1e-8 and rep.passed
    acceptance_line("ac11", ok, f"ball vol rel={vol_err:.1e} surface rel={surf_err:.1e}; "
                    f"max|Δ(K,h_K)|={worst_self:.1e} over 20; min candidate Δ={min_cand:.3e} over 100; "
                    f"max dilate |Δ|={max_dilate:.1e}")
    assert ok


def test_ac12_smooth_one_sided_derivative(acceptance_line):
    worst, worst_budget, failures = 0.0, 0.0, 0
    for t in range(20):
        rng = trial_rng(SEED, 12, t)
        K = random_smooth_body(rng)
        I = Segment(rng.standard_normal(3) / math.sqrt(3) * rng.uniform(0.2, 1.0))
        if rng.random() < 0.5:
            f = Ellipsoid(random_spd(rng)) - 0.5 * K
        else:
            f = random_perturbed_ball(rng, size=0.3) + HarmonicTerm(2, int(rng.integers(-2, 3)), 0.2)
        rep = smooth_derivative_check(K, I, f, rtol=1e-4)
        worst = max(worst, rep.deviation / rep.scale)
        worst_budget = max(worst_budget, rep.fd_budget / rep.scale)
        failures += not rep.passed
    ok = failures == 0
    acceptance_line("ac12", ok, f"cases=20 failures={failures} worst |extrapolated-rhs|={worst:.1e}·scale (tol 1e-4); "
                    f"raw forward-difference budget up to {worst_budget:.1e}·scale")
    assert ok
