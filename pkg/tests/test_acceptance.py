"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Every expected value asserted here is either computed by an independent
brute-force oracle inside this module or pinned to a closed form; stated
runtime budgets are asserted alongside the numeric checks.
"""

import itertools
import math
import random
import time
from fractions import Fraction as F

import pytest

from latticeborell import (
    Ball,
    Box,
    CubeSum,
    ExperimentConfig,
    ProjectionDistribution,
    VPolytope,
    c0,
    c0_upper_bound,
    counterexample_body,
    cq_estimate,
    emit_report,
    enumerate_lattice,
    expected_max,
    moment,
    paley_zygmund_check,
    projection_distribution,
    run_experiment,
    tail,
    union_bound_tail_check,
    verify_discrete_bm,
    verify_discrete_borell,
    verify_meanwidth_discrete,
)
from latticeborell.borell import HypothesisError, lemma32_shell_bound, shell_count
from latticeborell.corpus import default_corpus
from latticeborell.harness import report_lines

from conftest import random_body, random_body_with_projection

P_GRID = (1, 1.5, 2, 4, 8)


def report(num, name, ok, t0, limit):
    elapsed = time.time() - t0
    status = "PASS" if ok else "FAIL"
    print(f"\nACCEPTANCE {num:02d} {name}: {status}  ({elapsed:.1f}s / {limit:.0f}s)")
    assert elapsed <= limit, f"runtime {elapsed:.1f}s exceeds {limit}s"
    assert ok


# -------------------------------------------------------------------------
# 1. exact fixtures vs independent brute force


def brute_points_box22():
    return [(x, y) for x in range(-2, 3) for y in range(-2, 3)]


def brute_points_ball2():
    return [(x, y) for x in range(-2, 3) for y in range(-2, 3)
            if x * x + y * y <= 4]


def test_acceptance_01_exact_fixtures():
    t0 = time.time()
    ok = True

    ok &= enumerate_lattice(Box([2, 2])).count == len(brute_points_box22()) == 25
    ok &= enumerate_lattice(Ball(2, 2)).count == len(brute_points_ball2()) == 13
    ok &= enumerate_lattice(CubeSum(VPolytope([(0, 0)]))).count == 1

    cloud = brute_points_box22()
    d = projection_distribution(Box([2, 2]))
    ok &= moment(d, 1).root == F(sum(abs(y) for _, y in cloud), 25) == F(6, 5)
    brute_m2 = F(sum(y * y for _, y in cloud), 25)
    ok &= moment(d, 2).raw == brute_m2 == 2
    ok &= moment(d, 2).root == math.sqrt(2)

    # C0 via the definition on brute-force clouds
    fat = [(x, y) for x in range(-3, 4) for y in range(-3, 4)
           if max(abs(x), abs(y)) < 3]
    m_y = F(sum(abs(y) for _, y in fat), len(fat))
    brute_c0_box = (1 + m_y * F(len(fat), 25)) / F(6, 5)
    ok &= c0(Box([2, 2]), 1) == brute_c0_box == F(11, 6)

    ball_cloud = brute_points_ball2()
    fat_ball = [(x, y) for x in range(-3, 4) for y in range(-3, 4)
                if _dist_inf_to_disk2(x, y) < 1 - 1e-12]
    mx = F(sum(abs(y) for _, y in ball_cloud), len(ball_cloud))
    my = F(sum(abs(y) for _, y in fat_ball), len(fat_ball))
    brute_c0_ball = (1 + my * F(len(fat_ball), len(ball_cloud))) / mx
    ok &= c0(Ball(2, 2), 1) == brute_c0_ball == F(43, 10)

    # expected max over all 625 ordered pairs
    ys = [abs(y) for _, y in cloud]
    brute = F(sum(max(a, b) for a in ys for b in ys), 25 ** 2)
    ok &= expected_max(d, 2) == brute == F(8, 5)

    report(1, "exact-fixtures", bool(ok), t0, 1.0)


def _dist_inf_to_disk2(x, y):
    # sup-norm distance from (x, y) to the closed disk of radius 2
    lo, hi = 0.0, 10.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        ax = max(abs(x) - mid, 0.0)
        ay = max(abs(y) - mid, 0.0)
        if ax * ax + ay * ay <= 4.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


# -------------------------------------------------------------------------
# 2. Hoelder lower bound, zero tolerance, 200 randomized bodies


def test_acceptance_02_holder_zero_tolerance():
    t0 = time.time()
    rng = random.Random(2026)
    ok = True
    for i in range(200):
        n = 3 if i % 5 == 0 else 2
        K = random_body_with_projection(rng, n)
        dist = projection_distribution(K)
        roots = [float(moment(dist, p).root) for p in P_GRID]
        for a, b in zip(roots, roots[1:]):
            ok &= a <= b
        # integer exponents rechecked in exact rational arithmetic
        for p, q in ((1, 2), (2, 4), (4, 8), (1, 8)):
            rp, rq = moment(dist, p).raw, moment(dist, q).raw
            ok &= F(rp) ** q <= F(rq) ** p
        if not ok:
            break
    report(2, "holder-lower-zero-tol", bool(ok), t0, 30.0)


# -------------------------------------------------------------------------
# 3. moment comparison constant <= 16 on the corpus


def test_acceptance_03_upper_constant_on_corpus():
    t0 = time.time()
    ok = True
    for name, K in default_corpus():
        for p, q in itertools.combinations_with_replacement(P_GRID, 2):
            rep = verify_discrete_borell(K, p, q)
            ok &= rep.passed and rep.implied_constant <= 16.0 + 1e-12
    report(3, "upper-constant-corpus", bool(ok), t0, 60.0)


# -------------------------------------------------------------------------
# 4. unbounded raw ratio vs bounded normalized ratio on the wedge family


def test_acceptance_04_wedge_ratio_growth():
    t0 = time.time()
    stats = {}
    ok = True
    for lam in (4, 64):
        dist = projection_distribution(counterexample_body(lam, 2))
        m1 = float(moment(dist, 1).root)
        m2 = float(moment(dist, 2).root)
        c = float(c0(counterexample_body(lam, 2), 1))
        stats[lam] = (m2 / m1, m2 / (2 * c * m1))
    ok &= stats[64][0] >= 2.0 * stats[4][0]
    ok &= all(norm <= 16.0 for _, norm in stats.values())
    report(4, "wedge-ratio-growth", bool(ok), t0, 30.0)


# -------------------------------------------------------------------------
# 5. discrete Brunn-Minkowski on 500 randomized triples


def test_acceptance_05_brunn_minkowski_500():
    t0 = time.time()
    rng = random.Random(55_2026)
    ok = True
    kinds = ("box", "ball", "vpoly")
    for i in range(500):
        n = 3 if i % 5 == 0 else 2
        K = random_body(rng, n, kinds)
        L = random_body(rng, n, kinds)
        lam = F(rng.randint(1, 9), 10)
        rep = verify_discrete_bm(K, L, lam)
        ok &= rep.passed
        if not ok:
            print("counterexample?", K.describe(), L.describe(), lam)
            break
    report(5, "brunn-minkowski-500", bool(ok), t0, 300.0)


# -------------------------------------------------------------------------
# 6. convergence of C0 under dilation


def test_acceptance_06_c0_convergence():
    t0 = time.time()
    ok = True
    for n, lams, final in ((2, (4, 8, 16, 64), 64), (3, (4, 8, 16), 16)):
        for p in (1, 2):
            gaps = [float(c0(Ball(lam, n), p)) - 1.0 for lam in lams]
            ok &= all(a >= b for a, b in zip(gaps, gaps[1:]))  # shrinking
            ok &= gaps[-1] <= 0.25
    report(6, "c0-dilation-convergence", bool(ok), t0, 120.0)


# -------------------------------------------------------------------------
# 7. counting measure vs volume and Riemann-sum moments at lam = 100


def test_acceptance_07_volume_and_moment_recovery():
    t0 = time.time()
    ok = True
    # |G(lam K)/lam^n - |K|| <= 0.05 |K| at lam = 100, n = 2
    count_box = enumerate_lattice(Box([100, 100])).count
    ok &= abs(count_box / 100 ** 2 - 4.0) <= 0.05 * 4.0
    count_ball = enumerate_lattice(Ball(100, 2)).count
    ok &= abs(count_ball / 100 ** 2 - math.pi) <= 0.05 * math.pi
    # scaled lattice moment vs continuous closed form (box, p = 2)
    d = projection_distribution(Box([100, 100]))
    scaled = float(moment(d, 2).root) / 100
    target = math.sqrt(1 / 3)
    ok &= abs(scaled - target) <= 0.01 * target
    report(7, "volume-moment-recovery", bool(ok), t0, 30.0)


# -------------------------------------------------------------------------
# 8. explicit shell and constant bounds


def test_acceptance_08_shell_and_c0_bounds():
    t0 = time.time()
    ok = True
    for r in (4, 8, 20):
        K = Ball(r, 2)
        for t in (F(1, 4), F(1, 2)):
            ok &= shell_count(K, t) <= lemma32_shell_bound(K, float(t))
        bound, shell = c0_upper_bound(K, 1)
        ok &= float(c0(K, 1)) <= bound and shell > 0
    try:
        c0_upper_bound(counterexample_body(10, 2), 1)
        ok = False
    except HypothesisError:
        pass
    report(8, "shell-and-c0-bounds", bool(ok), t0, 60.0)


# -------------------------------------------------------------------------
# 9. union-bound tails and the Paley-Zygmund chain on the corpus


def test_acceptance_09_tails_and_pz():
    t0 = time.time()
    ok = True
    for name, K in default_corpus():
        for a in (2, 4):
            for q in (1, 2):
                for N in (2, 8):
                    ok &= union_bound_tail_check(K, a, q, N).passed
        for p in (1, 2):
            ok &= paley_zygmund_check(K, p).passed
    report(9, "tails-and-paley-zygmund", bool(ok), t0, 30.0)


# -------------------------------------------------------------------------
# 10. discrete mean-width theorems


def test_acceptance_10_meanwidth_discrete():
    t0 = time.time()
    ok = True
    for K in (Box([2, 2]), Ball(2, 2), Ball(2, 3)):
        for N in (3, 8, 32):
            rep = verify_meanwidth_discrete(K, N, "upper", rotations=64, seed=11)
            ok &= rep.passed and rep.implied_constant <= 3 * math.e
    # lower theorem: q chosen so the precondition window is nonempty
    bc = cq_estimate(Ball(4, 2), 9, rotations=16, p_grid_size=6, seed=7)
    N = math.ceil((32.0 * bc.cq_estimate) ** 2)
    ok &= N <= math.exp(9)
    rep = verify_meanwidth_discrete(Ball(4, 2), N, "lower", q=9, rotations=64,
                                    seed=11, constants=bc)
    ok &= rep.passed and rep.implied_constant >= 0.1106
    report(10, "meanwidth-discrete", bool(ok), t0, 300.0)


# -------------------------------------------------------------------------
# 11 + 12. continuous sandwich and byte determinism


MEANWIDTH_CFG = {
    "experiment": "meanwidth",
    "sweeps": {"N": [8, 32, 128]},
    "budgets": {"point_samples": 10000, "direction_samples": 1000},
    "seed": 4,
}

_sandwich_cache = {}


def _run_sandwich(body_desc, threads=1):
    cfg = ExperimentConfig.from_dict(MEANWIDTH_CFG | {"body": body_desc})
    cfg.threads = threads
    return run_experiment(cfg)


def test_acceptance_11_meanwidth_sandwich():
    t0 = time.time()
    ok = True
    bodies = [
        {"variant": "Ball", "n": 2, "radius": 1},
        {"variant": "Box", "n": 2, "halfwidths": [1, 1]},
        {"variant": "Ball", "n": 3, "radius": 1},
    ]
    for desc in bodies:
        rows, passed = _run_sandwich(desc)
        _sandwich_cache[str(desc)] = report_lines(rows)
        ok &= passed
        trend = rows[-1]
        ok &= trend["in_band"] and trend["ew_monotone_3sigma"]
    report(11, "meanwidth-sandwich", bool(ok), t0, 600.0)


def test_acceptance_12_determinism():
    t0 = time.time()
    ok = True
    # item 1 experiment: exact path, rerun across thread counts
    e_cfg = {"experiment": "enumerate",
             "body": {"variant": "Box", "n": 2, "halfwidths": [2, 2]}}
    a, _ = run_experiment(ExperimentConfig.from_dict(e_cfg | {"threads": 1}))
    b, _ = run_experiment(ExperimentConfig.from_dict(e_cfg | {"threads": 4}))
    ok &= report_lines(a) == report_lines(b)
    # item 11 config: rerun one body with a different thread count
    desc = {"variant": "Ball", "n": 2, "radius": 1}
    rows, _ = _run_sandwich(desc, threads=4)
    first = _sandwich_cache.get(str(desc))
    if first is None:
        first = report_lines(_run_sandwich(desc)[0])
    ok &= report_lines(rows) == first
    report(12, "byte-determinism", bool(ok), t0, 600.0)
