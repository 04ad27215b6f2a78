import math
from fractions import Fraction as F

import numpy as np
import pytest
from scipy.optimize import brentq

from latticeborell import (
    Ball,
    Box,
    Rotated,
    Rotation,
    RngStream,
    centroid_support,
    floating_body_support,
    haar_rotation,
    mean_width_centroid,
    random_polytope_mean_width,
    uniform_in_body,
    uniform_points,
)
from latticeborell.corpus import cross_polytope
from latticeborell.sampling import ZeroBudgetError, sphere_directions


# ---------------------------------------------------------------- haar

def test_haar_orthogonality_and_determinism():
    r = RngStream(42, 7)
    U1, U2 = haar_rotation(r, 3), haar_rotation(r, 3)
    A = U1.as_array()
    assert np.max(np.abs(A.T @ A - np.eye(3))) <= 1e-12
    assert np.array_equal(A, U2.as_array())


def test_haar_first_entry_mean():
    root = RngStream(123)
    vals = [haar_rotation(root.substream(i), 3).as_array()[0, 0]
            for i in range(10000)]
    assert -0.03 <= float(np.mean(vals)) <= 0.03


def test_haar_left_invariance_statistic():
    # <U e1, e1> and <(VU) e1, e1> should match in distribution: compare
    # first-entry second moments (= 1/n for Haar) under a fixed V
    root = RngStream(321)
    V = haar_rotation(RngStream(777), 3).as_array()
    plain, shifted = [], []
    for i in range(4000):
        U = haar_rotation(root.substream(i), 3).as_array()
        plain.append(U[0, 0] ** 2)
        shifted.append((V @ U)[0, 0] ** 2)
    assert abs(np.mean(plain) - 1 / 3) < 0.02
    assert abs(np.mean(shifted) - 1 / 3) < 0.02


# ---------------------------------------------------------------- uniform

def test_uniform_box_means():
    pts = uniform_points(Box([1, 1]), RngStream(5), 10000)
    assert np.all(np.abs(pts.mean(axis=0)) < 0.02)


def test_uniform_points_classify_inside():
    for K in (Box([1, 1]), Ball(1, 2), cross_polytope(2)):
        pts = uniform_points(K, RngStream(8), 200)
        assert all(K.classify(tuple(p)).inside for p in pts)


def test_uniform_ball_radial_fraction():
    pts = uniform_points(Ball(1, 2), RngStream(6), 10000)
    frac = float(np.mean(np.linalg.norm(pts, axis=1) <= 0.5))
    assert abs(frac - 0.25) <= 0.02


def test_uniform_single_point_api():
    p = uniform_in_body(Ball(1, 2), RngStream(31))
    assert Ball(1, 2).classify(p).inside


def test_uniform_bitwise_reproducible():
    a = uniform_points(Ball(1, 3), RngStream(9, 4), 500)
    b = uniform_points(Ball(1, 3), RngStream(9, 4), 500)
    assert np.array_equal(a, b)


def test_hit_and_run_fallback_on_needle():
    # rotated needle: bounding-box acceptance is ~2e-4, forcing the chain
    c, s = math.cos(math.pi / 4), math.sin(math.pi / 4)
    U = Rotation(((c, -s), (s, c)), "user")
    needle = Rotated(U, Box([50.0, 0.01]))
    pts = uniform_points(needle, RngStream(44), 200)
    assert all(needle.classify(tuple(p)).inside for p in pts)
    # mass balances around the origin along the needle direction
    proj = pts @ np.array([c, s])
    assert abs(np.mean(proj)) < 10.0


# ----------------------------------------------------- random polytopes

def test_mean_width_K1_ball_closed_form():
    est = random_polytope_mean_width(Ball(1, 2), 1, 600, 400, RngStream(9))
    target = (2 / 3) * (2 / math.pi)
    assert abs(est.value - target) <= 3 * est.stderr


def test_mean_width_monotone_in_N():
    e1 = random_polytope_mean_width(Box([1, 1]), 1, 300, 300, RngStream(10))
    e2 = random_polytope_mean_width(Box([1, 1]), 2, 300, 300, RngStream(11))
    assert e2.value >= e1.value - 3 * (e1.stderr + e2.stderr)


def test_mean_width_large_N_approaches_body_width_from_below():
    # w(Box(1)^2) = (4/pi) * E (|cos| + |sin|) ... just check K_N stays inside
    est = random_polytope_mean_width(Box([1, 1]), 256, 40, 400, RngStream(12))
    w_box = 8 / math.pi  # mean width of the unit square's hull: perimeter/pi
    assert est.value <= w_box + 3 * est.stderr
    small = random_polytope_mean_width(Box([1, 1]), 4, 40, 400, RngStream(13))
    assert small.value < est.value


def test_mean_width_rejects_zero_budget():
    with pytest.raises(ZeroBudgetError):
        random_polytope_mean_width(Ball(1, 2), 0, 1, 1, RngStream(1))


# ------------------------------------------------------ centroid bodies

def test_centroid_support_box_p2():
    got = centroid_support(Box([1, 1]), 2, (0, 1), method="mc",
                           samples=60000, rng=RngStream(11))
    assert abs(got - math.sqrt(1 / 3)) < 0.01


def test_centroid_support_large_p_approaches_support():
    got = centroid_support(Box([1, 1]), 64, (0, 1), method="mc",
                           samples=60000, rng=RngStream(12))
    assert 0.85 < got < 1.0


def test_centroid_support_ball_p1_quadrature_oracle():
    from scipy import integrate

    # E|y| over the unit disk via the polar integral
    num, _ = integrate.quad(lambda t: abs(t) * 2 * math.sqrt(1 - t * t), -1, 1)
    target = num / math.pi
    got = centroid_support(Ball(1, 2), 1, (1, 0), method="mc",
                           samples=60000, rng=RngStream(13))
    assert abs(got - target) < 0.01
    assert abs(target - 4 / (3 * math.pi)) < 1e-9


def test_centroid_lattice_method_deterministic_and_cauchy():
    vals = [centroid_support(Box([1, 1]), 2, (0, 1), method="lattice", lam=lam)
            for lam in (25, 50, 100)]
    again = centroid_support(Box([1, 1]), 2, (0, 1), method="lattice", lam=25)
    assert vals[0] == again
    d1 = abs(vals[1] - vals[0])
    d2 = abs(vals[2] - vals[1])
    assert d2 < d1
    assert abs(vals[2] - math.sqrt(1 / 3)) < 0.01


def test_centroid_methods_agree():
    lat = centroid_support(Ball(1, 2), 1, (1, 0), method="lattice", lam=100)
    mc = centroid_support(Ball(1, 2), 1, (1, 0), method="mc",
                          samples=60000, rng=RngStream(14))
    assert abs(lat - mc) < 0.02


def test_mean_width_centroid_ball():
    est = mean_width_centroid(Ball(1, 2), 1, 200, RngStream(31), 20000)
    assert abs(est.value - 4 / (3 * math.pi)) <= 3 * est.stderr


def test_mean_width_centroid_box_between_extremes():
    est = mean_width_centroid(Box([1, 1]), 2, 300, RngStream(32), 20000)
    axis = centroid_support(Box([1, 1]), 2, (0, 1), method="lattice", lam=100)
    diag = centroid_support(Box([1, 1]), 2,
                            (1 / math.sqrt(2), 1 / math.sqrt(2)),
                            method="lattice", lam=100)
    lo, hi = min(axis, diag), max(axis, diag)
    assert lo - 0.01 <= est.value <= hi + 0.01


def test_mean_width_centroid_deterministic():
    a = mean_width_centroid(Box([1, 1]), 2, 50, RngStream(7), 2000)
    b = mean_width_centroid(Box([1, 1]), 2, 50, RngStream(7), 2000)
    assert a == b


# ------------------------------------------------------- floating bodies

def test_floating_body_box():
    got = floating_body_support(Box([1, 1]), 0.25, (0, 1), 100000, RngStream(21))
    assert abs(got - 0.75) < 0.02


def test_floating_body_quantile_collapse():
    got = floating_body_support(Box([1, 1]), 0.999, (0, 1), 50000, RngStream(22))
    assert got < 0.01


def test_floating_body_ball_marginal_oracle():
    tstar = brentq(
        lambda t: (2 / math.pi) * (t * math.sqrt(1 - t * t) + math.asin(t)) - 0.5,
        0.0, 1.0)
    got = floating_body_support(Ball(1, 2), 0.5, (0, 1), 100000, RngStream(23))
    assert abs(got - tstar) < 0.02


def test_floating_centroid_sandwich_band():
    # h_{K_delta} / h_{Z_{log(1/delta)}} stays within a wide universal band
    bodies = [Ball(1, 2), Box([1, 1]), cross_polytope(2)]
    dirs = [(1, 0), (0, 1), (1 / math.sqrt(2), 1 / math.sqrt(2))]
    k = 0
    for K in bodies:
        for delta in (1 / 8, 1 / 32):
            p = math.log(1 / delta)
            for th in dirs:
                fb = floating_body_support(K, delta, th, 20000, RngStream(50, k))
                zs = centroid_support(K, p, th, method="mc", samples=20000,
                                      rng=RngStream(51, k))
                assert 0.05 <= fb / zs <= 20.0
                k += 1


def test_sphere_directions_are_unit():
    d = sphere_directions(RngStream(3), 4, 100)
    assert np.allclose(np.linalg.norm(d, axis=1), 1.0)
