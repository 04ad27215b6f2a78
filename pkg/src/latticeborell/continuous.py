"""Continuous reference quantities: volumes, ball-fattened volumes, moments.

These back the convergence experiments (lattice counts vs. volume, scaled
lattice moments vs. integrals) and the explicit shell/constant bounds.  Exact
closed forms exist for boxes and balls in any dimension and for planar
polytopes; everything else gets a certified circumball upper bound, which is
the safe direction for every place a volume enters those bounds.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations

import numpy as np
from scipy import integrate

from .bodies import (
    Ball,
    Box,
    Combination,
    ConvexBody,
    CubeSum,
    GeometryError,
    Rotated,
    Scaled,
    VPolytope,
    radii,
)
from .lp import solve_lp


def unit_ball_volume(n: int) -> float:
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1)


def volume(K: ConvexBody) -> float:
    """Exact volume where a closed form or hull is available."""
    if isinstance(K, Ball):
        return unit_ball_volume(K.n) * float(K.radius) ** K.n
    if isinstance(K, Box):
        out = 1.0
        for h in K.halfwidths:
            out *= 2.0 * float(h)
        return out
    if isinstance(K, VPolytope):
        from scipy.spatial import ConvexHull

        pts = np.array([[float(c) for c in v] for v in K.vertices])
        return float(ConvexHull(pts).volume)
    if isinstance(K, Scaled):
        return float(K.lam) ** K.n * volume(K.base)
    if isinstance(K, Rotated):
        return volume(K.base)
    raise GeometryError(f"no exact volume for {K.variant}")


def volume_upper(K: ConvexBody) -> float:
    """Volume, or the circumball volume when no exact form exists."""
    try:
        return volume(K)
    except GeometryError:
        _, R = radii(K)
        return unit_ball_volume(K.n) * float(R) ** K.n


def ball_sum_volume(K: ConvexBody, s: float) -> float:
    """|K + s B_2^n| via Steiner-type formulas (exact for Ball/Box/planar)."""
    s = float(s)
    n = K.n
    if isinstance(K, Ball):
        return unit_ball_volume(n) * (float(K.radius) + s) ** n
    if isinstance(K, Box):
        sides = [2.0 * float(h) for h in K.halfwidths]
        total = 0.0
        for k in range(n + 1):
            ek = sum(math.prod(c) for c in combinations(sides, k)) if k else 1.0
            total += ek * unit_ball_volume(n - k) * s ** (n - k)
        return total
    if isinstance(K, VPolytope) and n == 2:
        from scipy.spatial import ConvexHull

        pts = np.array([[float(c) for c in v] for v in K.vertices])
        hull = ConvexHull(pts)
        area = float(hull.volume)
        per = float(hull.area)
        return area + per * s + math.pi * s * s
    if isinstance(K, Scaled):
        lam = float(K.lam)
        return lam ** n * ball_sum_volume(K.base, s / lam)
    if isinstance(K, Rotated):
        return ball_sum_volume(K.base, s)
    raise GeometryError(f"no exact fattened volume for {K.variant}")


def ball_sum_volume_upper(K: ConvexBody, s: float) -> float:
    try:
        return ball_sum_volume(K, s)
    except GeometryError:
        _, R = radii(K)
        return unit_ball_volume(K.n) * (float(R) + float(s)) ** K.n


def axis_moment(K: ConvexBody, p: float) -> float:
    """E|<X, e_n>|^p)^(1/p) for X uniform on K (the last-axis marginal).

    Closed forms for boxes and balls in any dimension; planar polytopes via
    slice-width quadrature.
    """
    p = float(p)
    if isinstance(K, Box):
        h = float(K.halfwidths[-1])
        return h * (1.0 / (p + 1.0)) ** (1.0 / p)
    if isinstance(K, Ball):
        # density of the marginal is proportional to (r^2 - t^2)^((n-1)/2)
        n, r = K.n, float(K.radius)
        num = _beta((p + 1) / 2.0, (n + 1) / 2.0)
        den = _beta(0.5, (n + 1) / 2.0)
        return r * (num / den) ** (1.0 / p)
    if isinstance(K, Scaled):
        return float(K.lam) * axis_moment(K.base, p)
    if isinstance(K, VPolytope) and K.n == 2:
        lo = -float(K.support((0, -1)))
        hi = float(K.support((0, 1)))

        def width(t):
            return _slice_width(K, t)

        den, _ = integrate.quad(width, lo, hi, limit=200)
        num, _ = integrate.quad(lambda t: abs(t) ** p * width(t), lo, hi, limit=200)
        return (num / den) ** (1.0 / p)
    raise GeometryError(f"no continuous moment for {K.variant}")


def _beta(a: float, b: float) -> float:
    return math.gamma(a) * math.gamma(b) / math.gamma(a + b)


def _slice_width(K: VPolytope, t: float) -> float:
    """Length of the horizontal slice {x : (x, t) in K} for a planar polytope."""
    m = len(K.vertices)
    A_eq = [[float(v[1]) for v in K.vertices]]
    b_eq = [t]
    A_eq.append([1.0] * m)
    b_eq.append(1.0)
    cx = [float(v[0]) for v in K.vertices]
    try:
        _, vmin = solve_lp(cx, A_eq=A_eq, b_eq=b_eq)
        _, vmax = solve_lp([-c for c in cx], A_eq=A_eq, b_eq=b_eq)
    except Exception:
        return 0.0
    return max(-vmax - vmin, 0.0)
