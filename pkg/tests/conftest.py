"""Shared generators for randomized geometry tests (seeded, reproducible)."""

import random
from fractions import Fraction

import pytest

from latticeborell import Ball, Box, HPolytope, VPolytope, projection_distribution
from latticeborell.lattice import enumerate_lattice


def rational(rng, lo=1, hi=8, den=4):
    return Fraction(rng.randint(lo * den, hi * den), den)


def random_box(rng, n=2):
    return Box([rational(rng, 1, 3) for _ in range(n)])


def random_ball(rng, n=2):
    return Ball(rational(rng, 1, 3), n)


def random_vpolytope(rng, n=2, points=4):
    """Symmetric hull of random rational points: always has 0 interior."""
    while True:
        half = [tuple(Fraction(rng.randint(-10, 10), rng.randint(1, 3))
                      for _ in range(n)) for _ in range(points)]
        verts = half + [tuple(-c for c in v) for v in half]
        body = VPolytope(verts)
        if body.origin_interior():
            return body


def random_hpolytope(rng, n=2):
    """Bounded rational H-polytope with 0 strictly inside."""
    rows = [[0] * n for _ in range(2 * n)]
    b = []
    for i in range(n):
        rows[2 * i][i] = 1
        rows[2 * i + 1][i] = -1
        bound = rational(rng, 1, 3)
        b.extend([bound, bound])
    for _ in range(rng.randint(1, 3)):
        row = [rng.randint(-2, 2) for _ in range(n)]
        if all(v == 0 for v in row):
            continue
        rows.append(row)
        b.append(rational(rng, 2, 6))
    return HPolytope(rows, b)


BODY_MAKERS = {
    "box": random_box,
    "ball": random_ball,
    "vpoly": random_vpolytope,
    "hpoly": random_hpolytope,
}


def random_body(rng, n=2, kinds=("box", "ball", "vpoly", "hpoly")):
    kind = rng.choice(list(kinds))
    return BODY_MAKERS[kind](rng, n)


def random_body_with_projection(rng, n=2, kinds=("box", "ball", "vpoly", "hpoly")):
    """A random rational body whose lattice cloud reaches |x_n| >= 1."""
    while True:
        body = random_body(rng, n, kinds)
        ps = enumerate_lattice(body)
        if ps.count and ps.max_abs_projection() >= 1:
            return body


@pytest.fixture
def rng():
    return random.Random(20260810)
