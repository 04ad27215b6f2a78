"""The default body corpus used by experiments, demos and the test suite."""

from __future__ import annotations

from fractions import Fraction

from .bodies import Ball, Box, ConvexBody, VPolytope, counterexample_body


def cross_polytope(n: int, scale=1) -> VPolytope:
    """conv{+-scale e_i}."""
    verts = []
    for i in range(n):
        for s in (1, -1):
            v = [0] * n
            v[i] = s * scale
            verts.append(tuple(v))
    return VPolytope(verts)


def default_corpus() -> list:
    """(name, body) pairs covering every worked example."""
    return [
        ("box2", Box([2, 2])),
        ("ball2", Ball(2, 2)),
        ("ball1_3", Ball(1, 3)),
        ("cross2", cross_polytope(2, 2)),
        ("cross3", cross_polytope(3, 2)),
        ("wedge4", counterexample_body(4, 2)),
        ("wedge16", counterexample_body(16, 2)),
        ("wedge64", counterexample_body(64, 2)),
    ]


def corpus_body(name: str) -> ConvexBody:
    for key, body in default_corpus():
        if key == name:
            return body
    raise KeyError(name)
