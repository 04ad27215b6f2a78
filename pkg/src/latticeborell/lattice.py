"""Exact lattice point enumeration and the discrete statistics built on it.

``enumerate_lattice`` walks the integer bounding box of a body with per-slice
pruning for boxes and balls and a membership filter everywhere else; counts
are exact on rational data and near-boundary float hits are ledgered in
``ambiguous_count``.  ``ProjectionDistribution`` holds the exact law of
|<x, e_n>| over a point cloud, from which moments, tails and the expected
maximum of IID samples are computed in closed form.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .bodies import (
    BOUNDARY,
    INSIDE,
    Ball,
    Box,
    ConvexBody,
    GeometryError,
    Scaled,
    is_exact,
)

ENUMERATION_BUDGET = 10 ** 8


class BudgetExceededError(GeometryError):
    pass


class EmptyDistributionError(GeometryError):
    pass


@dataclass(frozen=True)
class LatticePointSet:
    """K intersected with Z^n, sorted lexicographically."""

    points: tuple
    ambiguous_count: int
    body_fingerprint: str

    @property
    def count(self) -> int:
        return len(self.points)

    def as_array(self) -> np.ndarray:
        return np.array(self.points, dtype=np.int64)

    def max_abs_projection(self, axis: int = -1) -> int:
        if not self.points:
            return 0
        return max(abs(p[axis]) for p in self.points)


def _int_floor(v) -> int:
    if is_exact(v):
        return math.floor(Fraction(v))
    return math.floor(float(v) + 1e-9)


def _int_ceil(v) -> int:
    if is_exact(v):
        return math.ceil(Fraction(v))
    return math.ceil(float(v) - 1e-9)


def _axis_ranges(body: ConvexBody):
    lo, hi = body.bounding_box()
    lo_i = [_int_ceil(v) for v in lo]
    hi_i = [_int_floor(v) for v in hi]
    return lo_i, hi_i


def _isqrt_frac(q) -> int:
    """floor(sqrt(q)) for a nonnegative rational q."""
    q = Fraction(q)
    b = math.isqrt(q.numerator // q.denominator)
    while Fraction((b + 1) * (b + 1)) <= q:
        b += 1
    while Fraction(b * b) > q:
        b -= 1
    return b


def _enumerate_ball(radius, n):
    """Integer points with sum x_i^2 <= radius^2, exact for rational radius."""
    if is_exact(radius):
        r2 = Fraction(radius) ** 2
    else:
        r2 = float(radius) ** 2 + 1e-9
    out = []

    def rec(prefix, remaining):
        k = len(prefix)
        if k == n:
            out.append(tuple(prefix))
            return
        bound = (
            _isqrt_frac(remaining)
            if isinstance(remaining, Fraction)
            else math.isqrt(max(int(remaining), 0))
        )
        for v in range(-bound, bound + 1):
            rec(prefix + [v], remaining - v * v)

    rec([], r2)
    out.sort()
    return out


def _enumerate_box(halfwidths):
    ranges = []
    for h in halfwidths:
        b = _int_floor(h)
        ranges.append(range(-b, b + 1))
    out = []

    def rec(prefix, depth):
        if depth == len(ranges):
            out.append(tuple(prefix))
            return
        for v in ranges[depth]:
            rec(prefix + [v], depth + 1)

    rec([], 0)
    return out


def enumerate_lattice(body: ConvexBody, tol: float = 1e-9,
                      budget: int = ENUMERATION_BUDGET) -> LatticePointSet:
    """All lattice points of the body, with the boundary-ambiguity ledger.

    Near-boundary hits (|margin| <= tol on float paths) count as inside for
    closed bodies and outside for open ones, and are tallied in
    ``ambiguous_count`` either way.
    """
    lo_i, hi_i = _axis_ranges(body)
    sizes = [hi - lo + 1 for lo, hi in zip(lo_i, hi_i)]
    if any(s <= 0 for s in sizes):
        return LatticePointSet((), 0, body.fingerprint())
    prod = 1
    for s in sizes:
        prod *= s
    if prod > budget:
        raise BudgetExceededError(
            f"bounding box holds {prod} candidates (budget {budget})")

    ambiguous = 0
    if isinstance(body, Ball):
        pts = _enumerate_ball(body.radius, body.n)
    elif isinstance(body, Box):
        pts = _enumerate_box(body.halfwidths)
    elif isinstance(body, Scaled) and isinstance(body.base, Ball):
        pts = _enumerate_ball(body.lam * body.base.radius, body.n)
    elif isinstance(body, Scaled) and isinstance(body.base, Box):
        pts = _enumerate_box([body.lam * h for h in body.base.halfwidths])
    else:
        open_body = body.open_boundary
        pts = []
        ranges = [range(lo, hi + 1) for lo, hi in zip(lo_i, hi_i)]

        def rec(prefix, depth):
            nonlocal ambiguous
            if depth == body.n:
                c = body.classify(tuple(prefix), tol)
                if c.label == INSIDE:
                    pts.append(tuple(prefix))
                elif c.label == BOUNDARY:
                    ambiguous += 1
                    if not open_body:
                        pts.append(tuple(prefix))
                return
            for v in ranges[depth]:
                rec(prefix + [v], depth + 1)

        rec([], 0)
        pts.sort()
    return LatticePointSet(tuple(pts), ambiguous, body.fingerprint())


_ENUM_CACHE: dict = {}
_ENUM_CACHE_LIMIT = 4096


def enumerate_cached(body: ConvexBody, tol: float = 1e-9) -> LatticePointSet:
    """Memoized enumeration keyed by the body fingerprint."""
    key = (body.fingerprint(), tol)
    hit = _ENUM_CACHE.get(key)
    if hit is None:
        hit = enumerate_lattice(body, tol)
        if len(_ENUM_CACHE) >= _ENUM_CACHE_LIMIT:
            _ENUM_CACHE.clear()
        _ENUM_CACHE[key] = hit
    return hit


# ---------------------------------------------------------------------------
# projection distribution


@dataclass(frozen=True)
class ProjectionDistribution:
    """Exact distribution of |<x, e_n>| over a finite point cloud."""

    values: tuple          # sorted distinct nonnegative values (ints if exact)
    counts: tuple          # positive ints, aligned with values
    total: int

    def __post_init__(self):
        if sum(self.counts) != self.total:
            raise ValueError("counts do not sum to total")

    @staticmethod
    def from_points(points, axis: int = -1) -> "ProjectionDistribution":
        if not len(points):
            raise EmptyDistributionError("no points")
        tally: dict = {}
        for p in points:
            v = abs(p[axis])
            tally[v] = tally.get(v, 0) + 1
        values = tuple(sorted(tally))
        counts = tuple(tally[v] for v in values)
        return ProjectionDistribution(values, counts, sum(counts))

    @staticmethod
    def from_point_set(ps: LatticePointSet, axis: int = -1) -> "ProjectionDistribution":
        return ProjectionDistribution.from_points(ps.points, axis)

    @property
    def exact(self) -> bool:
        return all(is_exact(v) for v in self.values)

    def cdf(self):
        """F(v_j) as exact fractions of the total."""
        acc, out = 0, []
        for c in self.counts:
            acc += c
            out.append(Fraction(acc, self.total))
        return out

    def max_value(self):
        return self.values[-1]

    def to_json(self) -> str:
        return json.dumps({"values": [int(v) if is_exact(v) else float(v)
                                      for v in self.values],
                           "counts": list(self.counts)})

    @staticmethod
    def from_json(text: str) -> "ProjectionDistribution":
        d = json.loads(text)
        return ProjectionDistribution(tuple(d["values"]), tuple(d["counts"]),
                                      sum(d["counts"]))


class MomentResult(tuple):
    """(raw, root) pair: raw = E|v|^p, root = raw^(1/p)."""

    __slots__ = ()

    def __new__(cls, raw, root):
        return tuple.__new__(cls, (raw, root))

    @property
    def raw(self):
        return self[0]

    @property
    def root(self):
        return self[1]


def moment(dist: ProjectionDistribution, p) -> MomentResult:
    """p-th absolute moment of the projection law and its p-th root.

    Exact rational ``raw`` for integer p on exact clouds; the root is exact
    only at p = 1.  Float powers use compensated summation.
    """
    if dist.total < 1:
        raise EmptyDistributionError("empty distribution")
    pf = float(p)
    if pf < 1:
        raise ValueError("p must be >= 1")
    integer_p = float(p) == int(p)
    if dist.exact and integer_p:
        ip = int(p)
        raw = Fraction(sum(c * Fraction(v) ** ip
                           for v, c in zip(dist.values, dist.counts)), dist.total)
        if ip == 1:
            return MomentResult(raw, raw)
        return MomentResult(raw, float(raw) ** (1.0 / ip))
    raw = math.fsum(c * abs(float(v)) ** pf
                    for v, c in zip(dist.values, dist.counts)) / dist.total
    return MomentResult(raw, raw ** (1.0 / pf))


def expected_max(dist: ProjectionDistribution, N: int):
    """Exact E[max of N IID draws] via the CDF-power formula.

    Equals the average of max|v_i| over all total^N ordered tuples:
    sum_j v_j (F_j^N - F_{j-1}^N).  Rational arithmetic for moderate N on
    exact clouds, floats otherwise.
    """
    if dist.total < 1:
        raise EmptyDistributionError("empty distribution")
    if N < 1:
        raise ValueError("N must be a positive integer")
    use_exact = dist.exact and N <= 64
    if use_exact:
        acc = Fraction(0)
        prev = Fraction(0)
        cum = 0
        for v, c in zip(dist.values, dist.counts):
            cum += c
            cur = Fraction(cum, dist.total) ** N
            acc += Fraction(v) * (cur - prev)
            prev = cur
        return acc
    acc = 0.0
    prev = 0.0
    cum = 0
    for v, c in zip(dist.values, dist.counts):
        cum += c
        cur = (cum / dist.total) ** N
        acc += float(v) * (cur - prev)
        prev = cur
    return acc


def tail(dist: ProjectionDistribution, t):
    """P(|v| >= t), exactly from the counts (right-continuous, strict '>=')."""
    if dist.total < 1:
        raise EmptyDistributionError("empty distribution")
    hits = sum(c for v, c in zip(dist.values, dist.counts) if v >= t)
    if dist.exact and is_exact(t):
        return Fraction(hits, dist.total)
    return hits / dist.total


def projection_distribution(body: ConvexBody, axis: int = -1,
                            tol: float = 1e-9) -> ProjectionDistribution:
    """Enumerate the body and project onto the given axis."""
    ps = enumerate_cached(body, tol)
    if ps.count == 0:
        raise EmptyDistributionError("body contains no lattice points")
    return ProjectionDistribution.from_point_set(ps, axis)


def write_points_csv(ps: LatticePointSet, path) -> None:
    """One integer vector per row."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for p in ps.points:
            writer.writerow(p)
