"""Convex body variants with support functions, membership tests and distances.

Bodies are immutable trees built from a few primitives (box, Euclidean ball,
H-polytope, V-polytope) and transforms (rotation, dilation, fattening by the
open unit cube, Minkowski combination).  Every variant supports:

* ``support(theta)``  -- the support function h_K(theta),
* ``classify(x, tol)`` -- inside/outside/boundary with a signed margin,
* ``linf_distance(x)`` -- the sup-norm distance to the (closure of the) body.

Rational data is kept exact (``fractions.Fraction``) whenever no irrational
rotation or scale intervenes, so lattice counts never suffer from float
round-off at closed boundaries.  Float paths flag near-boundary queries as
``boundary`` so callers can ledger them.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .lp import LPInfeasible, LPUnbounded, solve_lp

DEFAULT_TOL = 1e-9

INSIDE = "inside"
OUTSIDE = "outside"
BOUNDARY = "boundary"


class GeometryError(Exception):
    """Base class for geometric failures."""


class ZeroDirectionError(GeometryError):
    pass


class UnboundedBodyError(GeometryError):
    pass


class OriginOutsideError(GeometryError):
    pass


class MalformedBodyError(GeometryError):
    """Signalled when a body's LP representation is infeasible."""


# ---------------------------------------------------------------------------
# numbers: exact rationals where possible, floats otherwise


def as_number(v):
    """Coerce a scalar to int/Fraction (exact) or float."""
    if isinstance(v, bool):
        raise TypeError("boolean is not a coordinate")
    if isinstance(v, (int, Fraction)):
        return v
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, float):
        return v
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    raise TypeError(f"unsupported numeric type {type(v)!r}")


def is_exact(v) -> bool:
    return isinstance(v, (int, Fraction))


def all_exact(values) -> bool:
    return all(is_exact(v) for v in values)


def _sqrt_if_square(q: Fraction):
    """Exact square root of a nonnegative rational if it is a perfect square."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("negative radicand")
    pn = math.isqrt(q.numerator)
    pd = math.isqrt(q.denominator)
    if pn * pn == q.numerator and pd * pd == q.denominator:
        return Fraction(pn, pd)
    return None


def _norm2(theta):
    s = sum(t * t for t in theta)
    if all_exact(theta):
        r = _sqrt_if_square(Fraction(s))
        if r is not None:
            return r
    return math.sqrt(float(s))


def _norm1(theta):
    return sum(abs(t) for t in theta)


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


# ---------------------------------------------------------------------------
# rotations


def _as_matrix_tuple(U):
    return tuple(tuple(as_number(v) for v in row) for row in U)


@dataclass(frozen=True)
class Rotation:
    """An orthogonal matrix with provenance, validated at construction."""

    matrix: tuple
    provenance: str = "user"

    def __post_init__(self):
        M = _as_matrix_tuple(self.matrix)
        object.__setattr__(self, "matrix", M)
        A = self.as_array()
        n = A.shape[0]
        if A.shape != (n, n):
            raise ValueError("rotation matrix must be square")
        err = np.max(np.abs(A.T @ A - np.eye(n)))
        if err > 1e-12:
            raise ValueError(f"matrix is not orthogonal (|U^T U - I| = {err:.3e})")
        det = np.linalg.det(A)
        if abs(abs(det) - 1.0) > 1e-10:
            raise ValueError(f"|det U| = {abs(det):.12f} != 1")

    @property
    def n(self) -> int:
        return len(self.matrix)

    def as_array(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.matrix])

    @property
    def exact(self) -> bool:
        return all(is_exact(v) for row in self.matrix for v in row)

    def apply(self, x):
        """U x."""
        return tuple(_dot(row, x) for row in self.matrix)

    def apply_transpose(self, x):
        """U^T x."""
        n = self.n
        return tuple(
            sum(self.matrix[i][j] * x[i] for i in range(n)) for j in range(n)
        )

    @staticmethod
    def identity(n: int) -> "Rotation":
        return Rotation(tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)), "identity")

    @staticmethod
    def signed_permutation(perm, signs) -> "Rotation":
        n = len(perm)
        if sorted(perm) != list(range(n)):
            raise ValueError("not a permutation")
        M = [[0] * n for _ in range(n)]
        for i, (p, s) in enumerate(zip(perm, signs)):
            if s not in (1, -1):
                raise ValueError("signs must be +-1")
            M[i][p] = s
        return Rotation(tuple(tuple(r) for r in M), "signed-permutation")

    @staticmethod
    def from_array(U: np.ndarray, provenance: str = "user") -> "Rotation":
        return Rotation(tuple(tuple(float(v) for v in row) for row in U), provenance)


# ---------------------------------------------------------------------------
# classification result


@dataclass(frozen=True)
class Classification:
    """Membership verdict with a signed margin (positive inside)."""

    label: str
    margin: float

    @property
    def inside(self) -> bool:
        return self.label == INSIDE

    @property
    def outside(self) -> bool:
        return self.label == OUTSIDE

    @property
    def ambiguous(self) -> bool:
        return self.label == BOUNDARY


def _band(margin, tol, exact: bool, open_boundary: bool = False) -> Classification:
    """Turn a signed margin into a Classification.

    In the exact path the sign is authoritative: closed bodies keep their
    boundary (margin 0 -> inside), open ones exclude it.
    """
    m = float(margin)
    if exact:
        if open_boundary:
            return Classification(INSIDE if margin > 0 else OUTSIDE, m)
        return Classification(INSIDE if margin >= 0 else OUTSIDE, m)
    if margin > tol:
        return Classification(INSIDE, m)
    if margin < -tol:
        return Classification(OUTSIDE, m)
    return Classification(BOUNDARY, m)


# ---------------------------------------------------------------------------
# the body variants


class ConvexBody:
    """Base class; subclasses implement the variant-specific geometry."""

    n: int
    variant: str = "?"

    # -- contracts -----------------------------------------------------
    def support(self, theta):
        """h_K(theta) = sup_{x in K} <x, theta>.

        Exact (Fraction) when body data and theta are rational and the value
        itself is rational; float otherwise.  For open variants this is the
        support of the closure.
        """
        theta = tuple(as_number(t) for t in theta)
        if len(theta) != self.n:
            raise ValueError("direction dimension mismatch")
        if all(t == 0 for t in theta):
            raise ZeroDirectionError("support direction must be nonzero")
        return self._support(theta)

    def classify(self, x, tol: float = DEFAULT_TOL) -> Classification:
        if tol <= 0:
            raise ValueError("tol must be positive")
        x = tuple(as_number(v) for v in x)
        if len(x) != self.n:
            raise ValueError("point dimension mismatch")
        return self._classify(x, tol)

    def linf_distance(self, x):
        """min_{y in cl K} ||x - y||_inf (0 iff x lies in the closure)."""
        x = tuple(as_number(v) for v in x)
        if len(x) != self.n:
            raise ValueError("point dimension mismatch")
        return self._linf_distance(x)

    # -- shared helpers -------------------------------------------------
    @property
    def exact(self) -> bool:
        raise NotImplementedError

    @property
    def open_boundary(self) -> bool:
        return False

    def origin_interior(self) -> bool:
        """Whether 0 lies in the interior, recorded at construction time."""
        raise NotImplementedError

    def describe(self) -> dict:
        raise NotImplementedError

    def fingerprint(self) -> str:
        blob = json.dumps(self.describe(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha1(blob.encode()).hexdigest()

    def bounding_box(self):
        """Per-axis integer-friendly bounds [-h(-e_i), h(e_i)]."""
        lo, hi = [], []
        for i in range(self.n):
            e = tuple(1 if j == i else 0 for j in range(self.n))
            ne = tuple(-v for v in e)
            hi.append(self.support(e))
            lo.append(-self.support(ne))
        return lo, hi

    def __repr__(self):
        return f"<{type(self).__name__} n={self.n}>"


def _fmt(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else int(v)
    return v


class Box(ConvexBody):
    """Axis-aligned box prod_i [-h_i, h_i]."""

    variant = "Box"

    def __init__(self, halfwidths):
        if isinstance(halfwidths, (int, float, Fraction, str)):
            raise TypeError("halfwidths must be a sequence, one per axis")
        self.halfwidths = tuple(as_number(h) for h in halfwidths)
        if any((h if is_exact(h) else float(h)) <= 0 for h in self.halfwidths):
            raise ValueError("halfwidths must be positive")
        self.n = len(self.halfwidths)

    @property
    def exact(self) -> bool:
        return all_exact(self.halfwidths)

    def origin_interior(self) -> bool:
        return True

    def _support(self, theta):
        return sum(h * abs(t) for h, t in zip(self.halfwidths, theta))

    def _classify(self, x, tol):
        margin = min(h - abs(v) for h, v in zip(self.halfwidths, x))
        exact = self.exact and all_exact(x)
        return _band(margin, tol, exact)

    def _linf_distance(self, x):
        d = max(max(abs(v) - h, 0) for h, v in zip(self.halfwidths, x))
        return d

    def describe(self):
        return {"variant": "Box", "n": self.n,
                "halfwidths": [_fmt(h) for h in self.halfwidths]}


class Ball(ConvexBody):
    """Euclidean ball of given radius centered at the origin."""

    variant = "Ball"

    def __init__(self, radius, n: int):
        self.radius = as_number(radius)
        if (self.radius if is_exact(self.radius) else float(self.radius)) <= 0:
            raise ValueError("radius must be positive")
        if n < 1:
            raise ValueError("dimension must be >= 1")
        self.n = n

    @property
    def exact(self) -> bool:
        return is_exact(self.radius)

    def origin_interior(self) -> bool:
        return True

    def _support(self, theta):
        return self.radius * _norm2(theta)

    def _classify(self, x, tol):
        if self.exact and all_exact(x):
            gap = Fraction(self.radius) ** 2 - sum(Fraction(v) ** 2 for v in x)
            margin = float(self.radius) - math.sqrt(float(sum(v * v for v in x)))
            return Classification(INSIDE if gap >= 0 else OUTSIDE, margin)
        margin = float(self.radius) - math.sqrt(float(sum(v * v for v in x)))
        return _band(margin, tol, exact=False)

    def _linf_distance(self, x):
        return _linf_to_ball(x, self.radius)

    def describe(self):
        return {"variant": "Ball", "n": self.n, "radius": _fmt(self.radius)}


def _linf_to_ball(x, radius):
    """Sup-norm distance from x to the Euclidean ball of given radius.

    Solves min t with sum_i max(|x_i| - t, 0)^2 <= radius^2 by walking the
    breakpoints of the piecewise-quadratic left side.
    """
    a = sorted((abs(float(v)) for v in x), reverse=True)
    r2 = float(radius) ** 2
    if sum(v * v for v in a) <= r2:
        return 0 if all_exact(x) and is_exact(radius) and sum(
            Fraction(v) ** 2 for v in x) <= Fraction(radius) ** 2 else 0.0
    n = len(a)
    # On [a_{k+1}, a_k] exactly the k largest coordinates stay clamped.
    for k in range(1, n + 1):
        s1 = sum(a[:k])
        s2 = sum(v * v for v in a[:k])
        # solve sum_{i<k} (a_i - t)^2 = r2  ->  k t^2 - 2 s1 t + (s2 - r2) = 0
        disc = s1 * s1 - k * (s2 - r2)
        if disc < 0:
            continue
        t = (s1 - math.sqrt(disc)) / k
        lo = a[k] if k < n else 0.0
        if lo - 1e-12 <= t <= a[k - 1] + 1e-12:
            return max(t, 0.0)
    return max(a[0] - float(radius), 0.0)


class HPolytope(ConvexBody):
    """Intersection of halfspaces A x <= b."""

    variant = "HPolytope"

    def __init__(self, A, b):
        self.A = tuple(tuple(as_number(v) for v in row) for row in A)
        self.b = tuple(as_number(v) for v in b)
        if not self.A:
            raise ValueError("empty constraint system")
        self.n = len(self.A[0])
        if any(len(row) != self.n for row in self.A) or len(self.b) != len(self.A):
            raise ValueError("inconsistent constraint shapes")

    @property
    def exact(self) -> bool:
        return all_exact(self.b) and all(all_exact(r) for r in self.A)

    def origin_interior(self) -> bool:
        return all(bi > 0 for bi in self.b)

    def _support(self, theta):
        c = [-t for t in theta]
        try:
            _, v = solve_lp(c, A_ub=self.A, b_ub=self.b, free=range(self.n))
        except LPUnbounded:
            raise UnboundedBodyError("support unbounded in this direction")
        except LPInfeasible:
            raise MalformedBodyError("empty H-polytope")
        return -v

    def _classify(self, x, tol):
        slacks = [bi - _dot(row, x) for row, bi in zip(self.A, self.b)]
        margin = min(
            float(s) / math.sqrt(float(sum(v * v for v in row)))
            for s, row in zip(slacks, self.A)
        )
        if self.exact and all_exact(x):
            worst = min(slacks)
            return Classification(INSIDE if worst >= 0 else OUTSIDE, margin)
        return _band(margin, tol, exact=False)

    def _linf_distance(self, x):
        return _linf_distance_lp([_HRep(self.A, self.b)], x)

    def describe(self):
        return {"variant": "HPolytope", "n": self.n,
                "A": [[_fmt(v) for v in row] for row in self.A],
                "b": [_fmt(v) for v in self.b]}


class VPolytope(ConvexBody):
    """Convex hull of a finite vertex list (membership via LP feasibility).

    A cached float hull only screens points far from the boundary (beyond a
    band many orders wider than its round-off); anything near the boundary is
    decided by the LP on the vertex representation itself.
    """

    variant = "VPolytope"

    _SCREEN_BAND = 1e-6

    def __init__(self, vertices):
        self.vertices = tuple(tuple(as_number(v) for v in vert) for vert in vertices)
        if not self.vertices:
            raise ValueError("vertex list is empty")
        self.n = len(self.vertices[0])
        if any(len(v) != self.n for v in self.vertices):
            raise ValueError("inconsistent vertex dimensions")
        self._screen = None
        self._screen_ready = False

    def _screen_margin(self, x):
        """Approximate signed boundary distance, or None when unavailable."""
        if not self._screen_ready:
            self._screen_ready = True
            try:
                from scipy.spatial import ConvexHull

                pts = np.array([[float(c) for c in v] for v in self.vertices])
                if len(pts) > self.n:
                    hull = ConvexHull(pts)
                    self._screen = (hull.equations[:, :-1], hull.equations[:, -1])
            except Exception:
                self._screen = None
        if self._screen is None:
            return None
        A, b = self._screen
        xf = np.array([float(v) for v in x])
        return float(-np.max(A @ xf + b))

    @property
    def exact(self) -> bool:
        return all(all_exact(v) for v in self.vertices)

    def origin_interior(self) -> bool:
        # 0 in int conv(V) iff conv(V) is full-dimensional and 0 lies in the
        # relative interior: max eps s.t. V^T a = 0, sum a = 1, a_j >= eps.
        m = len(self.vertices)
        if m <= self.n:
            return False
        pts = np.array([[float(c) for c in v] for v in self.vertices])
        if np.linalg.matrix_rank(pts[1:] - pts[0]) < self.n:
            return False
        A_eq = [[self.vertices[j][d] for j in range(m)] + [0]
                for d in range(self.n)]
        A_eq.append([1] * m + [0])
        b_eq = [0] * self.n + [1]
        A_ub = [[-(1 if k == j else 0) for k in range(m)] + [1] for j in range(m)]
        b_ub = [0] * m
        try:
            _, v = solve_lp([0] * m + [-1], A_ub=A_ub, b_ub=b_ub,
                            A_eq=A_eq, b_eq=b_eq)
        except (LPInfeasible, LPUnbounded):
            return False
        eps = -v
        return eps > 0 if is_exact(eps) else eps > 1e-12

    def _support(self, theta):
        return max(_dot(v, theta) for v in self.vertices)

    def _gauge_margin(self, x):
        """(gamma*-1)*scale where gamma* = max{g >= 0 : g x in conv V}.

        Returns None when the gauge is not informative (body may not contain
        the origin).  For x = 0 returns the smallest axis support, a crude but
        positive depth.
        """
        n, m = self.n, len(self.vertices)
        if all(v == 0 for v in x):
            lo, hi = self.bounding_box()
            vals = [float(v) for v in hi] + [-float(v) for v in lo]
            return min(vals) if min(vals) > 0 else None
        # vars: alpha_1..alpha_m >= 0, g >= 0 ; rows: V^T alpha - g x = 0, sum alpha = 1
        A_eq = []
        for d in range(n):
            A_eq.append([self.vertices[j][d] for j in range(m)] + [-x[d]])
        A_eq.append([1] * m + [0])
        b_eq = [0] * n + [1]
        c = [0] * m + [-1]
        try:
            sol, v = solve_lp(c, A_eq=A_eq, b_eq=b_eq)
        except LPInfeasible:
            return None
        except LPUnbounded:
            return None
        gamma = -v
        scale = max(float(abs(t)) for t in x)
        return (gamma - 1) * scale

    def _classify(self, x, tol):
        s = self._screen_margin(x)
        if s is not None and abs(s) > max(self._SCREEN_BAND, 10 * tol):
            return Classification(INSIDE if s > 0 else OUTSIDE, s)
        exact = self.exact and all_exact(x)
        t = self._linf_distance(x)
        if (t > 0) if exact else (float(t) > tol):
            return Classification(OUTSIDE, -float(t))
        g = self._gauge_margin(x)
        if exact:
            margin = float(g) if g is not None and g > 0 else 0.0
            return Classification(INSIDE, margin)
        if g is None:
            return Classification(BOUNDARY, 0.0)
        return _band(g, tol, exact=False)

    def _linf_distance(self, x):
        return _linf_distance_lp([_VRep(self.vertices)], x)

    def describe(self):
        return {"variant": "VPolytope", "n": self.n,
                "vertices": [[_fmt(v) for v in vert] for vert in self.vertices]}


class Rotated(ConvexBody):
    """U K for an orthogonal U."""

    variant = "Rotated"

    def __init__(self, rotation: Rotation, base: ConvexBody):
        if rotation.n != base.n:
            raise ValueError("rotation/body dimension mismatch")
        self.rotation = rotation
        self.base = base
        self.n = base.n

    @property
    def exact(self) -> bool:
        return self.rotation.exact and self.base.exact

    @property
    def open_boundary(self) -> bool:
        return self.base.open_boundary

    def origin_interior(self) -> bool:
        return self.base.origin_interior()

    def _support(self, theta):
        return self.base.support(self.rotation.apply_transpose(theta))

    def _classify(self, x, tol):
        return self.base.classify(self.rotation.apply_transpose(x), tol)

    def _linf_distance(self, x):
        if isinstance(self.base, Ball):
            return self.base.linf_distance(x)  # balls are rotation-invariant
        nf = normal_form(self)
        return nf.linf_distance(x)

    def describe(self):
        return {"variant": "Rotated", "n": self.n,
                "U": [[_fmt(v) for v in row] for row in self.rotation.matrix],
                "provenance": self.rotation.provenance,
                "base": self.base.describe()}


class Scaled(ConvexBody):
    """lambda K for lambda > 0."""

    variant = "Scaled"

    def __init__(self, lam, base: ConvexBody):
        self.lam = as_number(lam)
        if (self.lam if is_exact(self.lam) else float(self.lam)) <= 0:
            raise ValueError("scale must be positive")
        self.base = base
        self.n = base.n

    @property
    def exact(self) -> bool:
        return is_exact(self.lam) and self.base.exact

    @property
    def open_boundary(self) -> bool:
        return self.base.open_boundary

    def origin_interior(self) -> bool:
        return self.base.origin_interior()

    def _support(self, theta):
        return self.lam * self.base.support(theta)

    def _classify(self, x, tol):
        if is_exact(self.lam) and all_exact(x):
            inner = tuple(Fraction(v) / Fraction(self.lam) for v in x)
        else:
            inner = tuple(float(v) / float(self.lam) for v in x)
        c = self.base.classify(inner, tol)
        return Classification(c.label, c.margin * float(self.lam))

    def _linf_distance(self, x):
        if is_exact(self.lam) and all_exact(x):
            inner = tuple(Fraction(v) / Fraction(self.lam) for v in x)
        else:
            inner = tuple(float(v) / float(self.lam) for v in x)
        return self.lam * self.base.linf_distance(inner)

    def describe(self):
        return {"variant": "Scaled", "n": self.n, "lam": _fmt(self.lam),
                "base": self.base.describe()}


class CubeSum(ConvexBody):
    """K + (-1,1)^n: the open-cube fattening used by the discrete inequalities."""

    variant = "CubeSum"

    def __init__(self, base: ConvexBody):
        self.base = base
        self.n = base.n

    @property
    def exact(self) -> bool:
        return self.base.exact

    @property
    def open_boundary(self) -> bool:
        return True

    def origin_interior(self) -> bool:
        return True  # the open cube alone already covers a neighborhood of 0

    def _support(self, theta):
        # closure convention: h_{K+C}(theta) = h_K(theta) + ||theta||_1
        return self.base.support(theta) + _norm1(theta)

    def _classify(self, x, tol):
        d = self.base.linf_distance(x)
        exact = is_exact(d)
        margin = 1 - d if exact else 1.0 - float(d)
        return _band(margin, tol, exact, open_boundary=True)

    def _linf_distance(self, x):
        d = self.base.linf_distance(x)
        return max(d - 1, 0) if is_exact(d) else max(float(d) - 1.0, 0.0)

    def describe(self):
        return {"variant": "CubeSum", "n": self.n, "base": self.base.describe()}


class Combination(ConvexBody):
    """(1-mu) K + mu L, optionally fattened by the open unit cube."""

    variant = "Combination"

    def __init__(self, mu, K: ConvexBody, L: ConvexBody, plus_cube: bool = False):
        self.mu = as_number(mu)
        muf = float(self.mu)
        if not 0 <= muf <= 1:
            raise ValueError("mu must lie in [0, 1]")
        if K.n != L.n:
            raise ValueError("dimension mismatch")
        self.K, self.L = K, L
        self.plus_cube = bool(plus_cube)
        self.n = K.n

    @property
    def exact(self) -> bool:
        return is_exact(self.mu) and self.K.exact and self.L.exact

    @property
    def open_boundary(self) -> bool:
        return self.plus_cube or self.K.open_boundary or self.L.open_boundary

    def origin_interior(self) -> bool:
        if self.plus_cube:
            return True
        if float(self.mu) == 0:
            return self.K.origin_interior()
        if float(self.mu) == 1:
            return self.L.origin_interior()
        return self.K.origin_interior() and self.L.origin_interior()

    def _support(self, theta):
        one = Fraction(1) if is_exact(self.mu) else 1.0
        h = (one - self.mu) * self.K.support(theta) + self.mu * self.L.support(theta)
        if self.plus_cube:
            h = h + _norm1(theta)
        return h

    def _classify(self, x, tol):
        nf = normal_form(self)
        w = nf.open_cube
        if float(w) > 0:
            d = nf.linf_distance(x)
            exact = is_exact(d) and is_exact(w)
            margin = (w - d) if exact else (float(w) - float(d))
            return _band(margin, tol, exact, open_boundary=True)
        # closed combination
        d = nf.linf_distance(x)
        exact = is_exact(d)
        if (d > 0) if exact else (float(d) > tol):
            return Classification(OUTSIDE, -float(d))
        g = nf.interior_margin(x)
        if exact:
            return Classification(INSIDE, float(g) if g is not None and g > 0 else 0.0)
        if g is None:
            return Classification(BOUNDARY, 0.0)
        return _band(g, tol, exact=False)

    def _linf_distance(self, x):
        nf = normal_form(self)
        d = nf.linf_distance(x)
        w = nf.open_cube
        if float(w) == 0:
            return d
        out = d - w
        if is_exact(out):
            return out if out > 0 else Fraction(0)
        return max(float(out), 0.0)

    def describe(self):
        return {"variant": "Combination", "n": self.n, "mu": _fmt(self.mu),
                "K": self.K.describe(), "L": self.L.describe(),
                "plusCube": self.plus_cube}


# ---------------------------------------------------------------------------
# normal form: every body tree flattens to a Minkowski sum of polytopal
# summands plus one Euclidean ball (rotations fold into the summands, scales
# fold into the data, open cubes accumulate into a single width).


class _BoxRep:
    __slots__ = ("h",)

    def __init__(self, h):
        self.h = tuple(h)

    def scaled(self, lam):
        return _BoxRep(tuple(lam * v for v in self.h))

    def rotated(self, rot: Rotation):
        # y = U z with |z_i| <= h_i and z = U^T y, so |<col_i(U), y>| <= h_i.
        n = len(self.h)
        A, b = [], []
        for i in range(n):
            col = tuple(rot.matrix[k][i] for k in range(n))
            A.append(col)
            A.append(tuple(-v for v in col))
            b.extend([self.h[i], self.h[i]])
        return _HRep(tuple(A), tuple(b))

    def support(self, theta):
        return sum(h * abs(t) for h, t in zip(self.h, theta))

    def argmax(self, g):
        return tuple(h if gi > 0 else -h for h, gi in zip(self.h, g))

    @property
    def exact(self):
        return all_exact(self.h)


class _HRep:
    __slots__ = ("A", "b")

    def __init__(self, A, b):
        self.A = tuple(tuple(r) for r in A)
        self.b = tuple(b)

    def scaled(self, lam):
        return _HRep(self.A, tuple(lam * v for v in self.b))

    def rotated(self, rot: Rotation):
        n = len(self.A[0])
        newA = []
        for row in self.A:
            newA.append(tuple(
                sum(row[j] * rot.matrix[i][j] for j in range(n)) for i in range(n)
            ))
        # y = U z, A z <= b  ->  A U^T y <= b ; (A U^T)_{ri} = sum_j A_rj U_ij
        return _HRep(tuple(newA), self.b)

    def support(self, theta):
        n = len(self.A[0])
        c = [-t for t in theta]
        try:
            _, v = solve_lp(c, A_ub=self.A, b_ub=self.b, free=range(n))
        except LPUnbounded:
            raise UnboundedBodyError("summand unbounded")
        return -v

    def argmax(self, g):
        n = len(self.A[0])
        c = [-t for t in g]
        x, _ = solve_lp(c, A_ub=self.A, b_ub=self.b, free=range(n))
        return tuple(x)

    @property
    def exact(self):
        return all_exact(self.b) and all(all_exact(r) for r in self.A)


class _VRep:
    __slots__ = ("V",)

    def __init__(self, V):
        self.V = tuple(tuple(v) for v in V)

    def scaled(self, lam):
        return _VRep(tuple(tuple(lam * c for c in v) for v in self.V))

    def rotated(self, rot: Rotation):
        return _VRep(tuple(rot.apply(v) for v in self.V))

    def support(self, theta):
        return max(_dot(v, theta) for v in self.V)

    def argmax(self, g):
        best = max(self.V, key=lambda v: float(_dot(v, g)))
        return best

    @property
    def exact(self):
        return all(all_exact(v) for v in self.V)


class NormalForm:
    """Minkowski sum of polytopal summands + rho * B_2 + open cube of width w."""

    def __init__(self, n, parts, rho, open_cube):
        self.n = n
        self.parts = parts
        self.rho = rho
        self.open_cube = open_cube

    @property
    def exact(self):
        return (
            all(p.exact for p in self.parts)
            and is_exact(self.rho)
            and is_exact(self.open_cube)
        )

    def support(self, theta):
        h = sum((p.support(theta) for p in self.parts), 0)
        if self.rho:
            h = h + self.rho * _norm2(theta)
        if self.open_cube:
            h = h + self.open_cube * _norm1(theta)
        return h

    # -- distances ------------------------------------------------------
    def linf_distance(self, x):
        """Sup-norm distance to the closure of (sum of parts) + rho B_2.

        The open-cube width is *not* included here; callers that need the
        fattened body add it themselves (strict membership tests).
        """
        if not self.parts:
            return _linf_to_ball(x, self.rho) if self.rho else max(
                (abs(v) for v in x), default=0)
        rho = self.rho
        if not rho:
            return _linf_distance_lp(self.parts, x)
        if all(isinstance(p, _BoxRep) for p in self.parts):
            h = [sum(p.h[i] for p in self.parts) for i in range(self.n)]
            shifted = [max(abs(v) - hi, 0) for v, hi in zip(x, h)]
            return _linf_to_ball(shifted, rho)
        # general: bisect t with a Euclidean distance oracle on parts+box(t)
        return _linf_via_euclid(self.parts, float(rho), x)

    def euclid_distance(self, x):
        """Euclidean distance from x to the sum of the polytopal parts."""
        if not self.parts:
            return math.sqrt(float(sum(v * v for v in x)))
        return _euclid_dist_to_sum(self.parts, x)

    def interior_margin(self, x):
        """Gauge-based inside depth for closed polytopal sums containing 0."""
        if self.rho:
            d = self.euclid_distance(x)
            return float(self.rho) - d
        return _gauge_margin_sum(self.parts, x, self.n)


def normal_form(body: ConvexBody) -> NormalForm:
    """Flatten a body tree into a NormalForm.

    The parts/rho always describe the closed core; open cube widths accumulate
    into ``open_cube``.  Rotating an open-cube summand by anything other than
    a signed permutation is not representable in this form and raises.
    """
    n = body.n
    if isinstance(body, Box):
        return NormalForm(n, [_BoxRep(body.halfwidths)], 0, 0)
    if isinstance(body, Ball):
        return NormalForm(n, [], body.radius, 0)
    if isinstance(body, HPolytope):
        return NormalForm(n, [_HRep(body.A, body.b)], 0, 0)
    if isinstance(body, VPolytope):
        return NormalForm(n, [_VRep(body.vertices)], 0, 0)
    if isinstance(body, Scaled):
        nf = normal_form(body.base)
        lam = body.lam
        return NormalForm(n, [p.scaled(lam) for p in nf.parts],
                          lam * nf.rho, lam * nf.open_cube)
    if isinstance(body, Rotated):
        nf = normal_form(body.base)
        if nf.open_cube and not body.rotation.exact:
            raise GeometryError(
                "cannot rotate an open-cube summand by a general rotation")
        return NormalForm(n, [p.rotated(body.rotation) for p in nf.parts],
                          nf.rho, nf.open_cube)
    if isinstance(body, CubeSum):
        nf = normal_form(body.base)
        return NormalForm(n, nf.parts, nf.rho, nf.open_cube + 1)
    if isinstance(body, Combination):
        nfK = normal_form(body.K)
        nfL = normal_form(body.L)
        mu = body.mu
        one = Fraction(1) if is_exact(mu) else 1.0
        parts = []
        if float(one - mu) != 0:
            parts += [p.scaled(one - mu) for p in nfK.parts]
        if float(mu) != 0:
            parts += [p.scaled(mu) for p in nfL.parts]
        rho = (one - mu) * nfK.rho + mu * nfL.rho
        cube = (one - mu) * nfK.open_cube + mu * nfL.open_cube
        if body.plus_cube:
            cube = cube + 1
        return NormalForm(n, parts, rho, cube)
    raise TypeError(f"unknown body {type(body)!r}")


def _linf_distance_lp(parts, x):
    """Exact LP: min t s.t. x in (sum of polytopal parts) + t B_inf."""
    n = len(x)
    # variable layout: per part a block, then t
    blocks = []
    nv = 0
    A_ub, b_ub, A_eq, b_eq, free = [], [], [], [], []
    for p in parts:
        if isinstance(p, _BoxRep):
            blocks.append(("w", nv, n, p))
            free.extend(range(nv, nv + n))
            nv += n
        elif isinstance(p, _HRep):
            blocks.append(("y", nv, n, p))
            free.extend(range(nv, nv + n))
            nv += n
        elif isinstance(p, _VRep):
            m = len(p.V)
            blocks.append(("a", nv, m, p))
            nv += m
        else:  # pragma: no cover
            raise TypeError("unknown summand")
    t_col = nv
    nv += 1

    def coeff_rows():
        """Per-axis expression sum_parts (point_d) as column coefficients."""
        rows = []
        for d in range(n):
            row = [0] * nv
            for kind, off, size, p in blocks:
                if kind in ("w", "y"):
                    row[off + d] = 1
                else:
                    for j in range(size):
                        row[off + j] = p.V[j][d]
            rows.append(row)
        return rows

    expr = coeff_rows()
    for d in range(n):
        up = list(expr[d])
        up[t_col] = -1
        A_ub.append(up)            # sum_d - t <= x_d
        b_ub.append(x[d])
        dn = [-v for v in expr[d]]
        dn[t_col] = -1
        A_ub.append(dn)            # -sum_d - t <= -x_d
        b_ub.append(-x[d])
    for kind, off, size, p in blocks:
        if kind == "w":
            for i in range(size):
                row = [0] * nv
                row[off + i] = 1
                A_ub.append(list(row)); b_ub.append(p.h[i])
                row2 = [0] * nv
                row2[off + i] = -1
                A_ub.append(row2); b_ub.append(p.h[i])
        elif kind == "y":
            for arow, bi in zip(p.A, p.b):
                row = [0] * nv
                for j in range(size):
                    row[off + j] = arow[j]
                A_ub.append(row); b_ub.append(bi)
        else:
            row = [0] * nv
            for j in range(size):
                row[off + j] = 1
            A_eq.append(row); b_eq.append(1)
    c = [0] * nv
    c[t_col] = 1
    try:
        _, v = solve_lp(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, free=free)
    except LPInfeasible as e:
        raise MalformedBodyError(f"distance LP infeasible: {e}") from e
    if is_exact(v):
        return v if v > 0 else Fraction(0)
    return max(float(v), 0.0)


def _gauge_margin_sum(parts, x, n):
    """(gamma*-1)*||x||_inf for gamma* = max{g : g x in sum of parts}."""
    if all(v == 0 for v in x):
        # crude positive depth: smallest axis support of the sum
        vals = []
        for i in range(n):
            e = tuple(1 if j == i else 0 for j in range(n))
            ne = tuple(-1 if j == i else 0 for j in range(n))
            vals.append(float(sum(p.support(e) for p in parts)))
            vals.append(float(sum(p.support(ne) for p in parts)))
        worst = min(vals)
        return worst if worst > 0 else None
    blocks = []
    nv = 0
    free = []
    for p in parts:
        if isinstance(p, (_BoxRep, _HRep)):
            blocks.append((p, nv, n))
            free.extend(range(nv, nv + n))
            nv += n
        else:
            blocks.append((p, nv, len(p.V)))
            nv += len(p.V)
    g_col = nv
    nv += 1
    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    for d in range(n):
        row = [0] * nv
        for p, off, size in blocks:
            if isinstance(p, (_BoxRep, _HRep)):
                row[off + d] = 1
            else:
                for j in range(size):
                    row[off + j] = p.V[j][d]
        row[g_col] = -x[d]
        A_eq.append(row); b_eq.append(0)
    for p, off, size in blocks:
        if isinstance(p, _BoxRep):
            for i in range(n):
                row = [0] * nv; row[off + i] = 1
                A_ub.append(row); b_ub.append(p.h[i])
                row2 = [0] * nv; row2[off + i] = -1
                A_ub.append(row2); b_ub.append(p.h[i])
        elif isinstance(p, _HRep):
            for arow, bi in zip(p.A, p.b):
                row = [0] * nv
                for j in range(size):
                    row[off + j] = arow[j]
                A_ub.append(row); b_ub.append(bi)
        else:
            row = [0] * nv
            for j in range(size):
                row[off + j] = 1
            A_eq.append(row); b_eq.append(1)
    c = [0] * nv
    c[g_col] = -1
    try:
        _, v = solve_lp(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, free=free)
    except LPInfeasible:
        return None
    except LPUnbounded:
        return None
    gamma = -v
    scale = max(float(abs(t)) for t in x)
    return (float(gamma) - 1.0) * scale


def _euclid_dist_to_sum(parts, x, tol=1e-12, max_iter=2000):
    """Euclidean distance from x to a Minkowski sum of polytopal summands.

    Pairwise Frank-Wolfe on f(y) = ||y - x||^2 using the sum's linear
    minimization oracle; linear convergence on polytopes is plenty for the
    tolerances needed here.
    """
    xf = np.array([float(v) for v in x])
    n = len(xf)

    def oracle(g):
        """argmin over the sum of <g, .> (sum of per-part linear minimizers)."""
        pt = np.zeros(n)
        for p in parts:
            pt += np.array([float(v) for v in p.argmax(tuple(float(-gi) for gi in g))])
        return pt

    start_dir = -xf if np.any(xf) else np.ones(n)
    y0 = oracle(start_dir)
    active = {tuple(np.round(y0, 14)): 1.0}
    pts = {tuple(np.round(y0, 14)): y0}
    y = y0.copy()
    for _ in range(max_iter):
        grad = 2.0 * (y - xf)
        s = oracle(grad)
        gap = float(grad @ (y - s))
        if gap <= tol:
            break
        a_key = max(active, key=lambda k: float(grad @ pts[k]))
        a = pts[a_key]
        d = s - a
        dd = float(d @ d)
        if dd <= 0:
            break
        step = float((xf - y) @ d) / dd
        step = max(0.0, min(step, active[a_key]))
        if step <= 0:
            break
        y = y + step * d
        s_key = tuple(np.round(s, 14))
        pts[s_key] = s
        active[s_key] = active.get(s_key, 0.0) + step
        active[a_key] -= step
        if active[a_key] <= 1e-15:
            del active[a_key]
    return float(np.linalg.norm(y - xf))


def _linf_via_euclid(parts, rho, x, tol=1e-11):
    """Sup-norm distance to (sum parts) + rho*B_2 via bisection on the cube."""
    base = _euclid_dist_to_sum(parts, x)
    if base <= rho:
        return 0.0
    lo, hi = 0.0, base  # at t = base the cube alone reaches the polytope
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        d = _euclid_dist_to_sum(parts + [_BoxRep((mid,) * len(x))], x)
        if d <= rho:
            hi = mid
        else:
            lo = mid
        if hi - lo <= tol:
            break
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# module-level operations mirroring the body methods


def support(K: ConvexBody, theta):
    return K.support(theta)


def classify(K: ConvexBody, x, tol: float = DEFAULT_TOL) -> Classification:
    return K.classify(x, tol)


def linf_distance(K: ConvexBody, x):
    return K.linf_distance(x)


def radii(K: ConvexBody):
    """(r, R) with r B_2 subset K subset R B_2, exact for Ball/Box/VPolytope.

    For fattened and Minkowski-combined bodies the pair is a certified
    sandwich (r_lo <= r(K), R_hi >= R(K)) assembled recursively: a Minkowski
    sum contains the sum of the parts' inballs and sits inside the sum of
    their circumballs.  Raises if 0 is not inside the body.
    """
    r, R = _radii_rec(K)
    rf = float(r)
    if rf <= 0:
        raise OriginOutsideError("radii require 0 in the interior of K")
    return r, R


def _radii_rec(K: ConvexBody):
    if isinstance(K, Ball):
        return K.radius, K.radius
    if isinstance(K, Box):
        return min(K.halfwidths), _norm2(K.halfwidths)
    if isinstance(K, VPolytope):
        R = max(_norm2(v) for v in K.vertices)
        return _vpolytope_inradius(K), R
    if isinstance(K, HPolytope):
        r = min(bi / _norm2(row) for row, bi in zip(K.A, K.b))
        lo, hi = K.bounding_box()
        R = math.sqrt(sum(max(abs(float(a)), abs(float(b))) ** 2
                          for a, b in zip(lo, hi)))
        return r, R
    if isinstance(K, Scaled):
        r, R = _radii_rec(K.base)
        return K.lam * r, K.lam * R
    if isinstance(K, Rotated):
        return _radii_rec(K.base)
    if isinstance(K, CubeSum):
        r, R = _radii_rec(K.base)
        return r + 1, R + math.sqrt(K.n)
    if isinstance(K, Combination):
        rK, RK = _radii_rec(K.K)
        rL, RL = _radii_rec(K.L)
        mu = K.mu
        one = Fraction(1) if is_exact(mu) else 1.0
        r = (one - mu) * rK + mu * rL
        R = (one - mu) * RK + mu * RL
        if K.plus_cube:
            r = r + 1
            R = R + math.sqrt(K.n)
        return r, R
    raise TypeError(f"unknown body {type(K)!r}")


def _vpolytope_inradius(K: VPolytope):
    """Largest origin-centered ball inside conv(V), via hull facet offsets."""
    from scipy.spatial import ConvexHull

    pts = np.array([[float(c) for c in v] for v in K.vertices])
    if len(pts) <= K.n:
        return 0.0
    try:
        hull = ConvexHull(pts)
    except Exception:
        return 0.0
    # equations: a.x + b <= 0 with |a| = 1 ; distance from 0 to a facet = -b
    offs = -hull.equations[:, -1]
    return float(np.min(offs))


def rotate_body(rotation: Rotation, K: ConvexBody) -> ConvexBody:
    """U K, simplifying when the rotation acts trivially on the set.

    Balls (and scaled balls) are rotation-invariant, so the wrapper is
    dropped; this keeps their lattice enumerations on the exact path.
    """
    if isinstance(K, Ball):
        return K
    if isinstance(K, Scaled) and isinstance(K.base, Ball):
        return K
    return Rotated(rotation, K)


def counterexample_body(lam, n: int) -> VPolytope:
    """Wedge family: 2^(n-1) base vertices at height -1/2 plus the apex e_n.

    Its lattice moment ratios grow without bound in lam, which is what makes
    the dimension-dependent comparison constant impossible.
    """
    lam = as_number(lam)
    if float(lam) <= 0:
        raise ValueError("lam must be positive")
    if n < 2:
        raise ValueError("need n >= 2")
    half = Fraction(-1, 2) if is_exact(lam) else -0.5
    verts = []
    for mask in range(2 ** (n - 1)):
        v = []
        for i in range(n - 1):
            sign = 1 if (mask >> i) & 1 else -1
            v.append(sign * lam)
        v.append(half)
        verts.append(tuple(v))
    apex = tuple([0] * (n - 1) + [1])
    verts.append(apex)
    return VPolytope(verts)


# ---------------------------------------------------------------------------
# JSON codec (the external body-description format)


def body_from_dict(d: dict) -> ConvexBody:
    v = d["variant"].lower()
    if v == "box":
        return Box([as_number(h) for h in d["halfwidths"]])
    if v == "ball":
        return Ball(as_number(d["radius"]), int(d["n"]))
    if v == "hpolytope":
        return HPolytope([[as_number(x) for x in row] for row in d["A"]],
                         [as_number(x) for x in d["b"]])
    if v == "vpolytope":
        return VPolytope([[as_number(x) for x in vert] for vert in d["vertices"]])
    if v == "rotated":
        rot = Rotation(tuple(tuple(as_number(x) for x in row) for row in d["U"]),
                       d.get("provenance", "user"))
        return Rotated(rot, body_from_dict(d["base"]))
    if v == "scaled":
        return Scaled(as_number(d["lam"]), body_from_dict(d["base"]))
    if v == "cubesum":
        return CubeSum(body_from_dict(d["base"]))
    if v == "combination":
        return Combination(as_number(d["mu"]), body_from_dict(d["K"]),
                           body_from_dict(d["L"]), bool(d.get("plusCube", False)))
    if v == "counterexample":
        return counterexample_body(as_number(d["lam"]), int(d["n"]))
    raise ValueError(f"unknown body variant {d['variant']!r}")


def body_from_json(text: str) -> ConvexBody:
    return body_from_dict(json.loads(text))


def body_to_json(K: ConvexBody) -> str:
    return json.dumps(K.describe(), sort_keys=True)
