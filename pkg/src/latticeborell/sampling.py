"""Continuous-side Monte Carlo: Haar rotations, uniform body samples, random
polytope mean widths, centroid-body and floating-body support estimates.

Every routine draws from an ``RngStream`` (seed + substream id), so results
are bitwise reproducible for a fixed seed, independent of scheduling: work
that conceptually runs in parallel (replicates, rotation indices) gets one
pre-assigned substream per index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bodies import (
    ConvexBody,
    GeometryError,
    Rotation,
    Scaled,
    is_exact,
    radii,
)
from .lattice import enumerate_cached

_HITRUN_PROBE = 2048
_HITRUN_MIN_ACCEPT = 1e-3


class DegenerateBodyError(GeometryError):
    pass


class ZeroBudgetError(GeometryError):
    pass


@dataclass(frozen=True)
class RngStream:
    """Deterministic RNG handle: (seed, stream_id) pins the whole stream."""

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed,
                                    spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.PCG64(ss))

    def substream(self, index: int) -> "RngStream":
        # disjoint block per parent stream; plenty of room at desk scale
        return RngStream(self.seed, self.stream_id * 1_048_576 + index + 1)


@dataclass(frozen=True)
class MeanWidthEstimate:
    value: float
    stderr: float
    n_point_samples: int
    n_direction_samples: int
    n_polytope_replicates: int

    def to_dict(self) -> dict:
        return {"value": self.value, "stderr": self.stderr,
                "point_samples": self.n_point_samples,
                "direction_samples": self.n_direction_samples,
                "replicates": self.n_polytope_replicates}


def haar_rotation(rng: RngStream, n: int) -> Rotation:
    """Haar-distributed orthogonal matrix via QR of a Gaussian matrix.

    The R factor's diagonal is forced positive, which makes the factorization
    unique and the distribution exactly Haar on O(n).
    """
    g = rng.generator().standard_normal((n, n))
    qmat, r = np.linalg.qr(g)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    u = qmat * signs
    return Rotation.from_array(u, provenance=f"haar-sample(seed={rng.seed},stream={rng.stream_id})")


def sphere_directions(rng: RngStream, n: int, count: int) -> np.ndarray:
    """Uniform directions on S^{n-1} (normalized Gaussians), shape (count, n)."""
    g = rng.generator().standard_normal((count, n))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return g / norms


def _float_bounding_box(K: ConvexBody):
    lo, hi = K.bounding_box()
    return (np.array([float(v) for v in lo]), np.array([float(v) for v in hi]))


def _inside_mask(K: ConvexBody, pts: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    return np.array([K.classify(tuple(p), tol).inside for p in pts])


def uniform_points(K: ConvexBody, rng: RngStream, count: int) -> np.ndarray:
    """Uniform samples in K: rejection from the bounding box, with a
    coordinate-direction hit-and-run fallback for needle-like bodies."""
    r, _ = radii(K)
    if float(r) <= 0:
        raise DegenerateBodyError("body has no interior around the origin")
    lo, hi = _float_bounding_box(K)
    gen = rng.generator()
    n = K.n

    probe = gen.uniform(lo, hi, size=(_HITRUN_PROBE, n))
    acc = _inside_mask(K, probe)
    rate = float(np.mean(acc))
    out = [p for p, ok in zip(probe, acc) if ok][:count]
    if rate < _HITRUN_MIN_ACCEPT:
        return _hit_and_run(K, gen, count, lo, hi)
    while len(out) < count:
        batch = max(64, int((count - len(out)) / max(rate, 1e-3) * 1.2))
        pts = gen.uniform(lo, hi, size=(batch, n))
        for p, ok in zip(pts, _inside_mask(K, pts)):
            if ok and len(out) < count:
                out.append(p)
    return np.array(out[:count])


def uniform_in_body(K: ConvexBody, rng: RngStream):
    """A single uniform point (see ``uniform_points`` for batches)."""
    return tuple(uniform_points(K, rng, 1)[0])


def _chord(K: ConvexBody, x: np.ndarray, axis: int, lo, hi):
    """Intersection of the axis-aligned line through x with K, by bisection."""
    e = np.zeros(len(x))
    e[axis] = 1.0

    def inside(s):
        return K.classify(tuple(x + s * e)).inside

    span_lo = float(lo[axis] - x[axis]) - 1.0
    span_hi = float(hi[axis] - x[axis]) + 1.0

    def edge(a, b):
        # inside at a, outside at b
        for _ in range(60):
            m = 0.5 * (a + b)
            if inside(m):
                a = m
            else:
                b = m
        return a

    left = edge(0.0, span_lo)
    right = edge(0.0, span_hi)
    return left, right


def _hit_and_run(K: ConvexBody, gen: np.random.Generator, count: int, lo, hi):
    n = K.n
    x = np.zeros(n)
    if not K.classify(tuple(x)).inside:
        raise DegenerateBodyError("hit-and-run needs an interior start at 0")
    burn = 50 * n
    thin = 10 * n
    out = []
    steps = burn + thin * count
    axes = gen.integers(0, n, size=steps)
    unif = gen.uniform(0.0, 1.0, size=steps)
    for k in range(steps):
        a, b = _chord(K, x, int(axes[k]), lo, hi)
        x = x + (a + (b - a) * unif[k]) * np.eye(n)[int(axes[k])]
        if k >= burn and (k - burn) % thin == thin - 1:
            out.append(x.copy())
            if len(out) == count:
                break
    while len(out) < count:
        out.append(x.copy())
    return np.array(out)


def random_polytope_mean_width(K: ConvexBody, N: int, replicates: int,
                               dirs: int, rng: RngStream) -> MeanWidthEstimate:
    """E w(K_N) for K_N = conv{+-X_1..+-X_N}: replicate average of the
    direction average of max_i |<X_i, theta>| (the support of a symmetric
    hull, no hull construction needed)."""
    if N < 1 or replicates < 1 or dirs < 1:
        raise ZeroBudgetError("N, replicates and dirs must be positive")
    theta = sphere_directions(rng.substream(0), K.n, dirs)
    widths = np.empty(replicates)
    for rep in range(replicates):
        pts = uniform_points(K, rng.substream(rep + 1), N)
        proj = np.abs(pts @ theta.T)          # (N, dirs)
        widths[rep] = float(np.mean(np.max(proj, axis=0)))
    value = float(np.mean(widths))
    stderr = float(np.std(widths, ddof=1) / math.sqrt(replicates)) if replicates > 1 else 0.0
    return MeanWidthEstimate(value, stderr, N * replicates, dirs, replicates)


def centroid_support(K: ConvexBody, p, theta, method: str = "mc",
                     lam: int = 50, samples: int = 10000,
                     rng: RngStream = None) -> float:
    """Support of the p-th centroid body in direction theta.

    ``method='mc'`` uses uniform samples in K; ``method='lattice'`` evaluates
    the deterministic dilation sum ((1/G(lam K)) sum |<x/lam, theta>|^p)^(1/p),
    which converges to the same value as lam grows.
    """
    pf = float(p)
    if pf < 1:
        raise ValueError("p must be >= 1")
    th = np.array([float(t) for t in theta])
    if not np.any(th):
        raise GeometryError("direction must be nonzero")
    if not K.origin_interior():
        raise GeometryError("centroid support needs 0 in the interior")
    if method == "lattice":
        lam_num = int(lam)
        ps = enumerate_cached(Scaled(lam_num, K))
        arr = ps.as_array()
        proj = np.abs(arr @ th) / lam_num
        return float(np.mean(proj ** pf) ** (1.0 / pf))
    if method == "mc":
        if rng is None:
            raise ZeroBudgetError("mc method needs an RngStream")
        pts = uniform_points(K, rng, samples)
        proj = np.abs(pts @ th)
        return float(np.mean(proj ** pf) ** (1.0 / pf))
    raise ValueError("method must be 'lattice' or 'mc'")


def mean_width_centroid(K: ConvexBody, p, dirs: int, rng: RngStream,
                        point_samples: int = 10000) -> MeanWidthEstimate:
    """w(Z_p(K)) by averaging centroid supports over random directions.

    One shared point cloud serves every direction.  The stderr comes from
    splitting the cloud into groups and re-averaging, which picks up both the
    direction spread and the cloud noise (the latter dominates for
    rotation-invariant bodies, where the support is constant over theta).
    """
    if dirs < 1:
        raise ZeroBudgetError("need at least one direction")
    pf = float(p)
    pts = uniform_points(K, rng.substream(1), point_samples)
    theta = sphere_directions(rng.substream(0), K.n, dirs)
    proj = np.abs(pts @ theta.T) ** pf        # (samples, dirs)
    value = float(np.mean(np.mean(proj, axis=0) ** (1.0 / pf)))
    groups = min(8, point_samples)
    bounds = np.linspace(0, point_samples, groups + 1, dtype=int)
    gvals = [
        float(np.mean(np.mean(proj[a:b], axis=0) ** (1.0 / pf)))
        for a, b in zip(bounds, bounds[1:]) if b > a
    ]
    stderr = (float(np.std(gvals, ddof=1) / math.sqrt(len(gvals)))
              if len(gvals) > 1 else 0.0)
    return MeanWidthEstimate(value, stderr, point_samples, dirs, 1)


def floating_body_support(K: ConvexBody, delta: float, theta, samples: int,
                          rng: RngStream) -> float:
    """Empirical sup{t : P(|<X, theta>| >= t) >= delta}.

    Ascending order statistic at index ceil((1-delta) * samples), the
    empirical-measure version of the defining quantile.
    """
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0,1)")
    if samples < 1:
        raise ZeroBudgetError("need at least one sample")
    if not K.origin_interior():
        raise GeometryError("floating body needs 0 in the interior")
    th = np.array([float(t) for t in theta])
    pts = uniform_points(K, rng, samples)
    proj = np.sort(np.abs(pts @ th))
    idx = max(math.ceil((1.0 - delta) * samples), 1)
    return float(proj[idx - 1])
