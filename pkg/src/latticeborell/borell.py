"""Discrete moment-comparison constants and the inequality verifiers.

The central quantity is ``c0(K, p)``: the ratio

    C0(K, p) = (1 + m_p(Y) (G(K+C)/G(K))^(1/p)) / m_p(X)

with X uniform on the lattice points of K, Y uniform on those of the
open-cube fattening K + (-1,1)^n, and m_p the p-th moment root of the last
coordinate.  ``cq_estimate`` samples its supremum over rotations and
exponents.  The verifiers check the two-sided moment comparison, the discrete
Brunn-Minkowski inequality, explicit shell/constant bounds, union-bound
tails, the Paley-Zygmund chain, and the discrete mean-width theorems, each
reporting the implied constant next to a proof-derived reference envelope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .bodies import (
    Ball,
    Combination,
    ConvexBody,
    CubeSum,
    GeometryError,
    Rotation,
    is_exact,
    radii,
    rotate_body,
)
from .continuous import ball_sum_volume_upper, volume_upper
from .lattice import (
    ProjectionDistribution,
    enumerate_cached,
    expected_max,
    moment,
    projection_distribution,
    tail,
)
from .sampling import RngStream, haar_rotation

# Reference envelopes.  C_REF evaluates the proof constant 4(K0+1) with
# K0 = sup_{q>=1} 2 Gamma(1+q)^(1/q) / (q log 2) = 2/log 2 ~ 2.885, giving
# ~15.54, rounded up.  The mean-width envelopes are configurable defaults,
# not claimed to be tight.
C_REF = 16.0
C_REF_UPPER = 3.0 * math.e
C_REF_LOWER = (1.0 - math.exp(-0.25)) / 2.0
FLOAT_RTOL = 1e-9


class HypothesisError(GeometryError):
    """A standing hypothesis (max lattice projection >= 1, etc.) fails."""


class EmptyLatticeError(GeometryError):
    pass


class BallNotContainedError(GeometryError):
    """cq estimation requires the unit ball inside the body."""


class PreconditionError(GeometryError):
    pass


@dataclass
class InequalityReport:
    """One verified inequality: lhs <= rhs with the implied constant."""

    name: str
    lhs: float
    rhs: float
    implied_constant: float
    passed: bool
    context: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "implied_constant": self.implied_constant,
            "pass": self.passed,
            "context": self.context,
        }


@dataclass
class BorellConstants:
    """C0 at the identity plus a sampled lower estimate of the sup over O(n)."""

    c0: float
    cq_estimate: float
    rotation_budget: int
    p_grid: tuple
    argmax_p: float
    argmax_rotation: int        # -1 = identity
    caveat: str = "estimate (lower bound); the sup over O(n) x [1,q] is sampled"


def _dist_pair(K: ConvexBody):
    """Projection laws of K and of K + C_n (two enumerations, cached)."""
    dK = projection_distribution(K)
    dKC = projection_distribution(CubeSum(K))
    return dK, dKC


def _require_projection_hypothesis(dist: ProjectionDistribution):
    if dist.total == 0:
        raise EmptyLatticeError("no lattice points")
    if float(dist.max_value()) < 1:
        raise HypothesisError(
            "max |<x, e_n>| over the lattice cloud must be >= 1")


def _c0_from_dists(dK: ProjectionDistribution, dKC: ProjectionDistribution, p):
    mX = moment(dK, p)
    mY = moment(dKC, p)
    ratio = Fraction(dKC.total, dK.total)
    pf = float(p)
    if pf == 1 and is_exact(mX.root) and is_exact(mY.root):
        return (1 + mY.root * ratio) / mX.root
    return (1.0 + float(mY.root) * float(ratio) ** (1.0 / pf)) / float(mX.root)


def c0(K: ConvexBody, p) -> float:
    """The discrete moment-comparison constant C0(K, p).

    Exact Fraction at p = 1 on rational data, float otherwise; always >= 1.
    Raises HypothesisError unless the lattice cloud reaches |x_n| >= 1.
    """
    if float(p) < 1:
        raise ValueError("p must be >= 1")
    dK, dKC = _dist_pair(K)
    _require_projection_hypothesis(dK)
    return _c0_from_dists(dK, dKC, p)


def shell_count(K: ConvexBody, t) -> int:
    """G_n((1+t)K \\ K) for 0 in K: count of the dilate minus count of K."""
    from .bodies import Scaled

    big = enumerate_cached(Scaled(1 + (Fraction(t) if is_exact(t) else t), K))
    small = enumerate_cached(K)
    return big.count - small.count


def lemma32_shell_bound(K: ConvexBody, t) -> float:
    """Explicit bound on the shell count: needs sqrt(n) R(K) <= 2 r(K)^2."""
    r, R = radii(K)
    n = K.n
    rf, Rf = float(r), float(R)
    sq = math.sqrt(n)
    if sq * Rf > 2.0 * rf * rf + 1e-12:
        raise HypothesisError("sqrt(n) R(K) <= 2 r(K)^2 fails")
    vol = volume_upper(K)
    inner = 1.0 - sq * Rf / (2.0 * rf * rf)
    return ((1.0 + float(t) + sq / (2.0 * rf)) ** n - inner ** n) * vol


def c0_upper_bound(K: ConvexBody, p) -> tuple:
    """Explicit upper bound on c0(K, p) plus the shell-count bound it uses.

    Returns (bound, shell_count_bound) where the shell bound is evaluated at
    t = sqrt(n)/r(K).  All volume/radius ingredients enter in the direction
    that keeps the bound valid when only certified estimates exist.
    """
    n = K.n
    r, R = radii(K)
    rf, Rf = float(r), float(R)
    sq = math.sqrt(n)
    if sq * Rf > 2.0 * rf * rf + 1e-12:
        raise HypothesisError("sqrt(n) R(K) <= 2 r(K)^2 fails")
    dK = projection_distribution(K)
    _require_projection_hypothesis(dK)

    inball = Ball(r, n) if is_exact(r) else Ball(float(r), n)
    din = projection_distribution(inball)
    g_in = din.total
    sum_abs = float(moment(din, 1).raw) * g_in
    shell_bound = lemma32_shell_bound(K, sq / rf)
    if sum_abs <= 0:
        return math.inf, shell_bound

    pf = float(p)
    term2 = ball_sum_volume_upper(K, sq / 2.0) / sum_abs
    mean_in = sum_abs / g_in
    term3 = ((1.0 + sq / rf) * Rf * shell_bound ** (1.0 / pf)) / (
        mean_in * g_in ** (1.0 / pf))
    return 1.0 + term2 + term3, shell_bound


def geometric_p_grid(q: float, size: int) -> tuple:
    """Geometrically spaced exponents in [1, q], endpoints included."""
    qf = float(q)
    if qf < 1:
        raise ValueError("q must be >= 1")
    if qf == 1 or size <= 1:
        return (1.0,)
    lg = math.log(qf)
    return tuple(math.exp(lg * k / (size - 1)) for k in range(size))


def cq_estimate(K: ConvexBody, q, rotations: int = 16, p_grid_size: int = 6,
                seed: int = 0) -> BorellConstants:
    """Sampled lower estimate of sup_{U, 1<=p<=q} C0(UK, p).

    The identity rotation is always included; Haar samples come from one RNG
    substream per rotation index, so doubling the budget with the same seed
    extends (never reshuffles) the sample and the estimate is nondecreasing.
    """
    r, _ = radii(K)
    if float(r) < 1.0 - 1e-12:
        raise BallNotContainedError("cq requires B_2^n inside K (r >= 1)")
    grid = geometric_p_grid(q, p_grid_size)
    rng = RngStream(seed)
    best = -math.inf
    best_p, best_rot = 1.0, -1
    c0_identity = None
    for idx in range(-1, rotations):
        if idx < 0:
            body = K
        else:
            U = haar_rotation(rng.substream(idx), K.n)
            body = rotate_body(U, K)
        dK, dKC = _dist_pair(body)
        _require_projection_hypothesis(dK)
        for p in grid:
            val = float(_c0_from_dists(dK, dKC, p))
            if idx < 0 and c0_identity is None:
                c0_identity = val
            if val > best:
                best, best_p, best_rot = val, float(p), idx
    return BorellConstants(
        c0=c0_identity,
        cq_estimate=best,
        rotation_budget=rotations,
        p_grid=grid,
        argmax_p=best_p,
        argmax_rotation=best_rot,
    )


def holder_lower_holds(dist: ProjectionDistribution, p, q) -> bool:
    """m_p <= m_q, compared exactly for integer exponents on exact clouds."""
    pf, qf = float(p), float(q)
    if dist.exact and pf == int(pf) and qf == int(qf):
        rp = moment(dist, int(pf)).raw
        rq = moment(dist, int(qf)).raw
        return Fraction(rp) ** int(qf) <= Fraction(rq) ** int(pf)
    return moment(dist, p).root <= moment(dist, q).root


def verify_discrete_borell(K: ConvexBody, p, q, c_ref: float = C_REF) -> InequalityReport:
    """Two-sided moment comparison on the lattice cloud of K.

    The lower side (m_p <= m_q) must hold with no constant at all; the upper
    side is reported through the implied constant
    C* = m_q / ((q/p) C0(K, p) m_p), passing iff C* <= c_ref.
    """
    pf, qf = float(p), float(q)
    if not 1 <= pf <= qf:
        raise ValueError("need 1 <= p <= q")
    dist = projection_distribution(K)
    _require_projection_hypothesis(dist)
    holder_ok = holder_lower_holds(dist, p, q)
    mp = float(moment(dist, p).root)
    mq = float(moment(dist, q).root)
    c0v = float(c0(K, p))
    cstar = mq / ((qf / pf) * c0v * mp)
    rhs = c_ref * (qf / pf) * c0v * mp
    passed = holder_ok and cstar <= c_ref * (1.0 + FLOAT_RTOL)
    return InequalityReport(
        name="discrete-borell",
        lhs=mq,
        rhs=rhs,
        implied_constant=cstar,
        passed=passed,
        context={"body": K.describe(), "p": pf, "q": qf, "c0": c0v,
                 "m_p": mp, "m_q": mq, "holder_lower": holder_ok,
                 "c_ref": c_ref},
    )


def verify_discrete_bm(K: ConvexBody, L: ConvexBody, lam) -> InequalityReport:
    """G((1-lam)K + lam L + C_n)^(1/n) >= (1-lam)G(K)^(1/n) + lam G(L)^(1/n)."""
    lamf = float(lam)
    if not 0 < lamf < 1:
        raise ValueError("lam must lie in (0,1)")
    n = K.n
    M = Combination(lam, K, L, plus_cube=True)
    gK = enumerate_cached(K).count
    gL = enumerate_cached(L).count
    mset = enumerate_cached(M)
    gM = mset.count
    lhs = (1.0 - lamf) * gK ** (1.0 / n) + lamf * gL ** (1.0 / n)
    rhs = gM ** (1.0 / n)
    passed = lhs <= rhs * (1.0 + FLOAT_RTOL) + 1e-12
    return InequalityReport(
        name="discrete-brunn-minkowski",
        lhs=lhs,
        rhs=rhs,
        implied_constant=(rhs / lhs if lhs > 0 else math.inf),
        passed=passed,
        context={"K": K.describe(), "L": L.describe(), "lam": lamf,
                 "G_K": gK, "G_L": gL, "G_M": gM,
                 "ambiguous": mset.ambiguous_count},
    )


def union_bound_tail_check(K: ConvexBody, a, q, N: int) -> InequalityReport:
    """P(max of N draws >= a m_q) <= N tail(a m_q) <= N a^-q, all exact.

    The first probability comes from the CDF power, the middle from the
    union bound; on exact clouds with rational a and integer q the whole
    chain is rational arithmetic.
    """
    dist = projection_distribution(K)
    mq = moment(dist, q).root
    cut = (Fraction(a) * mq if is_exact(mq) and is_exact(a) else float(a) * float(mq))
    t1 = tail(dist, cut)
    if is_exact(t1):
        p_max = 1 - (1 - Fraction(t1)) ** N
    else:
        p_max = 1.0 - (1.0 - float(t1)) ** N
    union = N * t1
    markov = float(N) * float(a) ** (-float(q))
    ok = float(p_max) <= float(union) + 1e-15 and float(union) <= markov * (1 + FLOAT_RTOL)
    return InequalityReport(
        name="union-bound-tail",
        lhs=float(p_max),
        rhs=markov,
        implied_constant=(float(p_max) / markov if markov > 0 else math.inf),
        passed=ok,
        context={"body": K.describe(), "a": float(a), "q": float(q), "N": N,
                 "tail": float(t1), "union": float(union)},
    )


def paley_zygmund_check(K: ConvexBody, p, c_ref: float = C_REF) -> InequalityReport:
    """tail(m_p/2) >= (1-2^-p)^2 raw_p^2/raw_2p >= 1/(4 (c_ref C0)^{2p}).

    Exact tail and moment arithmetic; at p = 1 the whole chain is rational.
    """
    pf = float(p)
    dist = projection_distribution(K)
    _require_projection_hypothesis(dist)
    mp = moment(dist, p)
    m2p = moment(dist, 2 * pf if pf != int(pf) else 2 * int(pf))
    half = (Fraction(mp.root, 2) if is_exact(mp.root) else float(mp.root) / 2.0)
    t = tail(dist, half)
    if is_exact(mp.raw) and is_exact(m2p.raw) and pf == int(pf):
        pz = (1 - Fraction(1, 2 ** int(pf))) ** 2 * Fraction(mp.raw) ** 2 / Fraction(m2p.raw)
    else:
        pz = (1.0 - 2.0 ** (-pf)) ** 2 * float(mp.raw) ** 2 / float(m2p.raw)
    c0v = c0(K, p)
    if is_exact(c0v) and is_exact(pz):
        chained = 1 / (4 * (Fraction(c_ref) * c0v) ** (2 * int(pf)))
        ok = t >= pz >= chained
    else:
        chained = 1.0 / (4.0 * (float(c_ref) * float(c0v)) ** (2.0 * pf))
        ok = float(t) >= float(pz) * (1 - FLOAT_RTOL) and float(pz) >= chained * (1 - FLOAT_RTOL)
    return InequalityReport(
        name="paley-zygmund",
        lhs=float(t),
        rhs=float(chained),
        implied_constant=(float(t) / float(chained) if chained else math.inf),
        passed=bool(ok),
        context={"body": K.describe(), "p": pf, "c_ref": c_ref,
                 "pz_middle": float(pz), "c0": float(c0v)},
    )


def _rotation_set(n: int, rotations: int, seed: int, rotation_list=None):
    if rotation_list is not None:
        return list(rotation_list)
    if rotations <= 0:
        raise PreconditionError("rotation budget must be positive "
                                "(pass rotation_list for a fixed set)")
    rng = RngStream(seed)
    return [haar_rotation(rng.substream(i), n) for i in range(rotations)]


def verify_meanwidth_discrete(K: ConvexBody, N: int, mode: str, q=None,
                              rotations: int = 64, seed: int = 0,
                              rotation_list=None, constants: BorellConstants = None,
                              c_big: float = None,
                              c_ref_upper: float = C_REF_UPPER,
                              c_ref_lower: float = C_REF_LOWER,
                              cq_rotations: int = 16,
                              p_grid_size: int = 6) -> InequalityReport:
    """Rotation-averaged expected max vs. rotation-averaged moment root.

    upper: A = avg_U E max_N |x_n| over UK, B = avg_U m_{log N}(UK); the
    implied C* = A/B must stay below the envelope (default 3e).

    lower: under B_2 in K and (C cq)^2 <= N <= e^q with C defaulting to twice
    the moment-comparison envelope, A must exceed c* times the averaged
    m_{p1} root with p1 = log N / (2 log(C cq)); c* is reported and compared
    to (1 - e^{-1/4})/2.
    """
    if mode not in ("upper", "lower"):
        raise ValueError("mode must be 'upper' or 'lower'")
    n = K.n
    if mode == "upper":
        if N < 3:
            raise PreconditionError("upper mode needs N >= 3")
        if K.classify(tuple(0 for _ in range(n))).outside:
            raise PreconditionError("upper mode needs 0 in K")
        p_used = math.log(N)
    else:
        if q is None:
            raise ValueError("lower mode needs q")
        r, _ = radii(K)
        if float(r) < 1.0 - 1e-12:
            raise PreconditionError("lower mode needs B_2^n inside K")
        if constants is None:
            constants = cq_estimate(K, q, rotations=cq_rotations,
                                    p_grid_size=p_grid_size, seed=seed + 1)
        C = 2.0 * C_REF if c_big is None else float(c_big)
        ccq = C * constants.cq_estimate
        if not ccq * ccq <= N <= math.exp(float(q)):
            raise PreconditionError(
                f"need (C cq)^2 = {ccq * ccq:.3f} <= N = {N} <= e^q = "
                f"{math.exp(float(q)):.3f}")
        p_used = math.log(N) / (2.0 * math.log(ccq))

    rots = _rotation_set(n, rotations, seed, rotation_list)
    emaxes, mroots = [], []
    for U in rots:
        body = rotate_body(U, K)
        dist = projection_distribution(body)
        emaxes.append(float(expected_max(dist, N)))
        mroots.append(float(moment(dist, p_used).root))
    A = math.fsum(emaxes) / len(emaxes)
    B = math.fsum(mroots) / len(mroots)
    ctx = {"body": K.describe(), "N": N, "mode": mode,
           "rotations": len(rots), "seed": seed, "p_used": p_used,
           "avg_expected_max": A, "avg_moment_root": B}
    if mode == "upper":
        cstar = A / B
        return InequalityReport(
            name="meanwidth-discrete-upper",
            lhs=A, rhs=c_ref_upper * B, implied_constant=cstar,
            passed=cstar <= c_ref_upper * (1 + FLOAT_RTOL),
            context=ctx | {"c_ref_upper": c_ref_upper},
        )
    cstar = A / B
    ctx.update({"q": float(q), "cq_estimate": constants.cq_estimate,
                "C": 2.0 * C_REF if c_big is None else float(c_big),
                "cq_caveat": constants.caveat, "c_ref_lower": c_ref_lower})
    return InequalityReport(
        name="meanwidth-discrete-lower",
        lhs=c_ref_lower * B, rhs=A, implied_constant=cstar,
        passed=cstar >= c_ref_lower * (1 - FLOAT_RTOL),
        context=ctx,
    )
