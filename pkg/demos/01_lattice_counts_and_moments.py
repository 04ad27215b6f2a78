"""Counting lattice points and the discrete statistics built on them.

Walks through the basic objects: a few bodies, their lattice clouds, the
projection distribution onto the last axis, moments, tails, and the exact
expected maximum of IID draws.
"""

from fractions import Fraction

from latticeborell import (
    Ball,
    Box,
    CubeSum,
    VPolytope,
    enumerate_lattice,
    expected_max,
    moment,
    projection_distribution,
    tail,
)

# Three small bodies: a box, a disk, and the open unit cube around a point.
box = Box([2, 2])
disk = Ball(2, 2)
open_cube = CubeSum(VPolytope([(0, 0)]))

for name, body in [("Box(2)^2", box), ("Ball(2)", disk), ("C_2", open_cube)]:
    ps = enumerate_lattice(body)
    print(f"{name}: {ps.count} lattice points, {ps.ambiguous_count} boundary-ambiguous")

# The projection distribution records the exact law of |<x, e_n>|.
dist = projection_distribution(box)
print("\nBox(2)^2 projection law:")
print("  values:", dist.values)
print("  counts:", dist.counts)

# Moments are exact rationals for integer exponents.
m1, m2 = moment(dist, 1), moment(dist, 2)
print(f"  m_1 = {m1.root}  (exact {Fraction(m1.root)})")
print(f"  m_2 = {m2.root:.6f}  (raw {m2.raw})")

# The expected maximum of N draws comes from the CDF-power formula and agrees
# with averaging max|x_n| over all G^N ordered tuples.
for N in (1, 2, 8, 1000):
    print(f"  E max of {N: >4} draws = {float(expected_max(dist, N)):.6f}")

# Exact tails back the union-bound checks.
for t in (0, 1, Fraction(3, 2), 2):
    print(f"  P(|x_2| >= {t}) = {tail(dist, t)}")

# Fattening by the open cube C_n = (-1,1)^n never drops points, and the open
# boundary is respected exactly: (3,0) sits at sup-distance exactly 1 from
# the disk, so it is *not* in Ball(2) + C_2.
fat = enumerate_lattice(CubeSum(disk))
print(f"\nBall(2)+C_2: {fat.count} points; (3,0) included: {(3, 0) in fat.points}")
