"""Why no dimension-dependent constant can replace C0: the wedge family.

The flat wedge conv({|x| <= lam at height -1/2} U {e_n}) concentrates almost
all of its lattice points at height 0 while keeping a single point at height
1.  As lam grows the raw moment ratio m_2/m_1 on the cloud blows up, but the
C0-normalized ratio stays bounded: C0 grows at exactly the compensating rate.
"""

from latticeborell import counterexample_body, c0, moment, projection_distribution

print(f"{'lam':>5} {'G':>6} {'m1':>10} {'m2':>10} {'m2/m1':>9} "
      f"{'C0':>9} {'normalized':>10}")
for lam in (2, 4, 8, 16, 32, 64):
    body = counterexample_body(lam, 2)
    dist = projection_distribution(body)
    m1 = float(moment(dist, 1).root)
    m2 = float(moment(dist, 2).root)
    cc = float(c0(body, 1))
    raw = m2 / m1
    normalized = m2 / (2 * cc * m1)   # q/p = 2
    print(f"{lam:>5} {dist.total:>6} {m1:>10.5f} {m2:>10.5f} {raw:>9.3f} "
          f"{cc:>9.2f} {normalized:>10.4f}")

print("\nraw ratio grows without bound; the normalized column stays small.")
