"""
Near-unit amplitude band: how often does a 9-element block cancel
everything?

Partition the surface into disjoint K^2-element blocks. Each block gives
a square linear system whose unique solution either lands every
magnitude inside [1 - eps, 1] or it does not; more blocks means more
independent chances. The block magnitudes do not depend on eps, so one
scan of the extremes serves every band.
"""

import numpy as np

from irsdof.bounds import eps_relaxed_lower_sum_mc
from irsdof.channel import SystemConfig, sample
from irsdof.irs import eps_block_extremes, eps_relaxed_lambda
from irsdof.montecarlo import RandomStream

cfg = SystemConfig(K=3, Q=27, blockage=5e-10)

# look at one draw first
ch = sample(cfg, RandomStream(2, 0))
print("per-block magnitude ranges of one draw:")
for m, (lo, hi) in enumerate(eps_block_extremes(ch)):
    print(f"  block {m}: [{lo:.3f}, {hi:.3f}]")
for eps in (0.9, 0.5):
    ok, witness = eps_relaxed_lambda(ch, eps)
    shown = "hit" if ok else "miss"
    print(f"  eps={eps}: {shown}")

# then sweep: wider bands and bigger budgets both help, and with a
# shared seed the orderings hold draw by draw, not only on average
print("\nbound vs Q (rows) and eps (columns), 500 samples each:")
q_grid = (9, 18, 36, 72)
eps_grid = (0.7, 0.8, 0.9)
print("    Q " + "".join(f"   eps={e}" for e in eps_grid))
table = {}
for q in q_grid:
    row = []
    for eps in eps_grid:
        pt = eps_relaxed_lower_sum_mc(
            SystemConfig(K=3, Q=q, blockage=5e-10), eps, 500, 3)
        table[q, eps] = pt.value
        row.append(f"{pt.value:8.3f}")
    print(f"  {q:3d} " + "".join(row))

values = np.array([[table[q, e] for e in eps_grid] for q in q_grid])
assert np.all(np.diff(values, axis=0) >= 0), "more elements never hurt"
assert np.all(np.diff(values, axis=1) >= 0), "wider bands never hurt"
print("\nboth monotonicities verified on the shared seed")
