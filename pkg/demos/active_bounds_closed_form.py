"""
Closed-form sum-DoF bounds for the amplifying surface.

The achievable side moves in steps: silencing w of the K users costs
w(K-1) + w(K-w) nulled links, so each extra half-DoF waits until the
element budget covers the next subset size. The converse side is the
straight line K/2 + Q/(2(K-1)) capped at K. This script prints both for
a few user counts and marks where they meet.
"""

import numpy as np

from irsdof.bounds import active_lower_sum, active_upper_sum, silencing_cost

for k in (3, 4, 5):
    saturation = k * (k - 1)
    print(f"\nK = {k} users (bounds meet at Q = {saturation})")
    print("  subset costs:",
          {w: silencing_cost(k, w) for w in range(1, k + 1)})
    print("   Q   lower   upper")
    for q in range(0, saturation + 3):
        lo = active_lower_sum(k, q)
        hi = active_upper_sum(k, q)
        marker = "  <- tight" if lo == hi else ""
        print(f"  {q:2d}   {lo:5.2f}   {hi:5.2f}{marker}")

# the gap closes exactly once per new affordable subset size
k = 4
jumps = [q for q in range(1, 20)
         if active_lower_sum(k, q) > active_lower_sum(k, q - 1)]
print(f"\nK = {k}: lower bound jumps at Q = {jumps}")
print("matching the subset costs",
      sorted(silencing_cost(k, w) for w in range(1, k + 1)))

# sanity: the lower bound never crosses the converse
for k in range(2, 8):
    qs = np.arange(0, 60)
    assert all(active_lower_sum(k, int(q)) <= active_upper_sum(k, int(q))
               for q in qs)
print("\nlower <= upper verified for K = 2..7, Q = 0..59")
