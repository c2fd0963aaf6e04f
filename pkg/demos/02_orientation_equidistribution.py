"""
Orientations spread out
=======================

Pinwheel tiles point in ever more directions.  We watch the Weyl sums shrink
as patches grow, compare them with the twisted matrices, and plot the angle
histogram of a 15625-tile patch.

Writes ``orientations.png`` into the current directory when matplotlib is
available.
"""

import numpy as np

import tessella as ts
from tessella.analysis import distinct_rotations, orientation_histogram

rule = ts.builtin("pinwheel")

###############################################################################
# Distinct directions
# -------------------
for r in range(1, 6):
    print(f"r={r}: {distinct_rotations(ts.iterate(rule, 0, r)):5d} distinct rotations")

###############################################################################
# Weyl sums
# ---------
# W_r(m) is the mean of exp(i m theta) over the tiles.  With no reflections in
# the rule it equals 1^T A[m]^r e_0 / 5^r, so the spectral radius of A[m]
# (below 5) sets the decay rate.

patches = {r: ts.iterate(rule, 0, r) for r in (2, 4, 6)}
for m in (1, 2, 3, 4):
    vals = [abs(ts.weyl_sum(rule, 0, r, m, patch=patches[r]).value) for r in (2, 4, 6)]
    rho = ts.spectral_radius(ts.twisted_matrix(rule, m).entries)
    print(f"m={m}: |W| at r=2,4,6 = " + "  ".join(f"{v:.5f}" for v in vals)
          + f"   rho(A[m])/5 = {rho / 5:.4f}")

###############################################################################
# Type frequencies
# ----------------
table = ts.frequency_convergence(rule, 8)
for row in table.rows[::2]:
    print(f"r={row.r}: seeds disagree by {row.max_pair_l1:.2e}")
print("Perron vector:", np.round(table.perron, 6))

###############################################################################
# Histogram
# ---------
# Only a few dozen directions exist at r=6, so some of the 36 bins stay empty;
# the gaps close slowly as r grows.
hist = orientation_histogram(patches[6], 36)
counts = np.array(hist["direct"])
print("bin counts min/max:", counts.min(), counts.max(), "of", counts.sum())

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, ax = plt.subplots(figsize=(6, 3))
    ax.bar(np.degrees(hist["edges"][:-1]), counts, width=10, align="edge")
    ax.set_xlabel("tile angle (degrees)")
    ax.set_ylabel("tiles")
    fig.tight_layout()
    fig.savefig("orientations.png", dpi=120)
    print("wrote orientations.png")
