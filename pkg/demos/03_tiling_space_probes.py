"""
Probing the tiling space
========================

Finite stand-ins for infinite tilings: large patches centred on the origin.
We measure how far apart two of them are, look for one patch inside another,
and count how tiles meet.
"""

import time

from gmpy2 import mpq

import tessella as ts
from tessella.space import replace_tile, translated

rule = ts.builtin("pinwheel")

###############################################################################
# Distance
# --------
# Shifting a patch by delta moves it delta away, as long as the disk of
# radius 1/delta fits inside.  Identical patches only get down to the floor
# set by the patch radius.

T = ts.centered(rule, 0, 5)
print(f"{len(T.patch)} tiles, covered radius {T.radius:.2f}")
print("T vs T:", ts.patch_distance(T, T).to_dict())
for d in (mpq(1, 2), mpq(1, 5), mpq(1, 20)):
    t0 = time.perf_counter()
    rep = ts.patch_distance(T, translated(T, d, mpq(0)))
    print(f"shift {float(d):.3f}: eps={rep.epsilon:.4f} ({time.perf_counter() - t0:.2f}s)")

###############################################################################
# Sub-patches
# -----------
# Every level-1 supertile turns up inside F^2 of some prototile, in some
# position.  A pair of overlapping tiles never does.

q = ts.iterate(rule, 1, 1)
res = ts.congruent_subpatch(rule, q, 2)
print("F(P_1) inside F^2:", res.found, "of prototile", res.prototile)
single = ts.Patch.seed(rule, 0)
print("copies of one tile in F(P):", ts.congruent_subpatch(rule, single, 1, count_all=True).count)

###############################################################################
# Adjacency census
# ----------------
# Relative placements of edge-sharing tiles, up to isometry.  The list stops
# growing after a few levels.

for r in (2, 3, 4, 5):
    census = ts.adjacency_census(ts.iterate(rule, 0, r), rule)
    print(f"r={r}: {len(census)} kinds of edge contact, "
          f"{sum(c.count for c in census)} contacts")
