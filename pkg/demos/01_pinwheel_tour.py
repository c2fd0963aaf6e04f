"""
A walk through the pinwheel rule
================================

Build the builtin rule, check that it is an honest decomposition, grow a few
patches and look at what the substitution matrix already predicts.

Run with ``python3 demos/01_pinwheel_tour.py``.
"""

from gmpy2 import mpq

import tessella as ts
from tessella.analysis import int_matrix_power

rule = ts.builtin("pinwheel")
print(rule.name, "with", rule.size, "prototiles, lambda^2 =", rule.lam * rule.lam)

# Each triangle splits into five half-size copies of itself and its mirror.
# Validation is exact: the children cover the parent with no area to spare.
report = ts.validate_rule(rule)
print("valid:", report.ok)

###############################################################################
# Counting tiles
# --------------
# The matrix A counts children of each type; patch sizes follow 1^T A^r e_k.

A = ts.substitution_matrix(rule).A
print("A =", A.tolist())
for r in range(5):
    patch = ts.iterate(rule, 0, r)
    Ar = int_matrix_power(A.tolist(), r)
    print(f"r={r}: {len(patch):4d} tiles, matrix says {Ar[0][0] + Ar[1][0]}")

###############################################################################
# Tiles stay unit size
# --------------------
# Instead of shrinking the children, the engine grows the frame.  Every tile
# of F^3 is a 1-2-sqrt5 triangle with Gaussian-rational corners.

patch = ts.iterate(rule, 0, 3)
tri = patch.polygons(rule)[17]
print("tile 17 corners:", [(str(v.x), str(v.y)) for v in tri.vertices])
print("total area:", sum((q.area() for q in patch.polygons(rule)), mpq(0)))

###############################################################################
# The two hypotheses
# ------------------
# (a) every type appears in every F^r(P); (b) two tiles of one type differ by
# a rotation that is not a rational multiple of pi.  r=1 is not enough for (b).

for r in (1, 2):
    h = ts.check_hypotheses(rule, r)
    print(f"r={r}: a={h.a_holds} b={h.b_holds}")
w = ts.check_hypotheses(rule, 2).b_witness
print("witness rotation", w["relative_rotation"], "angle", round(w["angle"], 6))
print("verdict:", w["verdict"]["method"])

# The square rule is the negative control: nothing ever turns.
print("square b at r=3:", ts.check_hypotheses(ts.builtin("square"), 3).b_holds)
