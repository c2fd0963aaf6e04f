"""Acceptance criteria, one test per criterion.

Each test prints a PASS/FAIL line; ``conftest.py`` repeats them in the
terminal summary so they show up without ``-s``.
"""
import math
import time
from fractions import Fraction

import numpy as np
import pytest
from gmpy2 import mpq

from tessella import space
from tessella.analysis import (check_hypotheses, frequency_convergence, int_matrix_power,
                               spectral_radius, substitution_matrix, twisted_matrix, weyl_sum)
from tessella.engine import boundary_ratio, iterate, patch_to_dict
from tessella.geom.polygon import Polygon, interiors_overlap
from tessella.rules import builtin, validate_rule

pytestmark = pytest.mark.acceptance


def report(n, ok, detail):
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    return line


def test_criterion_01_exact_validation():
    t0 = time.perf_counter()
    reports = {name: validate_rule(builtin(name)) for name in ("square", "pinwheel")}
    elapsed = time.perf_counter() - t0
    ok = all(r.ok for r in reports.values()) and elapsed < 1.0
    report(1, ok, f"square and pinwheel validate exactly in {elapsed:.3f}s")
    assert all(r.ok for r in reports.values())
    assert all(builtin(n).exact for n in reports)
    assert elapsed < 1.0


def _fraction_power_is_one(z, q):
    re, im = Fraction(1), Fraction(0)
    for _ in range(q):
        re, im = re * z[0] - im * z[1], re * z[1] + im * z[0]
    return re == 1 and im == 0


def test_criterion_02_pinwheel_hypotheses():
    rule = builtin("pinwheel")
    t0 = time.perf_counter()
    rep = check_hypotheses(rule, 2)
    elapsed = time.perf_counter() - t0
    A2 = int_matrix_power(substitution_matrix(rule).A.tolist(), 2)
    # recompute the witness's relative rotation from the tile records with Fractions
    w = rep.b_witness
    recs = iterate(rule, w["prototile"], 2).records
    (ax, ay), (bx, by) = [(Fraction(str(recs[i][1])), Fraction(str(recs[i][2]))) for i in w["tiles"]]
    rel = (ax * bx + ay * by, ay * bx - ax * by)
    no_root = not any(_fraction_power_is_one(rel, q) for q in range(1, 13))
    ok = rep.a_holds and rep.b_holds and no_root and elapsed < 1.0
    report(2, ok, f"a={rep.a_holds} b={rep.b_holds} relative rotation "
                  f"{rel[0]}+{rel[1]}i, no q<=12 root, {elapsed:.3f}s")
    assert rep.a_holds and all(x >= 1 for row in A2 for x in row)
    assert rep.b_holds and w["verdict"]["kind"] == "irrational"
    assert rel[0] ** 2 + rel[1] ** 2 == 1
    assert no_root
    assert elapsed < 1.0


def test_criterion_03_square_negative_control():
    square = builtin("square")
    reps = [check_hypotheses(square, r) for r in range(1, 6)]
    angles = {(t[1], t[2], t[3]) for t in iterate(square, 0, 5).records}
    ok = all(not r.b_holds and r.b_exhaustive for r in reps) and angles == {(1, 0, False)}
    report(3, ok, "square r=1..5: b fails exhaustively, every rotation is the identity")
    assert all(r.a_holds for r in reps)
    assert all(not r.b_holds and r.b_exhaustive for r in reps)
    assert angles == {(1, 0, False)}


def test_criterion_04_matrix_identities():
    checks = []
    for name in ("square", "pinwheel"):
        rule = builtin(name)
        sm = substitution_matrix(rule)
        A = sm.A
        for conv in ("plain", "conjugate"):
            checks.append(np.array_equal(twisted_matrix(rule, 0, conv).entries, A.astype(complex)))
            for m in range(-8, 9):
                checks.append(bool(np.all(np.abs(twisted_matrix(rule, m, conv).entries) <= A + 1e-12)))
        # column area identity: sum_j A_jk area(P_j) = lam^-2 area(P_k), exactly
        areas = [p.shape.area() for p in rule.prototiles]
        for k in range(rule.size):
            lhs = sum((int(A[j, k]) * areas[j] for j in range(rule.size)), mpq(0))
            checks.append(lhs * rule.lam * rule.lam == areas[k])
        checks.append(sm.column_area_identity(rule))
    ok = all(checks)
    report(4, ok, f"{len(checks)} identity checks on both builtins")
    assert ok


def test_criterion_05_equidistribution_evidence():
    rule = builtin("pinwheel")
    t0 = time.perf_counter()
    p2, p6 = iterate(rule, 0, 2), iterate(rule, 0, 6)
    rows = []
    for m in (1, 2, 3, 4):
        w2 = abs(weyl_sum(rule, 0, 2, m, patch=p2).value)
        w6 = abs(weyl_sum(rule, 0, 6, m, patch=p6).value)
        rows.append((m, w2, w6))
    rho = spectral_radius(substitution_matrix(rule).A)
    radii = {(m, conv): spectral_radius(twisted_matrix(rule, m, conv).entries)
             for m in (1, 2, 3, 4) for conv in ("plain", "conjugate")}
    elapsed = time.perf_counter() - t0
    ok = (all(w6 < w2 for _, w2, w6 in rows) and abs(rho - 5) <= 1e-8
          and all(r < rho for r in radii.values()) and elapsed < 30)
    report(5, ok, "|W6|<|W2| " + ", ".join(f"m={m}: {w6:.4f}<{w2:.4f}" for m, w2, w6 in rows)
           + f"; rho(A)={rho:.10f}, max rho(A[m])={max(radii.values()):.4f}, {elapsed:.1f}s")
    assert all(w6 < w2 for _, w2, w6 in rows)
    assert abs(rho - 5) <= 1e-8
    assert all(r < rho for r in radii.values())
    # the plain-numpy eigenvalues agree
    for (m, conv), r in radii.items():
        assert math.isclose(r, max(abs(np.linalg.eigvals(twisted_matrix(rule, m, conv).entries))),
                            rel_tol=1e-8)
    assert elapsed < 30


def _power_iteration(A, steps=500):
    v = np.ones(len(A)) / len(A)
    for _ in range(steps):
        v = A @ v
        v /= v.sum()
    return v


def test_criterion_06_statistical_identity():
    rule = builtin("pinwheel")
    table = frequency_convergence(rule, 8)
    row = table.rows[-1]
    A = substitution_matrix(rule).A.astype(float)
    oracle = _power_iteration(A)
    # frequencies straight from A^8 columns
    A8 = np.array(int_matrix_power(A.astype(int).tolist(), 8), dtype=float)
    nu = A8 / A8.sum(axis=0)
    spread = np.abs(nu[:, 0] - nu[:, 1]).sum()
    to_perron = [np.abs(nu[:, k] - oracle).sum() for k in range(2)]
    ok = spread < 1e-3 and max(to_perron) < 1e-3 and row.max_pair_l1 < 1e-3
    report(6, ok, f"|nu8(0)-nu8(1)|_1={spread:.2e}, distance to Perron {max(to_perron):.2e}")
    assert row.r == 8
    assert math.isclose(row.max_pair_l1, spread, abs_tol=1e-12)
    assert spread < 1e-3 and max(to_perron) < 1e-3
    assert np.allclose(table.perron, oracle, atol=1e-12)


def test_criterion_07_engine_matches_matrix():
    mismatches = []
    for name in ("square", "pinwheel"):
        rule = builtin(name)
        A = substitution_matrix(rule).A.tolist()
        for k in range(rule.size):
            for r in range(7):
                Ar = int_matrix_power(A, r)
                want = sum(Ar[j][k] for j in range(rule.size))
                if len(iterate(rule, k, r)) != want:
                    mismatches.append((name, k, r))
    rule = builtin("pinwheel")
    polys = iterate(rule, 0, 4).polygons(rule)
    boxes = np.array([np.concatenate(q.bbox()) for q in polys], dtype=float)
    lo, hi = boxes[:, :2], boxes[:, 2:]
    # exhaustive over all pairs: boxes only prune pairs that are separated by a margin
    apart = np.any((hi[:, None, :] < lo[None, :, :] - 1e-6) | (hi[None, :, :] < lo[:, None, :] - 1e-6),
                   axis=2)
    overlaps, examined = 0, 0
    n = len(polys)
    for i in range(n):
        for j in range(i + 1, n):
            if apart[i, j]:
                continue
            examined += 1
            if interiors_overlap(polys[i], polys[j])[0]:
                overlaps += 1
    ok = not mismatches and overlaps == 0 and n == 625
    report(7, ok, f"counts match A^r for r<=6 on both builtins; {n} tiles, "
                  f"{n * (n - 1) // 2} pairs, {examined} clipped exactly, {overlaps} overlaps")
    assert not mismatches
    assert n == 625 and overlaps == 0


def test_criterion_08_boundary_ratio():
    unit = Polygon([(0, 0), (1, 0), (1, 1), (0, 1)])
    r4 = boundary_ratio(unit, 4).ratio
    r100 = boundary_ratio(unit, 100).ratio
    seq = [boundary_ratio(unit, t).ratio for t in (2, 4, 8, 16, 32)]
    target = 4 / 100 - 4 / 100 ** 2
    mono = all(a >= b for a, b in zip(seq, seq[1:]))
    ok = r4 == mpq(3, 4) and abs(float(r100) - target) < 1e-3 and mono
    report(8, ok, f"ratio(4)={r4}, ratio(100)={float(r100):.6f} vs {target:.6f}, "
                  f"monotone on 2..32: {mono}")
    assert r4 == mpq(3, 4)
    assert abs(float(r100) - target) < 1e-3
    assert mono


@pytest.fixture(scope="module")
def T6():
    return space.centered(builtin("pinwheel"), 0, 6)


def test_criterion_09_metric_sanity(T6):
    self_rep = space.patch_distance(T6, T6)
    eps = []
    for d in (mpq(1, 5), mpq(1, 10), mpq(1, 20), mpq(1, 100)):
        eps.append(space.patch_distance(T6, space.translated(T6, d, mpq(0))).epsilon)
    U = space.translated(T6, mpq(3, 40), mpq(-1, 25))
    sym = space.patch_distance(T6, U).epsilon == space.patch_distance(U, T6).epsilon
    mono = all(a > b for a, b in zip(eps, eps[1:]))
    ok = self_rep.floor_hit and mono and sym
    report(9, ok, f"self distance at floor {self_rep.epsilon:.4f}; shifts 0.2..0.01 give "
                  + ", ".join(f"{e:.4f}" for e in eps) + f"; symmetric: {sym}")
    assert self_rep.floor_hit
    assert mono
    assert sym


def test_criterion_10_performance():
    rule = builtin("pinwheel")
    t0 = time.perf_counter()
    one = iterate(rule, 0, 8, workers=1)
    elapsed = time.perf_counter() - t0
    many = iterate(rule, 0, 8, workers=4)
    same = one.records == many.records
    small_same = patch_to_dict(iterate(rule, 1, 3, workers=1)) == \
        patch_to_dict(iterate(rule, 1, 3, workers=4))
    ok = len(one) == 390_625 and elapsed < 5.0 and same and small_same
    report(10, ok, f"r=8: {len(one)} tiles in {elapsed:.2f}s, 1 vs 4 workers identical: {same}")
    assert len(one) == 390_625
    assert elapsed < 5.0
    assert same and small_same
