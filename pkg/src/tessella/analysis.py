"""Substitution matrices, rotation-twisted matrices and equidistribution evidence.

``A[j, k]`` counts the type-``j`` children of prototile ``k``.  The twisted
matrix ``A[m]`` weights every child by ``exp(i*m*a)`` where ``a`` is the
angle of its rotation relative to the defining pose of its type.

A reflected child ``z -> u*conj(z) + t`` is recorded with the angle of
``u``.  Two conventions exist for how it enters ``A[m]``: ``"plain"``
uses ``exp(i*m*a)`` and ``"conjugate"`` uses ``exp(-i*m*a)``.  Both are
computed; neither is treated as canonical.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .engine import iterate
from .errors import ReducibleMatrix, SpectralNoConverge, UseCountInstead, NotARotation
from .geom.plane import ONE, Point, UnitRotation

ROOT_OF_UNITY_ORDERS = (1, 2, 3, 4, 5, 6, 8, 10, 12)   # all q with phi(q) <= 4
CONVENTIONS = ("plain", "conjugate")


@dataclass
class SubstitutionMatrix:
    A: np.ndarray

    def column_area_identity(self, rule):
        """``sum_j A[j,k] area(P_j) == area(P_k) / lam^2`` for every column, exactly."""
        lam2 = rule.lam * rule.lam
        areas = [p.shape.area() for p in rule.prototiles]
        for k in range(rule.size):
            lhs = 0
            for j in range(rule.size):
                lhs = lhs + int(self.A[j, k]) * areas[j]
            rhs = areas[k] / lam2
            if rule.exact:
                if lhs != rhs:
                    return False
            elif abs(float(lhs) - float(rhs)) > 1e-9 * max(1.0, abs(float(rhs))):
                return False
        return True


def substitution_matrix(rule):
    n = rule.size
    A = np.zeros((n, n), dtype=np.int64)
    for k in range(n):
        for c in rule.children[k]:
            A[c.type, k] += 1
    return SubstitutionMatrix(A)


def angle_table(rule):
    """``{(j, k): [UnitRotation, ...]}``: rotation parts of type-j children of ``P_k``."""
    table = {(j, k): [] for j in range(rule.size) for k in range(rule.size)}
    for k in range(rule.size):
        for c in rule.children[k]:
            table[c.type, k].append(c.pose.rot)
    return table


@dataclass
class TwistedMatrix:
    m: int
    entries: np.ndarray
    convention: str = "plain"


def twisted_matrix(rule, m, convention="plain"):
    if convention not in CONVENTIONS:
        raise ValueError(f"convention must be one of {CONVENTIONS}")
    n = rule.size
    M = np.zeros((n, n), dtype=complex)
    for (j, k), rots in angle_table(rule).items():
        for rot in rots:
            a = rot.angle()
            sgn = -1 if (rot.reflect and convention == "conjugate") else 1
            M[j, k] += complex(math.cos(sgn * m * a), math.sin(sgn * m * a))
    return TwistedMatrix(m, M, convention)


def spectral_radius(M, tol=1e-10, max_iter=100_000):
    """Largest eigenvalue modulus by power iteration on ``M^(2^k)``.

    Uses ``rho = lim ||M^n||^(1/n)`` with renormalised repeated squaring,
    which converges even when several eigenvalues share the top modulus
    (common for twisted matrices, whose top eigenvalues come in conjugate
    pairs and make plain vector iteration oscillate).
    """
    B = np.asarray(M, dtype=complex)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise ValueError("spectral_radius needs a square matrix")
    norm = np.linalg.norm(B)
    if norm == 0:
        return 0.0
    B = B / norm
    log_scale = math.log(norm)      # log ||M^(2^k)|| = log_scale * 2^k after k steps
    est = norm
    for k in range(1, max_iter + 1):
        B = B @ B
        nrm = np.linalg.norm(B)
        if nrm == 0 or not np.isfinite(nrm):
            return 0.0
        B = B / nrm
        log_scale = log_scale + math.log(nrm) / 2 ** k
        new = math.exp(log_scale)
        if abs(new - est) <= tol * max(1.0, new) / 8 and k > 4:
            return new
        est = new
        if 2 ** k > 1e300:
            break
    raise SpectralNoConverge("spectral radius did not converge", est)


def perron_vector(A, tol=1e-13, max_iter=100_000):
    """Normalised (sum 1) Perron eigenvector of a primitive non-negative matrix."""
    A = np.asarray(A, dtype=float)
    x = np.full(A.shape[0], 1.0 / A.shape[0])
    for _ in range(max_iter):
        y = A @ x
        y = y / y.sum()
        if np.abs(y - x).sum() <= tol:
            return y
        x = y
    raise SpectralNoConverge("Perron vector did not converge", x)


def int_matrix_power(A, r):
    """Exact integer ``A**r`` (Python ints, no overflow)."""
    A = [[int(v) for v in row] for row in np.asarray(A)]
    n = len(A)
    R = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(r):
        R = [[sum(R[i][l] * A[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
    return R


def is_primitive(A):
    n = len(A)
    bound = (n - 1) ** 2 + 1
    for r in range(1, bound + 1):
        if all(v > 0 for row in int_matrix_power(A, r) for v in row):
            return True
    return False


# -- rational multiples of pi ----------------------------------------------------

@dataclass
class Verdict:
    kind: str                 # "rational" | "irrational" | "undecided"
    order: int = None
    method: str = ""

    @property
    def rational(self):
        return self.kind == "rational"

    def to_dict(self):
        return {"kind": self.kind, "order": self.order, "method": self.method}


def is_rational_multiple_of_pi(u, max_den=10_000):
    """Decide whether a rotation angle is a rational multiple of pi.

    Exact rotations live in a field of degree at most 4 over Q, so a root of
    unity there has order q with phi(q) <= 4; testing u^q = 1 for those q is
    a proof either way.  Float rotations are only ever reported as rational
    (within tolerance, continued-fraction denominator <= ``max_den``) or
    undecided.
    """
    if not isinstance(u, UnitRotation):
        u = UnitRotation(u)
    if u.reflect:
        raise NotARotation("orientation-reversing map has no rotation angle")
    if u.exact:
        powers = {}
        p = ONE
        for q in range(1, max(ROOT_OF_UNITY_ORDERS) + 1):
            p = p * u.u
            powers[q] = p
        for q in ROOT_OF_UNITY_ORDERS:
            if powers[q] == ONE:
                return Verdict("rational", q, "exact power test")
        return Verdict("irrational", None,
                       "exact: u^q != 1 for every q with phi(q) <= 4 (field degree bound)")
    x = u.angle() / math.pi
    frac = Fraction(x).limit_denominator(max_den)
    if abs(float(frac) - x) <= 1e-9:
        order = 2 * frac.denominator // math.gcd(abs(frac.numerator), 2 * frac.denominator) \
            if frac.numerator else 1
        return Verdict("rational", order, f"continued fraction, denominator <= {max_den}")
    return Verdict("undecided", None, f"no fraction with denominator <= {max_den} fits")


# -- ergodicity hypotheses --------------------------------------------------------

@dataclass
class HypothesisReport:
    r: int
    a_holds: bool
    a_witnesses: list = field(default_factory=list)    # (prototile k, missing type j)
    b_holds: bool = False
    b_witness: dict = None
    b_exhaustive: bool = False

    def to_dict(self):
        return {"r": self.r, "a": self.a_holds,
                "a_witnesses": [list(w) for w in self.a_witnesses],
                "b": self.b_holds, "b_exhaustive": self.b_exhaustive, "witness": self.b_witness}


def _b_search(rule, patch, k):
    """First pair of same-type tiles with an irrational relative rotation."""
    groups = {}
    for idx, (typ, ux, uy, refl, _, _) in enumerate(patch.records):
        groups.setdefault((typ, refl), {}).setdefault((ux, uy), idx)
    undecided = None
    for (typ, refl), rots in sorted(groups.items()):
        items = list(rots.items())
        for a in range(len(items)):
            ua = Point(*items[a][0])
            for b in range(a + 1, len(items)):
                ub = Point(*items[b][0])
                rel = UnitRotation(ua * ub.conj()) if ua.exact else \
                    UnitRotation.from_angle(math.atan2(float((ua * ub.conj()).y), float((ua * ub.conj()).x)))
                v = is_rational_multiple_of_pi(rel)
                if v.kind == "irrational":
                    return {"prototile": k, "type": typ, "reflect": refl,
                            "tiles": [items[a][1], items[b][1]],
                            "relative_rotation": [float(rel.u.x), float(rel.u.y)],
                            "angle": rel.angle(), "verdict": v.to_dict()}, False
                if v.kind == "undecided" and undecided is None:
                    undecided = True
    return None, bool(undecided)


def check_hypotheses(rule, r, cap=None):
    """Check both hypotheses of the unique-ergodicity criterion at level ``r``.

    (a) every ``F^r(P)`` contains every tile type, read off ``A^r``;
    (b) some ``F^r(P)`` has two tiles of one type whose relative rotation is
    not a rational multiple of pi, found by enumerating the patches.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    A = substitution_matrix(rule).A
    Ar = int_matrix_power(A, r)
    missing = [(k, j) for k in range(rule.size) for j in range(rule.size) if Ar[j][k] < 1]
    report = HypothesisReport(r, not missing, missing)
    any_undecided = False
    for k in range(rule.size):
        patch = iterate(rule, k, r, cap=cap)
        witness, undecided = _b_search(rule, patch, k)
        any_undecided |= undecided
        if witness is not None:
            report.b_holds = True
            report.b_witness = witness
            return report
    report.b_exhaustive = not any_undecided
    return report


# -- Weyl sums and orientation statistics ----------------------------------------------

@dataclass
class WeylResult:
    m: int
    r: int
    seed_type: int
    value: complex
    count: int
    convention: str
    matrix_prediction: complex

    def to_dict(self):
        return {"m": self.m, "r": self.r, "seed_type": self.seed_type,
                "value": [self.value.real, self.value.imag], "abs": abs(self.value),
                "count": self.count, "convention": self.convention,
                "matrix_prediction": [self.matrix_prediction.real, self.matrix_prediction.imag]}


def patch_weyl_sum(patch, m, convention="conjugate"):
    if m == 0:
        raise UseCountInstead("m = 0 gives the tile count; use the substitution matrix")
    theta = patch.angles()
    sgn = np.where(patch.reflect_flags() & (convention == "conjugate"), -1.0, 1.0)
    return complex(np.exp(1j * m * sgn * theta).mean())


def weyl_sum(rule, seed_type, r, m, convention="conjugate", cap=None, patch=None):
    """``(1/N) sum_n exp(i m theta_n)`` over the tiles of ``F^r(P_seed)``.

    Ground truth is direct enumeration; the twisted-matrix prediction
    ``1^T A[m]^r e_k / N`` is reported alongside (it agrees only when the
    rule has no reflections).
    """
    if m == 0:
        raise UseCountInstead("m = 0 gives the tile count; use the substitution matrix")
    if patch is None:
        patch = iterate(rule, seed_type, r, cap=cap)
    value = patch_weyl_sum(patch, m, convention)
    tw = twisted_matrix(rule, m, "plain" if convention == "plain" else "conjugate").entries
    e = np.zeros(rule.size, dtype=complex)
    e[seed_type] = 1
    pred = complex(np.ones(rule.size) @ np.linalg.matrix_power(tw, r) @ e) / len(patch)
    return WeylResult(m, r, seed_type, value, len(patch), convention, pred)


def orientation_histogram(patch, bins):
    """Counts of pose angles mod 2*pi in ``bins`` equal bins, direct and reflected apart."""
    if bins < 1:
        raise ValueError("bins must be >= 1")
    theta = np.mod(patch.angles(), 2 * math.pi)
    idx = np.minimum((theta / (2 * math.pi) * bins).astype(int), bins - 1)
    refl = patch.reflect_flags()
    direct = np.bincount(idx[~refl], minlength=bins)
    reflected = np.bincount(idx[refl], minlength=bins)
    return {"bins": bins, "edges": list(np.linspace(0, 2 * math.pi, bins + 1)),
            "direct": direct.tolist(), "reflected": reflected.tolist()}


def distinct_rotations(patch):
    """Number of distinct exact rotation parts (with reflection flag) in a patch."""
    return len({(rec[1], rec[2], rec[3]) for rec in patch.records})


# -- frequencies ------------------------------------------------------------------

@dataclass
class FrequencyRow:
    r: int
    nu: list                   # one frequency vector per seed
    max_pair_l1: float
    perron_l1: list


@dataclass
class FrequencyTable:
    perron: list
    rows: list

    def to_dict(self):
        return {"perron": list(self.perron),
                "rows": [{"r": row.r, "nu": [list(v) for v in row.nu],
                          "max_pair_l1": row.max_pair_l1, "perron_l1": row.perron_l1}
                         for row in self.rows]}


def frequency_convergence(rule, r_max):
    """Type-frequency vectors ``A^r e_k / |A^r e_k|`` per seed, and their spread."""
    A = substitution_matrix(rule).A
    if not is_primitive(A):
        raise ReducibleMatrix("substitution matrix is not primitive")
    perron = perron_vector(A)
    rows = []
    for r in range(1, r_max + 1):
        Ar = int_matrix_power(A, r)
        nus = []
        for k in range(rule.size):
            col = [Ar[j][k] for j in range(rule.size)]
            tot = sum(col)
            nus.append(np.array([Fraction(c, tot) for c in col], dtype=float))
        spread = max((float(np.abs(a - b).sum()) for a in nus for b in nus), default=0.0)
        rows.append(FrequencyRow(r, [v.tolist() for v in nus], spread,
                                 [float(np.abs(v - perron).sum()) for v in nus]))
    return FrequencyTable(perron.tolist(), rows)


# -- report ----------------------------------------------------------------------

ANALYSIS_SCHEMA = "tessella.analysis/1"


def analysis_report(rule, r, ms, weyl_r=None, seed_type=0, r_max=8, cap=None):
    """Everything the ``analyze`` command prints, as a JSON-ready dict."""
    for m in ms:
        if m == 0:
            raise UseCountInstead("m = 0 gives the tile count; use the substitution matrix")
    S = substitution_matrix(rule)
    out = {"schema": ANALYSIS_SCHEMA, "rule_hash": rule.hash(), "A": S.A.tolist(),
           "column_area_identity": S.column_area_identity(rule)}
    out["A_m"] = {}
    out["A_m_conjugate"] = {}
    rho_m, rho_mc = {}, {}
    for m in ms:
        tp = twisted_matrix(rule, m, "plain").entries
        tc = twisted_matrix(rule, m, "conjugate").entries
        out["A_m"][str(m)] = [[[z.real, z.imag] for z in row] for row in tp]
        out["A_m_conjugate"][str(m)] = [[[z.real, z.imag] for z in row] for row in tc]
        rho_m[str(m)] = spectral_radius(tp)
        rho_mc[str(m)] = spectral_radius(tc)
    out["spectral"] = {"rho_A": spectral_radius(S.A), "rho_A_m": rho_m,
                       "rho_A_m_conjugate": rho_mc}
    out["hypotheses"] = check_hypotheses(rule, r, cap=cap).to_dict()
    wr = r if weyl_r is None else weyl_r
    patch = iterate(rule, seed_type, wr, cap=cap)
    out["weyl"] = [weyl_sum(rule, seed_type, wr, m, patch=patch).to_dict() for m in ms]
    try:
        out["frequencies"] = frequency_convergence(rule, r_max).to_dict()
    except ReducibleMatrix:
        out["frequencies"] = None
    return out
