"""Systole lower bounds for congruence covers and explicit upper-bound witnesses.

Lower bounds come from the trace gap of congruence elements; upper bounds come
from real hyperbolic blocks [[c, s/a], [s, c]] (images of SO(W, q), q the
restriction of h_a to the k-span of the standard basis) whose suitable power
lies in Gamma_I.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt, lcm
from typing import Optional

from sympy import primerange

from .hyperbolic import Isometry, log_abs, trace_length_bound, translation_length
from .lattice import (
    FIELD_DEGREE,
    AdmissibleGroupSpec,
    BadPlaceSet,
    IneligibleIdeal,
    bad_places,
    congruence_index,
    group_dimension,
    index_upper_bound,
    is_congruence_element,
    is_lattice_element,
    local_index,
    trace_lower_bound,
)
from .numberfield import FieldElement, IdealSpec, PrimeIdealData, ResidueRing, classify_prime
from .quaternion import lift_mod
from .quatlinalg import QuatMatrix

SYMBOLIC_C = "c"  # additive constant left unevaluated


@dataclass(frozen=True)
class BoundReport:
    kind: str  # "trace" | "systole_norm" | "systole_index"
    value: float
    valid: bool
    constants: dict = field(default_factory=dict)
    exact: Optional[Fraction] = None

    def as_dict(self) -> dict:
        out = {"kind": self.kind, "value": self.value, "valid": self.valid}
        if self.exact is not None:
            out["exact"] = f"{self.exact.numerator}/{self.exact.denominator}"
        out["constants"] = dict(self.constants)
        return out


def norm_bound_denominator(spec: AdmissibleGroupSpec, degree: int = FIELD_DEGREE) -> Fraction:
    """2^(2d) (n+1)^d |N(a)|."""
    return 2 ** (2 * degree) * (spec.n + 1) ** degree * spec.abs_norm_a()


def systole_lower_bound_norm(I: IdealSpec, spec: AdmissibleGroupSpec, degree: int = FIELD_DEGREE) -> BoundReport:
    """4 ln N(I) - 2 ln(2^(2d) (n+1)^d |N(a)|), valid when N(I)^2 >= 2^(2d) (n+1)^d |N(a)|."""
    NI = I.norm()
    K = norm_bound_denominator(spec, degree)
    value = 4.0 * math.log(NI) - 2.0 * math.log(K)
    return BoundReport(
        "systole_norm",
        value,
        NI * NI >= K,
        {"d": degree, "n": spec.n, "abs_norm_a": str(spec.abs_norm_a()), "norm_I": NI, "c": SYMBOLIC_C},
    )


def index_slope(n: int) -> Fraction:
    return Fraction(4, group_dimension(n))


def systole_lower_bound_index(index: int, n: int) -> BoundReport:
    """slope * ln(index) - c with slope 4 / ((n+1)(2n+3)); c is symbolic."""
    if index < 1:
        raise ValueError("index must be >= 1")
    slope = index_slope(n)
    return BoundReport(
        "systole_index",
        float(slope) * math.log(index),
        True,
        {"n": n, "slope": f"{slope.numerator}/{slope.denominator}", "index": index, "c": SYMBOLIC_C},
    )


def trace_bound_report(I: IdealSpec, spec: AdmissibleGroupSpec, degree: int = FIELD_DEGREE) -> BoundReport:
    tb = trace_lower_bound(I, spec, degree)
    return BoundReport(
        "trace",
        float(tb),
        tb > 0,
        {"d": degree, "n": spec.n, "abs_norm_a": str(spec.abs_norm_a()), "norm_I": I.norm()},
        exact=tb,
    )


# ---------------------------------------------------------------------------
# witnesses


class WitnessNotFound(LookupError):
    pass


def _int_sqrt_exact(n: int) -> Optional[int]:
    if n < 0:
        return None
    r = isqrt(n)
    return r if r * r == n else None


def sqrt_in_ring(z: FieldElement) -> Optional[FieldElement]:
    """An element u + v sqrt(d) of Z[sqrt d] squaring to z, or None."""
    if not z.is_integral():
        return None
    X, Y, d = int(z.x), int(z.y), z.d
    m = _int_sqrt_exact(X * X - d * Y * Y)
    if m is None:
        return None
    for cand in (X + m, X - m):
        if cand < 0 or cand % 2:
            continue
        u = _int_sqrt_exact(cand // 2)
        if u is None:
            continue
        if u == 0:
            # z = d v^2
            if Y != 0 or X % d:
                continue
            v = _int_sqrt_exact(X // d)
            if v is None:
                continue
            root = FieldElement(Fraction(0), Fraction(v), d)
        else:
            if Y % (2 * u):
                continue
            root = FieldElement(Fraction(u), Fraction(Y // (2 * u)), d)
        if root * root == z:
            return root
    return None


@dataclass(frozen=True)
class WitnessBlock:
    """c^2 - a b^2 = 1 with s = a b; the block [[c, b], [s, c]] preserves J_a."""

    spec: AdmissibleGroupSpec
    c: FieldElement
    s: FieldElement

    @property
    def b(self) -> FieldElement:
        return self.s / self.spec.a

    def matrix(self) -> QuatMatrix:
        D = self.spec.algebra
        m = self.spec.m
        rows = [[0] * m for _ in range(m)]
        for i in range(2, m):
            rows[i][i] = 1
        rows[0][0], rows[0][1] = self.c, self.b
        rows[1][0], rows[1][1] = self.s, self.c
        return QuatMatrix.from_entries(D, rows)

    def length(self) -> float:
        """2 arccosh(c) at the trivial place."""
        return 2.0 * math.acosh(self.c.embed("trivial"))

    def verify(self) -> bool:
        a = self.spec.a
        ok_rel = a * (self.c * self.c - 1) == self.s * self.s
        ok_int = self.c.is_integral() and self.s.is_integral() and self.b.is_integral()
        ok_sigma = abs(self.c.embed("sigma")) <= 1.0 + 1e-12
        return ok_rel and ok_int and ok_sigma and self.c.sign("trivial") > 0 and (self.c - 1).sign() > 0


def find_witness(spec: AdmissibleGroupSpec, height_bound: int = 20) -> WitnessBlock:
    """Smallest-length block found with b = s/a in a coordinate box.

    Solves c^2 = 1 + a b^2 over Z[sqrt d] for |b_0|, |b_1| <= height_bound.
    Candidates must satisfy |sigma(c)| <= 1, as every lattice element does.
    """
    k = spec.field
    a = spec.a
    best = None
    best_key = None
    for b1 in range(0, height_bound + 1):
        for b0 in range(-height_bound, height_bound + 1):
            if b1 == 0 and b0 <= 0:
                continue  # b and -b give the same c
            b = k(b0, b1)
            c = sqrt_in_ring(1 + a * b * b)
            if c is None:
                continue
            if c.sign() < 0:
                c = -c
            s = a * b
            if s.sign() < 0:
                s, b = -s, -b
            w = WitnessBlock(spec, c, s)
            if not w.verify():
                continue
            key = (c.embed("trivial"), abs(b0) + abs(b1), b0, b1)
            if best is None or key < best_key:
                best, best_key = w, key
    if best is None:
        raise WitnessNotFound(f"no witness with coordinates bounded by {height_bound}")
    return best


def _is_identity_mod(C: QuatMatrix, ring: ResidueRing) -> bool:
    m = C.size
    for i in range(m):
        for j in range(m):
            entry = C[i, j] - 1 if i == j else C[i, j]
            if not all(ring.contains(x) for x in entry.coords):
                return False
    return True


def _reduced(C: QuatMatrix, ring: ResidueRing) -> QuatMatrix:
    return QuatMatrix(tuple(tuple(lift_mod(e, ring) for e in row) for row in C.rows), C.algebra)


def order_mod(C: QuatMatrix, P: PrimeIdealData, e: int, n: int, cap: Optional[int] = None) -> int:
    """Order of C in GL(O_D / P^e O_D) by iterated multiplication of reduced matrices."""
    ring = ResidueRing(P, e)
    if cap is None:
        cap = local_index(P.q, e, n)
    base = _reduced(C, ring)
    cur = base
    k = 1
    while not _is_identity_mod(cur, ring):
        k += 1
        if k > cap:
            raise ArithmeticError(f"order of the matrix mod {P}^{e} exceeds the cap {cap}")
        cur = _reduced(cur @ base, ring)
    return k


def congruence_order(C: QuatMatrix, I: IdealSpec, n: int) -> int:
    m = 1
    for P, e in I.factors:
        m = lcm(m, order_mod(C, P, e, n))
    return m


@dataclass(frozen=True)
class CongruenceWitness:
    element: QuatMatrix
    m: int
    length: float


def congruence_witness(W: WitnessBlock, I: IdealSpec) -> CongruenceWitness:
    """W^m with m the order of W modulo I; its length m * l(W) bounds sys(M_I) above."""
    M = W.matrix()
    m = congruence_order(M, I, W.spec.n)
    Wm = M**m
    if not is_congruence_element(Wm, I, W.spec):
        raise ArithmeticError("power of the witness is not congruent to the identity")
    return CongruenceWitness(Wm, m, m * W.length())


# ---------------------------------------------------------------------------
# sweep

CSV_COLUMNS = (
    "prime_p",
    "residue_r",
    "q",
    "e",
    "norm_I",
    "index",
    "lower_bound_norm",
    "lower_bound_valid",
    "witness_order_m",
    "witness_length",
    "trace_bound",
    "trace_witness",
)


@dataclass(frozen=True)
class SweepRow:
    prime: PrimeIdealData
    e: int
    norm_I: int
    index: int
    lower_bound_norm: float
    lower_bound_valid: bool
    witness_order_m: int
    witness_length: float
    trace_bound: Fraction
    trace_witness: FieldElement
    sandwich: bool
    trace_ok: bool

    def as_dict(self) -> dict:
        return {
            "prime_p": self.prime.p,
            "residue_r": self.prime.r,
            "q": self.prime.q,
            "e": self.e,
            "norm_I": self.norm_I,
            "index": self.index,
            "lower_bound_norm": self.lower_bound_norm,
            "lower_bound_valid": self.lower_bound_valid,
            "witness_order_m": self.witness_order_m,
            "witness_length": self.witness_length,
            "trace_bound": self.trace_bound,
            "trace_witness": self.trace_witness,
        }


@dataclass(frozen=True)
class Refusal:
    prime_p: int
    reasons: tuple


def exceeds_exactly(x: FieldElement, bound: Fraction) -> bool:
    """|x| >= bound at the trivial place, decided exactly."""
    ax = -x if x.sign() < 0 else x
    return (ax - bound).sign() >= 0


def sweep_row(W: WitnessBlock, P: PrimeIdealData, e: int = 1, S: Optional[BadPlaceSet] = None) -> SweepRow:
    spec = W.spec
    I = IdealSpec.prime_power(P, e)
    idx = congruence_index(I, spec, S)
    low = systole_lower_bound_norm(I, spec)
    cw = congruence_witness(W, I)
    tb = trace_lower_bound(I, spec)
    tr = cw.element.real_trace()
    return SweepRow(
        P,
        e,
        I.norm(),
        idx,
        low.value,
        low.valid,
        cw.m,
        cw.length,
        tb,
        tr,
        low.value <= cw.length,
        exceeds_exactly(tr, tb),
    )


def sweep(
    spec: AdmissibleGroupSpec,
    primes,
    W: Optional[WitnessBlock] = None,
    S: Optional[BadPlaceSet] = None,
    e: int = 1,
) -> tuple[list[SweepRow], list[Refusal]]:
    """One row per rational prime (first prime ideal above it), sorted by N(P)."""
    primes = sorted(set(int(p) for p in primes))
    if W is None:
        W = find_witness(spec)
    if S is None:
        S = bad_places(spec, max(primes, default=2))
    rows, refused = [], []
    for p in primes:
        P = classify_prime(p, spec.field)[0]
        reasons = S.reasons(P)
        if reasons:
            refused.append(Refusal(p, tuple(sorted(reasons))))
            continue
        rows.append(sweep_row(W, P, e, S))
    rows.sort(key=lambda r: (r.norm_I, r.prime.p))
    return rows, refused


def primes_in(lo: int, hi: int) -> list[int]:
    return [int(p) for p in primerange(lo, hi + 1)]
