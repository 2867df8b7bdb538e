"""Integral points of U(V, h_a): membership, congruence subgroups, indices."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from sympy import primefactors, primerange

from .numberfield import (
    FieldElement,
    IdealSpec,
    PrimeIdealData,
    RealQuadraticField,
    ResidueRing,
    _hensel_root,
    classify_prime,
)
from .quaternion import QuaternionAlgebra
from .quatlinalg import QuatMatrix, form_matrix

FIELD_DEGREE = 2

REASONS = ("ramified_D", "divides_a", "above_2", "nonmaximal_guard")


class IneligibleIdeal(ValueError):
    """The ideal has a factor in the bad-place set."""

    def __init__(self, prime: PrimeIdealData, reasons):
        self.prime = prime
        self.reasons = tuple(sorted(reasons))
        super().__init__(f"prime {prime} is a bad place ({', '.join(self.reasons)})")


@dataclass(frozen=True)
class AdmissibleGroupSpec:
    """U(V, h_a) over k = Q(sqrt d) with V = D^{n+1}."""

    algebra: QuaternionAlgebra
    a: FieldElement
    n: int

    @classmethod
    def build(cls, d: int = 2, a="1+1s2", n: int = 1, delta="-1", gamma="-1") -> "AdmissibleGroupSpec":
        k = RealQuadraticField(d)
        conv = lambda v: v if isinstance(v, FieldElement) else (k.parse(v) if isinstance(v, str) else k(v))
        return cls(QuaternionAlgebra(k, conv(delta), conv(gamma)), conv(a), n)

    @property
    def field(self) -> RealQuadraticField:
        return self.algebra.field

    @property
    def d(self) -> int:
        return self.field.d

    @property
    def m(self) -> int:
        return self.n + 1

    def J(self) -> QuatMatrix:
        return form_matrix(self.algebra, self.a, self.m)

    def abs_norm_a(self) -> Fraction:
        return abs(self.a.norm())


def is_admissible(spec: AdmissibleGroupSpec) -> tuple[bool, list[str]]:
    """Signature conditions: a > 0, sigma(a) < 0, delta and gamma totally negative."""
    problems = []
    if spec.n < 1:
        problems.append("n must be >= 1")
    if not spec.a.is_integral():
        problems.append("a is not integral")
    if spec.a.sign("trivial") <= 0:
        problems.append("a <= 0 at the trivial place")
    if spec.a.sign("sigma") >= 0:
        problems.append("sigma(a) > 0" if spec.a.sign("sigma") > 0 else "sigma(a) = 0")
    for name, v in (("delta", spec.algebra.delta), ("gamma", spec.algebra.gamma)):
        if not v.is_integral():
            problems.append(f"{name} is not integral")
        if v.sign("trivial") >= 0 or v.sign("sigma") >= 0:
            problems.append(f"{name} is not totally negative")
    return not problems, problems


def is_lattice_element(C: QuatMatrix, spec: AdmissibleGroupSpec) -> bool:
    if C.size != spec.m or not C.is_integral():
        return False
    J = spec.J()
    return C.star() @ J @ C == J


def _ideal_rings(I: IdealSpec) -> list[ResidueRing]:
    return list(I.rings())


def is_congruence_element(C: QuatMatrix, I: IdealSpec, spec: AdmissibleGroupSpec) -> bool:
    """C = identity modulo I O_D (diagonal entries minus one and off-diagonal entries in I O_D)."""
    if not C.is_integral():
        return False
    rings = _ideal_rings(I)
    for i in range(C.size):
        for j in range(C.size):
            entry = C[i, j] - 1 if i == j else C[i, j]
            if not all(ring.contains(c) for ring in rings for c in entry.coords):
                return False
    return True


def trace_congruence_value(C: QuatMatrix, spec: AdmissibleGroupSpec) -> FieldElement:
    """2a * sum Re(y_i) where c_ii = 1 + y_i."""
    s = C.real_trace() - C.size
    return 2 * spec.a * s


def check_trace_congruence(C: QuatMatrix, I: IdealSpec, spec: AdmissibleGroupSpec) -> bool:
    return I.squared().contains(trace_congruence_value(C, spec))


def trace_lower_bound(I: IdealSpec, spec: AdmissibleGroupSpec, degree: int = FIELD_DEGREE) -> Fraction:
    """N(I)^2 / (2^(2d-1) (n+1)^(d-1) |N(a)|) - (n+1) for C in Gamma_I, C != +-1."""
    NI = I.norm()
    if NI <= 1:
        raise ValueError("trace bound needs a proper nontrivial ideal")
    n = spec.n
    denom = 2 ** (2 * degree - 1) * (n + 1) ** (degree - 1) * spec.abs_norm_a()
    return Fraction(NI * NI) / denom - (n + 1)


def group_dimension(n: int) -> int:
    """dim of the group of type C_{n+1}."""
    return (n + 1) * (2 * n + 3)


def local_index(q: int, e: int, n: int) -> int:
    """q^(e dim) prod_{j=1}^{n+1} (1 - q^(-2j)) as an exact integer."""
    if e < 1:
        raise ValueError("exponent must be >= 1")
    prod = 1
    for j in range(1, n + 2):
        prod *= q ** (2 * j) - 1
    return q ** (e * group_dimension(n) - (n + 1) * (n + 2)) * prod


def index_upper_bound(I: IdealSpec, n: int) -> int:
    return I.norm() ** group_dimension(n)


# ---------------------------------------------------------------------------
# bad places


def _vp(x: int, p: int) -> int:
    if x == 0:
        raise ValueError("valuation of 0")
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def _vp_frac(x: Fraction, p: int) -> int:
    return _vp(x.numerator, p) - _vp(x.denominator, p)


def _fp2_pow(u: tuple[int, int], k: int, d: int, p: int) -> tuple[int, int]:
    """u^k in F_p[sqrt d] with d a nonsquare mod p."""
    rx, ry = 1, 0
    bx, by = u[0] % p, u[1] % p
    while k:
        if k & 1:
            rx, ry = (rx * bx + d * ry * by) % p, (rx * by + ry * bx) % p
        bx, by = (bx * bx + d * by * by) % p, (2 * bx * by) % p
        k >>= 1
    return rx, ry


def local_unit_data(el: FieldElement, P: PrimeIdealData) -> tuple[int, object]:
    """(v_P(el), residue of el / pi^v) for an integral nonzero element.

    The uniformizer is pi = p for unramified P and sqrt(d) for odd ramified P.
    Residues are ints mod p, or pairs over F_p[sqrt d] for inert primes.
    """
    if not el or not el.is_integral():
        raise ValueError(f"{el} must be a nonzero integral element")
    if P.p == 2:
        raise ValueError("residue characteristic 2 is not supported")
    p = P.p
    x, y = int(el.x), int(el.y)
    if P.kind == "split":
        E = _vp(int(el.norm()), p) + 1
        z = (x + _hensel_root(P.r, P.d, p, E) * y) % p**E
        v = _vp(z, p)
        return v, (z // p**v) % p
    if P.kind == "inert":
        v = min(_vp(c, p) for c in (x, y) if c)
        return v, ((x // p**v) % p, (y // p**v) % p)
    # el / sqrt(d) = y + (x / d) sqrt(d); denominators stay prime to p
    fx, fy = Fraction(x), Fraction(y)
    v = 0
    while fx == 0 or _vp_frac(fx, p) >= 1:
        fx, fy = fy, fx / P.d
        v += 1
    return v, fx.numerator * pow(fx.denominator, -1, p) % p


def quadratic_character(u, P: PrimeIdealData) -> int:
    p = P.p
    if P.kind == "inert":
        res = _fp2_pow(u, (P.q - 1) // 2, P.d % p, p)
        val = res[0]
    else:
        val = pow(u % p, (p - 1) // 2, p)
    if val == 1:
        return 1
    if val == p - 1:
        return -1
    raise ArithmeticError("quadratic character of a non-unit")


def hilbert_symbol_odd(delta: FieldElement, gamma: FieldElement, P: PrimeIdealData) -> int:
    """Tame Hilbert symbol (delta, gamma)_P at a prime of odd residue characteristic."""
    if P.p == 2:
        raise ValueError("Hilbert symbol at residue characteristic 2 is not implemented")
    # multiplying by squares leaves the symbol unchanged
    delta = delta * (delta.x.denominator * delta.y.denominator) ** 2
    gamma = gamma * (gamma.x.denominator * gamma.y.denominator) ** 2
    alpha, u = local_unit_data(delta, P)
    beta, w = local_unit_data(gamma, P)
    sign = -1 if (alpha * beta * (P.q - 1) // 2) % 2 else 1
    chi_u = quadratic_character(u, P) if beta % 2 else 1
    chi_w = quadratic_character(w, P) if alpha % 2 else 1
    return sign * chi_u * chi_w


@dataclass(frozen=True)
class BadPlaceSet:
    """Primes excluded from the hyperspecial index formula, with reason tags.

    Every tag is supported on primes dividing 2 N(a) N(delta) N(gamma), so the
    set is complete once ``bound`` reaches the largest such prime.
    """

    entries: dict = field(default_factory=dict)
    bound: int = 0

    def reasons(self, P: PrimeIdealData) -> frozenset:
        return self.entries.get(P, frozenset())

    def __contains__(self, P: PrimeIdealData) -> bool:
        return P in self.entries

    def first_conflict(self, I: IdealSpec) -> Optional[tuple[PrimeIdealData, frozenset]]:
        for P, _ in I.factors:
            if P in self.entries:
                return P, self.entries[P]
        return None

    def check(self, I: IdealSpec) -> None:
        hit = self.first_conflict(I)
        if hit:
            raise IneligibleIdeal(*hit)

    def primes(self) -> list[PrimeIdealData]:
        return sorted(self.entries, key=lambda P: (P.p, P.r if P.r is not None else -1))


def _support_primes(spec: AdmissibleGroupSpec) -> list[int]:
    out = {2}
    for v in (spec.a, spec.algebra.delta, spec.algebra.gamma):
        nv = v.norm()
        for part in (nv.numerator, nv.denominator):
            if part not in (0, 1, -1):
                out.update(primefactors(abs(part)))
    return sorted(out)


def place_reasons(P: PrimeIdealData, spec: AdmissibleGroupSpec) -> frozenset:
    ring = ResidueRing(P, 1)
    dl, gm = spec.algebra.delta, spec.algebra.gamma
    tags = set()
    if P.p == 2:
        tags.add("above_2")
    if spec.a.is_integral() and ring.contains(spec.a):
        tags.add("divides_a")
    guard = 2 * dl * gm
    if not guard.is_integral() or ring.contains(guard):
        tags.add("nonmaximal_guard")
    if P.p != 2 and hilbert_symbol_odd(dl, gm, P) == -1:
        tags.add("ramified_D")
    return frozenset(tags)


def bad_places(spec: AdmissibleGroupSpec, search_bound: int = 100) -> BadPlaceSet:
    support = _support_primes(spec)
    bound = max([search_bound] + support)
    entries = {}
    for p in primerange(2, bound + 1):
        for P in classify_prime(int(p), spec.field):
            tags = place_reasons(P, spec)
            if tags:
                entries[P] = tags
    return BadPlaceSet(entries, bound)


def congruence_index(I: IdealSpec, spec: AdmissibleGroupSpec, S: Optional[BadPlaceSet] = None) -> int:
    """[Gamma : Gamma_I] as the product of hyperspecial local indices."""
    if S is not None:
        S.check(I)
    idx = 1
    for P, e in I.factors:
        if S is None and place_reasons(P, spec):
            raise IneligibleIdeal(P, place_reasons(P, spec))
        idx *= local_index(P.q, e, spec.n)
    return idx
