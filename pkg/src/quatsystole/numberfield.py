"""Exact arithmetic in real quadratic fields Q(sqrt d) with d = 2, 3 mod 4.

The ring of integers is Z[sqrt d] with basis {1, sqrt d}, so integrality and
residue computations are coordinatewise.  Ideals only appear through their
prime factorisation (:class:`IdealSpec`).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Literal, Optional, Union

from sympy import isprime
from sympy.ntheory import sqrt_mod

Place = Literal["trivial", "sigma"]
PLACES: tuple[Place, ...] = ("trivial", "sigma")

Rational = Union[int, Fraction]


class FieldError(ValueError):
    """Invalid field, element or ideal data."""


def _is_squarefree(n: int) -> bool:
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True


@dataclass(frozen=True)
class RealQuadraticField:
    d: int

    def __post_init__(self):
        if not isinstance(self.d, int) or self.d < 2 or not _is_squarefree(self.d):
            raise FieldError(f"d must be a squarefree integer >= 2, got {self.d!r}")
        if self.d % 4 == 1:
            raise FieldError(f"d = {self.d} is 1 mod 4; only Z[sqrt d] rings are supported")

    def __call__(self, x: Rational = 0, y: Rational = 0) -> "FieldElement":
        return FieldElement(Fraction(x), Fraction(y), self.d)

    @property
    def sqrt_d(self) -> "FieldElement":
        return self(0, 1)

    @property
    def disc(self) -> int:
        return 4 * self.d

    def classify_prime(self, p: int) -> list["PrimeIdealData"]:
        return classify_prime(p, self)

    def parse(self, text: str) -> "FieldElement":
        return parse_element(text, self.d)


@dataclass(frozen=True)
class FieldElement:
    """The number x + y*sqrt(d) with exact rational coordinates."""

    x: Fraction
    y: Fraction
    d: int

    def __post_init__(self):
        # normalise int inputs so equality and hashing are coordinate based
        if not isinstance(self.x, Fraction):
            object.__setattr__(self, "x", Fraction(self.x))
        if not isinstance(self.y, Fraction):
            object.__setattr__(self, "y", Fraction(self.y))

    @property
    def field(self) -> RealQuadraticField:
        return RealQuadraticField(self.d)

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.d != self.d:
                raise FieldError(f"mixing Q(sqrt {self.d}) and Q(sqrt {other.d})")
            return other
        if isinstance(other, (int, Fraction)):
            return FieldElement(Fraction(other), Fraction(0), self.d)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.x + o.x, self.y + o.y, self.d)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(-self.x, -self.y, self.d)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.x - o.x, self.y - o.y, self.d)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(
            self.x * o.x + self.d * self.y * o.y,
            self.x * o.y + self.y * o.x,
            self.d,
        )

    __rmul__ = __mul__

    def conjugate(self) -> "FieldElement":
        """Galois conjugate x - y*sqrt(d)."""
        return FieldElement(self.x, -self.y, self.d)

    def norm(self) -> Fraction:
        return norm_element(self)

    def inverse(self) -> "FieldElement":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero field element")
        c = self.conjugate()
        return FieldElement(c.x / n, c.y / n, self.d)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = FieldElement(Fraction(1), Fraction(0), self.d)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.y == 0 and self.x == other
        if isinstance(other, FieldElement):
            return self.d == other.d and self.x == other.x and self.y == other.y
        return NotImplemented

    def __hash__(self):
        return hash((self.x, self.y, self.d))

    def __bool__(self):
        return bool(self.x) or bool(self.y)

    def is_integral(self) -> bool:
        return self.x.denominator == 1 and self.y.denominator == 1

    def is_rational(self) -> bool:
        return self.y == 0

    def embed(self, place: Place = "trivial") -> float:
        return embed(self, place)

    def sign(self, place: Place = "trivial") -> int:
        """Exact sign of the real embedding at ``place``."""
        x, s = self.x, (self.y if place == "trivial" else -self.y)
        if x >= 0 and s >= 0:
            return 0 if (x == 0 and s == 0) else 1
        if x <= 0 and s <= 0:
            return -1
        diff = x * x - self.d * s * s
        if x > 0:
            return (diff > 0) - (diff < 0)
        return (diff < 0) - (diff > 0)

    def __str__(self):
        return format_element(self)

    def __repr__(self):
        return f"FieldElement({format_element(self)})"


def embed(el: FieldElement, place: Place = "trivial") -> float:
    """Real embedding: sqrt(d) -> +sqrt(d) (trivial) or -sqrt(d) (sigma)."""
    r = math.sqrt(el.d)
    if place == "trivial":
        return float(el.x) + float(el.y) * r
    if place == "sigma":
        return float(el.x) - float(el.y) * r
    raise FieldError(f"unknown place {place!r}")


def norm_element(el: FieldElement) -> Fraction:
    return el.x * el.x - el.d * el.y * el.y


def _fmt_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_element(el: FieldElement) -> str:
    """CLI syntax, e.g. ``1+1s2`` for 1 + sqrt 2, ``-3/2`` for a rational."""
    if el.y == 0:
        return _fmt_rational(el.x)
    tail = f"{_fmt_rational(el.y)}s{el.d}"
    if el.x == 0:
        return tail
    sign = "" if el.y < 0 else "+"
    return f"{_fmt_rational(el.x)}{sign}{tail}"


_RAT = r"[+-]?\d+(?:/\d+)?"


def parse_element(text: str, d: int) -> FieldElement:
    """Parse ``x+ys{d}`` tokens: ``1+1s2``, ``-1``, ``s2``, ``1/2-3s2``."""
    src = text.replace(" ", "")
    if not src:
        raise FieldError("empty field element")
    terms = re.findall(r"[+-]?[^+-]+", src)
    if "".join(terms) != src:
        raise FieldError(f"cannot parse field element {text!r}")
    x = Fraction(0)
    y = Fraction(0)
    for term in terms:
        m = re.fullmatch(rf"({_RAT}|[+-]?)(?:s(\d+))?", term)
        if not m or (m.group(1) in ("", "+", "-") and m.group(2) is None):
            raise FieldError(f"cannot parse term {term!r} in {text!r}")
        coeff_txt, root = m.group(1), m.group(2)
        if coeff_txt in ("", "+"):
            coeff = Fraction(1)
        elif coeff_txt == "-":
            coeff = Fraction(-1)
        else:
            coeff = Fraction(coeff_txt)
        if root is None:
            x += coeff
        else:
            if int(root) != d:
                raise FieldError(f"term {term!r} uses s{root} but the field has d = {d}")
            y += coeff
    return FieldElement(x, y, d)


# ---------------------------------------------------------------------------
# primes and residue rings


@dataclass(frozen=True)
class PrimeIdealData:
    """A prime of Z[sqrt d] above the rational prime p.

    For split and ramified primes ``r`` is the image of sqrt(d) in the residue
    field, i.e. the prime is (p, sqrt(d) - r).  ``q`` is the residue field size.
    """

    p: int
    kind: Literal["split", "inert", "ramified"]
    r: Optional[int]
    q: int
    d: int

    def __str__(self):
        if self.r is None:
            return f"({self.p})"
        if self.r == 0:
            return f"({self.p}, s{self.d})"
        return f"({self.p}, s{self.d}-{self.r})"

    def ring(self, e: int = 1) -> "ResidueRing":
        return ResidueRing(self, e)

    def valuation(self, el: FieldElement) -> int:
        """Valuation of a nonzero integral element."""
        if not el:
            raise FieldError("valuation of zero")
        if not el.is_integral():
            raise FieldError(f"{el} is not integral")
        e = 0
        while self.ring(e + 1).is_zero(self.ring(e + 1).reduce(el)):
            e += 1
        return e


def classify_prime(p: int, field: RealQuadraticField) -> list[PrimeIdealData]:
    """All primes of Z[sqrt d] above the rational prime ``p``."""
    if not isinstance(p, int) or not isprime(p):
        raise FieldError(f"{p!r} is not a rational prime")
    d = field.d
    if p == 2:
        # d = 2 mod 4: (2, sqrt d); d = 3 mod 4: (2, 1 + sqrt d)
        return [PrimeIdealData(2, "ramified", d % 2, 2, d)]
    if d % p == 0:
        return [PrimeIdealData(p, "ramified", 0, p, d)]
    roots = sqrt_mod(d % p, p, all_roots=True)
    if not roots:
        return [PrimeIdealData(p, "inert", None, p * p, d)]
    return [PrimeIdealData(p, "split", r, p, d) for r in sorted(roots)]


def _hensel_root(r: int, d: int, p: int, e: int) -> int:
    mod = p**e
    for _ in range(e.bit_length() + 1):
        r = (r - (r * r - d) * pow(2 * r, -1, mod)) % mod
    assert (r * r - d) % mod == 0
    return r


@dataclass(frozen=True)
class ResidueRing:
    """The ring Z[sqrt d] / P^e for a prime P.

    Residues are canonical: an int mod p^e (split), a pair mod p^e (inert), or
    a pair (u mod p^ceil(e/2), w mod p^floor(e/2)) in the basis 1, sqrt(d)-r
    (ramified, where P^2 = (p)).
    """

    prime: PrimeIdealData
    e: int

    def __post_init__(self):
        if self.e < 0:
            raise FieldError("negative exponent")

    @property
    def size(self) -> int:
        return self.prime.q**self.e

    @property
    def _root(self) -> int:
        P = self.prime
        if P.kind == "split":
            return _hensel_root(P.r, P.d, P.p, self.e) if self.e else 0
        return P.r

    def _moduli(self) -> tuple[int, int]:
        p, e = self.prime.p, self.e
        return p ** ((e + 1) // 2), p ** (e // 2)

    def reduce(self, el: FieldElement):
        if not el.is_integral():
            raise FieldError(f"{el} is not integral; cannot reduce mod {self.prime}^{self.e}")
        x, y = int(el.x), int(el.y)
        P = self.prime
        if P.kind == "split":
            return (x + self._root * y) % (P.p**self.e)
        if P.kind == "inert":
            m = P.p**self.e
            return (x % m, y % m)
        mu, mw = self._moduli()
        return ((x + P.r * y) % mu, y % mw)

    def lift(self, el: FieldElement) -> FieldElement:
        """Small integral representative of the class of ``el``."""
        res = self.reduce(el)
        P = self.prime
        if P.kind == "split":
            return FieldElement(Fraction(res), Fraction(0), P.d)
        if P.kind == "inert":
            return FieldElement(Fraction(res[0]), Fraction(res[1]), P.d)
        u, w = res
        return FieldElement(Fraction(u - P.r * w), Fraction(w), P.d)

    def zero(self):
        return self.reduce(FieldElement(Fraction(0), Fraction(0), self.prime.d))

    def one(self):
        return self.reduce(FieldElement(Fraction(1), Fraction(0), self.prime.d))

    def is_zero(self, res) -> bool:
        return res == self.zero()

    def contains(self, el: FieldElement) -> bool:
        """Membership of ``el`` in P^e."""
        return self.is_zero(self.reduce(el))

    def add(self, a, b):
        return self.reduce(self.lift_residue(a) + self.lift_residue(b))

    def mul(self, a, b):
        return self.reduce(self.lift_residue(a) * self.lift_residue(b))

    def lift_residue(self, res) -> FieldElement:
        P = self.prime
        if P.kind == "split":
            return FieldElement(Fraction(res), Fraction(0), P.d)
        if P.kind == "inert":
            return FieldElement(Fraction(res[0]), Fraction(res[1]), P.d)
        u, w = res
        return FieldElement(Fraction(u - P.r * w), Fraction(w), P.d)


def residue_reduce(el: FieldElement, factor: tuple[PrimeIdealData, int]):
    prime, e = factor
    return ResidueRing(prime, e).reduce(el)


@dataclass(frozen=True)
class IdealSpec:
    """An ideal of Z[sqrt d] given as a product of prime powers."""

    factors: tuple[tuple[PrimeIdealData, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple((P, int(e)) for P, e in self.factors))
        seen = set()
        for P, e in self.factors:
            if e < 1:
                raise FieldError(f"exponent of {P} must be >= 1")
            if P in seen:
                raise FieldError(f"prime {P} listed twice")
            seen.add(P)

    @classmethod
    def prime_power(cls, prime: PrimeIdealData, e: int = 1) -> "IdealSpec":
        return cls(((prime, e),))

    @property
    def is_trivial(self) -> bool:
        return not self.factors

    def norm(self) -> int:
        return ideal_norm(self)

    def squared(self) -> "IdealSpec":
        return IdealSpec(tuple((P, 2 * e) for P, e in self.factors))

    def __mul__(self, other: "IdealSpec") -> "IdealSpec":
        exps: dict[PrimeIdealData, int] = {}
        for P, e in self.factors + other.factors:
            exps[P] = exps.get(P, 0) + e
        return IdealSpec(tuple(exps.items()))

    def contains(self, el: FieldElement) -> bool:
        return all(ResidueRing(P, e).contains(el) for P, e in self.factors)

    def rings(self) -> Iterable[ResidueRing]:
        return (ResidueRing(P, e) for P, e in self.factors)

    def __str__(self):
        if not self.factors:
            return "(1)"
        return "*".join(str(P) if e == 1 else f"{P}^{e}" for P, e in self.factors)


def ideal_norm(ideal: IdealSpec) -> int:
    n = 1
    for P, e in ideal.factors:
        n *= P.q**e
    return n
