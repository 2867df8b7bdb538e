"""Quaternions: exact ones in D = (delta, gamma / k) and floating Hamilton ones.

Basis is 1, i, j, ij with i^2 = delta, j^2 = gamma, ij = -ji.  Hamilton's H is
the case delta = gamma = -1 over R.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .numberfield import (
    FieldElement,
    FieldError,
    Place,
    PrimeIdealData,
    RealQuadraticField,
    ResidueRing,
)


@dataclass(frozen=True)
class QuaternionAlgebra:
    field: RealQuadraticField
    delta: FieldElement
    gamma: FieldElement

    def __post_init__(self):
        for name, v in (("delta", self.delta), ("gamma", self.gamma)):
            if v.d != self.field.d:
                raise FieldError(f"{name} lives in the wrong field")
            if not v:
                raise FieldError(f"{name} must be nonzero")

    @classmethod
    def default(cls, field: RealQuadraticField) -> "QuaternionAlgebra":
        return cls(field, field(-1), field(-1))

    def is_definite(self) -> bool:
        """delta and gamma negative at both real places (D ramified at infinity)."""
        return all(v.sign(pl) < 0 for v in (self.delta, self.gamma) for pl in ("trivial", "sigma"))

    def __call__(self, *coords) -> "ExactQuaternion":
        f = self.field
        vals = [c if isinstance(c, FieldElement) else f(c) for c in coords]
        vals += [f(0)] * (4 - len(vals))
        return ExactQuaternion(tuple(vals), self)

    def zero(self) -> "ExactQuaternion":
        return self()

    def one(self) -> "ExactQuaternion":
        return self(1)

    @property
    def i(self) -> "ExactQuaternion":
        return self(0, 1)

    @property
    def j(self) -> "ExactQuaternion":
        return self(0, 0, 1)

    @property
    def ij(self) -> "ExactQuaternion":
        return self(0, 0, 0, 1)


@dataclass(frozen=True)
class ExactQuaternion:
    coords: tuple[FieldElement, FieldElement, FieldElement, FieldElement]
    algebra: QuaternionAlgebra

    def _coerce(self, other) -> "ExactQuaternion":
        if isinstance(other, ExactQuaternion):
            return other
        if isinstance(other, (int, Fraction, FieldElement)):
            return self.algebra(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ExactQuaternion(tuple(a + b for a, b in zip(self.coords, o.coords)), self.algebra)

    __radd__ = __add__

    def __neg__(self):
        return ExactQuaternion(tuple(-a for a in self.coords), self.algebra)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        a0, a1, a2, a3 = self.coords
        b0, b1, b2, b3 = o.coords
        dl, gm = self.algebra.delta, self.algebra.gamma
        dg = dl * gm
        return ExactQuaternion(
            (
                a0 * b0 + dl * a1 * b1 + gm * a2 * b2 - dg * a3 * b3,
                a0 * b1 + a1 * b0 - gm * a2 * b3 + gm * a3 * b2,
                a0 * b2 + a2 * b0 + dl * a1 * b3 - dl * a3 * b1,
                a0 * b3 + a3 * b0 + a1 * b2 - a2 * b1,
            ),
            self.algebra,
        )

    def __rmul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self

    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, ExactQuaternion) else other
        if o is NotImplemented:
            return NotImplemented
        return self.coords == o.coords

    def __hash__(self):
        return hash(self.coords)

    def __bool__(self):
        return any(self.coords)

    def conj(self) -> "ExactQuaternion":
        x0, x1, x2, x3 = self.coords
        return ExactQuaternion((x0, -x1, -x2, -x3), self.algebra)

    def re(self) -> FieldElement:
        return self.coords[0]

    def im(self) -> "ExactQuaternion":
        z = self.algebra.field(0)
        return ExactQuaternion((z,) + self.coords[1:], self.algebra)

    def rnorm(self) -> FieldElement:
        """Reduced norm q * conj(q) = x0^2 - delta x1^2 - gamma x2^2 + delta gamma x3^2."""
        x0, x1, x2, x3 = self.coords
        dl, gm = self.algebra.delta, self.algebra.gamma
        return x0 * x0 - dl * x1 * x1 - gm * x2 * x2 + dl * gm * x3 * x3

    def inverse(self) -> "ExactQuaternion":
        n = self.rnorm()
        if not n:
            raise ZeroDivisionError("quaternion of reduced norm zero")
        inv = n.inverse()
        return ExactQuaternion(tuple(c * inv for c in self.conj().coords), self.algebra)

    def is_integral(self) -> bool:
        return all(c.is_integral() for c in self.coords)

    def embed(self, place: Place = "trivial") -> np.ndarray:
        return embed_quaternion(self, place)

    def __str__(self):
        names = ("", "i", "j", "ij")
        parts = [f"({c}){n}" for c, n in zip(self.coords, names) if c]
        return " + ".join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# floating quaternions are length-4 numpy arrays (q0, q1, q2, q3)

FloatQuaternion = np.ndarray

# multiplication table of the Hamilton basis: e_a e_b = MULT[a, b, c] e_c
_MULT = np.zeros((4, 4, 4))
for _a, _b, _c, _s in [
    (0, 0, 0, 1), (0, 1, 1, 1), (0, 2, 2, 1), (0, 3, 3, 1),
    (1, 0, 1, 1), (1, 1, 0, -1), (1, 2, 3, 1), (1, 3, 2, -1),
    (2, 0, 2, 1), (2, 1, 3, -1), (2, 2, 0, -1), (2, 3, 1, 1),
    (3, 0, 3, 1), (3, 1, 2, 1), (3, 2, 1, -1), (3, 3, 0, -1),
]:
    _MULT[_a, _b, _c] = _s
HAMILTON_TABLE = _MULT
_CONJ = np.array([1.0, -1.0, -1.0, -1.0])


def fq(q0=0.0, q1=0.0, q2=0.0, q3=0.0) -> FloatQuaternion:
    return np.array([q0, q1, q2, q3], dtype=float)


def from_complex(z: complex) -> FloatQuaternion:
    return fq(z.real, z.imag)


def qmul(p: FloatQuaternion, q: FloatQuaternion) -> FloatQuaternion:
    return np.einsum("a,b,abc->c", p, q, _MULT)


def qconj(q: FloatQuaternion) -> FloatQuaternion:
    return q * _CONJ


def qnorm(q: FloatQuaternion) -> float:
    return float(np.sqrt(np.dot(q, q)))


def qinv(q: FloatQuaternion) -> FloatQuaternion:
    n2 = float(np.dot(q, q))
    if n2 == 0.0:
        raise ZeroDivisionError("inverse of zero quaternion")
    return qconj(q) / n2


def qre(q: FloatQuaternion) -> float:
    return float(q[0])


def qim(q: FloatQuaternion) -> FloatQuaternion:
    return np.array([0.0, q[1], q[2], q[3]])


def conj(q: Union[ExactQuaternion, FloatQuaternion]):
    return q.conj() if isinstance(q, ExactQuaternion) else qconj(q)


def re(q: Union[ExactQuaternion, FloatQuaternion]):
    return q.re() if isinstance(q, ExactQuaternion) else qre(q)


def im(q: Union[ExactQuaternion, FloatQuaternion]):
    return q.im() if isinstance(q, ExactQuaternion) else qim(q)


def rnorm(q: Union[ExactQuaternion, FloatQuaternion]):
    """Reduced norm q conj(q); exact in k, or |q|^2 for floats."""
    return q.rnorm() if isinstance(q, ExactQuaternion) else float(np.dot(q, q))


def embed_quaternion(q: ExactQuaternion, place: Place = "trivial") -> FloatQuaternion:
    """Image of ``q`` in H under the isomorphism D (x) k_v = H at a real place."""
    A = q.algebra
    if not A.is_definite():
        raise FieldError("delta and gamma must be totally negative to embed into H")
    sd = math.sqrt(-A.delta.embed(place))
    sg = math.sqrt(-A.gamma.embed(place))
    x0, x1, x2, x3 = (c.embed(place) for c in q.coords)
    return fq(x0, x1 * sd, x2 * sg, x3 * sd * sg)


def similar_to_complex(q: FloatQuaternion) -> tuple[complex, FloatQuaternion]:
    """Return (c, r) with c complex, r c r^-1 = q, |c| = |q| and Re c = Re q."""
    q = np.asarray(q, dtype=float)
    v = qim(q)
    nv = qnorm(v)
    c = complex(q[0], nv)
    if nv == 0.0:
        return c, fq(1.0)
    # both v + |v| i and v j + |v| j i conjugate |v| i to v; the first vanishes
    # as v -> -|v| i and the second as v -> +|v| i, so pick by the sign of v1
    if v[1] >= 0.0:
        return c, v + fq(0.0, nv)
    j = fq(0.0, 0.0, 1.0)
    return c, qmul(v, j) + nv * qmul(j, fq(0.0, 1.0))


# ---------------------------------------------------------------------------
# reduction modulo an ideal of the standard order


def reduce_mod(q: ExactQuaternion, factor: tuple[PrimeIdealData, int]) -> tuple:
    """Coordinatewise residues of ``q`` in O_D / P^e O_D (standard order basis)."""
    if not q.is_integral():
        raise FieldError(f"{q} is not in the standard order")
    ring = ResidueRing(*factor)
    return tuple(ring.reduce(c) for c in q.coords)


def lift_mod(q: ExactQuaternion, ring: ResidueRing) -> ExactQuaternion:
    return ExactQuaternion(tuple(ring.lift(c) for c in q.coords), q.algebra)


def is_in_ideal(q: ExactQuaternion, rings: Sequence[ResidueRing]) -> bool:
    return all(ring.contains(c) for ring in rings for c in q.coords)
