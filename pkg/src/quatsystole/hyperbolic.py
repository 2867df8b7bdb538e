"""Projective model of quaternionic hyperbolic space for the form h_a.

Points are negative lines for h_a(x, y) = -a conj(x0) y0 + sum conj(xi) yi in
H^{n+1}; the metric has curvature pinched in [-1, -1/4].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import mpmath
import numpy as np

from .numberfield import FieldElement
from .quaternion import HAMILTON_TABLE, qconj, qmul
from .quatlinalg import (
    PAIR_TOL,
    QuatMatrix,
    form_matrix_float,
    gram_schmidt,
    match_multisets,
    matvec,
    mul,
    preserves_form,
    real_trace,
    right_eigenvalues,
)

CLASSIFY_TOL = 1e-6
DISTANCE_TOL = 1e-9
FORM_TOL = 1e-8


class GeometryError(ValueError):
    """A point or map is inconsistent with the hyperbolic model."""


class NotLoxodromic(GeometryError):
    pass


def herm(z: np.ndarray, w: np.ndarray, a: float = 1.0) -> np.ndarray:
    """h_a(z, w) as a float quaternion."""
    z = np.asarray(z, dtype=float)
    w = np.asarray(w, dtype=float)
    if z.shape != w.shape:
        raise GeometryError(f"length mismatch {z.shape} vs {w.shape}")
    zc = z * np.array([1.0, -1.0, -1.0, -1.0])
    terms = np.einsum("ia,ib,abc->ic", zc, w, HAMILTON_TABLE)
    terms[0] *= -a
    return terms.sum(axis=0)


def _hsq(z: np.ndarray, a: float) -> float:
    return float(herm(z, z, a)[0])


@dataclass(frozen=True)
class ProjectivePoint:
    """A point P(rep) of the hyperbolic space; rep is an (n+1, 4) array."""

    rep: np.ndarray
    a: float = 1.0

    def __post_init__(self):
        rep = np.array(self.rep, dtype=float)
        if rep.ndim != 2 or rep.shape[1] != 4:
            raise GeometryError(f"representative must have shape (n+1, 4), got {rep.shape}")
        if self.a <= 0:
            raise GeometryError("form parameter a must be positive")
        if not np.any(rep[0]):
            raise GeometryError("first coordinate of the representative must be nonzero")
        if _hsq(rep, self.a) >= 0:
            raise GeometryError("representative is not a negative vector")
        object.__setattr__(self, "rep", rep)

    @classmethod
    def origin(cls, n: int, a: float = 1.0) -> "ProjectivePoint":
        rep = np.zeros((n + 1, 4))
        rep[0, 0] = 1.0
        return cls(rep, a)

    @classmethod
    def from_real(cls, coords, a: float = 1.0) -> "ProjectivePoint":
        rep = np.zeros((len(coords), 4))
        rep[:, 0] = coords
        return cls(rep, a)

    @property
    def n(self) -> int:
        return self.rep.shape[0] - 1

    def affine(self) -> np.ndarray:
        """Coordinates z_i z_0^{-1}, i >= 1."""
        z0 = self.rep[0]
        inv = qconj(z0) / float(np.dot(z0, z0))
        return np.array([qmul(zi, inv) for zi in self.rep[1:]])

    def scaled(self, lam: np.ndarray) -> "ProjectivePoint":
        """Same point with representative rep * lam."""
        rep = np.array([qmul(zi, lam) for zi in self.rep])
        return ProjectivePoint(rep, self.a)


def cosh2_half_distance(z: ProjectivePoint, w: ProjectivePoint) -> float:
    if z.a != w.a:
        raise GeometryError("points belong to different form parameters")
    h = herm(z.rep, w.rep, z.a)
    num = float(np.dot(h, h))  # h(z,w) h(w,z) = |h(z,w)|^2
    den = _hsq(z.rep, z.a) * _hsq(w.rep, w.a)
    return num / den


def distance(z: ProjectivePoint, w: ProjectivePoint) -> float:
    ratio = cosh2_half_distance(z, w)
    if ratio < 1.0 - DISTANCE_TOL:
        raise GeometryError(f"cosh^2 ratio {ratio} < 1; points are not in the negative cone")
    return 2.0 * math.acosh(math.sqrt(max(ratio, 1.0)))


def to_unit_model(z: ProjectivePoint) -> ProjectivePoint:
    """Identify the h_a model with the a = 1 model via rep0 -> sqrt(a) rep0."""
    rep = z.rep.copy()
    rep[0] *= math.sqrt(z.a)
    return ProjectivePoint(rep, 1.0)


# ---------------------------------------------------------------------------
# isometries


@dataclass(frozen=True)
class Isometry:
    """A float matrix preserving J_a, optionally carrying its exact source."""

    mat: np.ndarray
    a: float
    exact: Optional[QuatMatrix] = field(default=None, compare=False)
    check: bool = True

    def __post_init__(self):
        mat = np.array(self.mat, dtype=float)
        object.__setattr__(self, "mat", mat)
        if self.check:
            J = form_matrix_float(self.a, mat.shape[0])
            scale = max(1.0, float(np.max(np.abs(mat))) ** 2)
            if not preserves_form(mat, J, FORM_TOL * scale):
                raise GeometryError("matrix does not preserve the form J_a")

    @classmethod
    def from_exact(cls, C: QuatMatrix, a: FieldElement, check: bool = True) -> "Isometry":
        return cls(C.to_float("trivial"), a.embed("trivial"), C, check)

    @property
    def n(self) -> int:
        return self.mat.shape[0] - 1

    def __matmul__(self, other: "Isometry") -> "Isometry":
        exact = self.exact @ other.exact if (self.exact and other.exact) else None
        return Isometry(mul(self.mat, other.mat), self.a, exact, check=False)


def apply(A: Isometry, z: ProjectivePoint) -> ProjectivePoint:
    rep = matvec(A.mat, z.rep)
    if _hsq(rep, z.a) >= 0:
        raise GeometryError("image is not a negative vector; A does not preserve the form")
    return ProjectivePoint(rep, z.a)


@dataclass(frozen=True)
class Classification:
    kind: str  # "unit_spectrum" or "loxodromic"
    t: Optional[complex] = None
    off_circle: tuple = ()
    eigenvalues: tuple = ()


def classify(A: Union[Isometry, np.ndarray], tol: float = CLASSIFY_TOL) -> Classification:
    """Spectral classification: loxodromic iff some right eigenvalue is off the unit circle."""
    mat = A.mat if isinstance(A, Isometry) else np.asarray(A, dtype=float)
    eig = right_eigenvalues(mat)
    off = [t for t in eig if abs(abs(t) - 1.0) > tol]
    if not off:
        return Classification("unit_spectrum", None, (), tuple(eig))
    if len(off) not in (2, 4):
        raise ArithmeticError(f"{len(off)} eigenvalues off the unit circle; expected 0, 2 or 4")
    t = max(off, key=lambda z: (abs(z), z.imag))
    t = complex(t.real, abs(t.imag))
    if len(off) == 4:
        expected = [t, t.conjugate(), 1 / t, 1 / t.conjugate()]
    else:
        if abs(t.imag) > PAIR_TOL * abs(t):
            raise ArithmeticError("two off-circle eigenvalues but t is not real")
        expected = [t, 1 / t]
    if not match_multisets(off, expected, PAIR_TOL):
        raise ArithmeticError(f"off-circle eigenvalues {off} do not form {{t, conj t, 1/t, 1/conj t}}")
    return Classification("loxodromic", t, tuple(off), tuple(eig))


def translation_length(A: Union[Isometry, np.ndarray], tol: float = CLASSIFY_TOL) -> float:
    c = classify(A, tol)
    if c.kind != "loxodromic":
        raise NotLoxodromic("translation length requested for an element with unit spectrum")
    return 2.0 * math.log(abs(c.t))


def trace_length_bound(A: Union[Isometry, np.ndarray, QuatMatrix], n: Optional[int] = None) -> float:
    """2 ln(|Re tr A| / (n+1)), or -inf when |Re tr A| <= n+1."""
    if isinstance(A, Isometry):
        src = A.exact if A.exact is not None else A.mat
    else:
        src = A
    tr = real_trace(src)
    if n is None:
        n = (src.size if isinstance(src, QuatMatrix) else src.shape[0]) - 1
    if isinstance(tr, FieldElement):
        if (abs_field(tr) - (n + 1)).sign() <= 0:
            return -math.inf
        return 2.0 * (log_abs(tr) - math.log(n + 1))
    if abs(tr) <= n + 1:
        return -math.inf
    return 2.0 * math.log(abs(tr) / (n + 1))


def abs_field(x: FieldElement) -> FieldElement:
    return -x if x.sign() < 0 else x


def log_abs(x: FieldElement) -> float:
    """ln |x| at the trivial place without cancellation or overflow."""
    if not x:
        return -math.inf
    digits = max(len(str(c.numerator)) + len(str(c.denominator)) for c in (x.x, x.y))
    with mpmath.workdps(2 * digits + 30):
        val = mpmath.mpf(x.x.numerator) / x.x.denominator + mpmath.mpf(
            x.y.numerator
        ) / x.y.denominator * mpmath.sqrt(x.d)
        return float(mpmath.log(abs(val)))


# ---------------------------------------------------------------------------
# random isometries (sampling for property checks)


def random_unitary(rng: np.random.Generator, m: int) -> np.ndarray:
    """A random element of Sp(m) from Gram-Schmidt on a Gaussian matrix."""
    return gram_schmidt(rng.standard_normal((m, m, 4)))


def boost(t: float, a: float, m: int) -> np.ndarray:
    """Real hyperbolic translation of length 2|t| along the e0, e1 plane preserving J_a."""
    B = np.zeros((m, m, 4))
    for i in range(2, m):
        B[i, i, 0] = 1.0
    ra = math.sqrt(a)
    B[0, 0, 0] = B[1, 1, 0] = math.cosh(t)
    B[0, 1, 0] = math.sinh(t) / ra
    B[1, 0, 0] = ra * math.sinh(t)
    return B


def random_isometry(rng: np.random.Generator, m: int, a: float, scale: float = 1.0) -> np.ndarray:
    """K1 B K2 with K1, K2 in Sp(1) x Sp(m-1) and B a boost: a random element of Sp(m-1, 1)."""

    def compact():
        K = np.zeros((m, m, 4))
        u = rng.standard_normal(4)
        K[0, 0] = u / np.linalg.norm(u)
        if m > 1:
            K[1:, 1:] = random_unitary(rng, m - 1)
        return K

    if m == 1:
        return compact()
    B = boost(scale * rng.standard_normal(), a, m)
    return mul(mul(compact(), B), compact())
