"""Matrices over quaternions.

Exact matrices are :class:`QuatMatrix` instances with entries in an algebra
D = (delta, gamma / k).  Floating matrices are numpy arrays of shape (m, m, 4)
holding Hamilton quaternion coordinates; the functions below accept both.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import eigen
from .numberfield import FieldElement, Place
from .quaternion import (
    HAMILTON_TABLE,
    ExactQuaternion,
    QuaternionAlgebra,
    embed_quaternion,
)

FLOAT_TOL = 1e-9
PAIR_TOL = 1e-6


class ShapeError(ValueError):
    pass


@dataclass(frozen=True)
class QuatMatrix:
    """Square matrix with exact entries in a quaternion algebra over k."""

    rows: tuple[tuple[ExactQuaternion, ...], ...]
    algebra: QuaternionAlgebra

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.rows)
        m = len(rows)
        if any(len(r) != m for r in rows):
            raise ShapeError("QuatMatrix must be square")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_entries(cls, algebra: QuaternionAlgebra, entries) -> "QuatMatrix":
        """Build from nested lists whose items are quaternions, field elements or ints."""
        def conv(e):
            if isinstance(e, ExactQuaternion):
                return e
            if isinstance(e, (tuple, list)):
                return algebra(*e)
            return algebra(e)

        return cls(tuple(tuple(conv(e) for e in row) for row in entries), algebra)

    @classmethod
    def identity(cls, algebra: QuaternionAlgebra, m: int) -> "QuatMatrix":
        return cls.from_entries(algebra, [[1 if i == j else 0 for j in range(m)] for i in range(m)])

    @classmethod
    def diag(cls, algebra: QuaternionAlgebra, values: Sequence) -> "QuatMatrix":
        m = len(values)
        return cls.from_entries(
            algebra, [[values[i] if i == j else 0 for j in range(m)] for i in range(m)]
        )

    @property
    def size(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij) -> ExactQuaternion:
        i, j = ij
        return self.rows[i][j]

    def replace(self, i: int, j: int, value) -> "QuatMatrix":
        rows = [list(r) for r in self.rows]
        rows[i][j] = value if isinstance(value, ExactQuaternion) else self.algebra(value)
        return QuatMatrix(tuple(tuple(r) for r in rows), self.algebra)

    def star(self) -> "QuatMatrix":
        m = self.size
        return QuatMatrix(
            tuple(tuple(self.rows[j][i].conj() for j in range(m)) for i in range(m)),
            self.algebra,
        )

    def __matmul__(self, other: "QuatMatrix") -> "QuatMatrix":
        if other.size != self.size:
            raise ShapeError(f"size mismatch {self.size} vs {other.size}")
        m = self.size
        zero = self.algebra.zero()
        out = []
        for i in range(m):
            row = []
            for k in range(m):
                acc = zero
                for j in range(m):
                    a, b = self.rows[i][j], other.rows[j][k]
                    if a and b:
                        acc = acc + a * b
                row.append(acc)
            out.append(tuple(row))
        return QuatMatrix(tuple(out), self.algebra)

    def __neg__(self) -> "QuatMatrix":
        return QuatMatrix(tuple(tuple(-e for e in r) for r in self.rows), self.algebra)

    def __pow__(self, k: int) -> "QuatMatrix":
        if k < 0:
            raise ValueError("negative powers need inverse(); use J-adjoint for isometries")
        result = QuatMatrix.identity(self.algebra, self.size)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, QuatMatrix):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def real_trace(self) -> FieldElement:
        acc = self.algebra.field(0)
        for i in range(self.size):
            acc = acc + self.rows[i][i].re()
        return acc

    def is_integral(self) -> bool:
        return all(e.is_integral() for r in self.rows for e in r)

    def is_identity(self, sign: int = 1) -> bool:
        m = self.size
        return all(
            self.rows[i][j] == (sign if i == j else 0) for i in range(m) for j in range(m)
        )

    def to_float(self, place: Place = "trivial") -> np.ndarray:
        return np.array([[embed_quaternion(e, place) for e in r] for r in self.rows])


def form_matrix(algebra: QuaternionAlgebra, a: FieldElement, m: int) -> QuatMatrix:
    """J_a = diag(-a, 1, ..., 1)."""
    return QuatMatrix.diag(algebra, [-a] + [1] * (m - 1))


def form_matrix_float(a: float, m: int) -> np.ndarray:
    J = np.zeros((m, m, 4))
    J[0, 0, 0] = -a
    for i in range(1, m):
        J[i, i, 0] = 1.0
    return J


# ---------------------------------------------------------------------------
# floating matrices, shape (m, m, 4)

AnyMatrix = Union[QuatMatrix, np.ndarray]


def _check_float(A: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 3 or A.shape[0] != A.shape[1] or A.shape[2] != 4:
        raise ShapeError(f"expected an (m, m, 4) quaternion array, got {A.shape}")
    return A


def identity_float(m: int) -> np.ndarray:
    I = np.zeros((m, m, 4))
    I[np.arange(m), np.arange(m), 0] = 1.0
    return I


def star(A: AnyMatrix) -> AnyMatrix:
    if isinstance(A, QuatMatrix):
        return A.star()
    A = _check_float(A)
    return np.transpose(A, (1, 0, 2)) * np.array([1.0, -1.0, -1.0, -1.0])


def mul(A: AnyMatrix, B: AnyMatrix) -> AnyMatrix:
    if isinstance(A, QuatMatrix):
        return A @ B
    A, B = _check_float(A), _check_float(B)
    if A.shape != B.shape:
        raise ShapeError(f"size mismatch {A.shape} vs {B.shape}")
    return np.einsum("ija,jkb,abc->ikc", A, B, HAMILTON_TABLE)


def matvec(A: np.ndarray, v: np.ndarray) -> np.ndarray:
    """A v for a quaternion vector v of shape (m, 4)."""
    return np.einsum("ija,jb,abc->ic", A, v, HAMILTON_TABLE)


def real_trace(A: AnyMatrix):
    if isinstance(A, QuatMatrix):
        return A.real_trace()
    A = _check_float(A)
    return float(np.trace(A[:, :, 0]))


def complexify(A: np.ndarray) -> np.ndarray:
    """The ring embedding M_m(H) -> M_2m(C).

    Each entry q0 + q1 i + q2 j + q3 ij is written (q0 + q1 i) + j (q2 - q3 i),
    giving A = A1 + j A2 and the block matrix [[A1, -conj(A2)], [A2, conj(A1)]].
    """
    A = _check_float(A)
    A1 = A[:, :, 0] + 1j * A[:, :, 1]
    A2 = A[:, :, 2] - 1j * A[:, :, 3]
    return np.block([[A1, -A2.conj()], [A2, A1.conj()]])


def decomplexify(F: np.ndarray) -> np.ndarray:
    """Inverse of :func:`complexify` on its image."""
    m = F.shape[0] // 2
    A1 = F[:m, :m]
    A2 = F[m:, :m]
    return np.stack([A1.real, A1.imag, A2.real, -A2.imag], axis=-1)


def canonical_order(values) -> np.ndarray:
    """Sort by |t| descending, then Re t descending, then Im t descending."""
    vals = np.asarray(values, dtype=complex)
    keys = sorted(range(len(vals)), key=lambda k: (-round(abs(vals[k]), 9), -round(vals[k].real, 9), -vals[k].imag))
    return vals[keys]


def right_eigenvalues(A: AnyMatrix, place: Place = "trivial") -> np.ndarray:
    """The 2m complex right eigenvalues of A (spectrum of its complexification)."""
    if isinstance(A, QuatMatrix):
        A = A.to_float(place)
    return canonical_order(eigen.eigvals(complexify(A)))


def right_eigenvector(A: np.ndarray, t: complex) -> np.ndarray:
    """A quaternion vector v with A v = v t, from a null vector of f(A) - t."""
    F = complexify(A)
    m = F.shape[0] // 2
    _, _, vh = np.linalg.svd(F - t * np.eye(2 * m))
    z = vh[-1].conj()
    x, y = z[:m], z[m:]
    # x + j y in the basis 1, i, j, ij
    return np.stack([x.real, x.imag, y.real, -y.imag], axis=-1)


def match_multisets(xs, ys, tol: float) -> bool:
    """Greedy tolerance matching of two complex multisets in canonical order."""
    xs = list(canonical_order(xs))
    ys = list(canonical_order(ys))
    if len(xs) != len(ys):
        return False
    for x in xs:
        k = min(range(len(ys)), key=lambda i: abs(ys[i] - x))
        if abs(ys[k] - x) > tol * max(1.0, abs(x)):
            return False
        ys.pop(k)
    return True


def is_conjugation_closed(values, tol: float = PAIR_TOL) -> bool:
    vals = np.asarray(values, dtype=complex)
    return match_multisets(vals, vals.conj(), tol)


def is_inversion_closed(values, tol: float = PAIR_TOL) -> bool:
    vals = np.asarray(values, dtype=complex)
    return match_multisets(vals, 1.0 / vals, tol)


# ---------------------------------------------------------------------------
# predicates


def _close(A: np.ndarray, B: np.ndarray, tol: float) -> bool:
    return bool(np.max(np.abs(A - B)) <= tol) if A.size else True


def is_hermitian(A: AnyMatrix, tol: float = FLOAT_TOL) -> bool:
    if isinstance(A, QuatMatrix):
        return A.star() == A
    return _close(star(A), _check_float(A), tol)


def is_unitary(A: AnyMatrix, tol: float = FLOAT_TOL) -> bool:
    if isinstance(A, QuatMatrix):
        I = QuatMatrix.identity(A.algebra, A.size)
        return A @ A.star() == I and A.star() @ A == I
    A = _check_float(A)
    I = identity_float(A.shape[0])
    return _close(mul(A, star(A)), I, tol) and _close(mul(star(A), A), I, tol)


def preserves_form(A: AnyMatrix, J: AnyMatrix, tol: float = FLOAT_TOL) -> bool:
    """A* J A == J (exactly for QuatMatrix, entrywise within tol for floats)."""
    if isinstance(A, QuatMatrix):
        return A.star() @ J @ A == J
    return _close(mul(mul(star(A), J), A), _check_float(J), tol)


def form_inverse(A: np.ndarray, a: float) -> np.ndarray:
    """Inverse of a J_a-preserving matrix: J^-1 A* J."""
    m = A.shape[0]
    J = form_matrix_float(a, m)
    Jinv = form_matrix_float(1.0 / a, m)
    return mul(mul(Jinv, star(A)), J)


def inverse_float(A: np.ndarray) -> np.ndarray:
    return decomplexify(np.linalg.inv(complexify(A)))


def gram_schmidt(A: np.ndarray) -> np.ndarray:
    """Orthonormalise the columns of A for <x, y> = sum conj(x_i) y_i (right scalars)."""
    A = _check_float(A).copy()
    m = A.shape[0]
    Q = np.zeros_like(A)
    for k in range(m):
        v = A[:, k, :].copy()
        for j in range(k):
            u = Q[:, j, :]
            # <u, v> = sum conj(u_i) v_i ; v <- v - u <u, v>
            ip = np.einsum("ia,ib,abc->c", u * np.array([1, -1, -1, -1]), v, HAMILTON_TABLE)
            v = v - np.einsum("ia,b,abc->ic", u, ip, HAMILTON_TABLE)
        nv = np.sqrt(np.sum(v * v))
        if nv == 0.0:
            raise ArithmeticError("columns are linearly dependent")
        Q[:, k, :] = v / nv
    return Q
