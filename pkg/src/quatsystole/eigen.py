"""Dense complex eigenvalues: balancing, Hessenberg reduction, shifted QR."""

from __future__ import annotations

import numpy as np

DEFLATION_TOL = 1e-13


class EigenConvergenceError(ArithmeticError):
    """The QR iteration hit its iteration cap."""


def balance(A: np.ndarray) -> np.ndarray:
    """Diagonal similarity scaling rows/columns to comparable norms (powers of 2)."""
    A = np.array(A, dtype=complex)
    n = A.shape[0]
    off = ~np.eye(n, dtype=bool)
    converged = False
    sweeps = 0
    while not converged and sweeps < 100:
        converged = True
        sweeps += 1
        for i in range(n):
            c = float(np.sum(np.abs(A[:, i][off[:, i]])))
            r = float(np.sum(np.abs(A[i, :][off[i, :]])))
            if c == 0.0 or r == 0.0:
                continue
            f = 1.0
            s = c + r
            while c < r / 2:
                c *= 2
                r /= 2
                f *= 2
            while c >= r * 2:
                c /= 2
                r *= 2
                f /= 2
            if (c + r) < 0.95 * s:
                converged = False
                A[:, i] *= f
                A[i, :] /= f
    return A


def hessenberg(A: np.ndarray) -> np.ndarray:
    """Upper Hessenberg form by Householder reflections (unitary similarity)."""
    H = np.array(A, dtype=complex)
    n = H.shape[0]
    for k in range(n - 2):
        x = H[k + 1 :, k].copy()
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x
        v[0] += phase * alpha
        v /= np.linalg.norm(v)
        H[k + 1 :, k:] -= 2.0 * np.outer(v, v.conj() @ H[k + 1 :, k:])
        H[:, k + 1 :] -= 2.0 * np.outer(H[:, k + 1 :] @ v, v.conj())
        H[k + 2 :, k] = 0.0
    return H


def _givens(a: complex, b: complex) -> tuple[float, complex, float]:
    """c, s, r with [[c, s], [-conj(s), c]] @ [a, b] = [r, 0] (c real)."""
    if b == 0:
        return 1.0, 0.0, abs(a)
    if a == 0:
        return 0.0, np.conj(b) / abs(b), abs(b)
    na = abs(a)
    r = np.hypot(na, abs(b))
    c = na / r
    s = (a / na) * np.conj(b) / r
    return c, s, r


def _wilkinson_shift(H: np.ndarray, hi: int) -> complex:
    a, b = H[hi - 1, hi - 1], H[hi - 1, hi]
    c, d = H[hi, hi - 1], H[hi, hi]
    tr = a + d
    det = a * d - b * c
    disc = np.sqrt(tr * tr / 4 - det)
    mu1, mu2 = tr / 2 + disc, tr / 2 - disc
    return mu1 if abs(mu1 - d) < abs(mu2 - d) else mu2


def eigvals(A: np.ndarray, max_iter: int | None = None) -> np.ndarray:
    """Eigenvalues of a square complex matrix.

    Raises :class:`EigenConvergenceError` when more than ``max_iter`` QR sweeps
    are needed (default 100 per row of ``A``).
    """
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError(f"square matrix required, got shape {A.shape}")
    if n == 0:
        return np.zeros(0, dtype=complex)
    if max_iter is None:
        max_iter = 100 * n
    H = hessenberg(balance(A))
    out = np.zeros(n, dtype=complex)
    hi = n - 1
    total = 0
    since_deflation = 0
    while hi >= 0:
        if hi == 0:
            out[0] = H[0, 0]
            break
        # find the active unreduced block [lo, hi]
        lo = hi
        while lo > 0:
            scale = abs(H[lo, lo]) + abs(H[lo - 1, lo - 1])
            if scale == 0.0:
                scale = np.abs(H).max()
            if abs(H[lo, lo - 1]) <= DEFLATION_TOL * scale:
                H[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            out[hi] = H[hi, hi]
            hi -= 1
            since_deflation = 0
            continue
        if total >= max_iter:
            raise EigenConvergenceError(f"QR iteration did not converge in {max_iter} sweeps")
        total += 1
        since_deflation += 1
        if since_deflation % 11 == 0:
            # exceptional shift breaks cycles
            mu = H[hi, hi] + 1.5 * abs(H[hi, hi - 1])
        else:
            mu = _wilkinson_shift(H, hi)
        # one shifted QR sweep on the block via Givens rotations
        for k in range(lo, hi + 1):
            H[k, k] -= mu
        rots = []
        for k in range(lo, hi):
            c, s, _ = _givens(H[k, k], H[k + 1, k])
            G = np.array([[c, s], [-np.conj(s), c]])
            H[k : k + 2, k:] = G @ H[k : k + 2, k:]
            rots.append(G)
        for k, G in zip(range(lo, hi), rots):
            H[: k + 2, k : k + 2] = H[: k + 2, k : k + 2] @ G.conj().T
        for k in range(lo, hi + 1):
            H[k, k] += mu
    return out
