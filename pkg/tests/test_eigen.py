import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quatsystole.eigen import EigenConvergenceError, balance, eigvals, hessenberg


def _match(a, b):
    """Max distance under the best greedy pairing, relative to the spectral scale."""
    a, b = list(a), list(b)
    worst = 0.0
    for x in a:
        k = min(range(len(b)), key=lambda i: abs(b[i] - x))
        worst = max(worst, abs(b[k] - x))
        b.pop(k)
    return worst


@pytest.mark.parametrize("n", range(1, 13))
def test_against_numpy_random(n):
    rng = np.random.default_rng(n)
    for _ in range(20):
        A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        ours = eigvals(A)
        scale = max(1.0, np.abs(A).max())
        assert _match(ours, np.linalg.eigvals(A)) <= 1e-10 * scale


def test_real_matrices_and_multiplicity():
    A = np.diag([2.0, 2.0, -1.0, 5.0])
    assert np.allclose(np.sort_complex(eigvals(A)), np.sort_complex(np.array([-1, 2, 2, 5], complex)))
    J = np.array([[3.0, 1.0], [0.0, 3.0]])  # Jordan block
    assert np.allclose(eigvals(J), [3, 3], atol=1e-7)


def test_rotation_has_unit_eigenvalues():
    th = 0.7
    R = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    ev = eigvals(R)
    assert np.allclose(np.abs(ev), 1.0, atol=1e-13)
    assert np.allclose(sorted(ev.imag), [-np.sin(th), np.sin(th)], atol=1e-13)


def test_badly_scaled():
    D = np.diag([1e-6, 1.0, 1e6])
    rng = np.random.default_rng(0)
    A = D @ rng.standard_normal((3, 3)) @ np.linalg.inv(D)
    assert _match(eigvals(A), np.linalg.eigvals(A)) <= 1e-8 * np.abs(np.linalg.eigvals(A)).max()


def test_empty_and_shape_errors():
    assert eigvals(np.zeros((0, 0))).shape == (0,)
    with pytest.raises(ValueError):
        eigvals(np.zeros((2, 3)))


def test_iteration_cap():
    rng = np.random.default_rng(1)
    with pytest.raises(EigenConvergenceError):
        eigvals(rng.standard_normal((6, 6)), max_iter=1)


def test_hessenberg_is_similarity():
    rng = np.random.default_rng(2)
    A = rng.standard_normal((7, 7)) + 1j * rng.standard_normal((7, 7))
    H = hessenberg(A)
    assert np.allclose(np.tril(H, -2), 0)
    assert np.trace(H) == pytest.approx(np.trace(A))
    assert np.linalg.norm(H) == pytest.approx(np.linalg.norm(A))
    assert _match(np.linalg.eigvals(H), np.linalg.eigvals(A)) < 1e-10


def test_balance_preserves_spectrum():
    rng = np.random.default_rng(3)
    A = rng.standard_normal((5, 5)) * np.logspace(-4, 4, 5)[:, None]
    B = balance(A)
    assert _match(np.linalg.eigvals(B), np.linalg.eigvals(A)) < 1e-8 * np.abs(np.linalg.eigvals(A)).max()
    assert balance(np.array([[5.0]]))[0, 0] == 5.0


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**31 - 1))
def test_trace_and_determinant(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    ev = eigvals(A)
    assert np.sum(ev) == pytest.approx(np.trace(A), abs=1e-9 * n)
    assert np.prod(ev) == pytest.approx(np.linalg.det(A), rel=1e-8, abs=1e-9)
