import math

import numpy as np
import pytest

from ddchain.eigen import decompose
from ddchain.model import TridiagonalHamiltonian


def random_tridiagonal(rng, n):
    return TridiagonalHamiltonian(rng.uniform(-2, 2, n), rng.uniform(-2, 2, n - 1))


def dense(h):
    mat = np.diag(h.diagonal)
    mat += np.diag(h.off_diagonal, 1) + np.diag(h.off_diagonal, -1)
    return mat


def test_two_site_analytic():
    dec = decompose(TridiagonalHamiltonian(np.zeros(2), np.ones(1)))
    assert np.allclose(dec.eigenvalues, [-1.0, 1.0], atol=1e-12)
    s = 1 / math.sqrt(2)
    assert np.allclose(dec.eigenvectors[:, 0], [s, -s], atol=1e-12)
    assert np.allclose(dec.eigenvectors[:, 1], [s, s], atol=1e-12)


def test_three_site_analytic():
    # Characteristic polynomial x^3 - 2x = 0 has roots -sqrt(2), 0, +sqrt(2).
    dec = decompose(TridiagonalHamiltonian(np.zeros(3), np.ones(2)))
    assert np.allclose(dec.eigenvalues, [-math.sqrt(2), 0.0, math.sqrt(2)], atol=1e-12)


def test_open_chain_closed_form_spectrum():
    # Zero diagonal with uniform coupling J has eigenvalues 2J cos(k pi / (n+1)).
    n, j = 129, 1.0
    dec = decompose(TridiagonalHamiltonian(np.zeros(n), np.full(n - 1, j)))
    exact = np.sort(2 * j * np.cos(np.arange(1, n + 1) * np.pi / (n + 1)))
    assert np.abs(dec.eigenvalues - exact).max() <= 1e-10


def test_eigenvalues_sorted_ascending():
    rng = np.random.default_rng(5)
    dec = decompose(random_tridiagonal(rng, 60))
    assert np.all(np.diff(dec.eigenvalues) >= 0)


def test_orthonormality_residual_reconstruction_trace():
    rng = np.random.default_rng(17)
    for n in (2, 3, 7, 50, 200):
        h = random_tridiagonal(rng, n)
        dec = decompose(h)
        v = dec.eigenvectors
        assert np.abs(v.T @ v - np.eye(n)).max() <= 1e-10
        mat = dense(h)
        residual = mat @ v - v * dec.eigenvalues
        bound = 1e-10 * (1 + np.abs(dec.eigenvalues))
        assert np.all(np.abs(residual).max(axis=0) <= bound)
        assert np.abs((v * dec.eigenvalues) @ v.T - mat).max() <= 1e-9
        scale = max(1.0, np.abs(h.diagonal).sum())
        assert abs(dec.eigenvalues.sum() - h.diagonal.sum()) <= 1e-9 * scale


def test_sign_convention_first_significant_component_positive():
    rng = np.random.default_rng(23)
    dec = decompose(random_tridiagonal(rng, 40))
    for k in range(40):
        col = dec.eigenvectors[:, k]
        lead = col[np.abs(col) > 1e-12 * np.abs(col).max()][0]
        assert lead > 0


def test_sign_convention_with_decoupled_blocks():
    # A zero coupling makes some eigenvectors start with exact zeros.
    dec = decompose(TridiagonalHamiltonian(np.array([0.3, 0.1]), np.zeros(1)))
    assert np.allclose(dec.eigenvalues, [0.1, 0.3], atol=1e-15)
    assert np.allclose(dec.eigenvectors[:, 0], [0.0, 1.0], atol=1e-15)
    assert np.allclose(dec.eigenvectors[:, 1], [1.0, 0.0], atol=1e-15)


def test_single_site():
    dec = decompose(TridiagonalHamiltonian(np.array([0.7]), np.zeros(0)))
    assert dec.eigenvalues[0] == pytest.approx(0.7, abs=1e-15)
    assert dec.eigenvectors[0, 0] == 1.0


def test_decomposition_is_deterministic():
    rng = np.random.default_rng(31)
    h = random_tridiagonal(rng, 80)
    a = decompose(h)
    b = decompose(h)
    assert np.array_equal(a.eigenvalues, b.eigenvalues)
    assert np.array_equal(a.eigenvectors, b.eigenvectors)
