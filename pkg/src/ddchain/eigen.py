"""Spectral decomposition of real symmetric tridiagonal Hamiltonians.

Backed by LAPACK through ``scipy.linalg.eigh_tridiagonal``; the wrapper
adds a deterministic eigenvector sign convention and maps solver
failures onto the package error type. Eigenvalues come back ascending
with a full orthonormal eigenvector matrix, which is what the spectral
propagator needs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NumericalError
from .model import TridiagonalHamiltonian


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and the matrix whose column k is the unit
    eigenvector for eigenvalue k."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def size(self) -> int:
        return len(self.eigenvalues)


def decompose(h: TridiagonalHamiltonian) -> SpectralDecomposition:
    """Full spectral decomposition of ``h``.

    Deterministic for identical input: each eigenvector is flipped so
    that its first non-negligible component is positive.

    Raises NumericalError if the underlying eigensolver fails to
    converge.
    """
    try:
        eigenvalues, vectors = scipy.linalg.eigh_tridiagonal(h.diagonal, h.off_diagonal)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericalError(f"tridiagonal eigensolver failed for size {h.size}: {exc}") from exc
    _canonicalize_signs(vectors)
    eigenvalues.flags.writeable = False
    vectors.flags.writeable = False
    return SpectralDecomposition(eigenvalues, vectors)


def _canonicalize_signs(vectors: np.ndarray) -> None:
    # First component of each column whose magnitude is non-negligible
    # (relative to the column max) decides the sign.
    absv = np.abs(vectors)
    cutoff = 1e-12 * absv.max(axis=0)
    n = vectors.shape[0]
    for k in range(vectors.shape[1]):
        col = vectors[:, k]
        for i in range(n):
            if absv[i, k] > cutoff[k]:
                if col[i] < 0:
                    np.negative(col, out=col)
                break
