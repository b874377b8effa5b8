"""
Small dense complex linear algebra for 2x2 and 4x4 matrices.

Every exponential in this package has a Hermitian generator, so the matrix
exponential is taken through the Hermitian eigendecomposition. That keeps the
propagators unitary to rounding, which the downstream checks rely on.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .exceptions import NegativeSpectrum, NotHermitian

HERMITIAN_TOL = 1e-9
PSD_CLAMP = 1e-10
# eigenvalues this close to zero are rounding noise of an exact zero
ZERO_SNAP = 1e-14

# Pauli matrices
I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)


class HermitianEigen(NamedTuple):
    """Eigenvalues (descending) and matching orthonormal eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.vectors
        return (v * self.values) @ v.conj().T


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(m).T


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product, ``(a⊗b)[2i+k, 2j+l] = a[i, j] * b[k, l]``."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def hermiticity_error(m: np.ndarray) -> float:
    """Largest absolute entry of ``m - m†``."""
    return float(np.max(np.abs(m - dagger(m))))


def check_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    err = hermiticity_error(m)
    if not err <= tol:
        raise NotHermitian(f"matrix deviates from Hermitian by {err:.3e} (tol {tol:.1e})")


def herm_eig(m: np.ndarray) -> HermitianEigen:
    """Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.

    Raises NotHermitian when ``max|m - m†| > 1e-9``.
    """
    m = np.asarray(m, dtype=complex)
    check_hermitian(m)
    # eigh only reads one triangle; symmetrize so both halves count
    w, v = np.linalg.eigh(0.5 * (m + dagger(m)))
    return HermitianEigen(w[::-1].copy(), v[:, ::-1].copy())


def expm_skew(h: np.ndarray, t: float) -> np.ndarray:
    """Return ``exp(-i t h)`` for Hermitian ``h``."""
    w, v = herm_eig(h)
    return (v * np.exp(-1j * t * w)) @ dagger(v)


def sqrtm_psd(m: np.ndarray) -> np.ndarray:
    """Hermitian positive semi-definite square root.

    Eigenvalues in ``[-1e-10, 0)`` are clamped to zero; anything more negative
    raises NegativeSpectrum. Eigenvalues within 1e-14 of zero are taken as
    exact zeros, otherwise the square root blows rounding noise up to ~1e-8.
    """
    w, v = herm_eig(m)
    if w[-1] < -PSD_CLAMP:
        raise NegativeSpectrum(f"smallest eigenvalue {w[-1]:.3e} is below -{PSD_CLAMP:.0e}")
    w = np.where(np.abs(w) <= ZERO_SNAP, 0.0, np.clip(w, 0.0, None))
    return (v * np.sqrt(w)) @ dagger(v)


def unitarity_error(u: np.ndarray) -> float:
    """Frobenius norm of ``u†u - I``."""
    return float(np.linalg.norm(dagger(u) @ u - np.eye(u.shape[0])))


def expm_skew_many(hs: np.ndarray, t: float) -> np.ndarray:
    """Vectorized ``expm_skew`` over a stack of Hermitian matrices ``(..., n, n)``.

    No Hermiticity check; callers build the stack from Hermitian parts.
    """
    w, v = np.linalg.eigh(hs)
    return (v * np.exp(-1j * t * w)[..., None, :]) @ np.conj(np.swapaxes(v, -1, -2))
