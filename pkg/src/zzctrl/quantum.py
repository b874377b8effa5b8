"""
Two-qubit states, the six-parameter Hamiltonian, and concurrence.

Basis ordering is |00>, |01>, |10>, |11> and hbar = 1 throughout.
"""
from __future__ import annotations

from dataclasses import dataclass, astuple, fields
from typing import Literal

import numpy as np

from .exceptions import NegativeSpectrum, NotHermitian
from .linalg import (
    I2, SX, SY, SZ, ZERO_SNAP, check_hermitian, dagger, expm_skew, herm_eig, kron, sqrtm_psd,
)

DENSITY_TOL = 1e-9

XI = kron(SX, I2)
IX = kron(I2, SX)
ZI = kron(SZ, I2)
IZ = kron(I2, SZ)
ZZ = kron(SZ, SZ)
XX = kron(SX, SX)
YY = kron(SY, SY)

#: dH/du for each control, in ControlVector field order.
CONTROL_OPERATORS = np.stack([XI, IX, ZI, IZ, ZZ, XX])
CONTROL_NAMES = ("kappa_a", "kappa_b", "eps_a", "eps_b", "zeta", "nu")
CONTROL_LABELS = ("XI", "IX", "ZI", "IZ", "ZZ", "XX")

StateKind = Literal["pure", "mixed", "rank2"]
STATE_KINDS: tuple[str, ...] = ("pure", "mixed", "rank2")


@dataclass(frozen=True)
class ControlVector:
    """Six real parameters of one Hamiltonian slice."""

    kappa_a: float = 0.0
    kappa_b: float = 0.0
    eps_a: float = 0.0
    eps_b: float = 0.0
    zeta: float = 0.0
    nu: float = 0.0

    def __post_init__(self):
        if not np.all(np.isfinite(astuple(self))):
            raise ValueError(f"non-finite control parameter in {self}")

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=float)

    @classmethod
    def from_array(cls, values) -> "ControlVector":
        values = np.asarray(values, dtype=float).ravel()
        if values.shape != (6,):
            raise ValueError(f"expected 6 control values, got shape {values.shape}")
        return cls(*map(float, values))

    def as_dict(self) -> dict[str, float]:
        return {f.name: float(getattr(self, f.name)) for f in fields(self)}


@dataclass(frozen=True)
class SpectrumBounds:
    """Range ``[m, M]`` of the ZZ measurement over the unitary orbit of a state."""

    m: float
    M: float
    concurrence: float

    def contains(self, value: float, tol: float = 0.0) -> bool:
        return self.m - tol <= value <= self.M + tol


def hamiltonian(u) -> np.ndarray:
    """Hamiltonian of one slice as a real symmetric 4x4 (complex dtype).

    ``u`` is a ControlVector or any length-6 sequence in the order
    (kappa_a, kappa_b, eps_a, eps_b, zeta, nu).
    """
    ka, kb, ea, eb, z, n = u.as_array() if isinstance(u, ControlVector) else np.asarray(u, float)
    ep, em = ea + eb, ea - eb
    return np.array(
        [
            [ep + z, kb, ka, n],
            [kb, em - z, n, ka],
            [ka, n, -em - z, kb],
            [n, ka, kb, -ep + z],
        ],
        dtype=complex,
    )


def validate_density(rho: np.ndarray, tol: float = DENSITY_TOL) -> np.ndarray:
    """Check Hermiticity, unit trace and positivity; return rho as complex 4x4."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"density matrix must be 4x4, got {rho.shape}")
    check_hermitian(rho, tol)
    tr = np.trace(rho).real
    if abs(tr - 1.0) > tol:
        raise ValueError(f"density matrix trace is {tr!r}, expected 1")
    lo = herm_eig(rho).values[-1]
    if lo < -tol:
        raise NegativeSpectrum(f"density matrix has eigenvalue {lo:.3e}")
    return rho


def pure_state(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def bell_state(which: str = "phi+") -> np.ndarray:
    s = 1 / np.sqrt(2)
    vecs = {
        "phi+": [s, 0, 0, s],
        "phi-": [s, 0, 0, -s],
        "psi+": [0, s, s, 0],
        "psi-": [0, s, -s, 0],
    }
    return pure_state(vecs[which])


def werner_state(p: float) -> np.ndarray:
    return p * bell_state("phi+") + (1 - p) * np.eye(4) / 4


def evolve(rho: np.ndarray, u, dt: float, drift: np.ndarray | None = None) -> np.ndarray:
    """Propagate ``rho`` through one constant slice: ``U rho U†``, ``U = exp(-i dt H(u))``."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    h = hamiltonian(u)
    if drift is not None:
        h = h + drift
    U = expm_skew(h, dt)
    return U @ rho @ dagger(U)


def spin_flip(rho: np.ndarray) -> np.ndarray:
    """``(σy⊗σy) rho* (σy⊗σy)``."""
    return YY @ np.conj(rho) @ YY


def r_matrix(rho: np.ndarray) -> np.ndarray:
    """The Hermitian matrix ``sqrt(sqrt(rho) rho~ sqrt(rho))``."""
    s = sqrtm_psd(rho)
    return sqrtm_psd(s @ spin_flip(rho) @ s)


def r_spectrum(rho: np.ndarray) -> np.ndarray:
    """Eigenvalues of ``r_matrix(rho)``, descending.

    Computed as the singular values of ``sqrt(rho) sqrt(rho~)``, whose Gram
    matrix is ``R²``. This avoids a second square root of a matrix whose
    small eigenvalues carry rounding noise (pure states would otherwise lose
    eight digits).
    """
    s = sqrtm_psd(rho)
    s_flip = YY @ np.conj(s) @ YY  # sqrt of the spin-flipped state
    return np.linalg.svd(s @ s_flip, compute_uv=False)


def concurrence(rho: np.ndarray) -> float:
    """Wootters concurrence ``max(0, l1 - l2 - l3 - l4)`` over the spectrum of R."""
    lam = r_spectrum(rho)
    c = lam[0] - lam[1] - lam[2] - lam[3]
    return float(min(max(c, 0.0), 1.0))


def zz_expectation(rho: np.ndarray) -> float:
    """``Tr((σz⊗σz) rho)``, i.e. ``rho00 - rho11 - rho22 + rho33``."""
    d = np.real(np.diagonal(rho))
    return float(d[0] - d[1] - d[2] + d[3])


def spectrum_bounds(rho: np.ndarray) -> SpectrumBounds:
    """Extreme ZZ values attainable on the unitary orbit of ``rho``.

    Pairing the sorted spectrum with the ZZ eigenvalues (1, 1, -1, -1) gives
    ``M = (l1 + l2) - (l3 + l4)`` and ``m = -M``.
    """
    w = herm_eig(rho).values
    w = np.where(np.abs(w) <= ZERO_SNAP, 0.0, w)
    # normalised by the trace so pure and rank-2 states land exactly on +-1
    big = w[0] + w[1]
    small = w[2] + w[3]
    M = float((big - small) / (big + small))
    return SpectrumBounds(m=-M, M=M, concurrence=concurrence(rho))


def sample_state(kind: StateKind, seed: int) -> np.ndarray:
    """Random density matrix, deterministic in ``seed``.

    pure   Haar-random vector (normalised complex Gaussian)
    mixed  Ginibre ensemble ``G G† / Tr(G G†)`` with 4x4 G
    rank2  same with a 4x2 G
    """
    rng = np.random.default_rng(seed)
    if kind == "pure":
        psi = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        return pure_state(psi)
    if kind == "mixed":
        cols = 4
    elif kind == "rank2":
        cols = 2
    else:
        raise ValueError(f"unknown state kind {kind!r}")
    g = rng.standard_normal((4, cols)) + 1j * rng.standard_normal((4, cols))
    rho = g @ dagger(g)
    return rho / np.trace(rho).real


def random_local_unitary(rng: np.random.Generator) -> np.ndarray:
    """``U_A ⊗ U_B`` with both factors Haar-random on U(2)."""
    return kron(haar_unitary(2, rng), haar_unitary(2, rng))


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


__all__ = [
    "CONTROL_LABELS", "CONTROL_NAMES", "CONTROL_OPERATORS", "ControlVector", "NotHermitian",
    "SpectrumBounds", "STATE_KINDS", "XI", "IX", "ZI", "IZ", "ZZ", "XX", "YY",
    "bell_state", "concurrence", "evolve", "hamiltonian", "haar_unitary", "pure_state",
    "r_matrix", "r_spectrum", "random_local_unitary", "sample_state", "spectrum_bounds",
    "spin_flip", "validate_density", "werner_state", "zz_expectation",
]
