"""
Dynamical Lie algebra of a set of skew-Hermitian generators.

The algebra is grown breadth first: round 0 inserts the generators, and each
later round brackets the elements found in the previous round against the
whole basis as it stood when the round began. A candidate joins the basis when
its component orthogonal to the current span is larger than ``tol`` times its
own norm, so the test does not depend on generator magnitudes.

Only traceless parts are kept. The identity direction of ``u(4)`` never
appears in a commutator, so it is recorded separately and plays no part in
the density-matrix controllability verdict (full ``su(4)``, dimension 15).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

import numpy as np

from .exceptions import DegenerateInput
from .linalg import I2, SX, SY, SZ, dagger, kron
from .quantum import CONTROL_LABELS, CONTROL_OPERATORS

SKEW_TOL = 1e-10
DEFAULT_TOL = 1e-8
SU4_DIM = 15

_PAULI_1Q = {"I": I2, "X": SX, "Y": SY, "Z": SZ}
PAULI_LABELS = tuple(a + b for a, b in product("IXYZ", repeat=2))
PAULI_BASIS = np.stack([kron(_PAULI_1Q[a], _PAULI_1Q[b]) for a, b in PAULI_LABELS])


@dataclass
class GeneratorSet:
    generators: list[np.ndarray]
    labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.generators:
            raise DegenerateInput("generator set is empty")
        self.generators = [np.asarray(g, dtype=complex) for g in self.generators]
        if not self.labels:
            self.labels = [f"g{i}" for i in range(len(self.generators))]
        if len(self.labels) != len(self.generators):
            raise ValueError("one label per generator")
        for g, name in zip(self.generators, self.labels):
            if g.shape != (4, 4):
                raise DegenerateInput(f"generator {name} has shape {g.shape}, expected (4, 4)")
            err = float(np.max(np.abs(dagger(g) + g)))
            if err > SKEW_TOL:
                raise DegenerateInput(f"generator {name} is not skew-Hermitian (|G† + G| = {err:.2e})")

    @classmethod
    def from_hamiltonians(cls, hs: Sequence[np.ndarray], labels: Sequence[str] = ()) -> "GeneratorSet":
        """Build ``{i H_j}`` from Hermitian operators."""
        return cls([1j * np.asarray(h, dtype=complex) for h in hs], [f"i{l}" for l in labels])

    def with_extra(self, generator: np.ndarray, label: str) -> "GeneratorSet":
        return GeneratorSet(self.generators + [np.asarray(generator, dtype=complex)], self.labels + [label])

    def permuted(self, order: Sequence[int]) -> "GeneratorSet":
        return GeneratorSet([self.generators[i] for i in order], [self.labels[i] for i in order])


def control_generators() -> GeneratorSet:
    """The six generators ``i P`` of the two-qubit control Hamiltonian."""
    return GeneratorSet.from_hamiltonians(list(CONTROL_OPERATORS), CONTROL_LABELS)


def random_hermitian(rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """``scale * (G + G†)/2`` with G a 4x4 complex Gaussian matrix."""
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    return scale * 0.5 * (g + dagger(g))


def coordinates(a: np.ndarray) -> np.ndarray:
    """Real coordinates of skew-Hermitian ``a = iH`` on the two-qubit Pauli basis."""
    h = -1j * np.asarray(a)
    return np.real(np.einsum("pij,ji->p", PAULI_BASIS, h)) / 4.0


def traceless(a: np.ndarray) -> np.ndarray:
    return a - np.trace(a) / a.shape[0] * np.eye(a.shape[0])


@dataclass
class LieBasis:
    """Linearly independent traceless skew-Hermitian matrices spanning the algebra."""

    basis: list[np.ndarray]
    labels: list[str]
    rounds: list[int]
    has_identity: bool = False
    tol: float = DEFAULT_TOL

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @property
    def u4_dimension(self) -> int:
        """Dimension inside ``u(4)``, counting the identity direction if present."""
        return self.dimension + int(self.has_identity)


class _Span:
    """Orthonormal frame in the 15 traceless Pauli coordinates."""

    def __init__(self, tol: float):
        self.tol = tol
        self.frame = np.zeros((0, 16))

    def residual(self, v: np.ndarray) -> np.ndarray:
        # two passes of Gram-Schmidt keep the frame orthonormal to rounding
        for _ in range(2):
            v = v - self.frame.T @ (self.frame @ v)
        return v

    def try_add(self, v: np.ndarray) -> bool:
        norm = np.linalg.norm(v)
        if norm == 0.0:
            return False
        r = self.residual(v)
        rn = np.linalg.norm(r)
        if rn <= self.tol * norm:
            return False
        self.frame = np.vstack([self.frame, r / rn])
        return True


def dla_closure(gens: GeneratorSet, tol: float = DEFAULT_TOL, max_rounds: int = 64) -> LieBasis:
    """Breadth-first commutator closure of ``gens``.

    ``rounds[0]`` counts independent generators; ``rounds[r]`` counts elements
    first produced by bracket round ``r``. Labels record how each element was
    derived, e.g. ``[iXI, iZI]``.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if not isinstance(gens, GeneratorSet):
        gens = GeneratorSet(list(gens))
    span = _Span(tol)
    basis: list[np.ndarray] = []
    labels: list[str] = []
    has_identity = False

    def insert(a: np.ndarray, label: str) -> bool:
        nonlocal has_identity
        tr = np.trace(a)
        if abs(tr) > tol * max(np.linalg.norm(a), 1e-300):
            has_identity = True
        a = traceless(a)
        if span.try_add(coordinates(a)):
            basis.append(a)
            labels.append(label)
            return True
        return False

    count = sum(insert(g, lab) for g, lab in zip(gens.generators, gens.labels))
    rounds = [count]
    frontier = list(range(len(basis)))
    while frontier and len(rounds) <= max_rounds:
        snapshot = len(basis)
        start = len(basis)
        for i in frontier:
            for j in range(snapshot):
                if j in frontier and j <= i:
                    continue  # each unordered frontier pair once
                c = basis[i] @ basis[j] - basis[j] @ basis[i]
                insert(c, f"[{labels[i]}, {labels[j]}]")
        added = len(basis) - start
        if added == 0:
            break
        rounds.append(added)
        frontier = list(range(start, len(basis)))
    return LieBasis(basis, labels, rounds, has_identity, tol)


def is_closed(lie: LieBasis) -> bool:
    """True when no bracket of two basis elements leaves the span."""
    span = _Span(lie.tol)
    for a in lie.basis:
        span.try_add(coordinates(a))
    for a, b in product(lie.basis, repeat=2):
        c = coordinates(a @ b - b @ a)
        n = np.linalg.norm(c)
        if n > 0 and np.linalg.norm(span.residual(c)) > lie.tol * n:
            return False
    return True


def is_dmc(gens: GeneratorSet, tol: float = DEFAULT_TOL) -> bool:
    """Density-matrix controllable iff the algebra is all of ``su(4)``."""
    return dla_closure(gens, tol).dimension == SU4_DIM


def format_report(lie: LieBasis) -> str:
    lines = [
        f"dimension: {lie.dimension} (su(4) has {SU4_DIM})",
        f"round growth: {lie.rounds}",
        f"identity component: {'yes' if lie.has_identity else 'no'}",
        f"DMC: {lie.dimension == SU4_DIM}",
        "basis:",
    ]
    for k, (a, label) in enumerate(zip(lie.basis, lie.labels)):
        c = coordinates(a)
        top = np.argsort(-np.abs(c))[:2]
        lead = " ".join(f"{c[p]:+.3g}*i{PAULI_LABELS[p]}" for p in top if abs(c[p]) > 1e-12)
        lines.append(f"  {k:2d}  {label:<40s} {lead}")
    return "\n".join(lines)
