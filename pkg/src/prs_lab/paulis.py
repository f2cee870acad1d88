"""n-qubit Pauli strings, sampling, application, and measurement bases.

Global phases are dropped: a PauliString is the projective group element,
which is all that survives conjugation of density matrices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, ResourceError, ShapeError
from .states import DIM_CAP, DensityMatrix, PureState, Rng

_LABELS = "IXYZ"

_MAT_1Q = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}

# Rows are the conjugated eigenvectors: U maps the observable's eigenbasis
# to the computational basis, eigenvalue (-1)^bit per non-identity factor.
_EIGBASIS_1Q = {
    "I": np.eye(2, dtype=np.complex128),
    "Z": np.eye(2, dtype=np.complex128),
    "X": np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2),
    "Y": np.array([[1, -1j], [1, 1j]], dtype=np.complex128) / np.sqrt(2),
}


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis, phase ignored."""

    labels: str

    def __post_init__(self):
        if not self.labels or any(c not in _LABELS for c in self.labels):
            raise DomainError(f"invalid Pauli labels {self.labels!r}")

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def is_identity(self) -> bool:
        return set(self.labels) == {"I"}

    def block(self, index: int, width: int) -> "PauliString":
        """Sub-string of ``width`` qubits starting at qubit index*width."""
        chunk = self.labels[index * width : (index + 1) * width]
        if len(chunk) != width:
            raise ShapeError("block extends past the end of the Pauli string")
        return PauliString(chunk)

    def matrix(self) -> np.ndarray:
        if 2**self.n > DIM_CAP:
            raise ResourceError(f"dense Pauli on {self.n} qubits exceeds cap")
        out = _MAT_1Q[self.labels[0]]
        for c in self.labels[1:]:
            out = np.kron(out, _MAT_1Q[c])
        return out

    def eigenbasis(self) -> np.ndarray:
        """Unitary rotating this observable's eigenbasis to the computational one."""
        out = _EIGBASIS_1Q[self.labels[0]]
        for c in self.labels[1:]:
            out = np.kron(out, _EIGBASIS_1Q[c])
        return out

    def outcome_values(self) -> np.ndarray:
        """Eigenvalue (+-1) of each computational outcome in the rotated basis."""
        vals = np.ones(1)
        for c in self.labels:
            vals = np.kron(vals, np.ones(2) if c == "I" else np.array([1.0, -1.0]))
        return vals


def pauli_sample(n: int, rng: Rng) -> PauliString:
    """Uniform over the 4^n projective n-qubit Paulis."""
    if n < 1:
        raise DomainError("need at least one qubit")
    idx = rng.np.integers(0, 4, size=n)
    return PauliString("".join(_LABELS[i] for i in idx))


def enumerate_pauli_strings(n: int):
    """All 4^n Pauli strings in lexicographic I<X<Y<Z order."""
    for combo in itertools.product(_LABELS, repeat=n):
        yield PauliString("".join(combo))


def pauli_apply(p: PauliString, state):
    """Apply the Pauli to a PureState or conjugate a DensityMatrix."""
    if isinstance(state, PureState):
        if p.n != state.n:
            raise ShapeError("Pauli length does not match qubit count")
        return PureState(p.matrix() @ state.amplitudes)
    if isinstance(state, DensityMatrix):
        if p.n != state.n:
            raise ShapeError("Pauli length does not match qubit count")
        m = p.matrix()
        return DensityMatrix(m @ state.entries @ m.conj().T)
    raise DomainError(f"cannot apply Pauli to {type(state).__name__}")


def expectation(p: PauliString, rho: DensityMatrix) -> float:
    """Tr(P rho), real for Hermitian observables."""
    if p.n != rho.n:
        raise ShapeError("Pauli length does not match qubit count")
    return float(np.trace(p.matrix() @ rho.entries).real)


@lru_cache(maxsize=8)
def pauli_stack(n: int) -> np.ndarray:
    """All 4^n Pauli matrices stacked as a (4^n, 2^n, 2^n) array.

    Index 0 is the identity.  Capped at n <= 5 (16 MiB of matrices).
    """
    if n < 1:
        raise DomainError("need at least one qubit")
    if n > 5:
        raise ResourceError(f"dense Pauli stack on {n} qubits exceeds cap")
    mats = [p.matrix() for p in enumerate_pauli_strings(n)]
    return np.stack(mats)
