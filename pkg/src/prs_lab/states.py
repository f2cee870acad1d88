"""Dense linear algebra for small multi-qubit systems.

States are plain complex128 numpy arrays wrapped in thin validated types.
Everything is exact up to float64: eigen-decomposition of Hermitian
matrices is the single primitive behind trace distance and PSD checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericError, ResourceError, ShapeError

ATOL = 1e-9

#: Largest dense dimension we allocate for a single state / operator.
DIM_CAP = 4096


class Rng:
    """Seeded random stream; substreams are derived by counter.

    Identical seeds reproduce identical byte streams (PCG64).  Parallel
    tasks must each own a derived stream, never share one.
    """

    def __init__(self, seed: int, _spawn_key: tuple[int, ...] = ()):
        self.seed = int(seed)
        self._spawn_key = tuple(int(i) for i in _spawn_key)
        self.np = np.random.default_rng(
            np.random.SeedSequence(self.seed, spawn_key=self._spawn_key)
        )

    def derive(self, index: int) -> "Rng":
        """Independent substream number ``index`` of this stream."""
        return Rng(self.seed, self._spawn_key + (int(index),))

    def __repr__(self) -> str:  # pragma: no cover
        return f"Rng(seed={self.seed}, spawn_key={self._spawn_key})"


def _qubit_count(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim <= 0 or (1 << n) != dim:
        raise ShapeError(f"dimension {dim} is not a power of two")
    return n


@dataclass(frozen=True)
class PureState:
    """Unit vector in (C^2)^{otimes n}."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        _qubit_count(amps.shape[0])
        if amps.ndim != 1:
            raise ShapeError("state vector must be one-dimensional")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > ATOL:
            raise NumericError(f"state vector norm {norm} is not 1")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n(self) -> int:
        return _qubit_count(self.amplitudes.shape[0])

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def density(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))

    def tensor(self, other: "PureState") -> "PureState":
        if self.dim * other.dim > DIM_CAP:
            raise ResourceError(
                f"tensor product dimension {self.dim * other.dim} exceeds cap {DIM_CAP}"
            )
        return PureState(np.kron(self.amplitudes, other.amplitudes))

    def overlap(self, other: "PureState") -> complex:
        if self.dim != other.dim:
            raise ShapeError("overlap of states with different dimension")
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, PSD, unit-trace matrix on n qubits."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.ascontiguousarray(self.entries, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ShapeError("density matrix must be square")
        _qubit_count(m.shape[0])
        if not np.allclose(m, m.conj().T, atol=ATOL):
            raise NumericError("density matrix is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > ATOL:
            raise NumericError(f"density matrix trace {tr} is not 1")
        lo = float(np.linalg.eigvalsh(m)[0])
        if lo < -ATOL:
            raise NumericError(f"density matrix has eigenvalue {lo} < 0")
        object.__setattr__(self, "entries", m)

    @property
    def n(self) -> int:
        return _qubit_count(self.entries.shape[0])

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def purity(self) -> float:
        return float(np.trace(self.entries @ self.entries).real)

    def tensor(self, other: "DensityMatrix") -> "DensityMatrix":
        if self.dim * other.dim > DIM_CAP:
            raise ResourceError(
                f"tensor product dimension {self.dim * other.dim} exceeds cap {DIM_CAP}"
            )
        return DensityMatrix(np.kron(self.entries, other.entries))


def basis_state(n: int, index: int) -> PureState:
    """Computational basis state |index> on n qubits."""
    if n < 1:
        raise DomainError("need at least one qubit")
    if not 0 <= index < 2**n:
        raise DomainError(f"basis index {index} out of range for {n} qubits")
    v = np.zeros(2**n, dtype=np.complex128)
    v[index] = 1.0
    return PureState(v)


def kron_power(vec: np.ndarray, t: int) -> np.ndarray:
    """t-fold tensor power of a vector, dense."""
    if t < 1:
        raise DomainError("tensor power needs t >= 1")
    if len(vec) ** t > DIM_CAP:
        raise ResourceError(f"dimension {len(vec)**t} exceeds cap {DIM_CAP}")
    out = vec
    for _ in range(t - 1):
        out = np.kron(out, vec)
    return out


def partial_trace_leading(rho: DensityMatrix, k: int) -> DensityMatrix:
    """Trace out the k leading (most significant) qubits."""
    n = rho.n
    if not 0 <= k <= n:
        raise DomainError(f"cannot trace {k} of {n} qubits")
    if k == 0:
        return rho
    a, b = 2**k, 2 ** (n - k)
    resh = rho.entries.reshape(a, b, a, b)
    return DensityMatrix(np.trace(resh, axis1=0, axis2=2))


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Half the sum of absolute eigenvalues of rho - sigma."""
    if rho.dim != sigma.dim:
        raise ShapeError("trace distance of states with different dimension")
    eigs = np.linalg.eigvalsh(rho.entries - sigma.entries)
    return float(0.5 * np.abs(eigs).sum())


def frobenius_sq(a: np.ndarray, b: np.ndarray) -> float:
    """Squared Frobenius norm of a - b."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch {a.shape} vs {b.shape}")
    d = a - b
    return float(np.sum(d.real**2 + d.imag**2))


def fidelity_overlap(psi: PureState, rho: DensityMatrix) -> float:
    """<psi| rho |psi>."""
    if psi.dim != rho.dim:
        raise ShapeError("state and density matrix dimension mismatch")
    return float(np.vdot(psi.amplitudes, rho.entries @ psi.amplitudes).real)


def haar_sample(n: int, rng: Rng) -> PureState:
    """Haar-random pure state: normalized i.i.d. complex Gaussian vector."""
    if n < 1:
        raise DomainError("need at least one qubit")
    dim = 2**n
    v = rng.np.normal(size=dim) + 1j * rng.np.normal(size=dim)
    return PureState(v / np.linalg.norm(v))


def measure_shots(
    rho: DensityMatrix, basis: np.ndarray, shots: int, rng: Rng
) -> np.ndarray:
    """Histogram of computational outcomes after the basis change U rho U^dag.

    Shot count is consumed in one multinomial draw; statistically identical
    to measuring the copies one at a time.
    """
    if shots < 0:
        raise DomainError("shot count must be non-negative")
    basis = np.asarray(basis, dtype=np.complex128)
    if basis.shape != (rho.dim, rho.dim):
        raise ShapeError("basis unitary dimension mismatch")
    probs = np.einsum("ij,jk,ik->i", basis, rho.entries, basis.conj()).real
    if abs(probs.sum() - 1.0) > 1e-6:
        raise NumericError(f"outcome probabilities sum to {probs.sum()}")
    probs = np.clip(probs, 0.0, None)
    probs = probs / probs.sum()
    return rng.np.multinomial(shots, probs)


def swap_test_accept_prob(rho: DensityMatrix) -> float:
    """Acceptance probability (1 + Tr rho^2) / 2 of a two-copy swap test."""
    return 0.5 * (1.0 + rho.purity)


def swap_test_sample(rho: DensityMatrix, shots: int, rng: Rng) -> int:
    """Number of accepting swap tests out of ``shots`` independent runs."""
    if shots < 0:
        raise DomainError("shot count must be non-negative")
    return int(rng.np.binomial(shots, swap_test_accept_prob(rho)))
