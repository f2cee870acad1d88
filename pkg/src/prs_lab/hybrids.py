"""Exact density matrices for the sign-state vs Haar hybrid chain.

Five stages over (C^N)^{otimes t}:

1. average of t copies of a keyed binary-phase state, all keys enumerated;
2. average of t copies of a uniformly random sign state (closed form);
3. mixture of binary-type-class states, one class per parity vector;
4. mixture of type-class states over full-weight binary types;
5. the maximally mixed state on the symmetric subspace.

Stages 2 and 3 are the same matrix computed along two different routes.
Stage 3 -> 4 and 4 -> 5 differ exactly by the mass that uniform t-tuples
put on collisions, so those trace distances have closed forms that the
eigen-decomposition route must reproduce.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, ResourceError
from .states import DIM_CAP, DensityMatrix, PureState, kron_power, trace_distance
from .symmetric import sym_dim, sym_projector

HYBRID_IDS = (1, 2, 3, 4, 5)


@dataclass(frozen=True)
class TypeVector:
    """Frequency histogram of a tuple v in [N]^t."""

    counts: tuple[int, ...]

    def __post_init__(self):
        if any(c < 0 for c in self.counts):
            raise DomainError("type counts must be non-negative")

    @property
    def N(self) -> int:
        return len(self.counts)

    @property
    def t(self) -> int:
        return sum(self.counts)

    def parity(self) -> tuple[int, ...]:
        return tuple(c % 2 for c in self.counts)


def type_of(v: Sequence[int], N: int) -> TypeVector:
    """Histogram of symbols 0..N-1 appearing in v."""
    counts = [0] * N
    for entry in v:
        if not 0 <= entry < N:
            raise DomainError(f"entry {entry} outside 0..{N - 1}")
        counts[entry] += 1
    return TypeVector(tuple(counts))


def _tuples(N: int, t: int):
    return itertools.product(range(N), repeat=t)


def _tuple_index(v: tuple[int, ...], N: int) -> int:
    idx = 0
    for digit in v:
        idx = idx * N + digit
    return idx


def _check_dim(N: int, t: int) -> int:
    dim = N**t
    if dim > DIM_CAP:
        raise ResourceError(f"dimension {dim} exceeds cap {DIM_CAP}")
    return dim


def type_state(T: TypeVector, N: int, t: int) -> PureState:
    """Uniform superposition over all tuples with histogram exactly T."""
    if T.N != N or T.t != t:
        raise DomainError("type vector inconsistent with (N, t)")
    dim = _check_dim(N, t)
    vec = np.zeros(dim, dtype=np.complex128)
    for v in _tuples(N, t):
        if type_of(v, N) == T:
            vec[_tuple_index(v, N)] = 1.0
    total = vec.sum().real
    if total == 0:
        raise DomainError("type class is empty")
    return PureState(vec / np.sqrt(total))


def bintype_state(T: tuple[int, ...], N: int, t: int) -> PureState:
    """Uniform superposition over all tuples whose histogram has parity T."""
    if len(T) != N or any(b not in (0, 1) for b in T):
        raise DomainError("parity vector must be a 0/1 vector of length N")
    dim = _check_dim(N, t)
    vec = np.zeros(dim, dtype=np.complex128)
    for v in _tuples(N, t):
        if type_of(v, N).parity() == tuple(T):
            vec[_tuple_index(v, N)] = 1.0
    total = vec.sum().real
    if total == 0:
        raise DomainError("parity class is empty")
    return PureState(vec / np.sqrt(total))


def collision_probability(N: int, t: int) -> float:
    """Exact chance that t uniform draws from [N] are not all distinct."""
    if N < 1 or t < 1:
        raise DomainError("need N >= 1 and t >= 1")
    p_distinct = 1.0
    for i in range(t):
        p_distinct *= max(N - i, 0) / N
    return 1.0 - p_distinct


def hybrid_density(
    stage: int, N: int, t: int, states: Sequence[np.ndarray] | None = None
) -> DensityMatrix:
    """Density matrix of one hybrid stage on (C^N)^{otimes t}.

    Stage 1 needs ``states``: the full list of generator state vectors
    (exact key enumeration, no sampling slack).
    """
    if stage not in HYBRID_IDS:
        raise DomainError(f"stage must be one of {HYBRID_IDS}")
    dim = _check_dim(N, t)

    if stage == 1:
        if not states:
            raise DomainError("stage 1 needs the enumerated generator states")
        acc = np.zeros((dim, dim), dtype=np.complex128)
        for vec in states:
            if len(vec) != N:
                raise DomainError("generator state dimension differs from N")
            v = kron_power(np.asarray(vec, dtype=np.complex128), t)
            acc += np.outer(v, v.conj())
        return DensityMatrix(acc / len(states))

    if stage == 2:
        # Closed form: entry (v, v') is N^{-t} iff the type histograms agree mod 2.
        acc = np.zeros((dim, dim), dtype=np.complex128)
        groups: dict[tuple[int, ...], list[int]] = {}
        for v in _tuples(N, t):
            groups.setdefault(type_of(v, N).parity(), []).append(_tuple_index(v, N))
        for idx in groups.values():
            block = np.ix_(idx, idx)
            acc[block] += 1.0
        return DensityMatrix(acc / dim)

    if stage == 3:
        # Independent route: mixture of parity-class states weighted by the
        # chance that a uniform tuple lands in the class.
        class_sizes: dict[tuple[int, ...], int] = {}
        for v in _tuples(N, t):
            p = type_of(v, N).parity()
            class_sizes[p] = class_sizes.get(p, 0) + 1
        acc = np.zeros((dim, dim), dtype=np.complex128)
        for parity, size in class_sizes.items():
            amp = bintype_state(parity, N, t).amplitudes
            acc += (size / dim) * np.outer(amp, amp.conj())
        return DensityMatrix(acc)

    if stage == 4:
        if t > N:
            raise DomainError(
                f"no binary type vector of weight {t} exists for N = {N}"
            )
        acc = np.zeros((dim, dim), dtype=np.complex128)
        classes = list(itertools.combinations(range(N), t))
        for support in classes:
            counts = tuple(1 if i in support else 0 for i in range(N))
            amp = type_state(TypeVector(counts), N, t).amplitudes
            acc += np.outer(amp, amp.conj())
        return DensityMatrix(acc / len(classes))

    proj = sym_projector(N, t)
    return DensityMatrix(proj.astype(np.complex128) / sym_dim(N, t))


def hybrid_td(
    i: int,
    j: int,
    N: int,
    t: int,
    states: Sequence[np.ndarray] | None = None,
) -> float:
    """Exact trace distance between two hybrid stages.

    For the (3, 4) pair with t > N the full-weight type mixture is empty;
    every uniform tuple collides, stage 3 has no mass on the distinct
    sector, and the distance is exactly 1 (the collision probability).
    """
    if {i, j} == {3, 4} and t > N:
        return 1.0
    a = hybrid_density(i, N, t, states)
    b = hybrid_density(j, N, t, states)
    return trace_distance(a, b)
