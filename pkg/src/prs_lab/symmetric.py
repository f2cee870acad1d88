"""Symmetric subspace of (C^N)^{otimes t}: dimension and projector.

Works on plain arrays so qudit dimensions that are not powers of two are
allowed (the projector is an operator-level object, not a qubit state).
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .errors import DomainError, ResourceError
from .states import DIM_CAP


def sym_dim(N: int, t: int) -> int:
    """Dimension C(N+t-1, t) of the symmetric subspace, exact big integer."""
    if N < 1 or t < 1:
        raise DomainError("need N >= 1 and t >= 1")
    return math.comb(N + t - 1, t)


def permutation_operator(N: int, t: int, perm: tuple[int, ...]) -> np.ndarray:
    """Operator permuting the t tensor factors of (C^N)^{otimes t}.

    ``perm`` maps source slot -> target slot: basis vector with digits d
    goes to the vector whose digit at slot perm[i] is d[i].
    """
    dim = N**t
    if dim > DIM_CAP:
        raise ResourceError(f"dimension {dim} exceeds cap {DIM_CAP}")
    if sorted(perm) != list(range(t)):
        raise DomainError(f"{perm} is not a permutation of 0..{t - 1}")
    src = np.arange(dim)
    digits = np.empty((t, dim), dtype=np.int64)
    rem = src.copy()
    for slot in range(t - 1, -1, -1):  # least significant digit last
        digits[slot] = rem % N
        rem //= N
    out_digits = np.empty_like(digits)
    for i, target in enumerate(perm):
        out_digits[target] = digits[i]
    dst = np.zeros(dim, dtype=np.int64)
    for slot in range(t):
        dst = dst * N + out_digits[slot]
    op = np.zeros((dim, dim))
    op[dst, src] = 1.0
    return op


def sym_projector(N: int, t: int) -> np.ndarray:
    """(1/t!) sum over all factor permutations; idempotent, trace C(N+t-1,t)."""
    if N < 1 or t < 1:
        raise DomainError("need N >= 1 and t >= 1")
    dim = N**t
    if dim > DIM_CAP:
        raise ResourceError(f"dimension {dim} exceeds cap {DIM_CAP}")
    acc = np.zeros((dim, dim))
    count = 0
    for perm in itertools.permutations(range(t)):
        acc += permutation_operator(N, t, perm)
        count += 1
    return acc / count
