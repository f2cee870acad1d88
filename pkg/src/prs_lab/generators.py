"""State generators built on the keyed PRF.

* binary-phase states 2^{-n/2} sum_x (-1)^{f(x)} |x>,
* the keyed generator family (single-key and keyed-by-input variants,
  where the per-input subkey is k_x = F1(k, x)),
* the recognizable-abort wrapper eta |0><0| (x) |psi><psi| + (1-eta)|bot><bot|,
* the overlap tester and its tensor-product form.

The keyed-by-input generator is defined through its subkey composition;
ancilla compute/uncompute steps of a circuit realization cancel at the
density-matrix level, so they are documented here rather than simulated
gate by gate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .errors import DomainError, ResourceError, ShapeError
from .prf import PrfKey, PrfSpec, bits_to_int, int_to_bits, prf_bit, prf_eval, _fold_bytes, _encode
from .states import DIM_CAP, DensityMatrix, PureState, Rng, partial_trace_leading

#: Exhaustive key enumeration is allowed up to this key length.
KEY_ENUM_CAP = 12


@dataclass(frozen=True)
class GeneratorParams:
    """(key bits, input bits, output qubits) of a keyed state generator."""

    lam: int
    d: int
    n: int
    variant: str = "test"

    def __post_init__(self):
        if self.lam < 1 or self.d < 1 or self.n < 1:
            raise DomainError("lam, d, n must all be >= 1")
        if 2**self.n > DIM_CAP:
            raise ResourceError(f"2^{self.n} exceeds the dense dimension cap")

    def subkey_spec(self) -> PrfSpec:
        return PrfSpec(self.variant, self.d, self.lam)

    def phase_spec(self) -> PrfSpec:
        return PrfSpec(self.variant, self.n, 1)


@dataclass(frozen=True)
class AbortModel:
    """Per-(key, input) success probability eta of the abort wrapper.

    Honest presets use eta = 1.  An eta below 1 models generators that
    sometimes fail and emit the flagged abort state instead.
    """

    eta: float | None = 1.0
    schedule: Callable[[PrfKey, str], float] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.eta is not None and not 0.0 <= self.eta <= 1.0:
            raise DomainError(f"eta {self.eta} outside [0, 1]")

    @classmethod
    def always(cls) -> "AbortModel":
        return cls(1.0)

    @classmethod
    def constant(cls, eta: float) -> "AbortModel":
        return cls(eta)

    @classmethod
    def keyed(cls, lo: float, hi: float) -> "AbortModel":
        """eta drawn deterministically from [lo, hi] by hashing (key, x)."""
        if not 0.0 <= lo <= hi <= 1.0:
            raise DomainError("need 0 <= lo <= hi <= 1")

        def schedule(key: PrfKey, x: str) -> float:
            u = _fold_bytes(_encode(key, x)) / 2**64
            return lo + (hi - lo) * u

        return cls(eta=None, schedule=schedule)

    def eta_for(self, key: PrfKey, x: str) -> float:
        if self.schedule is not None:
            return self.schedule(key, x)
        return float(self.eta)


def binary_phase_state(phase: Callable[[str], int], n: int) -> PureState:
    """2^{-n/2} sum_x (-1)^{phase(x)} |x>; amplitudes all +-2^{-n/2}."""
    dim = 2**n
    if dim > DIM_CAP:
        raise ResourceError(f"2^{n} exceeds the dense dimension cap")
    scale = dim**-0.5
    amps = np.empty(dim, dtype=np.complex128)
    for y in range(dim):
        amps[y] = -scale if phase(int_to_bits(y, n)) & 1 else scale
    return PureState(amps)


def prs_generate(params: GeneratorParams, key: PrfKey) -> PureState:
    """Binary-phase state whose phases are the keyed PRF bits."""
    if key.lam != params.lam:
        raise DomainError(f"key has {key.lam} bits, params expect {params.lam}")
    spec = params.phase_spec()
    return binary_phase_state(lambda y: prf_bit(spec, key, y), params.n)


def subkey_for(params: GeneratorParams, key: PrfKey, x: str) -> PrfKey:
    """Per-input subkey k_x = F1(key, x), reinterpreted as a lam-bit key."""
    if len(x) != params.d:
        raise DomainError(f"input has {len(x)} bits, params expect {params.d}")
    bits = prf_eval(params.subkey_spec(), key, x)
    return PrfKey.from_int(bits_to_int(bits), params.lam)


def prfs_generate(params: GeneratorParams, key: PrfKey, x: str) -> PureState:
    """Keyed-by-input state: the binary-phase state under subkey k_x."""
    return prs_generate(params, subkey_for(params, key, x))


def abort_state_vector(n: int) -> np.ndarray:
    """|bot> = |1>|0^n>, orthogonal to every success branch |0>|psi>."""
    v = np.zeros(2 ** (n + 1), dtype=np.complex128)
    v[2**n] = 1.0
    return v


class AbortOutput(NamedTuple):
    pre_trace: DensityMatrix  # (n+1)-qubit flagged form
    traced: DensityMatrix  # n-qubit output after dropping the flag qubit
    eta: float
    state: PureState  # the success-branch pure state


def abort_wrapped(
    params: GeneratorParams, key: PrfKey, x: str, model: AbortModel
) -> AbortOutput:
    """Flagged generator output eta |0, psi><0, psi| + (1 - eta)|bot><bot|."""
    eta = model.eta_for(key, x)
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"eta {eta} outside [0, 1]")
    psi = prfs_generate(params, key, x)
    success = np.concatenate([psi.amplitudes, np.zeros_like(psi.amplitudes)])
    bot = abort_state_vector(params.n)
    pre = eta * np.outer(success, success.conj()) + (1.0 - eta) * np.outer(
        bot, bot.conj()
    )
    pre_dm = DensityMatrix(pre)
    return AbortOutput(pre_dm, partial_trace_leading(pre_dm, 1), eta, psi)


def prfs_test(
    params: GeneratorParams,
    key: PrfKey,
    x: str,
    rho: DensityMatrix,
    shots: int,
    rng: Rng,
) -> tuple[float, int]:
    """Overlap tester: analytic acceptance <psi_{k,x}| rho |psi_{k,x}>.

    The generator here is exact, so the analytic probability is exact too;
    sampling draws Bernoulli shots from it.
    """
    psi = prfs_generate(params, key, x)
    if psi.dim != rho.dim:
        raise ShapeError("state and density matrix dimension mismatch")
    prob = float(
        np.einsum("i,ij,j->", psi.amplitudes.conj(), rho.entries, psi.amplitudes).real
    )
    prob = min(max(prob, 0.0), 1.0)
    accepts = int(rng.np.binomial(shots, prob)) if shots else 0
    return prob, accepts


def prfs_test_product(
    params: GeneratorParams,
    pairs: list[tuple[PrfKey, str]],
    rho: DensityMatrix,
) -> float:
    """Acceptance of the t-fold tester: <psi| rho |psi> with psi a tensor product."""
    if not pairs:
        raise DomainError("need at least one (key, input) pair")
    vec = np.ones(1, dtype=np.complex128)
    for key, x in pairs:
        vec = np.kron(vec, prfs_generate(params, key, x).amplitudes)
        if len(vec) > DIM_CAP:
            raise ResourceError("product state exceeds the dense dimension cap")
    if len(vec) != rho.dim:
        raise ShapeError("product state and density matrix dimension mismatch")
    return float(np.einsum("i,ij,j->", vec.conj(), rho.entries, vec).real)


class PrsEnsemble:
    """A generator family with its abort model; enumerable at toy key sizes."""

    def __init__(self, params: GeneratorParams, model: AbortModel | None = None):
        self.params = params
        self.model = model or AbortModel.always()

    def sample_key(self, rng: Rng) -> PrfKey:
        return PrfKey.random(self.params.lam, rng)

    def state(self, key: PrfKey, x: str | None = None) -> PureState:
        if x is None:
            return prs_generate(self.params, key)
        return prfs_generate(self.params, key, x)

    def output(self, key: PrfKey, x: str | None = None) -> DensityMatrix:
        """Traced abort-wrapped output (the state the distinguisher sees)."""
        x_eff = x if x is not None else "0" * self.params.d
        eta = self.model.eta_for(key, x_eff)
        psi = self.state(key, x)
        bot_tail = np.zeros(psi.dim)
        bot_tail[0] = 1.0  # |0^n> block left behind by the traced-out flag
        m = eta * np.outer(psi.amplitudes, psi.amplitudes.conj()) + (
            1.0 - eta
        ) * np.outer(bot_tail, bot_tail)
        return DensityMatrix(m)

    def all_states(self) -> list[np.ndarray]:
        """State vectors under every key; exact, no sampling slack."""
        if self.params.lam > KEY_ENUM_CAP:
            raise ResourceError(
                f"key enumeration needs lam <= {KEY_ENUM_CAP}, got {self.params.lam}"
            )
        return [
            prs_generate(self.params, PrfKey.from_int(k, self.params.lam)).amplitudes
            for k in range(2**self.params.lam)
        ]
