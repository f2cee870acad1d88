"""Classical-communication protocols driven by verifiable tomography.

Bit commitment: the receiver sends a random m-qubit Pauli (m = 2^d * n,
one n-qubit block per input x); the committer samples a key, tomographs
the flagged channel on every block, and sends the matrices.  Opening is
(key, bit); the receiver re-verifies every block.  The (inefficient by
design) extractor exhaustively searches the key space.

Pseudo one-time pad: each message bit is encrypted as a tomograph of the
keyed generator at input i || bit; decryption verifies against bit 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError, InfeasibleError
from .generators import AbortModel, GeneratorParams
from .paulis import PauliString, pauli_sample
from .prf import PrfKey, int_to_bits
from .states import Rng
from .tomography import (
    ChannelFirstInput,
    ChannelSecondInput,
    Tomograph,
    Verdict,
    VerifySettings,
    channel_first,
    channel_second,
    tomography_boosted,
    verify_first,
    verify_second,
    ExactSource,
    SampledSource,
)

#: Exhaustive key search in the extractor is allowed up to this key length.
EXTRACTOR_CAP = 14

#: Minimum conjugated overlap between the two committed states that is
#: consistent with a single matrix passing verification for both bits at
#: the reference budget (threshold arithmetic on 4/729-level distances).
BINDING_OVERLAP = 542.0 / 729.0


@dataclass(frozen=True)
class ProtocolParams:
    """Every commitment constant in one place: (lam, d, n, m, budgets)."""

    lam: int
    d: int
    n: int
    mode: str = "analytic"
    s: int = 2048
    boost: int = 8
    desk: bool = True
    variant: str = "test"

    def __post_init__(self):
        if self.lam < 1 or self.d < 1 or self.n < 1:
            raise DomainError("lam, d, n must all be >= 1")
        if not self.desk and not self.binding_margin_ok:
            raise DomainError(
                f"m = {self.m} < 3*lam = {3 * self.lam}; the binding budget"
                " requires m >= 3*lam outside desk mode"
            )

    @property
    def m(self) -> int:
        return 2**self.d * self.n

    @property
    def blocks(self) -> int:
        return 2**self.d

    @property
    def binding_margin_ok(self) -> bool:
        return self.m >= 3 * self.lam

    def gen_params(self) -> GeneratorParams:
        return GeneratorParams(self.lam, self.d, self.n, self.variant)

    def settings(self) -> VerifySettings:
        if self.desk:
            return VerifySettings.first_desk(
                self.n, boost=self.boost, s=self.s, mode=self.mode
            )
        return VerifySettings.first_reference(self.n, self.lam, mode=self.mode)

    @property
    def L(self) -> int:
        return self.settings().L

    @classmethod
    def desk_preset(
        cls,
        lam: int = 8,
        d: int = 1,
        n: int = 3,
        mode: str = "analytic",
        s: int = 2048,
        boost: int = 8,
        variant: str = "test",
    ) -> "ProtocolParams":
        return cls(lam=lam, d=d, n=n, mode=mode, s=s, boost=boost, desk=True, variant=variant)

    @classmethod
    def reference_preset(cls, lam: int) -> "ProtocolParams":
        """Full-budget commitment parameters; for arithmetic checks only."""
        if lam < 6:
            raise DomainError("reference preset needs lam >= 6")
        n = math.ceil(3 * math.log2(lam))
        d = max(1, math.ceil(math.log2(3 * lam / n)))
        return cls(lam=lam, d=d, n=n, mode="analytic", desk=False)


@dataclass(frozen=True)
class Opening:
    key: PrfKey
    b: int


@dataclass(frozen=True)
class CommitmentTranscript:
    """Fully classical: receiver Pauli plus one tomograph per block."""

    pauli: PauliString
    tomographs: dict[str, Tomograph]
    params: ProtocolParams

    def __post_init__(self):
        if self.pauli.n != self.params.m:
            raise DomainError("Pauli width does not match m = 2^d * n")
        expected = {int_to_bits(i, self.params.d) for i in range(self.params.blocks)}
        if set(self.tomographs) != expected:
            raise DomainError("transcript must hold one tomograph per input block")

    def block_pauli(self, x: str) -> PauliString:
        index = int(x, 2)
        return self.pauli.block(index, self.params.n)


def receiver_sample_pauli(params: ProtocolParams, rng: Rng) -> PauliString:
    """Uniform m-qubit Pauli, structured as 2^d blocks of n qubits."""
    return pauli_sample(params.m, rng)


def committer_commit(
    b: int,
    pauli: PauliString,
    params: ProtocolParams,
    rng: Rng,
    model: AbortModel | None = None,
    key: PrfKey | None = None,
) -> tuple[PrfKey, CommitmentTranscript]:
    """Sample a key and tomograph the flagged channel on every block."""
    if b not in (0, 1):
        raise DomainError("committed bit must be 0 or 1")
    if pauli.n != params.m:
        raise DomainError("Pauli width does not match m = 2^d * n")
    model = model or AbortModel.always()
    settings = params.settings()
    gen = params.gen_params()
    k = key if key is not None else PrfKey.random(params.lam, rng.derive(0))
    tomographs: dict[str, Tomograph] = {}
    for i in range(params.blocks):
        x = int_to_bits(i, params.d)
        inp = ChannelFirstInput(pauli.block(i, params.n), k, x, b)
        rho = channel_first(inp, gen, model)
        source = ExactSource(rho) if settings.mode == "analytic" else SampledSource(rho)
        tomo = tomography_boosted(source, settings.budget(), rng.derive(i + 1))
        if tomo.aborted:
            raise DomainError(f"tomography aborted while committing block {x}")
        tomographs[x] = tomo
    return k, CommitmentTranscript(pauli, tomographs, params)


def reveal_verify(
    transcript: CommitmentTranscript,
    opening: Opening,
    rng: Rng,
    model: AbortModel | None = None,
) -> int | None:
    """Receiver's reveal check: the bit, or None on rejection."""
    if opening.b not in (0, 1):
        return None
    params = transcript.params
    model = model or AbortModel.always()
    settings = params.settings()
    gen = params.gen_params()
    for i in range(params.blocks):
        x = int_to_bits(i, params.d)
        inp = ChannelFirstInput(transcript.block_pauli(x), opening.key, x, opening.b)
        verdict = verify_first(
            inp, transcript.tomographs[x], gen, model, settings, rng.derive(i)
        )
        if verdict is not Verdict.VALID:
            return None
    return opening.b


def extractor(
    transcript: CommitmentTranscript,
    rng: Rng,
    model: AbortModel | None = None,
    cap: int = EXTRACTOR_CAP,
) -> int | None:
    """Exhaustive opening search; exponential in the key length by design."""
    params = transcript.params
    if params.lam > cap:
        raise InfeasibleError(
            f"extractor search space 2^{params.lam} exceeds cap 2^{cap}"
        )
    model = model or AbortModel.always()
    settings = params.settings()
    gen = params.gen_params()
    for k_int in range(2**params.lam):
        key = PrfKey.from_int(k_int, params.lam)
        for b in (0, 1):
            hit = True
            for i in range(params.blocks):
                x = int_to_bits(i, params.d)
                inp = ChannelFirstInput(transcript.block_pauli(x), key, x, b)
                verdict = verify_first(
                    inp,
                    transcript.tomographs[x],
                    gen,
                    model,
                    settings,
                    rng.derive(k_int * 2 + b),
                )
                if verdict is not Verdict.VALID:
                    hit = False
                    break
            if hit:
                return b
    return None


# ---------------------------------------------------------------------------
# pseudo one-time pad


@dataclass(frozen=True)
class OtpParams:
    """One-time-pad constants; message length is 2^d bits."""

    lam: int
    d: int
    n: int
    mode: str = "sampled"
    s: int | None = None
    boost: int = 8
    desk: bool = True
    variant: str = "test"

    @property
    def msg_bits(self) -> int:
        return 2**self.d

    def gen_params(self) -> GeneratorParams:
        # The channel evaluates the generator at i || b, hence d+1 input bits.
        return GeneratorParams(self.lam, self.d + 1, self.n, self.variant)

    def settings(self) -> VerifySettings:
        if self.desk:
            return VerifySettings.second_desk(
                self.n, boost=self.boost, s=self.s, mode=self.mode
            )
        return VerifySettings.second_reference(self.n, self.lam, mode=self.mode)

    @classmethod
    def desk_preset(
        cls,
        lam: int = 8,
        d: int = 3,
        n: int = 4,
        mode: str = "sampled",
        boost: int = 8,
        variant: str = "test",
    ) -> "OtpParams":
        return cls(lam=lam, d=d, n=n, mode=mode, boost=boost, desk=True, variant=variant)

    @classmethod
    def reference_preset(cls, lam: int) -> "OtpParams":
        if lam < 4:
            raise DomainError("reference preset needs lam >= 4")
        d = n = math.ceil(math.log2(lam))
        return cls(lam=lam, d=d, n=n, mode="analytic", desk=False)


@dataclass(frozen=True)
class Ciphertext:
    blocks: tuple[Tomograph, ...]
    params: OtpParams


def otp_encrypt(
    key: PrfKey,
    msg: str,
    params: OtpParams,
    rng: Rng,
    model: AbortModel | None = None,
) -> Ciphertext:
    """One tomograph of the generator at i || msg_i per message bit."""
    if len(msg) != params.msg_bits or any(c not in "01" for c in msg):
        raise DomainError(f"message must be a {params.msg_bits}-bit string")
    model = model or AbortModel.always()
    settings = params.settings()
    gen = params.gen_params()
    blocks = []
    for i, bit in enumerate(msg):
        inp = ChannelSecondInput(key, int_to_bits(i, params.d), int(bit))
        rho = channel_second(inp, gen, model)
        source = ExactSource(rho) if settings.mode == "analytic" else SampledSource(rho)
        tomo = tomography_boosted(source, settings.budget(), rng.derive(i))
        if tomo.aborted:
            raise DomainError(f"tomography aborted while encrypting bit {i}")
        blocks.append(tomo)
    return Ciphertext(tuple(blocks), params)


def otp_decrypt(
    key: PrfKey,
    ct: Ciphertext,
    rng: Rng,
    model: AbortModel | None = None,
) -> str:
    """Per bit: verify against bit 0; Valid decodes to 0, otherwise 1."""
    params = ct.params
    model = model or AbortModel.always()
    settings = params.settings()
    gen = params.gen_params()
    out = []
    for i, block in enumerate(ct.blocks):
        inp = ChannelSecondInput(key, int_to_bits(i, params.d), 0)
        verdict = verify_second(inp, block, gen, model, settings, rng.derive(i))
        out.append("0" if verdict is Verdict.VALID else "1")
    return "".join(out)
