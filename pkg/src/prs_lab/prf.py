"""Keyed pseudorandom function F: {0,1}^lambda x {0,1}^d -> {0,1}^m.

Two variants behind one interface:

* ``test`` -- a seeded integer mixer (splitmix64 over a byte-folded seed).
  Not cryptographic, but bit-stable across platforms, which is what the
  regression fixtures need.
* ``crypto`` -- HMAC-SHA256 in counter mode over a length-prefixed input
  encoding.  Honest choice for demos.
* ``zero`` -- constant-zero output; degenerate fixture variant (it turns
  the binary-phase generator into a uniform superposition).

Evaluations under (key, x) and (key, x') are domain-separated by length
prefixes, never by raw concatenation.  The bit-encoding of compound inputs
(subkey, y) is a convention of this implementation, fixed here once.
"""

from __future__ import annotations

import hashlib
import hmac
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .states import Rng

_VARIANTS = ("test", "crypto", "zero")
_M64 = (1 << 64) - 1


@dataclass(frozen=True)
class PrfSpec:
    variant: str
    input_bits: int
    output_bits: int

    def __post_init__(self):
        if self.variant not in _VARIANTS:
            raise DomainError(f"unknown PRF variant {self.variant!r}")
        if self.input_bits < 1 or self.output_bits < 1:
            raise DomainError("input and output bit lengths must be >= 1")


@dataclass(frozen=True)
class PrfKey:
    """lambda-bit key stored big-endian in ceil(lambda/8) bytes."""

    data: bytes
    lam: int

    def __post_init__(self):
        if self.lam < 1:
            raise DomainError("key length must be >= 1 bit")
        if len(self.data) != (self.lam + 7) // 8:
            raise DomainError(
                f"key has {len(self.data)} bytes, expected {(self.lam + 7) // 8}"
            )

    @classmethod
    def from_int(cls, value: int, lam: int) -> "PrfKey":
        mask = (1 << lam) - 1
        return cls((value & mask).to_bytes((lam + 7) // 8, "big"), lam)

    @classmethod
    def random(cls, lam: int, rng: Rng) -> "PrfKey":
        raw = rng.np.integers(0, 256, size=(lam + 7) // 8, dtype=np.uint8).tobytes()
        return cls.from_int(int.from_bytes(raw, "big"), lam)

    def as_int(self) -> int:
        return int.from_bytes(self.data, "big")


def int_to_bits(value: int, width: int) -> str:
    if value < 0 or value >= 1 << width:
        raise DomainError(f"{value} does not fit in {width} bits")
    return format(value, f"0{width}b")


def bits_to_int(bits: str) -> int:
    if bits == "":
        return 0
    if any(c not in "01" for c in bits):
        raise DomainError(f"not a bit string: {bits!r}")
    return int(bits, 2)


def _pack_bits(bits: str) -> bytes:
    padded = bits + "0" * (-len(bits) % 8)
    return bytes(int(padded[i : i + 8], 2) for i in range(0, len(padded), 8))


def _encode(key: PrfKey, bits: str) -> bytes:
    """Length-prefixed (key, input) encoding; prefixes give domain separation."""
    return (
        len(key.data).to_bytes(4, "little")
        + key.data
        + len(bits).to_bytes(4, "little")
        + _pack_bits(bits)
    )


def _splitmix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & _M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31)


def _fold_bytes(data: bytes) -> int:
    # FNV-1a 64-bit, then one mixing round.
    h = 0xCBF29CE484222325
    for b in data:
        h = ((h ^ b) * 0x100000001B3) & _M64
    return _splitmix64(h)


def _stream_test(seed: int, nbits: int) -> str:
    out = []
    state = seed
    while len(out) * 64 < nbits:
        state = _splitmix64(state)
        out.append(format(state, "064b"))
    return "".join(out)[:nbits]


def _stream_crypto(key: PrfKey, encoded: bytes, nbits: int) -> str:
    out = []
    counter = 0
    while len(out) * 256 < nbits:
        block = hmac.new(
            key.data, encoded + counter.to_bytes(4, "little"), hashlib.sha256
        ).digest()
        out.append(format(int.from_bytes(block, "big"), "0256b"))
        counter += 1
    return "".join(out)[:nbits]


def prf_eval(spec: PrfSpec, key: PrfKey, x: str) -> str:
    """Deterministic keyed evaluation; output is a bit string of length m."""
    if len(x) != spec.input_bits:
        raise DomainError(
            f"input has {len(x)} bits, spec expects {spec.input_bits}"
        )
    bits_to_int(x)  # validates characters
    if spec.variant == "zero":
        return "0" * spec.output_bits
    encoded = _encode(key, x)
    if spec.variant == "test":
        return _stream_test(_fold_bytes(encoded), spec.output_bits)
    return _stream_crypto(key, encoded, spec.output_bits)


def prf_bit(spec: PrfSpec, key: PrfKey, x: str) -> int:
    """Single-bit evaluation; equals the first bit of prf_eval."""
    one_bit = PrfSpec(spec.variant, spec.input_bits, spec.output_bits)
    return int(prf_eval(one_bit, key, x)[0])


def write_fixture_vectors(path, spec: PrfSpec, keys_and_inputs) -> None:
    """Dump hex lines ``key input output`` for cross-implementation regression."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"# variant={spec.variant} d={spec.input_bits} m={spec.output_bits}\n")
        for key, x in keys_and_inputs:
            out = prf_eval(spec, key, x)
            fh.write(
                f"{key.data.hex()} {_pack_bits(x).hex()}/{len(x)} "
                f"{_pack_bits(out).hex()}/{len(out)}\n"
            )
