"""Classical wire format for the protocols.

Messages are length-prefixed frames carrying canonical JSON with base64
matrix blobs; the transcript digest is the SHA-256 of the framed
commitment message.  A loopback socket transport exercises the codec end
to end.
"""

from __future__ import annotations

import base64
import hashlib
import json
import socket
import threading

from .errors import DomainError
from .paulis import PauliString
from .protocols import CommitmentTranscript, ProtocolParams
from .tomography import Tomograph, tomograph_from_bytes, tomograph_sidecar, tomograph_to_bytes

WIRE_VERSION = 1


def canonical_json(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8")


def encode_frame(role: str, kind: str, payload: dict) -> bytes:
    body = canonical_json({"version": WIRE_VERSION, "role": role, "type": kind, "payload": payload})
    return len(body).to_bytes(4, "little") + body


def decode_frame(data: bytes) -> tuple[dict, bytes]:
    """One message plus the unread remainder of the buffer."""
    if len(data) < 4:
        raise DomainError("frame shorter than its length prefix")
    size = int.from_bytes(data[:4], "little")
    if len(data) < 4 + size:
        raise DomainError("frame body truncated")
    msg = json.loads(data[4 : 4 + size].decode("utf-8"))
    if msg.get("version") != WIRE_VERSION:
        raise DomainError(f"unsupported wire version {msg.get('version')}")
    return msg, data[4 + size :]


def _tomograph_payload(t: Tomograph) -> dict:
    return {
        "data": base64.b64encode(tomograph_to_bytes(t)).decode("ascii"),
        "sidecar": tomograph_sidecar(t),
    }


def _tomograph_from_payload(payload: dict) -> Tomograph:
    return tomograph_from_bytes(base64.b64decode(payload["data"]), payload["sidecar"])


def _params_payload(params: ProtocolParams) -> dict:
    return {
        "lam": params.lam,
        "d": params.d,
        "n": params.n,
        "mode": params.mode,
        "s": params.s,
        "boost": params.boost,
        "desk": params.desk,
        "variant": params.variant,
    }


def transcript_to_frame(transcript: CommitmentTranscript) -> bytes:
    payload = {
        "pauli": transcript.pauli.labels,
        "block_width": transcript.params.n,
        "params": _params_payload(transcript.params),
        "tomographs": {
            x: _tomograph_payload(t) for x, t in sorted(transcript.tomographs.items())
        },
    }
    return encode_frame("committer", "commitment", payload)


def transcript_from_frame(data: bytes) -> CommitmentTranscript:
    msg, rest = decode_frame(data)
    if rest:
        raise DomainError("trailing bytes after the commitment frame")
    if msg["type"] != "commitment":
        raise DomainError(f"expected a commitment frame, got {msg['type']!r}")
    payload = msg["payload"]
    params = ProtocolParams(**payload["params"])
    tomographs = {
        x: _tomograph_from_payload(p) for x, p in payload["tomographs"].items()
    }
    return CommitmentTranscript(PauliString(payload["pauli"]), tomographs, params)


def transcript_digest(transcript: CommitmentTranscript) -> str:
    """256-bit hash of the canonical serialization."""
    return hashlib.sha256(transcript_to_frame(transcript)).hexdigest()


def loopback_roundtrip(frames: list[bytes]) -> list[bytes]:
    """Push frames through a local socket pair and parse them back out."""
    left, right = socket.socketpair()
    received: list[bytes] = []

    def _reader():
        buf = b""
        while True:
            chunk = right.recv(65536)
            if not chunk:
                break
            buf += chunk
        while buf:
            size = int.from_bytes(buf[:4], "little")
            received.append(buf[: 4 + size])
            buf = buf[4 + size :]

    thread = threading.Thread(target=_reader)
    thread.start()
    try:
        for frame in frames:
            left.sendall(frame)
    finally:
        left.shutdown(socket.SHUT_WR)
        left.close()
    thread.join()
    right.close()
    return received
