"""Byte-exact envelope format for the air-gapped file exchange.

Layout, all integers big-endian:

    magic "CWv1" | version (1) | scheme (1) | msg_type (1)
    session_id (16)
    field_count (1)
    fields: tag (1) | length (4) | value          -- sorted by tag
    checksum (4) = SHA-256 of everything before it, truncated

Each (scheme, msg_type) pair admits a fixed tag set and nothing else; the
decoder rejects unknown or duplicate tags, so a message cannot smuggle
extra fields across the gap. No tag exists for secret values. Scalars are
32-byte big-endian; points use their curve's compressed encoding; Paillier
integers are minimal big-endian magnitudes (the TLV length is the prefix).
Encoding is deterministic: one message, one byte string.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .errors import (
    BadMagicError,
    ChecksumError,
    ColdSigError,
    ConfigError,
    DuplicateTagError,
    MalformedFieldError,
    OversizeFieldError,
    TruncatedError,
    UnknownTagError,
    VersionMismatchError,
)
from .groups import Scheme, params_for
from .keygen import KeygenPubMsg
from .paillier import PaillierCiphertext, PaillierPublicKey
from .signing import EcdsaSignMsg1, EcdsaSignMsg2, SchnorrSignMsg1, SchnorrSignMsg2, SESSION_ID_SIZE

MAGIC = b"CWv1"
PROTOCOL_VERSION = 1
MAX_FIELD_LEN = 1 << 20

MSG_KEYGEN_PUB = 1
MSG_SIGN_MSG1 = 2
MSG_SIGN_MSG2 = 3

TAG_PUBLIC_POINT = 1
TAG_TX_RAW = 2
TAG_M_SCALAR = 3
TAG_PAILLIER_N = 4
TAG_C_KEY = 5
TAG_R1 = 6
TAG_C3 = 7
TAG_R2 = 8
TAG_S2 = 9

FIELD_WHITELIST = {
    (Scheme.ECDSA, MSG_KEYGEN_PUB): frozenset({TAG_PUBLIC_POINT}),
    (Scheme.SCHNORR, MSG_KEYGEN_PUB): frozenset({TAG_PUBLIC_POINT}),
    (Scheme.ECDSA, MSG_SIGN_MSG1): frozenset({TAG_TX_RAW, TAG_M_SCALAR, TAG_PAILLIER_N, TAG_C_KEY, TAG_R1}),
    (Scheme.SCHNORR, MSG_SIGN_MSG1): frozenset({TAG_TX_RAW, TAG_R1}),
    (Scheme.ECDSA, MSG_SIGN_MSG2): frozenset({TAG_C3, TAG_R2}),
    (Scheme.SCHNORR, MSG_SIGN_MSG2): frozenset({TAG_S2, TAG_R2}),
}


def _int_to_magnitude(v: int) -> bytes:
    return v.to_bytes((v.bit_length() + 7) // 8 or 1, "big")


def _magnitude_to_int(data: bytes) -> int:
    if not data:
        raise MalformedFieldError("empty integer field")
    if len(data) > 1 and data[0] == 0:
        raise MalformedFieldError("non-minimal integer encoding")
    return int.from_bytes(data, "big")


@dataclass(frozen=True)
class ParsedEnvelope:
    """Structurally valid envelope before field values are interpreted."""

    scheme: Scheme
    msg_type: int
    session_id: bytes
    fields: dict[int, bytes]


def _fields_for(msg) -> tuple[Scheme, int, dict[int, bytes]]:
    if isinstance(msg, KeygenPubMsg):
        return msg.scheme, MSG_KEYGEN_PUB, {TAG_PUBLIC_POINT: msg.public_point.encode()}
    if isinstance(msg, EcdsaSignMsg1):
        params = params_for(Scheme.ECDSA)
        return Scheme.ECDSA, MSG_SIGN_MSG1, {
            TAG_TX_RAW: msg.tx_bytes,
            TAG_M_SCALAR: params.scalar_to_bytes(msg.m),
            TAG_PAILLIER_N: _int_to_magnitude(msg.pk.n),
            TAG_C_KEY: _int_to_magnitude(msg.c_key.value),
            TAG_R1: msg.R1.encode(),
        }
    if isinstance(msg, SchnorrSignMsg1):
        return Scheme.SCHNORR, MSG_SIGN_MSG1, {TAG_TX_RAW: msg.m, TAG_R1: msg.R1.encode()}
    if isinstance(msg, EcdsaSignMsg2):
        return Scheme.ECDSA, MSG_SIGN_MSG2, {
            TAG_C3: _int_to_magnitude(msg.c3.value),
            TAG_R2: msg.R2.encode(),
        }
    if isinstance(msg, SchnorrSignMsg2):
        params = params_for(Scheme.SCHNORR)
        return Scheme.SCHNORR, MSG_SIGN_MSG2, {
            TAG_S2: params.scalar_to_bytes(msg.s2),
            TAG_R2: msg.R2.encode(),
        }
    raise ConfigError(f"no envelope encoding for {type(msg).__name__}")


def encode_envelope(msg, session_id: bytes) -> bytes:
    if len(session_id) != SESSION_ID_SIZE:
        raise ConfigError(f"session id must be {SESSION_ID_SIZE} bytes")
    scheme, msg_type, fields = _fields_for(msg)
    out = bytearray()
    out += MAGIC
    out.append(PROTOCOL_VERSION)
    out.append(scheme.wire_byte)
    out.append(msg_type)
    out += session_id
    out.append(len(fields))
    for tag in sorted(fields):
        value = fields[tag]
        if len(value) > MAX_FIELD_LEN:
            raise OversizeFieldError(f"field {tag} is {len(value)} bytes (cap {MAX_FIELD_LEN})")
        out.append(tag)
        out += len(value).to_bytes(4, "big")
        out += value
    out += hashlib.sha256(bytes(out)).digest()[:4]
    return bytes(out)


def parse_envelope(data: bytes) -> ParsedEnvelope:
    """Structural + checksum + schema validation; returns raw field bytes."""
    pos = 0

    def take(n: int, what: str) -> bytes:
        nonlocal pos
        if len(data) - pos < n:
            raise TruncatedError(f"envelope truncated in {what}")
        chunk = data[pos : pos + n]
        pos += n
        return chunk

    header = take(7, "header")
    session_id = take(SESSION_ID_SIZE, "session id")
    field_count = take(1, "field count")[0]
    raw_fields: list[tuple[int, bytes]] = []
    for i in range(field_count):
        tag = take(1, f"field {i} tag")[0]
        length = int.from_bytes(take(4, f"field {i} length"), "big")
        if length > MAX_FIELD_LEN:
            raise OversizeFieldError(f"field {tag} claims {length} bytes (cap {MAX_FIELD_LEN})")
        raw_fields.append((tag, take(length, f"field {i} value")))
    checksum = take(4, "checksum")
    if hashlib.sha256(data[: pos - 4]).digest()[:4] != checksum:
        raise ChecksumError("envelope checksum mismatch")
    if pos != len(data):
        raise ChecksumError(f"{len(data) - pos} trailing bytes after checksum")

    if header[:4] != MAGIC:
        raise BadMagicError(f"bad magic {header[:4]!r}")
    if header[4] != PROTOCOL_VERSION:
        raise VersionMismatchError(f"unsupported protocol version {header[4]}")
    scheme = Scheme.from_wire(header[5])
    msg_type = header[6]
    whitelist = FIELD_WHITELIST.get((scheme, msg_type))
    if whitelist is None:
        raise MalformedFieldError(f"unknown message type {msg_type}")
    fields: dict[int, bytes] = {}
    for tag, value in raw_fields:
        if tag in fields:
            raise DuplicateTagError(f"tag {tag} appears twice")
        if tag not in whitelist:
            raise UnknownTagError(f"tag {tag} not allowed in this message type")
        fields[tag] = value
    missing = whitelist - fields.keys()
    if missing:
        raise MalformedFieldError(f"message is missing tags {sorted(missing)}")
    return ParsedEnvelope(scheme=scheme, msg_type=msg_type, session_id=session_id, fields=fields)


def _build_message(env: ParsedEnvelope, paillier_pk: PaillierPublicKey | None):
    params = params_for(env.scheme)
    f = env.fields
    if env.msg_type == MSG_KEYGEN_PUB:
        return KeygenPubMsg(scheme=env.scheme, public_point=params.decode_point(f[TAG_PUBLIC_POINT]))
    if env.msg_type == MSG_SIGN_MSG1:
        if env.scheme is Scheme.ECDSA:
            n = _magnitude_to_int(f[TAG_PAILLIER_N])
            pk = PaillierPublicKey(n=n, g=n + 1)
            return EcdsaSignMsg1(
                tx_bytes=f[TAG_TX_RAW],
                m=params.scalar_from_bytes(f[TAG_M_SCALAR]),
                pk=pk,
                c_key=PaillierCiphertext(_magnitude_to_int(f[TAG_C_KEY]), pk),
                R1=params.decode_point(f[TAG_R1]),
            )
        return SchnorrSignMsg1(m=f[TAG_TX_RAW], R1=params.decode_point(f[TAG_R1]))
    if env.msg_type == MSG_SIGN_MSG2:
        if env.scheme is Scheme.ECDSA:
            return EcdsaSignMsg2(
                c3=PaillierCiphertext(_magnitude_to_int(f[TAG_C3]), paillier_pk),
                R2=params.decode_point(f[TAG_R2]),
            )
        return SchnorrSignMsg2(s2=params.scalar_from_bytes(f[TAG_S2]), R2=params.decode_point(f[TAG_R2]))
    raise MalformedFieldError(f"unknown message type {env.msg_type}")


def decode_envelope(data: bytes, paillier_pk: PaillierPublicKey | None = None):
    """Full decode: (typed message, session_id). Every failure is a distinct
    EnvelopeError subclass; no input can raise anything else."""
    env = parse_envelope(data)
    if env.msg_type == MSG_SIGN_MSG2 and env.scheme is Scheme.ECDSA and paillier_pk is None:
        raise ConfigError("decoding an ECDSA response needs the session's Paillier public key")
    try:
        msg = _build_message(env, paillier_pk)
    except MalformedFieldError:
        raise
    except ColdSigError as exc:
        raise MalformedFieldError(f"field value rejected: {exc}") from exc
    return msg, env.session_id
