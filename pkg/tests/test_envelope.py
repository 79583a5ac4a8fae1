import hashlib
import random

import pytest

from coldsig.envelope import (
    FIELD_WHITELIST,
    MSG_KEYGEN_PUB,
    MSG_SIGN_MSG1,
    MSG_SIGN_MSG2,
    decode_envelope,
    encode_envelope,
    parse_envelope,
)
from coldsig.errors import (
    BadMagicError,
    ChecksumError,
    ConfigError,
    DuplicateTagError,
    EnvelopeError,
    MalformedFieldError,
    OversizeFieldError,
    UnknownTagError,
    VersionMismatchError,
)
from coldsig.groups import Scheme
from coldsig.keygen import KeygenPubMsg
from coldsig.signing import ecdsa_core_respond, ecdsa_gateway_init, schnorr_core_respond, schnorr_gateway_init

SID = bytes(range(16))


@pytest.fixture(scope="module")
def all_envelopes(ecdsa_pair, schnorr_pair):
    """One valid envelope of every (scheme, msg_type) combination."""
    import random as _random

    from coldsig.transaction import Policy, Transaction

    rng = _random.Random(5)
    tx = Transaction(1, "BTC", "src", "hot-wallet-1", 77, 3)
    policy = Policy(frozenset({"hot-wallet-1"}))
    gw_e, core_e = ecdsa_pair
    gw_s, core_s = schnorr_pair
    session_e, e1 = ecdsa_gateway_init(gw_e, tx, rng)
    e2 = ecdsa_core_respond(core_e, e1, tx, policy, rng)
    session_s, s1 = schnorr_gateway_init(gw_s, tx, rng)
    s2 = schnorr_core_respond(core_s, s1, policy, rng)
    return {
        "keygen_ecdsa": (encode_envelope(KeygenPubMsg(Scheme.ECDSA, gw_e.public_point), SID), None),
        "keygen_schnorr": (encode_envelope(KeygenPubMsg(Scheme.SCHNORR, gw_s.public_point), SID), None),
        "ecdsa_msg1": (encode_envelope(e1, session_e.session_id), None),
        "ecdsa_msg2": (encode_envelope(e2, session_e.session_id), gw_e.paillier.pk),
        "schnorr_msg1": (encode_envelope(s1, session_s.session_id), None),
        "schnorr_msg2": (encode_envelope(s2, session_s.session_id), None),
    }


class TestRoundTrip:
    def test_every_message_type(self, all_envelopes):
        for name, (raw, pk) in all_envelopes.items():
            msg, sid = decode_envelope(raw, paillier_pk=pk)
            assert encode_envelope(msg, sid) == raw, name

    def test_encoding_is_deterministic(self, schnorr_pair):
        msg = KeygenPubMsg(Scheme.SCHNORR, schnorr_pair[0].public_point)
        assert encode_envelope(msg, SID) == encode_envelope(msg, SID)

    def test_schnorr_msg2_is_exactly_102_bytes(self, all_envelopes):
        # 7 header + 16 sid + 1 count + (5+32) s2 + (5+32) R2 + 4 checksum
        raw, _ = all_envelopes["schnorr_msg2"]
        assert len(raw) == 102

    def test_bad_session_id_size_rejected_on_encode(self, schnorr_pair):
        msg = KeygenPubMsg(Scheme.SCHNORR, schnorr_pair[0].public_point)
        with pytest.raises(ConfigError):
            encode_envelope(msg, b"short")


def _rebuild_with(raw: bytes, *, field_mutator=None, header_mutator=None) -> bytes:
    """Re-assemble an envelope with mutated parts and a fresh checksum."""
    body = bytearray(raw[:-4])
    if header_mutator is not None:
        header_mutator(body)
    if field_mutator is not None:
        body = bytearray(field_mutator(bytes(body)))
    return bytes(body) + hashlib.sha256(bytes(body)).digest()[:4]


class TestTamperDetection:
    def test_every_single_byte_flip_is_rejected(self, all_envelopes):
        raw, pk = all_envelopes["schnorr_msg2"]
        for i in range(len(raw)):
            for bit in (0x01, 0x80):
                mutated = bytearray(raw)
                mutated[i] ^= bit
                with pytest.raises(EnvelopeError):
                    decode_envelope(bytes(mutated), paillier_pk=pk)

    def test_value_byte_flip_is_checksum_failure(self, all_envelopes):
        raw, _ = all_envelopes["schnorr_msg1"]
        mutated = bytearray(raw)
        mutated[30] ^= 0x01  # inside a field value, structure intact
        with pytest.raises(ChecksumError):
            decode_envelope(bytes(mutated))

    def test_truncation_at_every_prefix(self, all_envelopes):
        raw, pk = all_envelopes["ecdsa_msg1"]
        for cut in range(len(raw)):
            with pytest.raises(EnvelopeError):
                decode_envelope(raw[:cut], paillier_pk=pk)

    def test_bad_magic_with_valid_checksum(self, all_envelopes):
        raw, _ = all_envelopes["schnorr_msg1"]

        def swap_magic(body):
            body[0:4] = b"XXXX"

        with pytest.raises(BadMagicError):
            decode_envelope(_rebuild_with(raw, header_mutator=swap_magic))

    def test_version_mismatch(self, all_envelopes):
        raw, _ = all_envelopes["schnorr_msg1"]

        def bump_version(body):
            body[4] = 9

        with pytest.raises(VersionMismatchError):
            decode_envelope(_rebuild_with(raw, header_mutator=bump_version))

    def test_unknown_scheme_byte(self, all_envelopes):
        raw, _ = all_envelopes["schnorr_msg1"]

        def bad_scheme(body):
            body[5] = 7

        with pytest.raises(MalformedFieldError):
            decode_envelope(_rebuild_with(raw, header_mutator=bad_scheme))

    def test_injected_extra_tag_rejected(self, all_envelopes):
        raw, _ = all_envelopes["schnorr_msg2"]

        def add_field(body: bytes) -> bytes:
            out = bytearray(body)
            out[23] += 1  # field count
            out += bytes([99]) + (4).to_bytes(4, "big") + b"evil"
            return bytes(out)

        with pytest.raises(UnknownTagError):
            decode_envelope(_rebuild_with(raw, field_mutator=add_field))

    def test_duplicate_tag_rejected(self, all_envelopes):
        raw, _ = all_envelopes["schnorr_msg2"]

        def dup_field(body: bytes) -> bytes:
            out = bytearray(body)
            out[23] += 1
            out += bytes([8]) + (32).to_bytes(4, "big") + bytes(32)  # second R2
            return bytes(out)

        with pytest.raises(DuplicateTagError):
            decode_envelope(_rebuild_with(raw, field_mutator=dup_field))

    def test_missing_required_tag_rejected(self, schnorr_pair):
        raw = encode_envelope(KeygenPubMsg(Scheme.SCHNORR, schnorr_pair[0].public_point), SID)

        def drop_field(body: bytes) -> bytes:
            out = bytearray(body[:24])
            out[23] = 0
            return bytes(out)

        with pytest.raises(MalformedFieldError):
            decode_envelope(_rebuild_with(raw, field_mutator=drop_field))

    def test_oversize_length_rejected(self, all_envelopes):
        raw, _ = all_envelopes["schnorr_msg1"]
        mutated = bytearray(raw)
        # first field's 4-byte length sits right after header+sid+count+tag
        mutated[25:29] = (1 << 21).to_bytes(4, "big")
        with pytest.raises(OversizeFieldError):
            decode_envelope(bytes(mutated))

    def test_trailing_bytes_rejected(self, all_envelopes):
        raw, _ = all_envelopes["schnorr_msg1"]
        with pytest.raises(ChecksumError):
            decode_envelope(raw + b"\x00")

    def test_identity_point_on_wire_rejected(self):
        body = bytearray()
        body += b"CWv1" + bytes([1, 2, MSG_KEYGEN_PUB]) + SID + bytes([1])
        body += bytes([1]) + (32).to_bytes(4, "big") + bytes(32)  # ristretto identity
        raw = bytes(body) + hashlib.sha256(bytes(body)).digest()[:4]
        with pytest.raises(MalformedFieldError):
            decode_envelope(raw)

    def test_nonminimal_paillier_integer_rejected(self, all_envelopes):
        raw, pk = all_envelopes["ecdsa_msg2"]
        parsed = parse_envelope(raw)
        body = bytearray()
        body += b"CWv1" + bytes([1, 1, MSG_SIGN_MSG2]) + parsed.session_id + bytes([2])
        padded = b"\x00" + parsed.fields[7]
        body += bytes([7]) + len(padded).to_bytes(4, "big") + padded
        body += bytes([8]) + len(parsed.fields[8]).to_bytes(4, "big") + parsed.fields[8]
        raw2 = bytes(body) + hashlib.sha256(bytes(body)).digest()[:4]
        with pytest.raises(MalformedFieldError):
            decode_envelope(raw2, paillier_pk=pk)

    def test_ecdsa_msg2_requires_pk_context(self, all_envelopes):
        raw, _ = all_envelopes["ecdsa_msg2"]
        with pytest.raises(ConfigError):
            decode_envelope(raw)


class TestSchemaWhitelists:
    def test_whitelists_cover_exactly_the_protocol_fields(self):
        assert FIELD_WHITELIST[(Scheme.ECDSA, MSG_SIGN_MSG1)] == {2, 3, 4, 5, 6}
        assert FIELD_WHITELIST[(Scheme.SCHNORR, MSG_SIGN_MSG1)] == {2, 6}
        assert FIELD_WHITELIST[(Scheme.ECDSA, MSG_SIGN_MSG2)] == {7, 8}
        assert FIELD_WHITELIST[(Scheme.SCHNORR, MSG_SIGN_MSG2)] == {8, 9}
        assert FIELD_WHITELIST[(Scheme.ECDSA, MSG_KEYGEN_PUB)] == {1}
        assert FIELD_WHITELIST[(Scheme.SCHNORR, MSG_KEYGEN_PUB)] == {1}


class TestFuzz:
    def test_mutations_never_crash(self, all_envelopes):
        rng = random.Random(1234)
        corpus = [(raw, pk) for raw, pk in all_envelopes.values()]
        for _ in range(1000):
            raw, pk = corpus[rng.randrange(len(corpus))]
            mutated = bytearray(raw)
            for _ in range(rng.randrange(1, 6)):
                mutated[rng.randrange(len(mutated))] = rng.randrange(256)
            if rng.random() < 0.3:
                mutated = mutated[: rng.randrange(len(mutated) + 1)]
            try:
                decode_envelope(bytes(mutated), paillier_pk=pk)
            except EnvelopeError:
                pass

    def test_random_garbage_never_crashes(self):
        rng = random.Random(4321)
        for _ in range(1000):
            blob = rng.randbytes(rng.randrange(0, 200))
            try:
                decode_envelope(blob)
            except EnvelopeError:
                pass
