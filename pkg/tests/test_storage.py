import pytest

from coldsig.errors import ConfigError, StorageAuthError, StorageFormatError, StorageIOError
from coldsig.groups import Role, Scheme
from coldsig.keygen import generate_share
from coldsig.signing import Phase, ecdsa_gateway_init, schnorr_gateway_init
from coldsig.storage import (
    load_session,
    load_share,
    load_share_plain,
    save_session,
    save_share,
    save_share_plain,
    session_lock,
)

FAST_KDF = {"scrypt_log_n": 10}
PASS = "correct horse battery staple"


class TestShareFiles:
    def test_round_trip_plain_share(self, tmp_path, rng):
        share = generate_share(Scheme.SCHNORR, Role.CORE, rng)
        path = tmp_path / "share.cwsk"
        save_share(share, path, PASS, **FAST_KDF)
        loaded = load_share(path, PASS)
        assert loaded.scheme is Scheme.SCHNORR
        assert loaded.role is Role.CORE
        assert loaded.x == share.x
        assert loaded.public_point == share.public_point
        assert loaded.p_shared is None
        assert loaded.paillier is None

    def test_round_trip_full_ecdsa_share(self, tmp_path, ecdsa_pair):
        gw, _ = ecdsa_pair
        path = tmp_path / "gw.cwsk"
        save_share(gw, path, PASS, **FAST_KDF)
        loaded = load_share(path, PASS)
        assert loaded.x == gw.x
        assert loaded.p_shared == gw.p_shared
        assert loaded.paillier.pk.n == gw.paillier.pk.n
        assert loaded.paillier.sk.p == gw.paillier.sk.p
        assert loaded.c_key.value == gw.c_key.value
        assert loaded.recoverable == gw.recoverable

    def test_wrong_passphrase_fails_authentication(self, tmp_path, rng):
        share = generate_share(Scheme.SCHNORR, Role.CORE, rng)
        path = tmp_path / "share.cwsk"
        save_share(share, path, PASS, **FAST_KDF)
        with pytest.raises(StorageAuthError):
            load_share(path, "wrong")

    def test_missing_file_is_io_error(self, tmp_path):
        with pytest.raises(StorageIOError):
            load_share(tmp_path / "absent.cwsk", PASS)

    def test_bad_header_is_format_error(self, tmp_path, rng):
        share = generate_share(Scheme.SCHNORR, Role.CORE, rng)
        path = tmp_path / "share.cwsk"
        save_share(share, path, PASS, **FAST_KDF)
        data = bytearray(path.read_bytes())
        data[0:4] = b"JUNK"
        path.write_bytes(bytes(data))
        with pytest.raises(StorageFormatError):
            load_share(path, PASS)

    def test_tampered_header_byte_fails_authentication(self, tmp_path, rng):
        share = generate_share(Scheme.SCHNORR, Role.CORE, rng)
        path = tmp_path / "share.cwsk"
        save_share(share, path, PASS, **FAST_KDF)
        data = bytearray(path.read_bytes())
        data[6] = 1  # role byte: core -> gateway
        path.write_bytes(bytes(data))
        with pytest.raises(StorageAuthError):
            load_share(path, PASS)

    def test_tampered_ciphertext_fails_authentication(self, tmp_path, rng):
        share = generate_share(Scheme.SCHNORR, Role.CORE, rng)
        path = tmp_path / "share.cwsk"
        save_share(share, path, PASS, **FAST_KDF)
        data = bytearray(path.read_bytes())
        data[-1] ^= 0x01
        path.write_bytes(bytes(data))
        with pytest.raises(StorageAuthError):
            load_share(path, PASS)

    def test_no_silent_overwrite(self, tmp_path, rng):
        share = generate_share(Scheme.SCHNORR, Role.CORE, rng)
        path = tmp_path / "share.cwsk"
        save_share(share, path, PASS, **FAST_KDF)
        with pytest.raises(StorageIOError):
            save_share(share, path, PASS, **FAST_KDF)
        save_share(share, path, PASS, overwrite=True, **FAST_KDF)

    def test_empty_passphrase_rejected(self, tmp_path, rng):
        share = generate_share(Scheme.SCHNORR, Role.CORE, rng)
        with pytest.raises(ConfigError):
            save_share(share, tmp_path / "s.cwsk", "", **FAST_KDF)

    def test_secret_scalar_not_in_file_bytes(self, tmp_path, rng):
        share = generate_share(Scheme.SCHNORR, Role.CORE, rng)
        path = tmp_path / "share.cwsk"
        save_share(share, path, PASS, **FAST_KDF)
        blob = path.read_bytes()
        assert share.x.to_bytes(32, "big") not in blob
        assert share.x.to_bytes(32, "little") not in blob
        assert hex(share.x).encode() not in blob  # payload JSON stores hex


class TestSessionFiles:
    def test_round_trip(self, tmp_path, schnorr_pair, sample_tx, rng):
        gw, _ = schnorr_pair
        session, _ = schnorr_gateway_init(gw, sample_tx, rng)
        path = tmp_path / "session.cwss"
        save_session(session, path, PASS, **FAST_KDF)
        loaded = load_session(path, PASS, gw)
        assert loaded.session_id == session.session_id
        assert loaded.phase is Phase.AWAITING_PEER
        assert loaded.k == session.k
        assert loaded.R == session.R
        assert loaded.tx == session.tx

    def test_nonce_not_in_file_bytes(self, tmp_path, ecdsa_pair, sample_tx, rng):
        gw, _ = ecdsa_pair
        session, _ = ecdsa_gateway_init(gw, sample_tx, rng)
        path = tmp_path / "session.cwss"
        save_session(session, path, PASS, **FAST_KDF)
        blob = path.read_bytes()
        assert session.k.to_bytes(32, "big") not in blob
        assert hex(session.k).encode() not in blob

    def test_share_mismatch_rejected(self, tmp_path, schnorr_pair, ecdsa_pair, sample_tx, rng):
        gw_s, _ = schnorr_pair
        gw_e, _ = ecdsa_pair
        session, _ = schnorr_gateway_init(gw_s, sample_tx, rng)
        path = tmp_path / "session.cwss"
        save_session(session, path, PASS, **FAST_KDF)
        with pytest.raises(ConfigError):
            load_session(path, PASS, gw_e)

    def test_phase_survives_persistence(self, tmp_path, schnorr_pair, sample_tx, rng):
        gw, _ = schnorr_pair
        session, _ = schnorr_gateway_init(gw, sample_tx, rng)
        session.phase = Phase.COMPLETE
        path = tmp_path / "session.cwss"
        save_session(session, path, PASS, **FAST_KDF)
        assert load_session(path, PASS, gw).phase is Phase.COMPLETE

    def test_share_magic_is_not_a_session(self, tmp_path, schnorr_pair, sample_tx, rng):
        gw, _ = schnorr_pair
        save_share(gw, tmp_path / "f", PASS, **FAST_KDF)
        with pytest.raises(StorageFormatError):
            load_session(tmp_path / "f", PASS, gw)

    def test_session_lock_is_exclusive(self, tmp_path):
        import fcntl

        path = tmp_path / "s.cwss"
        with session_lock(path):
            fh = open(f"{path}.lock", "ab")
            with pytest.raises(BlockingIOError):
                fcntl.flock(fh, fcntl.LOCK_EX | fcntl.LOCK_NB)
            fh.close()


class TestPlainShares:
    def test_round_trip(self, tmp_path, ecdsa_pair):
        gw, _ = ecdsa_pair
        path = tmp_path / "plain.cwsp"
        save_share_plain(gw, path)
        loaded = load_share_plain(path)
        assert loaded.x == gw.x
        assert loaded.p_shared == gw.p_shared
        assert loaded.paillier.sk.p == gw.paillier.sk.p

    def test_encrypted_loader_refuses_plain_files(self, tmp_path, rng):
        share = generate_share(Scheme.SCHNORR, Role.CORE, rng)
        path = tmp_path / "plain.cwsp"
        save_share_plain(share, path)
        with pytest.raises(StorageFormatError):
            load_share(path, PASS)

    def test_plain_loader_refuses_encrypted_files(self, tmp_path, rng):
        share = generate_share(Scheme.SCHNORR, Role.CORE, rng)
        path = tmp_path / "enc.cwsk"
        save_share(share, path, PASS, **FAST_KDF)
        with pytest.raises(StorageFormatError):
            load_share_plain(path)
