"""Encrypted at-rest persistence for key shares and in-flight sessions.

File layout (shares and sessions differ only in magic and payload):

    magic "CWSK" / "CWSN" | version (1) | scheme (1) | role (1)
    scrypt log2(N) (1) | scrypt r (1) | scrypt p (1)
    salt (16) | nonce (12) | AES-256-GCM ciphertext

The key is scrypt-derived from the passphrase; the whole header plus salt
is bound as associated data, so editing any header byte fails
authentication rather than silently changing interpretation. Secret
scalars exist on disk only inside the ciphertext.
"""

from __future__ import annotations

import contextlib
import fcntl
import json
import os

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives.ciphers.aead import AESGCM
from cryptography.hazmat.primitives.kdf.scrypt import Scrypt

from .errors import ConfigError, StorageAuthError, StorageFormatError, StorageIOError
from .groups import Role, Scheme, params_for
from .keygen import KeyShare, PaillierKeypair
from .paillier import PaillierCiphertext, PaillierSecretKey
from .signing import Phase, SESSION_ID_SIZE, SigningSession
from .transaction import tx_canonical_bytes, tx_from_canonical_bytes

SHARE_MAGIC = b"CWSK"
SHARE_PLAIN_MAGIC = b"CWSP"
SESSION_MAGIC = b"CWSN"
FILE_VERSION = 1
SALT_SIZE = 16
NONCE_SIZE = 12
DEFAULT_SCRYPT_LOG_N = 14

_ROLE_BYTE = {Role.GATEWAY: 1, Role.CORE: 2, Role.USER: 3}
_ROLE_FROM_BYTE = {v: k for k, v in _ROLE_BYTE.items()}


def _derive_key(passphrase: str, salt: bytes, log_n: int, r: int, p: int) -> bytes:
    if not passphrase:
        raise ConfigError("empty passphrase")
    kdf = Scrypt(salt=salt, length=32, n=1 << log_n, r=r, p=p)
    return kdf.derive(passphrase.encode("utf-8"))


def _seal(magic: bytes, scheme: Scheme, role: Role, payload: bytes, passphrase: str, scrypt_log_n: int) -> bytes:
    salt = os.urandom(SALT_SIZE)
    nonce = os.urandom(NONCE_SIZE)
    header = magic + bytes([FILE_VERSION, scheme.wire_byte, _ROLE_BYTE[role], scrypt_log_n, 8, 1]) + salt
    key = _derive_key(passphrase, salt, scrypt_log_n, 8, 1)
    ciphertext = AESGCM(key).encrypt(nonce, payload, header)
    return header + nonce + ciphertext


def _open_sealed(magic: bytes, data: bytes, passphrase: str) -> tuple[Scheme, Role, bytes]:
    header_len = len(magic) + 6 + SALT_SIZE
    if len(data) < header_len + NONCE_SIZE + 16:
        raise StorageFormatError("file too short to be a sealed container")
    if data[:4] != magic:
        raise StorageFormatError(f"bad file magic {data[:4]!r}")
    if data[4] != FILE_VERSION:
        raise StorageFormatError(f"unsupported file version {data[4]}")
    try:
        scheme = Scheme.from_wire(data[5])
        role = _ROLE_FROM_BYTE[data[6]]
    except Exception as exc:
        raise StorageFormatError(f"bad scheme/role byte: {exc}") from exc
    log_n, r, p = data[7], data[8], data[9]
    if not 1 <= log_n <= 24:
        raise StorageFormatError(f"implausible scrypt cost {log_n}")
    header = data[:header_len]
    salt = header[-SALT_SIZE:]
    nonce = data[header_len : header_len + NONCE_SIZE]
    ciphertext = data[header_len + NONCE_SIZE :]
    key = _derive_key(passphrase, salt, log_n, r, p)
    try:
        payload = AESGCM(key).decrypt(nonce, ciphertext, header)
    except InvalidTag as exc:
        raise StorageAuthError("authentication failed: wrong passphrase or tampered file") from exc
    return scheme, role, payload


def _read(path) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except FileNotFoundError as exc:
        raise StorageIOError(f"no such file: {path}") from exc
    except OSError as exc:
        raise StorageIOError(f"cannot read {path}: {exc}") from exc


def _write(path, data: bytes, overwrite: bool):
    mode = "wb" if overwrite else "xb"
    tmp = f"{path}.tmp" if overwrite else None
    try:
        if overwrite:
            with open(tmp, "wb") as fh:
                fh.write(data)
            os.replace(tmp, path)
        else:
            with open(path, mode) as fh:
                fh.write(data)
    except FileExistsError as exc:
        raise StorageIOError(f"refusing to overwrite existing file: {path}") from exc
    except OSError as exc:
        raise StorageIOError(f"cannot write {path}: {exc}") from exc


def _share_payload(share: KeyShare) -> bytes:
    doc = {
        "scheme": share.scheme.value,
        "role": share.role.value,
        "x": hex(share.x),
        "recoverable": share.recoverable,
        "p_shared": share.p_shared.encode().hex() if share.p_shared is not None else None,
        "paillier": {"p": hex(share.paillier.sk.p), "q_p": hex(share.paillier.sk.q_p)}
        if share.paillier is not None
        else None,
        "c_key": hex(share.c_key.value) if share.c_key is not None else None,
    }
    return json.dumps(doc).encode("utf-8")


def _share_from_payload(scheme: Scheme, role: Role, payload: bytes) -> KeyShare:
    try:
        doc = json.loads(payload)
        params = params_for(scheme)
        x = int(doc["x"], 16)
        share = KeyShare(
            scheme=scheme,
            role=role,
            x=x,
            public_point=params.base_mul(x),
            recoverable=bool(doc["recoverable"]),
        )
        if doc["p_shared"] is not None:
            share.p_shared = params.decode_point(bytes.fromhex(doc["p_shared"]))
        if doc["paillier"] is not None:
            sk = PaillierSecretKey(p=int(doc["paillier"]["p"], 16), q_p=int(doc["paillier"]["q_p"], 16))
            share.paillier = PaillierKeypair(pk=sk.public_key(), sk=sk)
        if doc["c_key"] is not None:
            share.c_key = PaillierCiphertext(int(doc["c_key"], 16), share.paillier.pk)
        return share
    except (KeyError, ValueError, TypeError, AttributeError) as exc:
        raise StorageFormatError(f"share payload corrupt: {exc}") from exc


def save_share(share: KeyShare, path, passphrase: str, overwrite: bool = False,
               scrypt_log_n: int = DEFAULT_SCRYPT_LOG_N):
    data = _seal(SHARE_MAGIC, share.scheme, share.role, _share_payload(share), passphrase, scrypt_log_n)
    _write(path, data, overwrite)


def load_share(path, passphrase: str) -> KeyShare:
    scheme, role, payload = _open_sealed(SHARE_MAGIC, _read(path), passphrase)
    return _share_from_payload(scheme, role, payload)


def save_share_plain(share: KeyShare, path, overwrite: bool = False):
    """Unencrypted share persistence. Test scaffolding only; the CLI never
    writes or reads this format."""
    header = SHARE_PLAIN_MAGIC + bytes([FILE_VERSION, share.scheme.wire_byte, _ROLE_BYTE[share.role]])
    _write(path, header + _share_payload(share), overwrite)


def load_share_plain(path) -> KeyShare:
    data = _read(path)
    if data[:4] != SHARE_PLAIN_MAGIC:
        raise StorageFormatError(f"bad plain-share magic {data[:4]!r}")
    if data[4] != FILE_VERSION:
        raise StorageFormatError(f"unsupported file version {data[4]}")
    try:
        scheme = Scheme.from_wire(data[5])
        role = _ROLE_FROM_BYTE[data[6]]
    except Exception as exc:
        raise StorageFormatError(f"bad scheme/role byte: {exc}") from exc
    return _share_from_payload(scheme, role, data[7:])


def _session_payload(session: SigningSession) -> bytes:
    doc = {
        "session_id": session.session_id.hex(),
        "phase": session.phase.value,
        "k": hex(session.k),
        "R": session.R.encode().hex(),
        "tx": tx_canonical_bytes(session.tx).hex(),
    }
    return json.dumps(doc).encode("utf-8")


@contextlib.contextmanager
def session_lock(path):
    """Exclusive advisory lock held across a session load-modify-save, so two
    concurrent finalize attempts cannot both see a fresh nonce."""
    lock_path = f"{path}.lock"
    try:
        fh = open(lock_path, "ab")
    except OSError as exc:
        raise StorageIOError(f"cannot open lock file {lock_path}: {exc}") from exc
    try:
        fcntl.flock(fh, fcntl.LOCK_EX)
        yield
    finally:
        fcntl.flock(fh, fcntl.LOCK_UN)
        fh.close()


def save_session(session: SigningSession, path, passphrase: str,
                 scrypt_log_n: int = DEFAULT_SCRYPT_LOG_N):
    data = _seal(SESSION_MAGIC, session.scheme, session.role, _session_payload(session), passphrase, scrypt_log_n)
    _write(path, data, overwrite=True)


def load_session(path, passphrase: str, share: KeyShare) -> SigningSession:
    scheme, role, payload = _open_sealed(SESSION_MAGIC, _read(path), passphrase)
    if share.scheme is not scheme or share.role is not role:
        raise ConfigError("share does not belong to this session")
    try:
        doc = json.loads(payload)
        session_id = bytes.fromhex(doc["session_id"])
        if len(session_id) != SESSION_ID_SIZE:
            raise ValueError("bad session id size")
        return SigningSession(
            scheme=scheme,
            role=role,
            session_id=session_id,
            phase=Phase(doc["phase"]),
            k=int(doc["k"], 16),
            R=params_for(scheme).decode_point(bytes.fromhex(doc["R"])),
            tx=tx_from_canonical_bytes(bytes.fromhex(doc["tx"])),
            share=share,
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise StorageFormatError(f"session payload corrupt: {exc}") from exc
