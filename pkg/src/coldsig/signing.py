"""Two-round two-party signing sessions.

ECDSA: the gateway sends its nonce point, its Paillier public key, and its
Paillier-encrypted key share; the core folds the message, its own key
share, and its nonce into one ciphertext C3 = Enc[k2^-1 * (m + r*x1*x2)],
masked with rho*q so the decrypted value reveals only the mod-q residue.
The gateway decrypts, multiplies by k1^-1, and low-s normalizes.

Schnorr: plain nonce-point exchange and partial signatures
s_i = k_i + x_i*e with e = H(R1+R2 || P || m); the sum verifies under the
ordinary single-party verifier.

The `k` and `rho` parameters on the session functions are test hooks for
deterministic runs; production callers leave them unset and values come
from the OS RNG. A session hands out exactly one signature: any second
finalize attempt, successful or not, raises.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .errors import (
    ConfigError,
    DegenerateNonceError,
    IntegrityError,
    NonceReuseError,
    PolicyError,
    VerifyError,
)
from .groups import SYSTEM_RNG, Role, Scheme, params_for
from .keygen import KeyShare, min_paillier_bits
from .paillier import (
    PaillierCiphertext,
    PaillierPublicKey,
    paillier_ct_add,
    paillier_ct_scalar_mul,
    paillier_decrypt,
    paillier_encrypt,
)
from .signatures import Signature, ecdsa_verify, schnorr_challenge, schnorr_verify
from .transaction import Policy, Transaction, check_policy, tx_canonical_bytes, tx_from_canonical_bytes, tx_hash

SESSION_ID_SIZE = 16
_MAX_RETRIES = 3


class Phase(str, Enum):
    INIT = "init"
    AWAITING_PEER = "awaiting_peer"
    COMPLETE = "complete"
    FAILED = "failed"


def _check_nonce_point(point, label: str):
    if point.is_identity():
        raise IntegrityError(f"{label} is the identity point")


@dataclass(frozen=True)
class EcdsaSignMsg1:
    """Gateway -> core: raw tx, its hash m, Paillier pk, Enc(x1), nonce point R1."""

    tx_bytes: bytes
    m: int
    pk: PaillierPublicKey
    c_key: PaillierCiphertext
    R1: object

    def __post_init__(self):
        _check_nonce_point(self.R1, "R1")
        params = params_for(Scheme.ECDSA)
        floor = min_paillier_bits(params)
        if self.pk.bits < floor:
            raise ConfigError(f"Paillier modulus {self.pk.bits} bits below required {floor}")
        if not 0 <= self.m < params.q:
            raise ConfigError("message scalar out of range")


@dataclass(frozen=True)
class EcdsaSignMsg2:
    """Core -> gateway: masked encrypted partial signature and nonce point R2."""

    c3: PaillierCiphertext
    R2: object

    def __post_init__(self):
        _check_nonce_point(self.R2, "R2")


@dataclass(frozen=True)
class SchnorrSignMsg1:
    """Gateway -> core: raw tx bytes (the message itself) and nonce point R1."""

    m: bytes
    R1: object

    def __post_init__(self):
        _check_nonce_point(self.R1, "R1")


@dataclass(frozen=True)
class SchnorrSignMsg2:
    """Core -> gateway: partial signature s2 and nonce point R2."""

    s2: int
    R2: object

    def __post_init__(self):
        _check_nonce_point(self.R2, "R2")
        if not 0 <= self.s2 < params_for(Scheme.SCHNORR).q:
            raise ConfigError("partial signature out of range")


@dataclass
class SigningSession:
    """Initiator-side state between the two rounds. The nonce k never
    leaves the process except through encrypted session persistence."""

    scheme: Scheme
    role: Role
    session_id: bytes
    phase: Phase
    k: int = field(repr=False)
    R: object
    tx: Transaction
    share: KeyShare = field(repr=False)

    def _take_phase(self, expected: Phase):
        if self.phase in (Phase.COMPLETE, Phase.FAILED):
            raise NonceReuseError(f"session already {self.phase.value}; nonces are single-use")
        if self.phase is not expected:
            raise ConfigError(f"session in phase {self.phase.value}, expected {expected.value}")


def _new_session_id(rng) -> bytes:
    return rng.getrandbits(8 * SESSION_ID_SIZE).to_bytes(SESSION_ID_SIZE, "big")


def _require_initiator(share: KeyShare, scheme: Scheme):
    if share.scheme is not scheme:
        raise ConfigError(f"share is for {share.scheme.value}, not {scheme.value}")
    if share.role not in (Role.GATEWAY, Role.USER):
        raise ConfigError("only the gateway or user role initiates signing")
    share.require_shared()


def _require_core(share: KeyShare, scheme: Scheme):
    if share.scheme is not scheme:
        raise ConfigError(f"share is for {share.scheme.value}, not {scheme.value}")
    if share.role is not Role.CORE:
        raise ConfigError("only the core role responds to signing requests")
    share.require_shared()


def _policy_gate(tx: Transaction, policy: Policy):
    violations = check_policy(tx, policy)
    if violations:
        raise PolicyError(violations)


# --- ECDSA ---------------------------------------------------------------


def ecdsa_gateway_init(share: KeyShare, tx: Transaction, rng=None, k: int | None = None):
    """Round one. Returns the session to keep and the message to send."""
    rng = rng or SYSTEM_RNG
    _require_initiator(share, Scheme.ECDSA)
    if share.paillier is None or share.c_key is None:
        raise ConfigError("ECDSA initiator share carries no Paillier keypair")
    params = share.params
    k1 = k if k is not None else params.rand_scalar(rng)
    if k1 % params.q == 0:
        raise DegenerateNonceError("injected nonce is zero")
    R1 = params.base_mul(k1)
    msg1 = EcdsaSignMsg1(
        tx_bytes=tx_canonical_bytes(tx),
        m=tx_hash(tx, params),
        pk=share.paillier.pk,
        c_key=share.c_key,
        R1=R1,
    )
    session = SigningSession(
        scheme=Scheme.ECDSA,
        role=share.role,
        session_id=_new_session_id(rng),
        phase=Phase.AWAITING_PEER,
        k=k1,
        R=R1,
        tx=tx,
        share=share,
    )
    return session, msg1


def ecdsa_core_respond(
    share: KeyShare,
    msg1: EcdsaSignMsg1,
    tx: Transaction,
    policy: Policy,
    rng=None,
    k: int | None = None,
    rho: int | None = None,
) -> EcdsaSignMsg2:
    """Round two. The core re-derives the hash from the raw transaction and
    refuses on mismatch or policy violation before touching its share."""
    rng = rng or SYSTEM_RNG
    _require_core(share, Scheme.ECDSA)
    params = share.params
    if tx_canonical_bytes(tx) != msg1.tx_bytes:
        raise IntegrityError("transaction does not match the bytes in the signing request")
    if tx_hash(tx, params) != msg1.m:
        raise IntegrityError("recomputed transaction hash differs from presented m")
    _policy_gate(tx, policy)

    q = params.q
    for _ in range(_MAX_RETRIES):
        k2 = k if k is not None else params.rand_scalar(rng)
        if k2 % q == 0:
            raise DegenerateNonceError("injected nonce is zero")
        R = msg1.R1.mul(k2)
        r = R.x_int() % q
        if r == 0:
            if k is not None:
                raise DegenerateNonceError("injected nonce produced r=0")
            continue
        break
    else:
        raise DegenerateNonceError("could not find a nonce with r != 0")

    k2_inv = pow(k2, -1, q)
    rho_val = rho if rho is not None else rng.randrange(0, q * q)
    c1 = paillier_encrypt(msg1.pk, rho_val * q + k2_inv * msg1.m % q, rng=rng)
    c2 = paillier_ct_scalar_mul(msg1.pk, msg1.c_key, k2_inv * r % q * share.x % q)
    c3 = paillier_ct_add(msg1.pk, c1, c2)
    return EcdsaSignMsg2(c3=c3, R2=params.base_mul(k2))


def ecdsa_gateway_finalize(session: SigningSession, msg2: EcdsaSignMsg2) -> Signature:
    """Round three. Decrypt, unblind with k1^-1, low-s normalize, and verify
    against the shared key before releasing anything."""
    session._take_phase(Phase.AWAITING_PEER)
    if session.scheme is not Scheme.ECDSA:
        raise ConfigError("session is not an ECDSA session")
    share = session.share
    params = share.params
    q = params.q
    try:
        s_prime = paillier_decrypt(share.paillier.pk, share.paillier.sk, msg2.c3) % q
        s_double = pow(session.k, -1, q) * s_prime % q
        r = msg2.R2.mul(session.k).x_int() % q
        if r == 0 or s_double == 0:
            raise VerifyError("degenerate signature component from peer response")
        sig = Signature(Scheme.ECDSA, r, min(s_double, q - s_double))
        if not ecdsa_verify(share.require_shared(), tx_hash(session.tx, params), sig, params):
            raise VerifyError("final signature failed verification against the shared public key")
    except Exception:
        session.phase = Phase.FAILED
        raise
    session.phase = Phase.COMPLETE
    return sig


# --- Schnorr --------------------------------------------------------------


def schnorr_gateway_init(share: KeyShare, tx: Transaction, rng=None, k: int | None = None):
    """Round one: the raw transaction and the nonce point, nothing else."""
    rng = rng or SYSTEM_RNG
    _require_initiator(share, Scheme.SCHNORR)
    params = share.params
    k1 = k if k is not None else params.rand_scalar(rng)
    if k1 % params.q == 0:
        raise DegenerateNonceError("injected nonce is zero")
    R1 = params.base_mul(k1)
    msg1 = SchnorrSignMsg1(m=tx_canonical_bytes(tx), R1=R1)
    session = SigningSession(
        scheme=Scheme.SCHNORR,
        role=share.role,
        session_id=_new_session_id(rng),
        phase=Phase.AWAITING_PEER,
        k=k1,
        R=R1,
        tx=tx,
        share=share,
    )
    return session, msg1


def schnorr_core_respond(
    share: KeyShare,
    msg1: SchnorrSignMsg1,
    policy: Policy,
    rng=None,
    k: int | None = None,
) -> SchnorrSignMsg2:
    """The core parses the transaction out of the raw bytes itself, so the
    policy runs on exactly what will be signed."""
    rng = rng or SYSTEM_RNG
    _require_core(share, Scheme.SCHNORR)
    tx = tx_from_canonical_bytes(msg1.m)
    _policy_gate(tx, policy)
    params = share.params
    q = params.q
    shared = share.require_shared()
    for _ in range(_MAX_RETRIES):
        k2 = k if k is not None else params.rand_scalar(rng)
        if k2 % q == 0:
            raise DegenerateNonceError("injected nonce is zero")
        R2 = params.base_mul(k2)
        R = msg1.R1 + R2
        if R.is_identity():
            if k is not None:
                raise DegenerateNonceError("injected nonce cancels the peer nonce point")
            continue
        break
    else:
        raise DegenerateNonceError("could not find a nonce with R != identity")
    e = schnorr_challenge(R, shared, msg1.m, params)
    s2 = (k2 + share.x * e) % q
    return SchnorrSignMsg2(s2=s2, R2=R2)


def schnorr_gateway_finalize(session: SigningSession, msg2: SchnorrSignMsg2) -> Signature:
    session._take_phase(Phase.AWAITING_PEER)
    if session.scheme is not Scheme.SCHNORR:
        raise ConfigError("session is not a Schnorr session")
    share = session.share
    params = share.params
    q = params.q
    try:
        shared = share.require_shared()
        m = tx_canonical_bytes(session.tx)
        R = session.R + msg2.R2
        if R.is_identity():
            raise VerifyError("aggregate nonce point is the identity")
        e = schnorr_challenge(R, shared, m, params)
        s1 = (session.k + share.x * e) % q
        sig = Signature(Scheme.SCHNORR, e, (s1 + msg2.s2) % q)
        if not schnorr_verify(shared, m, sig, params):
            raise VerifyError("final signature failed verification against the shared public key")
    except Exception:
        session.phase = Phase.FAILED
        raise
    session.phase = Phase.COMPLETE
    return sig
