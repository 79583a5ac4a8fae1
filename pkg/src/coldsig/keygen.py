"""Two-party wallet creation.

Each party draws a local share and only public points cross the channel.
The shared wallet key combines multiplicatively for ECDSA
(P = x_own * peer_P, so both sides land on x1*x2*G) and additively for
Schnorr (P = P_own + peer_P). The combined secret scalar never exists on
either device.

The Schnorr additive combine is done exactly as the plain public-key
exchange prescribes, without a key-ownership proof; a peer who chooses
its share after seeing yours can bias the aggregate key (rogue-key
caveat). Deploy on an authenticated exchange channel.
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, field

from .errors import ConfigError, IntegrityError, InconsistentShareError
from .groups import GroupParams, Role, Scheme, params_for
from .paillier import (
    DEFAULT_MODULUS_BITS,
    PaillierCiphertext,
    PaillierPublicKey,
    PaillierSecretKey,
    paillier_encrypt,
    paillier_keygen,
)

ADDRESS_PREFIX = "cw1"
ADDRESS_DIGEST_CHARS = 40


def min_paillier_bits(params: GroupParams) -> int:
    """Floor keeping the encrypted partial signature below n: its plaintext
    reaches ~q^3, so the modulus gets 64 bits of headroom on top of 3*|q|."""
    return 3 * params.q.bit_length() + 64


@dataclass
class PaillierKeypair:
    pk: PaillierPublicKey
    sk: PaillierSecretKey


@dataclass
class KeyShare:
    """One party's half of a wallet: secret scalar, its public point, and
    (once the peer's point arrives) the combined wallet key."""

    scheme: Scheme
    role: Role
    x: int
    public_point: object
    p_shared: object | None = None
    recoverable: bool = False
    paillier: PaillierKeypair | None = None
    c_key: PaillierCiphertext | None = field(default=None, repr=False)

    def __post_init__(self):
        params = params_for(self.scheme)
        if self.x % params.q == 0:
            raise ConfigError("key share scalar is zero")
        if params.base_mul(self.x) != self.public_point:
            raise InconsistentShareError("share public point does not match secret scalar")

    @property
    def params(self) -> GroupParams:
        return params_for(self.scheme)

    def require_shared(self):
        if self.p_shared is None:
            raise ConfigError("shared public key not established; finish keygen first")
        return self.p_shared


def _needs_paillier(scheme: Scheme, role: Role) -> bool:
    return scheme is Scheme.ECDSA and role in (Role.GATEWAY, Role.USER)


def generate_share(
    scheme: Scheme,
    role: Role,
    rng=None,
    paillier_bits: int = DEFAULT_MODULUS_BITS,
    master_seed: bytes | None = None,
    account_id: str | None = None,
) -> KeyShare:
    """Draw a fresh share; with master_seed/account_id, derive it
    deterministically instead (recoverable mode for the user role)."""
    scheme = Scheme(scheme)
    role = Role(role)
    params = params_for(scheme)
    if (master_seed is None) != (account_id is None):
        raise ConfigError("master_seed and account_id must be given together")
    recoverable = master_seed is not None
    if recoverable:
        x = params.hash_to_scalar(master_seed + account_id.encode("utf-8"))
        if x == 0:
            raise ConfigError("degenerate master-seed derivation")
    else:
        x = params.rand_scalar(rng)
    share = KeyShare(
        scheme=scheme,
        role=role,
        x=x,
        public_point=params.base_mul(x),
        recoverable=recoverable,
    )
    if _needs_paillier(scheme, role):
        floor = min_paillier_bits(params)
        if paillier_bits < floor:
            raise ConfigError(f"ECDSA sessions need a Paillier modulus of >= {floor} bits, got {paillier_bits}")
        pk, sk = paillier_keygen(paillier_bits, rng)
        share.paillier = PaillierKeypair(pk=pk, sk=sk)
        share.c_key = paillier_encrypt(pk, x, rng=rng)
    return share


def combine_public_key(own: KeyShare, peer_point) -> object:
    """Derive the shared wallet key from the peer's public point and store it."""
    if peer_point.is_identity():
        raise IntegrityError("peer public point is the identity")
    if own.scheme is Scheme.ECDSA:
        shared = peer_point.mul(own.x)
    else:
        shared = own.public_point + peer_point
    if shared.is_identity():
        raise IntegrityError("combined public key is the identity")
    own.p_shared = shared
    return shared


def derive_address(scheme: Scheme, p_shared) -> str:
    digest = hashlib.sha256(p_shared.encode()).hexdigest()
    return ADDRESS_PREFIX + digest[:ADDRESS_DIGEST_CHARS]


@dataclass(frozen=True)
class KeygenPubMsg:
    """The single keygen exchange message: one public point, nothing else."""

    scheme: Scheme
    public_point: object

    def __post_init__(self):
        if self.public_point.is_identity():
            raise IntegrityError("keygen public point is the identity")


@dataclass(frozen=True)
class WalletDescriptor:
    scheme: Scheme
    p_shared: object
    address: str
    created_at: float

    @classmethod
    def from_share(cls, share: KeyShare) -> "WalletDescriptor":
        shared = share.require_shared()
        return cls(
            scheme=share.scheme,
            p_shared=shared,
            address=derive_address(share.scheme, shared),
            created_at=time.time(),
        )
