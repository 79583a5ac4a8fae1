"""Two-party cold-wallet key generation and signing.

The wallet private key is split between two devices (an internet-facing
gateway and an air-gapped core) and is never assembled anywhere: ECDSA
shares combine multiplicatively with the core working on the gateway's
Paillier-encrypted share, Schnorr shares combine additively. Finished
signatures are indistinguishable from single-party ones. Protocol
messages travel as checksummed binary envelope files, standing in for
removable storage crossing the air gap.
"""

from .errors import ColdSigError
from .groups import Role, Scheme, params_for
from .keygen import (
    KeyShare,
    KeygenPubMsg,
    WalletDescriptor,
    combine_public_key,
    derive_address,
    generate_share,
)
from .paillier import (
    PaillierCiphertext,
    PaillierPublicKey,
    PaillierSecretKey,
    paillier_ct_add,
    paillier_ct_scalar_mul,
    paillier_decrypt,
    paillier_encrypt,
    paillier_keygen,
)
from .signatures import Signature, ecdsa_sign, ecdsa_verify, hash_to_scalar, schnorr_sign, schnorr_verify
from .signing import (
    EcdsaSignMsg1,
    EcdsaSignMsg2,
    Phase,
    SchnorrSignMsg1,
    SchnorrSignMsg2,
    SigningSession,
    ecdsa_core_respond,
    ecdsa_gateway_finalize,
    ecdsa_gateway_init,
    schnorr_core_respond,
    schnorr_gateway_finalize,
    schnorr_gateway_init,
)
from .storage import load_session, load_share, save_session, save_share
from .transaction import Policy, Transaction, check_policy, load_policy, tx_canonical_bytes, tx_from_json, tx_hash
from .envelope import decode_envelope, encode_envelope

__version__ = "0.1.0"

__all__ = [
    "ColdSigError",
    "EcdsaSignMsg1",
    "EcdsaSignMsg2",
    "KeyShare",
    "KeygenPubMsg",
    "PaillierCiphertext",
    "PaillierPublicKey",
    "PaillierSecretKey",
    "Phase",
    "Policy",
    "Role",
    "Scheme",
    "SchnorrSignMsg1",
    "SchnorrSignMsg2",
    "Signature",
    "SigningSession",
    "Transaction",
    "WalletDescriptor",
    "check_policy",
    "combine_public_key",
    "decode_envelope",
    "derive_address",
    "ecdsa_core_respond",
    "ecdsa_gateway_finalize",
    "ecdsa_gateway_init",
    "ecdsa_sign",
    "ecdsa_verify",
    "encode_envelope",
    "generate_share",
    "hash_to_scalar",
    "load_policy",
    "load_session",
    "load_share",
    "paillier_ct_add",
    "paillier_ct_scalar_mul",
    "paillier_decrypt",
    "paillier_encrypt",
    "paillier_keygen",
    "params_for",
    "save_session",
    "save_share",
    "schnorr_core_respond",
    "schnorr_gateway_finalize",
    "schnorr_gateway_init",
    "schnorr_sign",
    "schnorr_verify",
    "tx_canonical_bytes",
    "tx_from_json",
    "tx_hash",
]
