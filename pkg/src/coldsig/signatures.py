"""Single-party ECDSA and Schnorr over the group abstraction.

These are both the building blocks for the two-party sessions and the
final check every aggregated signature must pass: a completed two-party
run is accepted only if it verifies here, unchanged.

ECDSA signatures are low-s normalized at construction (s <= (q-1)/2), so
each message has one canonical signature and the two-party output can be
compared byte-for-byte against direct signing.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    ConfigError,
    DegenerateNonceError,
    InconsistentShareError,
    MalformedFieldError,
    ZeroKeyError,
)
from .groups import GroupParams, Scheme, params_for

_MAX_NONCE_RETRIES = 3


def hash_to_scalar(data: bytes, params: GroupParams) -> int:
    """SHA-256(data) as a big-endian integer reduced mod the group order."""
    return params.hash_to_scalar(data)


@dataclass(frozen=True)
class Signature:
    """(r, s) for ECDSA or (e, s) for Schnorr; components nonzero and reduced."""

    scheme: Scheme
    first: int
    second: int

    def __post_init__(self):
        q = params_for(self.scheme).q
        if not (0 < self.first < q and 0 < self.second < q):
            raise MalformedFieldError("signature component out of range")
        if self.scheme is Scheme.ECDSA and self.second > (q - 1) // 2:
            raise MalformedFieldError("ECDSA signature is not low-s normalized")

    def to_bytes(self) -> bytes:
        params = params_for(self.scheme)
        return params.scalar_to_bytes(self.first) + params.scalar_to_bytes(self.second)

    @classmethod
    def from_bytes(cls, scheme: Scheme, data: bytes) -> "Signature":
        if len(data) != 64:
            raise MalformedFieldError(f"signature must be 64 bytes, got {len(data)}")
        params = params_for(scheme)
        return cls(scheme, params.scalar_from_bytes(data[:32]), params.scalar_from_bytes(data[32:]))


def ecdsa_sign(x: int, m: int, params: GroupParams, k: int | None = None, rng=None) -> Signature:
    """Sign scalar message m under key x; k is a test hook, never set in production."""
    q = params.q
    if x % q == 0:
        raise ZeroKeyError("ECDSA private key is zero")
    fixed_k = k is not None
    for _ in range(_MAX_NONCE_RETRIES):
        if not fixed_k:
            k = params.rand_scalar(rng)
        elif k % q == 0:
            raise DegenerateNonceError("fixed nonce is zero")
        R = params.base_mul(k)
        r = R.x_int() % q
        s_raw = pow(k, -1, q) * (m + r * x) % q
        if r == 0 or s_raw == 0:
            if fixed_k:
                raise DegenerateNonceError("fixed nonce produced r=0 or s=0")
            continue
        s = min(s_raw, q - s_raw)
        return Signature(Scheme.ECDSA, r, s)
    raise DegenerateNonceError("could not find a non-degenerate nonce")


def _ecdsa_verify_ints(P, m: int, r: int, s: int, params: GroupParams) -> bool:
    """Raw Table-style verification; accepts both s and q-s (malleable)."""
    q = params.q
    if not (0 < r < q and 0 < s < q):
        return False
    s_inv = pow(s, -1, q)
    u1 = m * s_inv % q
    u2 = r * s_inv % q
    R = params.base_mul(u1) + P.mul(u2)
    if R.is_identity():
        return False
    return R.x_int() % q == r


def ecdsa_verify(P, m: int, sig: Signature, params: GroupParams) -> bool:
    if P.is_identity():
        raise ConfigError("public key is the identity point")
    if sig.scheme is not Scheme.ECDSA:
        return False
    return _ecdsa_verify_ints(P, m, sig.first, sig.second, params)


def schnorr_challenge(R, P, m: bytes, params: GroupParams) -> int:
    """e = H(enc(R) || enc(P) || m) reduced mod q."""
    return params.hash_to_scalar(R.encode() + P.encode() + m)


def schnorr_sign(x: int, P, m: bytes, params: GroupParams, k: int | None = None, rng=None) -> Signature:
    """Sign message bytes m under key x with public point P; k is a test hook."""
    q = params.q
    if x % q == 0:
        raise ZeroKeyError("Schnorr private key is zero")
    if params.base_mul(x) != P:
        raise InconsistentShareError("public point does not match private scalar")
    fixed_k = k is not None
    for _ in range(_MAX_NONCE_RETRIES):
        if not fixed_k:
            k = params.rand_scalar(rng)
        elif k % q == 0:
            raise DegenerateNonceError("fixed nonce is zero")
        R = params.base_mul(k)
        if R.is_identity():
            raise DegenerateNonceError("nonce point is the identity")
        e = schnorr_challenge(R, P, m, params)
        s = (k + x * e) % q
        if e == 0 or s == 0:
            if fixed_k:
                raise DegenerateNonceError("fixed nonce produced e=0 or s=0")
            continue
        return Signature(Scheme.SCHNORR, e, s)
    raise DegenerateNonceError("could not find a non-degenerate nonce")


def schnorr_verify(P, m: bytes, sig: Signature, params: GroupParams) -> bool:
    if P.is_identity():
        raise ConfigError("public key is the identity point")
    if sig.scheme is not Scheme.SCHNORR:
        return False
    e, s = sig.first, sig.second
    R = params.base_mul(s) - P.mul(e)
    return schnorr_challenge(R, P, m, params) == e
