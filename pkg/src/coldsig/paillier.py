"""Additively homomorphic Paillier cryptosystem.

The simplified variant with g = n+1 and lambda = (p-1)(q_p-1). Adding two
ciphertexts multiplies them mod n^2; multiplying a plaintext scalar
through a ciphertext raises it to that power. The gateway uses this to
let the core fold its own key share into an encrypted partial signature
without ever seeing the gateway's share.

The second Paillier prime is named ``q_p`` throughout to keep it apart
from the elliptic-curve group order q.

Note: ``ct_scalar_mul`` does not re-randomize its output. Protocol
messages that embed such a ciphertext always combine it with a freshly
randomized one (see the signing session), so the composite stays fresh.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ConfigError, MalformedCiphertextError
from .groups import SYSTEM_RNG
from .numtheory import generate_prime, is_probable_prime

DEFAULT_MODULUS_BITS = 2048
MIN_MODULUS_BITS = 64  # test scale; production sessions enforce a curve-derived floor


@dataclass(frozen=True)
class PaillierPublicKey:
    n: int
    g: int
    n_sq: int = field(init=False, repr=False)

    def __post_init__(self):
        if self.g != self.n + 1:
            raise ConfigError("Paillier generator must be n+1")
        object.__setattr__(self, "n_sq", self.n * self.n)

    @property
    def bits(self) -> int:
        return self.n.bit_length()


@dataclass(frozen=True)
class PaillierSecretKey:
    p: int
    q_p: int
    lam: int = field(init=False, repr=False)
    mu: int = field(init=False, repr=False)

    def __post_init__(self):
        if self.p == self.q_p:
            raise ConfigError("Paillier primes must be distinct")
        n = self.p * self.q_p
        lam = (self.p - 1) * (self.q_p - 1)
        if math.gcd(n, lam) != 1:
            raise ConfigError("gcd(n, (p-1)(q_p-1)) must be 1")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "mu", pow(lam, -1, n))

    @property
    def n(self) -> int:
        return self.p * self.q_p

    def public_key(self) -> PaillierPublicKey:
        return PaillierPublicKey(n=self.n, g=self.n + 1)


@dataclass(frozen=True)
class PaillierCiphertext:
    value: int
    public_key: PaillierPublicKey

    def __post_init__(self):
        pk = self.public_key
        if not 0 < self.value < pk.n_sq:
            raise MalformedCiphertextError("ciphertext outside (0, n^2)")
        if math.gcd(self.value, pk.n) != 1:
            raise MalformedCiphertextError("ciphertext not coprime to n")


def keygen_from_primes(p: int, q_p: int) -> tuple[PaillierPublicKey, PaillierSecretKey]:
    """Build a keypair from caller-supplied primes (test injection point)."""
    if not (is_probable_prime(p) and is_probable_prime(q_p)):
        raise ConfigError("injected Paillier factors must be prime")
    sk = PaillierSecretKey(p=p, q_p=q_p)
    return sk.public_key(), sk


def paillier_keygen(bits: int = DEFAULT_MODULUS_BITS, rng=None) -> tuple[PaillierPublicKey, PaillierSecretKey]:
    if bits < MIN_MODULUS_BITS:
        raise ConfigError(f"Paillier modulus must be at least {MIN_MODULUS_BITS} bits")
    rng = rng or SYSTEM_RNG
    half = bits // 2
    while True:
        p = generate_prime(bits - half, rng)
        q_p = generate_prime(half, rng)
        if p == q_p:
            continue
        n = p * q_p
        if math.gcd(n, (p - 1) * (q_p - 1)) != 1:
            continue
        sk = PaillierSecretKey(p=p, q_p=q_p)
        return sk.public_key(), sk


def paillier_encrypt(pk: PaillierPublicKey, m: int, r: int | None = None, rng=None) -> PaillierCiphertext:
    """c = g^m * r^n mod n^2 with fresh randomness r unless injected."""
    if not 0 <= m < pk.n:
        raise ConfigError("plaintext out of range [0, n)")
    if r is None:
        rng = rng or SYSTEM_RNG
        while True:
            r = rng.randrange(1, pk.n)
            if math.gcd(r, pk.n) == 1:
                break
    elif not 0 < r < pk.n or math.gcd(r, pk.n) != 1:
        raise ConfigError("encryption randomness must be in Z*_n")
    c = pow(pk.g, m, pk.n_sq) * pow(r, pk.n, pk.n_sq) % pk.n_sq
    return PaillierCiphertext(c, pk)


def paillier_decrypt(pk: PaillierPublicKey, sk: PaillierSecretKey, ct: PaillierCiphertext) -> int:
    """m = L(c^lam mod n^2) * mu mod n with L(x) = (x-1)/n exactly."""
    if sk.n != pk.n:
        raise ConfigError("secret key does not match public key")
    if ct.public_key.n != pk.n:
        raise ConfigError("ciphertext under a different key")
    if math.gcd(ct.value, pk.n) != 1:
        raise MalformedCiphertextError("ciphertext not coprime to n")
    u = pow(ct.value, sk.lam, pk.n_sq)
    if (u - 1) % pk.n != 0:
        raise MalformedCiphertextError("L is undefined: c^lam mod n^2 != 1 mod n")
    return (u - 1) // pk.n * sk.mu % pk.n


def paillier_ct_add(pk: PaillierPublicKey, c1: PaillierCiphertext, c2: PaillierCiphertext) -> PaillierCiphertext:
    """Decrypts to (m1 + m2) mod n."""
    if c1.public_key.n != pk.n or c2.public_key.n != pk.n:
        raise ConfigError("ciphertexts under a different key")
    return PaillierCiphertext(c1.value * c2.value % pk.n_sq, pk)


def paillier_ct_scalar_mul(pk: PaillierPublicKey, ct: PaillierCiphertext, a: int) -> PaillierCiphertext:
    """Decrypts to a*m mod n. a=0 collapses randomness to Enc(0; r=1)."""
    if ct.public_key.n != pk.n:
        raise ConfigError("ciphertext under a different key")
    if a < 0:
        raise ConfigError("scalar must be non-negative")
    return PaillierCiphertext(pow(ct.value, a, pk.n_sq), pk)
