"""Probabilistic primality testing and prime generation."""

from __future__ import annotations

from .groups import SYSTEM_RNG

MILLER_RABIN_ROUNDS = 40  # error probability < 4^-40 < 2^-80

_SMALL_PRIMES = []
_sieve = bytearray([1]) * 2000
_sieve[0] = _sieve[1] = 0
for _i in range(2, 2000):
    if _sieve[_i]:
        _SMALL_PRIMES.append(_i)
        for _j in range(_i * _i, 2000, _i):
            _sieve[_j] = 0
del _sieve


def is_probable_prime(n: int, rounds: int = MILLER_RABIN_ROUNDS, rng=None) -> bool:
    """Miller-Rabin with random bases."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    rng = rng or SYSTEM_RNG
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for _ in range(rounds):
        a = rng.randrange(2, n - 1)
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def generate_prime(bits: int, rng=None) -> int:
    """Random prime with the top two bits set, so products have exact bit length."""
    if bits < 16:
        raise ValueError("prime size too small")
    rng = rng or SYSTEM_RNG
    top = (1 << (bits - 1)) | (1 << (bits - 2))
    while True:
        candidate = rng.getrandbits(bits) | top | 1
        if is_probable_prime(candidate, rng=rng):
            return candidate
