"""Prime-order group abstraction shared by both signature schemes.

Scalars are plain Python ints reduced mod the group order ``q``; range
checks happen at construction and wire boundaries. Points are backend
objects (:mod:`.secp256k1`, :mod:`.ristretto255`) sharing one duck-typed
surface: ``+``, ``-``, ``mul``, ``encode``, ``is_identity``.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

from . import ristretto255, secp256k1
from .errors import MalformedFieldError

SYSTEM_RNG = random.SystemRandom()

SCALAR_SIZE = 32


class Scheme(str, Enum):
    ECDSA = "ecdsa"
    SCHNORR = "schnorr"

    @property
    def wire_byte(self) -> int:
        return 1 if self is Scheme.ECDSA else 2

    @classmethod
    def from_wire(cls, b: int) -> "Scheme":
        if b == 1:
            return cls.ECDSA
        if b == 2:
            return cls.SCHNORR
        raise MalformedFieldError(f"unknown scheme byte {b}")


class Role(str, Enum):
    GATEWAY = "gateway"
    CORE = "core"
    USER = "user"


@dataclass(frozen=True)
class GroupParams:
    """One curve: order, generator, and point codec hooks."""

    curve_id: str
    q: int
    G: object
    point_size: int
    base_mul: Callable[[int], object] = field(repr=False)
    _decode_point: Callable[[bytes], object] = field(repr=False)

    def decode_point(self, data: bytes):
        return self._decode_point(data)

    def hash_to_scalar(self, data: bytes) -> int:
        """SHA-256 of ``data`` as a big-endian integer mod q."""
        return int.from_bytes(hashlib.sha256(data).digest(), "big") % self.q

    def rand_scalar(self, rng=None) -> int:
        """Uniform nonzero scalar."""
        return (rng or SYSTEM_RNG).randrange(1, self.q)

    def scalar_to_bytes(self, v: int) -> bytes:
        return v.to_bytes(SCALAR_SIZE, "big")

    def scalar_from_bytes(self, data: bytes) -> int:
        if len(data) != SCALAR_SIZE:
            raise MalformedFieldError(f"scalar must be {SCALAR_SIZE} bytes, got {len(data)}")
        v = int.from_bytes(data, "big")
        if v >= self.q:
            raise MalformedFieldError("scalar not reduced mod group order")
        return v


SECP256K1 = GroupParams(
    curve_id="secp256k1",
    q=secp256k1.ORDER,
    G=secp256k1.GENERATOR,
    point_size=secp256k1.POINT_SIZE,
    base_mul=secp256k1.base_mul,
    _decode_point=secp256k1.decode_point,
)

RISTRETTO255 = GroupParams(
    curve_id="ristretto255",
    q=ristretto255.ORDER,
    G=ristretto255.GENERATOR,
    point_size=ristretto255.POINT_SIZE,
    base_mul=ristretto255.base_mul,
    _decode_point=ristretto255.decode_point,
)

_BY_SCHEME = {Scheme.ECDSA: SECP256K1, Scheme.SCHNORR: RISTRETTO255}


def params_for(scheme: Scheme) -> GroupParams:
    return _BY_SCHEME[Scheme(scheme)]
