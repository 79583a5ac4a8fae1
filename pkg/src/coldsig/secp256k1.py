"""secp256k1 group arithmetic.

Points are held in Jacobian coordinates internally so a scalar
multiplication costs a single field inversion. Encoding is 33-byte
compressed SEC1. Not constant-time.
"""

from __future__ import annotations

from .errors import MalformedFieldError

P = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEFFFFFC2F
ORDER = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEBAAEDCE6AF48A03BBFD25E8CD0364141
B = 7
GX = 0x79BE667EF9DCBBAC55A06295CE870B07029BFCDB2DCE28D959F2815B16F81798
GY = 0x483ADA7726A3C4655DA4FBFC0E1108A8FD17B448A68554199C47D08FFB10D4B8

POINT_SIZE = 33

# Jacobian triples (X, Y, Z); Z == 0 marks the point at infinity.
_INF = (0, 1, 0)


def _jac_double(pt):
    x1, y1, z1 = pt
    if z1 == 0 or y1 == 0:
        return _INF
    ysq = y1 * y1 % P
    s = 4 * x1 * ysq % P
    m = 3 * x1 * x1 % P
    x3 = (m * m - 2 * s) % P
    y3 = (m * (s - x3) - 8 * ysq * ysq) % P
    z3 = 2 * y1 * z1 % P
    return (x3, y3, z3)


def _jac_add(p1, p2):
    if p1[2] == 0:
        return p2
    if p2[2] == 0:
        return p1
    x1, y1, z1 = p1
    x2, y2, z2 = p2
    z1sq = z1 * z1 % P
    z2sq = z2 * z2 % P
    u1 = x1 * z2sq % P
    u2 = x2 * z1sq % P
    s1 = y1 * z2sq * z2 % P
    s2 = y2 * z1sq * z1 % P
    if u1 == u2:
        if s1 != s2:
            return _INF
        return _jac_double(p1)
    h = (u2 - u1) % P
    r = (s2 - s1) % P
    hsq = h * h % P
    hcu = h * hsq % P
    u1hsq = u1 * hsq % P
    x3 = (r * r - hcu - 2 * u1hsq) % P
    y3 = (r * (u1hsq - x3) - s1 * hcu) % P
    z3 = h * z1 * z2 % P
    return (x3, y3, z3)


def _jac_mul(pt, k):
    k %= ORDER
    if k == 0 or pt[2] == 0:
        return _INF
    acc = _INF
    for bit in bin(k)[2:]:
        acc = _jac_double(acc)
        if bit == "1":
            acc = _jac_add(acc, pt)
    return acc


class Secp256k1Point:
    """Immutable curve point; the public API the protocol layers use."""

    __slots__ = ("_jac", "_affine")

    def __init__(self, jac):
        self._jac = jac
        self._affine = None

    def _to_affine(self):
        if self._affine is None:
            x, y, z = self._jac
            if z == 0:
                raise MalformedFieldError("point at infinity has no affine form")
            zinv = pow(z, -1, P)
            zinv2 = zinv * zinv % P
            self._affine = (x * zinv2 % P, y * zinv2 * zinv % P)
        return self._affine

    def is_identity(self) -> bool:
        return self._jac[2] == 0

    def x_int(self) -> int:
        return self._to_affine()[0]

    def y_int(self) -> int:
        return self._to_affine()[1]

    def __add__(self, other: "Secp256k1Point") -> "Secp256k1Point":
        return Secp256k1Point(_jac_add(self._jac, other._jac))

    def __neg__(self) -> "Secp256k1Point":
        x, y, z = self._jac
        return Secp256k1Point((x, -y % P, z))

    def __sub__(self, other: "Secp256k1Point") -> "Secp256k1Point":
        return self + (-other)

    def mul(self, k: int) -> "Secp256k1Point":
        return Secp256k1Point(_jac_mul(self._jac, k))

    def __rmul__(self, k: int) -> "Secp256k1Point":
        return self.mul(k)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Secp256k1Point):
            return NotImplemented
        x1, y1, z1 = self._jac
        x2, y2, z2 = other._jac
        if z1 == 0 or z2 == 0:
            return z1 == z2
        z1sq = z1 * z1 % P
        z2sq = z2 * z2 % P
        if x1 * z2sq % P != x2 * z1sq % P:
            return False
        return y1 * z2sq * z2 % P == y2 * z1sq * z1 % P

    def __hash__(self):
        if self.is_identity():
            return hash(b"secp256k1:inf")
        return hash(self.encode())

    def encode(self) -> bytes:
        x, y = self._to_affine()
        return bytes([2 + (y & 1)]) + x.to_bytes(32, "big")

    def __repr__(self):
        if self.is_identity():
            return "Secp256k1Point(infinity)"
        return f"Secp256k1Point({self.encode().hex()})"


IDENTITY = Secp256k1Point(_INF)
GENERATOR = Secp256k1Point((GX, GY, 1))


def _build_base_table():
    table = []
    pt = GENERATOR._jac
    for _ in range(ORDER.bit_length()):
        table.append(pt)
        pt = _jac_double(pt)
    return tuple(table)


# built at import so threads only ever read it
_BASE_TABLE = _build_base_table()


def base_mul(k: int) -> Secp256k1Point:
    """k*G using the precomputed table of doubled generators."""
    k %= ORDER
    if k == 0:
        return IDENTITY
    acc = _INF
    i = 0
    while k:
        if k & 1:
            acc = _jac_add(acc, _BASE_TABLE[i])
        k >>= 1
        i += 1
    return Secp256k1Point(acc)


def decode_point(data: bytes) -> Secp256k1Point:
    """Parse a 33-byte compressed SEC1 encoding; rejects off-curve values."""
    if len(data) != POINT_SIZE:
        raise MalformedFieldError(f"secp256k1 point must be {POINT_SIZE} bytes, got {len(data)}")
    prefix = data[0]
    if prefix not in (2, 3):
        raise MalformedFieldError(f"bad SEC1 prefix 0x{prefix:02x}")
    x = int.from_bytes(data[1:], "big")
    if x >= P:
        raise MalformedFieldError("x coordinate not a field element")
    y_sq = (pow(x, 3, P) + B) % P
    y = pow(y_sq, (P + 1) // 4, P)
    if y * y % P != y_sq:
        raise MalformedFieldError("x coordinate not on curve")
    if y & 1 != prefix & 1:
        y = P - y
    return Secp256k1Point((x, y, 1))
