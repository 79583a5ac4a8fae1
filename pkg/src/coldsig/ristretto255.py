"""ristretto255 group arithmetic.

Prime-order group built as the standard quotient construction over
edwards25519, with the canonical 32-byte encoding. Internal representation
is extended Edwards coordinates (X, Y, Z, T); the complete addition
formulas need no special cases. Not constant-time.
"""

from __future__ import annotations

from .errors import MalformedFieldError

P = 2**255 - 19
ORDER = 2**252 + 27742317777372353535851937790883648493

D = (-121665 * pow(121666, -1, P)) % P
SQRT_M1 = pow(2, (P - 1) // 4, P)

POINT_SIZE = 32


def _sqrt_ratio_m1(u, v):
    """(was_square, r) with r = sqrt(u/v) when u/v is square, else sqrt(i*u/v)."""
    v3 = v * v % P * v % P
    v7 = v3 * v3 % P * v % P
    r = u * v3 % P * pow(u * v7 % P, (P - 5) // 8, P) % P
    check = v * r % P * r % P
    u_neg = -u % P
    correct_sign = check == u % P
    flipped_sign = check == u_neg
    flipped_sign_i = check == u_neg * SQRT_M1 % P
    if flipped_sign or flipped_sign_i:
        r = r * SQRT_M1 % P
    if r & 1:
        r = P - r
    return (correct_sign or flipped_sign), r


_sq, INVSQRT_A_MINUS_D = _sqrt_ratio_m1(1, (-1 - D) % P)
assert _sq

# edwards25519 base point: y = 4/5, x the even square root.
_BY = 4 * pow(5, -1, P) % P
_sq, _BX = _sqrt_ratio_m1((_BY * _BY - 1) % P, (D * _BY * _BY + 1) % P)
assert _sq

_IDENTITY = (0, 1, 1, 0)
_BASE = (_BX, _BY, 1, _BX * _BY % P)

_D2 = 2 * D % P


def _ext_add(p1, p2):
    x1, y1, z1, t1 = p1
    x2, y2, z2, t2 = p2
    a = (y1 - x1) * (y2 - x2) % P
    b = (y1 + x1) * (y2 + x2) % P
    c = t1 * _D2 % P * t2 % P
    d = 2 * z1 * z2 % P
    e = b - a
    f = d - c
    g = d + c
    h = b + a
    return (e * f % P, g * h % P, f * g % P, e * h % P)


def _ext_double(p1):
    x1, y1, z1, _ = p1
    a = x1 * x1 % P
    b = y1 * y1 % P
    c = 2 * z1 * z1 % P
    h = a + b
    e = (h - (x1 + y1) ** 2) % P
    g = a - b
    f = c + g
    return (e * f % P, g * h % P, f * g % P, e * h % P)


def _ext_mul(pt, k):
    k %= ORDER
    if k == 0:
        return _IDENTITY
    acc = _IDENTITY
    for bit in bin(k)[2:]:
        acc = _ext_double(acc)
        if bit == "1":
            acc = _ext_add(acc, pt)
    return acc


class RistrettoPoint:
    __slots__ = ("_ext",)

    def __init__(self, ext):
        self._ext = ext

    def is_identity(self) -> bool:
        x, y, _, _ = self._ext
        return x % P == 0 or y % P == 0

    def __add__(self, other: "RistrettoPoint") -> "RistrettoPoint":
        return RistrettoPoint(_ext_add(self._ext, other._ext))

    def __neg__(self) -> "RistrettoPoint":
        x, y, z, t = self._ext
        return RistrettoPoint((-x % P, y, z, -t % P))

    def __sub__(self, other: "RistrettoPoint") -> "RistrettoPoint":
        return self + (-other)

    def mul(self, k: int) -> "RistrettoPoint":
        return RistrettoPoint(_ext_mul(self._ext, k))

    def __rmul__(self, k: int) -> "RistrettoPoint":
        return self.mul(k)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RistrettoPoint):
            return NotImplemented
        x1, y1, _, _ = self._ext
        x2, y2, _, _ = other._ext
        return (x1 * y2 - y1 * x2) % P == 0 or (x1 * x2 - y1 * y2) % P == 0

    def __hash__(self):
        return hash(self.encode())

    def encode(self) -> bytes:
        x0, y0, z0, t0 = self._ext
        u1 = (z0 + y0) * (z0 - y0) % P
        u2 = x0 * y0 % P
        _, invsqrt = _sqrt_ratio_m1(1, u1 * u2 % P * u2 % P)
        den1 = invsqrt * u1 % P
        den2 = invsqrt * u2 % P
        z_inv = den1 * den2 % P * t0 % P
        if t0 * z_inv % P & 1:
            x = y0 * SQRT_M1 % P
            y = x0 * SQRT_M1 % P
            den_inv = den1 * INVSQRT_A_MINUS_D % P
        else:
            x = x0 % P
            y = y0 % P
            den_inv = den2
        if x * z_inv % P & 1:
            y = -y % P
        s = den_inv * (z0 - y) % P
        if s & 1:
            s = P - s
        return s.to_bytes(32, "little")

    def __repr__(self):
        return f"RistrettoPoint({self.encode().hex()})"


IDENTITY = RistrettoPoint(_IDENTITY)
GENERATOR = RistrettoPoint(_BASE)


def _build_base_table():
    table = []
    pt = _BASE
    for _ in range(ORDER.bit_length()):
        table.append(pt)
        pt = _ext_double(pt)
    return tuple(table)


# built at import so threads only ever read it
_BASE_TABLE = _build_base_table()


def base_mul(k: int) -> RistrettoPoint:
    """k*G using the precomputed table of doubled generators."""
    k %= ORDER
    if k == 0:
        return IDENTITY
    acc = _IDENTITY
    i = 0
    while k:
        if k & 1:
            acc = _ext_add(acc, _BASE_TABLE[i])
        k >>= 1
        i += 1
    return RistrettoPoint(acc)


def decode_point(data: bytes) -> RistrettoPoint:
    """Parse the canonical 32-byte encoding; rejects non-canonical strings."""
    if len(data) != POINT_SIZE:
        raise MalformedFieldError(f"ristretto255 point must be {POINT_SIZE} bytes, got {len(data)}")
    s = int.from_bytes(data, "little")
    if s >= P:
        raise MalformedFieldError("non-canonical ristretto255 encoding")
    if s & 1:
        raise MalformedFieldError("negative ristretto255 encoding")
    ss = s * s % P
    u1 = (1 - ss) % P
    u2 = (1 + ss) % P
    u2_sqr = u2 * u2 % P
    v = (-(D * u1 % P * u1 % P) - u2_sqr) % P
    was_square, invsqrt = _sqrt_ratio_m1(1, v * u2_sqr % P)
    den_x = invsqrt * u2 % P
    den_y = invsqrt * den_x % P * v % P
    x = 2 * s * den_x % P
    if x & 1:
        x = P - x
    y = u1 * den_y % P
    t = x * y % P
    if not was_square or t & 1 or y == 0:
        raise MalformedFieldError("invalid ristretto255 encoding")
    return RistrettoPoint((x, y, 1, t))
