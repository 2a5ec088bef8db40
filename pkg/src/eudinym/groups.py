"""BLS12-381 group layer.

Scalars are plain ``int`` values reduced modulo :data:`R`.  G1 and G2 elements
are thin wrappers over the arkworks bindings so that the rest of the package
can use ``+``, ``-`` and ``int * point`` without touching backend types.
Hash-to-G1 follows RFC 9380 (``BLS12381G1_XMD:SHA-256_SSWU_RO_``).
"""

from __future__ import annotations

import hashlib
import secrets
from functools import lru_cache
from typing import Iterable, Sequence

import py_arkworks_bls12381 as _ark
from py_ecc.bls.hash_to_curve import expand_message_xmd, hash_to_G1
from py_ecc.bls.point_compression import compress_G1

from .errors import DecodeError, InvalidInput

#: Order of G1, G2 and GT.
R = 0x73EDA753299D7D483339D80809A1D80553BDA402FFFE5BFEFFFFFFFF00000001

SCALAR_LEN = 32
G1_LEN = 48
G2_LEN = 96

TAG_PREFIX = b"EUDINYM-v1-"


def tag(purpose: str) -> bytes:
    """Domain separation tag ``EUDINYM-v1-<purpose>``."""
    return TAG_PREFIX + purpose.encode("ascii")


# -- randomness -------------------------------------------------------------

class DeterministicRng:
    """Reproducible randomness source (SHA-256 in counter mode).

    Exposes the subset of the :mod:`secrets` API the package uses, so either
    can be passed wherever an ``rng`` is accepted.  Only for test vectors and
    golden files.
    """

    def __init__(self, seed: bytes | str):
        if isinstance(seed, str):
            seed = seed.encode()
        self._key = hashlib.sha256(b"EUDINYM-v1-drbg" + seed).digest()
        self._counter = 0

    def token_bytes(self, n: int) -> bytes:
        out = bytearray()
        while len(out) < n:
            block = hashlib.sha256(self._key + self._counter.to_bytes(8, "big")).digest()
            self._counter += 1
            out += block
        return bytes(out[:n])

    def randbelow(self, n: int) -> int:
        if n <= 0:
            raise ValueError("upper bound must be positive")
        # 64 surplus bits keep the modulo bias below 2^-64
        width = (n.bit_length() + 64 + 7) // 8
        return int.from_bytes(self.token_bytes(width), "big") % n


def random_scalar(rng=None) -> int:
    """Uniform non-zero scalar."""
    rng = rng or secrets
    return 1 + rng.randbelow(R - 1)


# -- scalars ----------------------------------------------------------------

def scalar_to_bytes(x: int) -> bytes:
    return (x % R).to_bytes(SCALAR_LEN, "big")


def scalar_from_bytes(data: bytes) -> int:
    if len(data) != SCALAR_LEN:
        raise DecodeError(f"scalar must be {SCALAR_LEN} bytes, got {len(data)}")
    x = int.from_bytes(data, "big")
    if x >= R:
        raise DecodeError("scalar encoding is not reduced modulo the group order")
    return x


def inv(x: int) -> int:
    x %= R
    if x == 0:
        raise ZeroDivisionError("zero has no inverse modulo R")
    return pow(x, -1, R)


def hash_to_scalar(data: bytes, domain_tag: bytes) -> int:
    if not domain_tag:
        raise InvalidInput("domain tag must be non-empty")
    uniform = expand_message_xmd(data, domain_tag, 48, hashlib.sha256)
    return int.from_bytes(uniform, "big") % R


# -- G1 / G2 ----------------------------------------------------------------

class _Point:
    __slots__ = ("_p",)
    _backend: type
    _size: int

    def __init__(self, backend_point):
        self._p = backend_point

    @classmethod
    def generator(cls):
        return cls(cls._backend())

    @classmethod
    def identity(cls):
        return cls(cls._backend.identity())

    def __add__(self, other):
        return type(self)(self._p + other._p)

    def __sub__(self, other):
        return type(self)(self._p - other._p)

    def __neg__(self):
        return type(self)(-self._p)

    def __mul__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        return type(self)(self._p * _ark.Scalar(k % R))

    __rmul__ = __mul__

    def __eq__(self, other):
        return type(self) is type(other) and self._p == other._p

    def __hash__(self):
        return hash(self.to_bytes())

    def is_identity(self) -> bool:
        return self._p == self._backend.identity()

    def to_bytes(self) -> bytes:
        return bytes(self._p.to_compressed_bytes())

    @classmethod
    def from_bytes(cls, data: bytes):
        """Decode a compressed point; rejects off-curve and non-subgroup input."""
        if len(data) != cls._size:
            raise DecodeError(f"{cls.__name__} encoding must be {cls._size} bytes, got {len(data)}")
        try:
            return cls(cls._backend.from_compressed_bytes(bytes(data)))
        except Exception as exc:  # backend raises a bare ValueError
            raise DecodeError(f"invalid {cls.__name__} encoding") from exc

    def __repr__(self):
        return f"{type(self).__name__}({self.to_bytes().hex()[:16]}…)"


class G1(_Point):
    __slots__ = ()
    _backend = _ark.G1Point
    _size = G1_LEN


class G2(_Point):
    __slots__ = ()
    _backend = _ark.G2Point
    _size = G2_LEN


def multiexp(points: Sequence[G1], scalars: Sequence[int]) -> G1:
    """Sum of ``scalars[i] * points[i]``."""
    if len(points) != len(scalars):
        raise ValueError("length mismatch")
    if not points:
        return G1.identity()
    acc = G1.identity()._p
    for p, k in zip(points, scalars):
        acc = acc + p._p * _ark.Scalar(k % R)
    return G1(acc)


class GT:
    """Target group element, written multiplicatively."""

    __slots__ = ("_v",)

    def __init__(self, value):
        self._v = value

    @classmethod
    def one(cls) -> "GT":
        return cls(_ark.GT.one())

    def __mul__(self, other: "GT") -> "GT":
        return GT(self._v * other._v)

    def __pow__(self, k: int) -> "GT":
        k %= R
        result, base = _ark.GT.one(), self._v
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return GT(result)

    def __eq__(self, other):
        return isinstance(other, GT) and self._v == other._v

    def __hash__(self):
        return hash(str(self._v))


def pairing(a: G1, b: G2) -> GT:
    return GT(_ark.GT.pairing(a._p, b._p))


def pairing_product_is_one(pairs: Iterable[tuple[G1, G2]]) -> bool:
    """Check ``prod e(a_i, b_i) == 1`` with one shared final exponentiation."""
    pairs = list(pairs)
    left = [a._p for a, _ in pairs]
    right = [b._p for _, b in pairs]
    return _ark.GT.multi_pairing(left, right) == _ark.GT.one()


# -- hashing into G1 --------------------------------------------------------

@lru_cache(maxsize=8192)
def hash_to_group(data: bytes, domain_tag: bytes) -> G1:
    if not domain_tag:
        raise InvalidInput("domain tag must be non-empty")
    point = hash_to_G1(bytes(data), bytes(domain_tag), hashlib.sha256)
    return G1.from_bytes(compress_G1(point).to_bytes(G1_LEN, "big"))


G1_GENERATOR = G1.generator()
G2_GENERATOR = G2.generator()

#: Second Pedersen generator; nobody knows its discrete log to ``G1_GENERATOR``.
PEDERSEN_H = hash_to_group(b"pedersen-h", tag("generator"))
