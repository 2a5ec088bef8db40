"""Canonical binary encoding shared by every serialized artifact.

Integers are big-endian and fixed width, variable-length fields carry a
4-byte big-endian length prefix, points use compressed encodings.  Framed
records start with a 4-byte magic, a version byte and a record-type byte.
"""

from __future__ import annotations

import struct

from .errors import DecodeError, UnsupportedVersion
from .groups import G1, G1_LEN, G2, G2_LEN, SCALAR_LEN, scalar_from_bytes, scalar_to_bytes

MAGIC = b"ENYM"
VERSION = 1

MAX_FIELD = 1 << 24


def length_prefixed(*fields: bytes) -> bytes:
    """Unambiguous concatenation: ``len(f) || f`` for every field."""
    return b"".join(struct.pack(">I", len(f)) + f for f in fields)


class Writer:
    def __init__(self):
        self._buf = bytearray()

    def u8(self, v: int) -> "Writer":
        self._buf += struct.pack(">B", v)
        return self

    def u32(self, v: int) -> "Writer":
        self._buf += struct.pack(">I", v)
        return self

    def u64(self, v: int) -> "Writer":
        self._buf += struct.pack(">Q", v)
        return self

    def raw(self, data: bytes) -> "Writer":
        self._buf += data
        return self

    def blob(self, data: bytes) -> "Writer":
        return self.u32(len(data)).raw(data)

    def text(self, s: str) -> "Writer":
        return self.blob(s.encode("utf-8"))

    def scalar(self, x: int) -> "Writer":
        return self.raw(scalar_to_bytes(x))

    def g1(self, p: G1) -> "Writer":
        return self.raw(p.to_bytes())

    def g2(self, p: G2) -> "Writer":
        return self.raw(p.to_bytes())

    def scalars(self, xs) -> "Writer":
        self.u32(len(xs))
        for x in xs:
            self.scalar(x)
        return self

    def g1s(self, ps) -> "Writer":
        self.u32(len(ps))
        for p in ps:
            self.g1(p)
        return self

    def optional(self, value, write) -> "Writer":
        if value is None:
            return self.u8(0)
        self.u8(1)
        write(self, value)
        return self

    def getvalue(self) -> bytes:
        return bytes(self._buf)


class Reader:
    def __init__(self, data: bytes):
        self._data = memoryview(bytes(data))
        self._pos = 0

    def _take(self, n: int) -> bytes:
        if n < 0 or self._pos + n > len(self._data):
            raise DecodeError("truncated input")
        out = bytes(self._data[self._pos:self._pos + n])
        self._pos += n
        return out

    def u8(self) -> int:
        return self._take(1)[0]

    def u32(self) -> int:
        return struct.unpack(">I", self._take(4))[0]

    def u64(self) -> int:
        return struct.unpack(">Q", self._take(8))[0]

    def raw(self, n: int) -> bytes:
        return self._take(n)

    def blob(self) -> bytes:
        n = self.u32()
        if n > MAX_FIELD:
            raise DecodeError("field length exceeds limit")
        return self._take(n)

    def text(self) -> str:
        try:
            return self.blob().decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DecodeError("invalid UTF-8") from exc

    def scalar(self) -> int:
        return scalar_from_bytes(self._take(SCALAR_LEN))

    def g1(self) -> G1:
        return G1.from_bytes(self._take(G1_LEN))

    def g2(self) -> G2:
        return G2.from_bytes(self._take(G2_LEN))

    def _count(self) -> int:
        n = self.u32()
        if n > 4096:
            raise DecodeError("element count exceeds limit")
        return n

    def scalars(self) -> list[int]:
        return [self.scalar() for _ in range(self._count())]

    def g1s(self) -> list[G1]:
        return [self.g1() for _ in range(self._count())]

    def optional(self, read):
        flag = self.u8()
        if flag == 0:
            return None
        if flag != 1:
            raise DecodeError("invalid presence flag")
        return read(self)

    def remaining(self) -> int:
        return len(self._data) - self._pos

    def finish(self) -> None:
        if self.remaining():
            raise DecodeError(f"{self.remaining()} trailing bytes")


def frame(record_type: int, body: bytes) -> bytes:
    return MAGIC + bytes([VERSION, record_type]) + body


def unframe(data: bytes, record_type: int) -> Reader:
    if len(data) < 6 or data[:4] != MAGIC:
        raise DecodeError("bad magic")
    if data[4] != VERSION:
        raise UnsupportedVersion(f"unsupported format version {data[4]}")
    if data[5] != record_type:
        raise DecodeError(f"expected record type {record_type:#x}, got {data[5]:#x}")
    return Reader(data[6:])


def peek_record_type(data: bytes) -> int:
    if len(data) < 6 or data[:4] != MAGIC:
        raise DecodeError("bad magic")
    return data[5]


# Record types for framed files.
class Record:
    ISSUER_PUBLIC = 0x01
    CREDENTIAL = 0x02
    BLIND_REQUEST = 0x03
    ISSUANCE_RESPONSE = 0x04
    PRESENTATION = 0x05
    PSEUDONYM = 0x06
    SCHNORR = 0x07
    RANGE = 0x08
    ISSUER_STATE = 0x10
    WALLET_STATE = 0x11
    RP_STATE = 0x12
    TRANSFER_KEY = 0x13
    TRANSFER_PACKAGE = 0x20
    BACKUP = 0x21
