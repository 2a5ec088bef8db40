"""Pseudonym derivation: HMAC-SHA256, Hash-DH and Dodis-Yampolskiy PRFs."""

from __future__ import annotations

import enum
import hashlib
import hmac
import struct
from dataclasses import dataclass
from typing import Optional

from .codec import length_prefixed
from .commitments import PseudonymSeed
from .errors import DecodeError, DegenerateInput, InvalidInput
from .groups import G1, G1_LEN, R, hash_to_group, hash_to_scalar, inv, tag

MAX_SCOPE_BYTES = 1024
MAX_INDEX = (1 << 64) - 1

#: ``idx`` value meaning "one pseudonym per scope".
EMPTY_INDEX = 0

NYM_TAG = tag("nym-hashdh")
DY_BASE_TAG = tag("nym-dy-base")
DY_INDEX_TAG = tag("nym-dy-index")

DAY = 86_400
WEEK = 7 * DAY


@dataclass(frozen=True)
class Scope:
    value: str

    def __post_init__(self):
        raw = self.value.encode("utf-8")
        if not raw:
            raise InvalidInput("scope must be non-empty")
        if len(raw) > MAX_SCOPE_BYTES:
            raise InvalidInput(f"scope exceeds {MAX_SCOPE_BYTES} bytes")

    def encode(self) -> bytes:
        return self.value.encode("utf-8")

    def __str__(self):
        return self.value


def as_scope(scp: Scope | str) -> Scope:
    return scp if isinstance(scp, Scope) else Scope(scp)


def check_index(idx: int) -> int:
    if not isinstance(idx, int) or isinstance(idx, bool) or not 0 <= idx <= MAX_INDEX:
        raise InvalidInput(f"index must be an unsigned 64-bit integer, got {idx!r}")
    return idx


def encode_prf_input(scp: Scope | str, idx: int) -> bytes:
    scp = as_scope(scp)
    return length_prefixed(scp.encode()) + struct.pack(">Q", check_index(idx))


class NymKind(enum.IntEnum):
    MAC = 1
    GROUP = 2


@dataclass(frozen=True)
class Pseudonym:
    kind: NymKind
    value: bytes | G1
    scope: Scope
    index_disclosed: Optional[int] = None

    def value_bytes(self) -> bytes:
        return self.value if self.kind is NymKind.MAC else self.value.to_bytes()

    def to_bytes(self) -> bytes:
        out = bytes([self.kind]) + self.value_bytes() + length_prefixed(self.scope.encode())
        if self.index_disclosed is not None:
            out += struct.pack(">Q", self.index_disclosed)
        return out

    @classmethod
    def from_bytes(cls, data: bytes) -> "Pseudonym":
        if not data:
            raise DecodeError("empty pseudonym")
        try:
            kind = NymKind(data[0])
        except ValueError as exc:
            raise DecodeError(f"unknown pseudonym kind {data[0]}") from exc
        size = 32 if kind is NymKind.MAC else G1_LEN
        pos = 1 + size
        if len(data) < pos + 4:
            raise DecodeError("truncated pseudonym")
        raw = bytes(data[1:pos])
        value = raw if kind is NymKind.MAC else G1.from_bytes(raw)
        n = struct.unpack(">I", data[pos:pos + 4])[0]
        pos += 4
        if len(data) < pos + n:
            raise DecodeError("truncated pseudonym scope")
        try:
            scope = Scope(bytes(data[pos:pos + n]).decode("utf-8"))
        except (UnicodeDecodeError, InvalidInput) as exc:
            raise DecodeError("invalid pseudonym scope") from exc
        pos += n
        rest = data[pos:]
        if len(rest) == 0:
            index = None
        elif len(rest) == 8:
            index = struct.unpack(">Q", rest)[0]
        else:
            raise DecodeError("malformed pseudonym index")
        return cls(kind, value, scope, index)

    def fingerprint(self) -> str:
        return hashlib.sha256(self.to_bytes()).hexdigest()


def hmac_nym(seed: PseudonymSeed, scp: Scope | str, idx: int) -> Pseudonym:
    scp = as_scope(scp)
    mac = hmac.new(seed.secret, encode_prf_input(scp, idx), hashlib.sha256).digest()
    return Pseudonym(NymKind.MAC, mac, scp, idx)


def hashdh_base(scp: Scope | str, idx: int) -> G1:
    return hash_to_group(encode_prf_input(scp, idx), NYM_TAG)


def hashdh_nym(seed_scalar: int, scp: Scope | str, idx: int) -> Pseudonym:
    if seed_scalar % R == 0:
        raise DegenerateInput("zero seed scalar maps every scope to the identity")
    scp = as_scope(scp)
    return Pseudonym(NymKind.GROUP, seed_scalar * hashdh_base(scp, idx), scp, idx)


def dy_base(scp: Scope | str) -> G1:
    return hash_to_group(length_prefixed(as_scope(scp).encode()), DY_BASE_TAG)


def dy_exponent(scp: Scope | str, idx: int, hashed: bool = False) -> int:
    """PRF input as a scalar: ``idx`` itself, or a scope-bound hash of it."""
    if hashed:
        return hash_to_scalar(encode_prf_input(scp, idx), DY_INDEX_TAG)
    return check_index(idx) % R


def dy_nym(seed_scalar: int, scp: Scope | str, idx: int, hashed: bool = False) -> Pseudonym:
    """``(1 / (seed + x)) * G_scp``; the index stays hidden (not disclosed)."""
    scp = as_scope(scp)
    denom = (seed_scalar + dy_exponent(scp, idx, hashed)) % R
    if denom == 0:
        raise DegenerateInput("seed scalar + index is zero modulo the group order")
    return Pseudonym(NymKind.GROUP, inv(denom) * dy_base(scp), scp, None)


class Granularity(enum.Enum):
    DAY = "day"
    WEEK = "week"


def epoch_index(unix_time: int, granularity: Granularity | str) -> int:
    if unix_time < 0:
        raise InvalidInput("time must be non-negative")
    granularity = Granularity(granularity)
    return unix_time // (DAY if granularity is Granularity.DAY else WEEK)
