"""Pseudonym seeds and the two seed commitment variants (SHA-256, Pedersen)."""

from __future__ import annotations

import enum
import hashlib
import secrets
from dataclasses import dataclass, field

from .codec import length_prefixed
from .errors import DecodeError, InvalidInput, OpeningMismatch
from .groups import (
    G1,
    G1_GENERATOR,
    G1_LEN,
    PEDERSEN_H,
    R,
    hash_to_scalar,
    tag,
)

SEED_LEN = 32
NONCE_LEN = 32
SEED_TAG = tag("seed")

#: Nonce used for the issuer-side re-enrollment fingerprint.
ZERO_NONCE = bytes(NONCE_LEN)


@dataclass(frozen=True)
class PseudonymSeed:
    """Long-term holder secret.  ``repr`` never shows the secret."""

    secret: bytes = field(repr=False)

    def __post_init__(self):
        if len(self.secret) != SEED_LEN:
            raise InvalidInput(f"seed must be {SEED_LEN} bytes")

    @classmethod
    def generate(cls, rng=None) -> "PseudonymSeed":
        rng = rng or secrets
        while True:
            seed = cls(rng.token_bytes(SEED_LEN))
            if seed.scalar != 0:
                return seed

    @property
    def scalar(self) -> int:
        return hash_to_scalar(self.secret, SEED_TAG)

    def __repr__(self):
        return "PseudonymSeed(<hidden>)"


class CommitmentKind(enum.IntEnum):
    HASH = 1
    PEDERSEN = 2


@dataclass(frozen=True)
class SeedCommitment:
    """Public commitment value.  The opening nonce stays with the wallet."""

    kind: CommitmentKind
    value: bytes | G1

    def to_bytes(self) -> bytes:
        body = self.value if self.kind is CommitmentKind.HASH else self.value.to_bytes()
        return bytes([self.kind]) + body

    @classmethod
    def from_bytes(cls, data: bytes) -> "SeedCommitment":
        if not data:
            raise DecodeError("empty commitment")
        try:
            kind = CommitmentKind(data[0])
        except ValueError as exc:
            raise DecodeError(f"unknown commitment kind {data[0]}") from exc
        body = data[1:]
        if kind is CommitmentKind.HASH:
            if len(body) != 32:
                raise DecodeError("hash commitment must be 32 bytes")
            return cls(kind, bytes(body))
        if len(body) != G1_LEN:
            raise DecodeError("pedersen commitment must be a G1 element")
        return cls(kind, G1.from_bytes(body))


def commit_hash(seed: PseudonymSeed, nonce: bytes) -> SeedCommitment:
    if len(nonce) != NONCE_LEN:
        raise InvalidInput(f"nonce must be {NONCE_LEN} bytes")
    digest = hashlib.sha256(length_prefixed(seed.secret, nonce)).digest()
    return SeedCommitment(CommitmentKind.HASH, digest)


def commit_pedersen(seed_scalar: int, nonce_scalar: int,
                    g: G1 = G1_GENERATOR, h: G1 = PEDERSEN_H) -> SeedCommitment:
    value = (seed_scalar % R) * g + (nonce_scalar % R) * h
    return SeedCommitment(CommitmentKind.PEDERSEN, value)


def verify_opening(c: SeedCommitment, seed: PseudonymSeed | int, nonce: bytes | int,
                   g: G1 = G1_GENERATOR, h: G1 = PEDERSEN_H) -> bool:
    if c.kind is CommitmentKind.HASH:
        if not isinstance(seed, PseudonymSeed) or not isinstance(nonce, (bytes, bytearray)):
            raise OpeningMismatch("hash commitments open with a seed and a 32-byte nonce")
        if len(nonce) != NONCE_LEN:
            return False
        return commit_hash(seed, bytes(nonce)) == c
    if not isinstance(nonce, int) or isinstance(nonce, bool):
        raise OpeningMismatch("pedersen commitments open with a scalar nonce")
    seed_scalar = seed.scalar if isinstance(seed, PseudonymSeed) else seed
    if not isinstance(seed_scalar, int):
        raise OpeningMismatch("pedersen commitments open with a seed scalar")
    return commit_pedersen(seed_scalar, nonce, g, h) == c
