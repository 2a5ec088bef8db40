import pytest
from hypothesis import given, settings, strategies as st

from eudinym.commitments import (
    CommitmentKind,
    PseudonymSeed,
    SeedCommitment,
    ZERO_NONCE,
    commit_hash,
    commit_pedersen,
    verify_opening,
)
from eudinym.errors import DecodeError, InvalidInput, OpeningMismatch
from eudinym.groups import G1, G1_GENERATOR, R, DeterministicRng, random_scalar
from oracles import lp, sha256


def test_hash_commitment_matches_independent_sha256():
    rng = DeterministicRng("commit-oracle")
    for _ in range(50):
        seed, nonce = PseudonymSeed(rng.token_bytes(32)), rng.token_bytes(32)
        assert commit_hash(seed, nonce).value == sha256(lp(seed.secret, nonce))


def test_hash_commitment_fixed_value():
    seed = PseudonymSeed(bytes(range(32)))
    expected = sha256(b"\x00\x00\x00\x20" + bytes(range(32)) + b"\x00\x00\x00\x20" + b"\xff" * 32)
    assert commit_hash(seed, b"\xff" * 32).value == expected


def test_hash_commitment_deterministic():
    seed = PseudonymSeed.generate()
    assert commit_hash(seed, ZERO_NONCE) == commit_hash(seed, ZERO_NONCE)


def test_nonce_bit_flips_change_digest():
    seed = PseudonymSeed(b"\x11" * 32)
    nonce = bytes(range(32))
    base = commit_hash(seed, nonce).value
    seen = {base}
    for i in range(32):
        flipped = bytearray(nonce)
        flipped[i] ^= 1
        d = commit_hash(seed, bytes(flipped)).value
        assert d != base
        seen.add(d)
    assert len(seen) == 33


def test_hash_binding_scan():
    rng = DeterministicRng("binding")
    digests = set()
    for _ in range(10_000):
        digests.add(commit_hash(PseudonymSeed(rng.token_bytes(32)), rng.token_bytes(32)).value)
    assert len(digests) == 10_000


def test_length_prefix_blocks_concatenation_collisions():
    # naive concatenation would make these two field splits identical
    a, b = b"\x01" * 33, b"\x02" * 31
    c, d = b"\x01" * 32, b"\x01" + b"\x02" * 31
    assert a + b == c + d
    assert lp(a, b) != lp(c, d)
    assert sha256(lp(a, b)) != sha256(lp(c, d))


def test_nonce_length_enforced():
    with pytest.raises(InvalidInput):
        commit_hash(PseudonymSeed.generate(), b"short")


def test_seed_invariants():
    with pytest.raises(InvalidInput):
        PseudonymSeed(b"\x00" * 31)
    s = PseudonymSeed.generate()
    assert s.secret.hex() not in repr(s)
    assert 0 < s.scalar < R
    assert PseudonymSeed.generate() != s


def test_pedersen_trivial_cases():
    assert commit_pedersen(0, 0).value == G1.identity()
    s = random_scalar()
    assert commit_pedersen(s, 0).value == s * G1_GENERATOR


def test_pedersen_homomorphism():
    rng = DeterministicRng("homomorphism")
    for _ in range(100):
        s1, n1, s2, n2 = (random_scalar(rng) for _ in range(4))
        lhs = commit_pedersen(s1, n1).value + commit_pedersen(s2, n2).value
        assert lhs == commit_pedersen(s1 + s2, n1 + n2).value


def test_pedersen_hiding_smoke():
    rng = DeterministicRng("hiding")
    s = 42
    values = [commit_pedersen(s, random_scalar(rng)).value for _ in range(200)]
    assert len(set(values)) == 200
    assert s * G1_GENERATOR not in values


def test_verify_opening():
    rng = DeterministicRng("open")
    seed = PseudonymSeed.generate(rng)
    n = rng.token_bytes(32)
    c = commit_hash(seed, n)
    assert verify_opening(c, seed, n)
    assert not verify_opening(c, seed, rng.token_bytes(32))
    assert not verify_opening(c, PseudonymSeed.generate(rng), n)

    s, ns = random_scalar(rng), random_scalar(rng)
    p = commit_pedersen(s, ns)
    assert verify_opening(p, s, ns)
    assert not verify_opening(p, s + 1, ns)
    assert not verify_opening(p, s, ns + 1)


def test_verify_opening_kind_mismatch_is_an_error():
    seed = PseudonymSeed.generate()
    with pytest.raises(OpeningMismatch):
        verify_opening(commit_hash(seed, ZERO_NONCE), seed, 5)
    with pytest.raises(OpeningMismatch):
        verify_opening(commit_pedersen(seed.scalar, 5), seed, ZERO_NONCE)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, R - 1), st.integers(0, R - 1))
def test_commitment_serialization_roundtrip(s, n):
    c = commit_pedersen(s, n)
    assert SeedCommitment.from_bytes(c.to_bytes()) == c
    assert c.to_bytes()[0] == CommitmentKind.PEDERSEN
    h = commit_hash(PseudonymSeed(s.to_bytes(32, "big")), ZERO_NONCE)
    assert SeedCommitment.from_bytes(h.to_bytes()) == h


def test_commitment_decode_errors():
    for bad in (b"", b"\x09" + b"\x00" * 32, b"\x01" + b"\x00" * 31, b"\x02" + b"\x00" * 48):
        with pytest.raises(DecodeError):
            SeedCommitment.from_bytes(bad)
