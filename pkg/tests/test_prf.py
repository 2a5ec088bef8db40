import hmac as std_hmac
import itertools

import pytest
from cryptography.hazmat.primitives import hashes, hmac as ossl_hmac
from hypothesis import given, settings, strategies as st

from eudinym.commitments import PseudonymSeed
from eudinym.errors import DecodeError, DegenerateInput, InvalidInput
from eudinym.groups import R, DeterministicRng, random_scalar
from eudinym.prf import (
    Granularity,
    NymKind,
    Pseudonym,
    Scope,
    dy_base,
    dy_exponent,
    dy_nym,
    encode_prf_input,
    epoch_index,
    hashdh_base,
    hashdh_nym,
    hmac_nym,
)
from oracles import egcd_inverse, g1_mul, hmac_sha256, prf_input

# RFC 4231 test cases 1, 2, 3 and 6 (HMAC-SHA-256)
RFC4231 = [
    (b"\x0b" * 20, b"Hi There",
     "b0344c61d8db38535ca8afceaf0bf12b881dc200c9833da726e9376c2e32cff7"),
    (b"Jefe", b"what do ya want for nothing?",
     "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843"),
    (b"\xaa" * 20, b"\xdd" * 50,
     "773ea91e36800e46854db8ebd09181a72959098b3ef8c122d9635514ced565fe"),
    (b"\xaa" * 131, b"Test Using Larger Than Block-Size Key - Hash Key First",
     "60e431591ee0b67f0d8a26aacbf5b77f8e0bc6213728c5140546040f0ee37f54"),
]


def _ossl_hmac(key, msg):
    h = ossl_hmac.HMAC(key, hashes.SHA256())
    h.update(msg)
    return h.finalize()


@pytest.mark.parametrize("key,msg,digest", RFC4231)
def test_hmac_oracles_against_rfc4231(key, msg, digest):
    assert hmac_sha256(key, msg).hex() == digest
    assert _ossl_hmac(key, msg).hex() == digest


def test_hmac_nym_matches_oracles():
    rng = DeterministicRng("hmac-oracle")
    for i in range(120):
        seed = PseudonymSeed(rng.token_bytes(32))
        scope, idx = f"rp{i}.example", rng.randbelow(2 ** 64)
        nym = hmac_nym(seed, scope, idx)
        assert nym.kind is NymKind.MAC
        assert nym.value == hmac_sha256(seed.secret, prf_input(scope, idx))
        assert nym.value == _ossl_hmac(seed.secret, prf_input(scope, idx))


def test_prf_input_layout():
    assert encode_prf_input("rp.example", 0) == b"\x00\x00\x00\x0arp.example" + bytes(8)
    assert encode_prf_input("a", 1) != encode_prf_input("a1", 0)


def test_prf_input_injective_bruteforce():
    alphabet = "ab1"
    scopes = [""] + ["".join(p) for n in (1, 2) for p in itertools.product(alphabet, repeat=n)]
    scopes = [s for s in scopes if s]
    encodings = {}
    for s in scopes:
        for idx in range(4):
            enc = encode_prf_input(s, idx)
            assert enc not in encodings, (s, idx, encodings.get(enc))
            encodings[enc] = (s, idx)
    assert len(encodings) == len(scopes) * 4


def test_scope_invariants():
    with pytest.raises(InvalidInput):
        Scope("")
    with pytest.raises(InvalidInput):
        Scope("x" * 1025)
    Scope("x" * 1024)
    with pytest.raises(InvalidInput):
        encode_prf_input("ü" * 513, 1)
    with pytest.raises(InvalidInput):
        encode_prf_input("a", 2 ** 64)
    with pytest.raises(InvalidInput):
        encode_prf_input("a", -1)


def test_hmac_idx_collision_scan():
    seed = PseudonymSeed.generate()
    assert len({hmac_nym(seed, "shop.example", i).value for i in range(1, 1001)}) == 1000


def test_hashdh_identity_exponent():
    assert hashdh_nym(1, "rp.example", 3).value == hashdh_base("rp.example", 3)


def test_hashdh_matches_py_ecc_scalar_mult():
    rng = DeterministicRng("hashdh-oracle")
    for i in range(20):
        s = random_scalar(rng)
        base = hashdh_base(f"s{i}", i)
        assert hashdh_nym(s, f"s{i}", i).value.to_bytes() == g1_mul(base.to_bytes(), s)


def test_hashdh_zero_seed_rejected():
    with pytest.raises(DegenerateInput):
        hashdh_nym(0, "rp.example", 1)
    with pytest.raises(DegenerateInput):
        hashdh_nym(R, "rp.example", 1)


def test_hashdh_seed_separation():
    rng = DeterministicRng("hashdh-seeds")
    assert len({hashdh_nym(random_scalar(rng), "rp", 1).value for _ in range(100)}) == 100


def test_dy_matches_independent_inverse_oracle():
    rng = DeterministicRng("dy-oracle")
    cases = [(1, 1), (2, 3), (5, 1), (R - 2, 1)]
    cases += [(random_scalar(rng), 1 + rng.randbelow(64)) for _ in range(100)]
    for s, idx in cases:
        scope = "rl.example"
        if (s + idx) % R == 0:
            continue
        expected = g1_mul(dy_base(scope).to_bytes(), egcd_inverse(s + idx))
        nym = dy_nym(s, scope, idx)
        assert nym.value.to_bytes() == expected
        assert nym.index_disclosed is None


def test_dy_hashed_variant_oracle():
    s = 123456789
    x = dy_exponent("rl.example", 4, hashed=True)
    assert x != 4
    expected = g1_mul(dy_base("rl.example").to_bytes(), egcd_inverse(s + x))
    assert dy_nym(s, "rl.example", 4, hashed=True).value.to_bytes() == expected


def test_dy_degenerate_input():
    with pytest.raises(DegenerateInput):
        dy_nym(R - 3, "rl.example", 3)


def test_dy_distinct_indexes():
    s = random_scalar()
    assert len({dy_nym(s, "rl.example", i).value for i in range(1, 6)}) == 5


def test_determinism_all_variants():
    rng = DeterministicRng("determinism")
    for _ in range(1000):
        seed = PseudonymSeed(rng.token_bytes(32))
        idx = rng.randbelow(8)
        assert hmac_nym(seed, "d.example", idx) == hmac_nym(seed, "d.example", idx)
    for _ in range(30):
        s, idx = random_scalar(rng), 1 + rng.randbelow(8)
        assert hashdh_nym(s, "d.example", idx) == hashdh_nym(s, "d.example", idx)
        assert dy_nym(s, "d.example", idx) == dy_nym(s, "d.example", idx)


def test_scope_separation():
    rng = DeterministicRng("scopes")
    seed = PseudonymSeed.generate(rng)
    scopes = [f"{rng.token_bytes(6).hex()}.example" for _ in range(100)]
    assert len(set(scopes)) == 100
    assert len({hmac_nym(seed, s, 1).value for s in scopes}) == 100
    assert len({hashdh_nym(seed.scalar, s, 1).value for s in scopes}) == 100
    assert len({dy_nym(seed.scalar, s, 1).value for s in scopes}) == 100


def test_cross_variant_sanity():
    seed = PseudonymSeed.generate()
    mac = hmac_nym(seed, "x.example", 1).value
    group = hashdh_nym(seed.scalar, "x.example", 1).value.to_bytes()
    assert mac not in group
    assert mac[:8] not in group


def test_epoch_index():
    assert epoch_index(0, "day") == 0
    assert epoch_index(86_399, Granularity.DAY) == 0
    assert epoch_index(86_400, Granularity.DAY) == 1
    assert epoch_index(1_000_000, "week") == 1
    with pytest.raises(InvalidInput):
        epoch_index(-1, "day")


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 40), st.sampled_from(["day", "week"]))
def test_epoch_index_stable_within_epoch(t, g):
    width = 86_400 if g == "day" else 604_800
    start = epoch_index(t, g) * width
    assert epoch_index(start, g) == epoch_index(start + width - 1, g) == epoch_index(t, g)
    assert epoch_index(start + width, g) == epoch_index(t, g) + 1


def test_pseudonym_serialization():
    seed = PseudonymSeed.generate()
    for nym in (hmac_nym(seed, "a.example", 3), hashdh_nym(seed.scalar, "a.example", 3),
                dy_nym(seed.scalar, "a.example", 3)):
        data = nym.to_bytes()
        assert data[0] == nym.kind
        assert Pseudonym.from_bytes(data) == nym
    assert len(hmac_nym(seed, "a.example", 3).to_bytes()) == 1 + 32 + 4 + 9 + 8
    assert len(dy_nym(seed.scalar, "a.example", 3).to_bytes()) == 1 + 48 + 4 + 9
    for bad in (b"", b"\x07", hmac_nym(seed, "a", 1).to_bytes() + b"\x00"):
        with pytest.raises(DecodeError):
            Pseudonym.from_bytes(bad)


def test_stdlib_hmac_agrees():
    # third opinion on the MAC core: the stdlib
    seed = PseudonymSeed(b"\x42" * 32)
    expected = std_hmac.new(seed.secret, prf_input("rp.example", 7), "sha256").digest()
    assert hmac_nym(seed, "rp.example", 7).value == expected
