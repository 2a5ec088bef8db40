import dataclasses

import pytest

from eudinym.errors import DecodeError, InvalidInput, StatementMismatch
from eudinym.groups import G1_GENERATOR, PEDERSEN_H, R, DeterministicRng, hash_to_group, random_scalar
from eudinym.sigma import (
    LinearStatement,
    RangeProof,
    SchnorrProof,
    Transcript,
    commit_linear,
    dleq_statement,
    dlog_statement,
    equations_hold,
    extract_witness,
    pedersen_statement,
    prove_bit,
    prove_composite,
    prove_dleq,
    prove_dlog,
    prove_pedersen_opening,
    prove_range,
    range_width,
    respond_linear,
    simulate_dlog,
    simulate_linear,
    verify_bit,
    verify_composite,
    verify_dleq,
    verify_dlog,
    verify_pedersen_opening,
    verify_range,
)
from adversary import forge_bit, range_attacks

g, h = G1_GENERATOR, PEDERSEN_H
H2 = hash_to_group(b"second-base", b"test")


def _bump(proof: SchnorrProof, i: int = 0) -> SchnorrProof:
    rs = list(proof.responses)
    rs[i] = (rs[i] + 1) % R
    return dataclasses.replace(proof, responses=tuple(rs))


def test_dlog_completeness_and_tamper():
    rng = DeterministicRng("dlog")
    for _ in range(100):
        w = random_scalar(rng)
        p = prove_dlog(w, g, w * g, Transcript("t", b"ctx"), rng)
        assert verify_dlog(p, g, w * g, Transcript("t", b"ctx"))
        assert not verify_dlog(_bump(p), g, w * g, Transcript("t", b"ctx"))
        assert not verify_dlog(dataclasses.replace(p, challenge=p.challenge ^ 1), g, w * g,
                               Transcript("t", b"ctx"))


def test_dlog_statement_mismatch():
    with pytest.raises(StatementMismatch):
        prove_dlog(5, g, 6 * g)


def test_dleq():
    w = random_scalar()
    p = prove_dleq(w, g, w * g, H2, w * H2)
    assert verify_dleq(p, g, w * g, H2, w * H2)
    assert len(p.responses) == 1
    with pytest.raises(StatementMismatch):
        prove_dleq(w, g, w * g, H2, (w + 1) * H2)
    # a forged proof for unequal logs: prove each half separately and splice
    a = prove_dlog(w, g, w * g, Transcript("dleq"))
    assert not verify_dleq(a, g, w * g, H2, (w + 1) * H2)


def test_pedersen_opening():
    s, n = random_scalar(), random_scalar()
    c = s * g + n * h
    p = prove_pedersen_opening(s, n, c)
    assert verify_pedersen_opening(p, c)
    swapped = dataclasses.replace(p, responses=p.responses[::-1])
    assert not verify_pedersen_opening(swapped, c)
    with pytest.raises(StatementMismatch):
        prove_pedersen_opening(s, n + 1, c)


def _fork(statement, witness, rng):
    nonces, ts = commit_linear(statement, rng)
    c1, c2 = random_scalar(rng), random_scalar(rng)
    return (respond_linear(statement, witness, nonces, ts, c1),
            respond_linear(statement, witness, nonces, ts, c2))


@pytest.mark.parametrize("kind", ["dlog", "dleq", "pedersen"])
def test_special_soundness_extractor(kind):
    rng = DeterministicRng(f"extract-{kind}")
    for _ in range(50):
        if kind == "dlog":
            w = {"x": random_scalar(rng)}
            st = dlog_statement(g, w["x"] * g)
        elif kind == "dleq":
            w = {"x": random_scalar(rng)}
            st = dleq_statement(g, w["x"] * g, H2, w["x"] * H2)
        else:
            w = {"seed": random_scalar(rng), "nonce": random_scalar(rng)}
            st = pedersen_statement(w["seed"] * g + w["nonce"] * h)
        a, b = _fork(st, w, rng)
        assert equations_hold(st, a) and equations_hold(st, b)
        assert extract_witness(st, a, b) == w


def test_extractor_preconditions():
    st = dlog_statement(g, 3 * g)
    a, b = _fork(st, {"x": 3}, DeterministicRng("pre"))
    with pytest.raises(InvalidInput):
        extract_witness(st, a, a)
    with pytest.raises(InvalidInput):
        extract_witness(st, a, dataclasses.replace(b, commitments=(g,)))


def test_hvzk_simulator():
    rng = DeterministicRng("hvzk")
    w = random_scalar(rng)
    st = dlog_statement(g, w * g)
    honest = sim = 0
    for _ in range(200):
        c = random_scalar(rng)
        nonces, ts = commit_linear(st, rng)
        honest += equations_hold(st, respond_linear(st, {"x": w}, nonces, ts, c))
        sim += equations_hold(st, simulate_dlog(g, w * g, c, rng))
    assert honest == sim == 200
    # the simulator has no witness parameter at all
    import inspect
    assert "witness" not in inspect.signature(simulate_linear).parameters


def test_simulated_proof_fails_fiat_shamir():
    # programmed challenges do not survive the hash: simulation is not forgery
    p = simulate_dlog(g, 7 * g, 12345)
    assert not verify_dlog(p, g, 7 * g)


def test_context_binding():
    w = random_scalar()
    p = prove_dlog(w, g, w * g, Transcript("dlog", b"session-A"))
    assert verify_dlog(p, g, w * g, Transcript("dlog", b"session-A"))
    assert not verify_dlog(p, g, w * g, Transcript("dlog", b"session-B"))
    assert not verify_dlog(p, g, w * g, Transcript("other", b"session-A"))
    assert not verify_dlog(p, g, w * g, Transcript("dlog", b"session-A").append("scope", b"x"))
    assert not verify_dlog(p, H2, w * H2, Transcript("dlog", b"session-A"))


def test_transcript_is_append_only_copy():
    t = Transcript("x", b"c")
    u = t.copy().append("more", b"1")
    assert t.encode() != u.encode()
    assert t.challenge() == Transcript("x", b"c").challenge()


def test_proof_serialization():
    w = random_scalar()
    p = prove_dleq(w, g, w * g, H2, w * H2)
    assert SchnorrProof.from_bytes(p.to_bytes()) == p
    with pytest.raises(DecodeError):
        SchnorrProof.from_bytes(p.to_bytes()[:-1])
    with pytest.raises(DecodeError):
        SchnorrProof.from_bytes(p.to_bytes() + b"\x00")


def test_composite_shared_variables():
    s = random_scalar()
    st1 = LinearStatement.of((s * g, [("s", g)]))
    st2 = LinearStatement.of((s * H2, [("s", H2)]))
    proofs, _ = prove_composite(Transcript("c"), [(st1, {"s": s}), (st2, {"s": s})])
    assert verify_composite(Transcript("c"), list(zip([st1, st2], proofs)))
    # different logs under the same name cannot be proven
    st3 = LinearStatement.of(((s + 1) * H2, [("s", H2)]))
    with pytest.raises(StatementMismatch):
        prove_composite(Transcript("c"), [(st1, {"s": s}), (st3, {"s": s + 1})])
    # and splicing two honest separate proofs fails the shared-response check
    p3, _ = prove_composite(Transcript("c"), [(st3, {"s": s + 1})])
    assert not verify_composite(Transcript("c"), [(st1, proofs[0]), (st3, p3[0])])


@pytest.mark.parametrize("bit", [0, 1])
def test_bit_proof_honest(bit):
    r = random_scalar()
    c = bit * g + r * h
    p = prove_bit(bit, c, r)
    assert verify_bit(p, c)
    assert not verify_bit(p, c + g)


def test_bit_proof_rejects_non_bits():
    r = random_scalar()
    with pytest.raises(InvalidInput):
        prove_bit(2, 2 * g + r * h, r)
    with pytest.raises(StatementMismatch):
        prove_bit(1, r * h, r)
    rng = DeterministicRng("bit-forge")
    for value in (2, 3, R - 1):
        for claimed in (0, 1):
            c, p = forge_bit(value, claimed, rng, Transcript("bit"))
            assert not verify_bit(p, c)


def test_range_width():
    assert [range_width(b) for b in (1, 2, 3, 4, 5, 8, 9)] == [1, 1, 2, 2, 3, 3, 4]
    with pytest.raises(InvalidInput):
        range_width(0)


@pytest.mark.parametrize("bound", [1, 2, 3, 4, 5, 7, 8])
def test_range_completeness_and_prove_time_bounds(bound):
    rng = DeterministicRng(f"range-{bound}")
    for idx in range(1, bound + 1):
        rho = random_scalar(rng)
        c = idx * g + rho * h
        p = prove_range(idx, c, rho, bound, Transcript("range", b"ctx"), rng)
        assert verify_range(p, c, bound, Transcript("range", b"ctx"))
        assert not verify_range(p, c, bound, Transcript("range", b"other"))
        assert not verify_range(p, c + g, bound, Transcript("range", b"ctx"))
        if bound > 1:
            assert not verify_range(p, c, bound - 1, Transcript("range", b"ctx"))
    for idx in (0, bound + 1, bound + 2):
        rho = random_scalar(rng)
        with pytest.raises(StatementMismatch):
            prove_range(idx, idx * g + rho * h, rho, bound, rng=rng)


def test_range_exhaustive_adversary_small_bound():
    rng = DeterministicRng("range-adversary-4")
    t = Transcript("range")
    tried = 0
    for idx in (0, 5):
        for c, forged in range_attacks(idx, 4, rng, t):
            tried += 1
            assert not verify_range(forged, c, 4, t)
    assert tried == 2 * 16 * 4 * 2


def test_range_adversary_control():
    # the forger's plumbing is sound: with an in-range idx and honest bits it is accepted
    from adversary import forge_range
    rng = DeterministicRng("control")
    rho = random_scalar(rng)
    c = 3 * g + rho * h
    values = [0, 1, 1, 0]  # idx-1 = 2, bound-idx = 1 at width 2
    p = forge_range(c, rho, 3, 4, values, values, rng, Transcript("range"))
    assert verify_range(p, c, 4, Transcript("range"))


def test_range_proof_serialization():
    rho = random_scalar()
    c = 2 * g + rho * h
    p = prove_range(2, c, rho, 8)
    q = RangeProof.from_bytes(p.to_bytes())
    assert q == p and verify_range(q, c, 8)
    blob = bytearray(p.to_bytes())
    blob[-5] ^= 1
    try:
        assert not verify_range(RangeProof.from_bytes(bytes(blob)), c, 8)
    except DecodeError:
        pass


def test_range_rejects_truncated_bit_lists():
    rho = random_scalar()
    c = 2 * g + rho * h
    p = prove_range(2, c, rho, 8)
    short = dataclasses.replace(p, lower_commitments=p.lower_commitments[:-1])
    assert not verify_range(short, c, 8)
