"""Cheating provers for soundness tests.

These bypass every prover-side check and build proofs directly from the
engine's internal moves, so only the verifier stands between them and
acceptance.
"""

from __future__ import annotations

import itertools

from eudinym.groups import G1_GENERATOR, PEDERSEN_H, R, inv, random_scalar
from eudinym.sigma import (
    RangeProof,
    Transcript,
    _bit_commit,
    _bit_respond,
    _composite_challenge,
    commit_linear,
    range_statement,
    range_width,
    respond_linear,
)

g, h = G1_GENERATOR, PEDERSEN_H


def forge_bit(value: int, claimed: int, rng, transcript: Transcript):
    """Commit to ``value`` and run the OR prover claiming branch ``claimed``."""
    r = random_scalar(rng)
    c = value * g + r * h
    state, ts = _bit_commit(claimed, c, r, rng, g, h)
    challenge = _composite_challenge(transcript, [], [], [c], [ts])
    return c, _bit_respond(state, ts, challenge)


def forge_range(idx_commitment, rho: int, idx: int, bound: int, values: list[int],
                claims: list[int], rng, transcript: Transcript) -> RangeProof:
    """Range proof whose bit slots commit to ``values`` (any scalars).

    ``claims[i]`` is the OR branch the cheater runs as "real" for slot ``i``.
    The consistency part is answered with the blinding values an honest
    prover would use, whether or not they satisfy the statement.
    """
    w = range_width(bound)
    rs = [random_scalar(rng) for _ in values]
    comms = [v * g + r * h for v, r in zip(values, rs)]
    lower, upper = tuple(comms[:w]), tuple(comms[w:])
    lo_blind = (rho - sum(r << i for i, r in enumerate(rs[:w]))) % R
    hi_blind = (-rho - sum(r << i for i, r in enumerate(rs[w:]))) % R
    statement = range_statement(idx_commitment, bound, lower, upper)
    t = transcript.copy().append("bound", bound.to_bytes(8, "big"))
    nonces, ts = commit_linear(statement, rng)
    states = [_bit_commit(b, c, r, rng, g, h) for b, c, r in zip(claims, comms, rs)]
    challenge = _composite_challenge(t, [statement], [ts], comms, [s[1] for s in states])
    consistency = respond_linear(statement, {"range_lo": lo_blind, "range_hi": hi_blind},
                                 nonces, ts, challenge)
    bits = tuple(_bit_respond(s, tt, challenge) for s, tt in states)
    return RangeProof(bound, lower, upper, bits, consistency)


def range_attacks(idx: int, bound: int, rng, transcript: Transcript):
    """Every bit pattern for both decompositions, with one slot bent to make
    the recomposition consistent and both OR branches tried for it.

    Yields ``(commitment, proof)`` pairs for a commitment to ``idx``.
    """
    w = range_width(bound)
    rho = random_scalar(rng)
    c = idx * g + rho * h
    targets = ((idx - 1) % R, (bound - idx) % R)
    for pattern in itertools.product((0, 1), repeat=2 * w):
        for fix in range(2 * w):
            values = list(pattern)
            side, pos = divmod(fix, w)
            base = side * w
            rest = sum(values[base + i] << i for i in range(w) if i != pos)
            values[fix] = (targets[side] - rest) * inv(1 << pos) % R
            for branch in (0, 1):
                claims = [v if v in (0, 1) else branch for v in values]
                claims[fix] = branch
                yield c, forge_range(c, rho, idx, bound, values, claims, rng, transcript)
