"""Non-interactive sigma protocols over G1.

Everything here is an instance of one engine: proofs of knowledge of scalars
satisfying a set of linear equations ``Y_j = sum_i x_i * B_ji``.  Several such
statements, plus any number of bit OR-proofs, can be proven together under a
single Fiat-Shamir challenge; a variable that appears in more than one
statement must have the same response everywhere, which is how equality of
discrete logarithms across sub-proofs is enforced.

Response convention: ``z = k + c * w``, checked as ``sum z_i B_i == T + c Y``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .codec import Reader, Record, Writer, frame, length_prefixed, unframe
from .errors import DecodeError, InvalidInput, StatementMismatch
from .groups import (
    G1,
    G1_GENERATOR,
    PEDERSEN_H,
    R,
    hash_to_scalar,
    inv,
    multiexp,
    random_scalar,
    tag,
)

PROTOCOL_VERSION = b"EUDINYM-v1"
CHALLENGE_TAG = tag("challenge")


class Transcript:
    """Ordered, append-only list of labelled byte strings.

    The session context (stand-in for TLS channel binding) is absorbed at
    construction, so it always precedes the challenge.
    """

    def __init__(self, protocol: str, session_context: bytes = b""):
        self._entries: list[tuple[bytes, bytes]] = [
            (b"version", PROTOCOL_VERSION),
            (b"protocol", protocol.encode()),
            (b"session_context", bytes(session_context)),
        ]

    def append(self, label: str, data: bytes) -> "Transcript":
        self._entries.append((label.encode(), bytes(data)))
        return self

    def append_point(self, label: str, p: G1) -> "Transcript":
        return self.append(label, p.to_bytes())

    def copy(self) -> "Transcript":
        other = Transcript.__new__(Transcript)
        other._entries = list(self._entries)
        return other

    def encode(self) -> bytes:
        return b"".join(length_prefixed(label, data) for label, data in self._entries)

    def challenge(self) -> int:
        return hash_to_scalar(self.encode(), CHALLENGE_TAG)


# -- statements -------------------------------------------------------------

@dataclass(frozen=True)
class Equation:
    public: G1
    terms: tuple[tuple[str, G1], ...]

    def evaluate(self, values: Mapping[str, int]) -> G1:
        return multiexp([b for _, b in self.terms], [values[v] for v, _ in self.terms])


@dataclass(frozen=True)
class LinearStatement:
    equations: tuple[Equation, ...]

    @classmethod
    def of(cls, *equations: tuple[G1, Sequence[tuple[str, G1]]]) -> "LinearStatement":
        return cls(tuple(Equation(y, tuple(terms)) for y, terms in equations))

    @property
    def variables(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for eq in self.equations:
            for v, _ in eq.terms:
                seen.setdefault(v)
        return tuple(seen)

    def holds(self, witness: Mapping[str, int]) -> bool:
        return all(eq.evaluate(witness) == eq.public for eq in self.equations)

    def absorb(self, t: Transcript) -> None:
        t.append("statement", len(self.equations).to_bytes(4, "big"))
        for eq in self.equations:
            t.append_point("public", eq.public)
            for v, base in eq.terms:
                t.append("var", v.encode())
                t.append_point("base", base)


@dataclass(frozen=True)
class SchnorrProof:
    commitments: tuple[G1, ...]
    challenge: int
    responses: tuple[int, ...]

    def encode(self, w: Writer) -> None:
        w.g1s(self.commitments).scalar(self.challenge).scalars(self.responses)

    @classmethod
    def decode(cls, r: Reader) -> "SchnorrProof":
        commitments = tuple(r.g1s())
        challenge = r.scalar()
        return cls(commitments, challenge, tuple(r.scalars()))

    def to_bytes(self) -> bytes:
        w = Writer()
        self.encode(w)
        return frame(Record.SCHNORR, w.getvalue())

    @classmethod
    def from_bytes(cls, data: bytes) -> "SchnorrProof":
        r = unframe(data, Record.SCHNORR)
        proof = cls.decode(r)
        r.finish()
        return proof


@dataclass(frozen=True)
class BitProof:
    """CDS OR-proof that a Pedersen commitment opens to 0 or 1."""

    commitments: tuple[G1, G1]
    challenges: tuple[int, int]
    responses: tuple[int, int]

    def encode(self, w: Writer) -> None:
        w.g1(self.commitments[0]).g1(self.commitments[1])
        for x in self.challenges + self.responses:
            w.scalar(x)

    @classmethod
    def decode(cls, r: Reader) -> "BitProof":
        t0, t1 = r.g1(), r.g1()
        c0, c1, z0, z1 = (r.scalar() for _ in range(4))
        return cls((t0, t1), (c0, c1), (z0, z1))


# -- interactive moves ------------------------------------------------------

def commit_linear(statement: LinearStatement, rng=None,
                  nonces: Optional[dict[str, int]] = None) -> tuple[dict[str, int], tuple[G1, ...]]:
    """First prover move.  ``nonces`` may be pre-seeded to share variables."""
    nonces = {} if nonces is None else nonces
    for v in statement.variables:
        if v not in nonces:
            nonces[v] = random_scalar(rng)
    return nonces, tuple(eq.evaluate(nonces) for eq in statement.equations)


def respond_linear(statement: LinearStatement, witness: Mapping[str, int],
                   nonces: Mapping[str, int], commitments: tuple[G1, ...],
                   challenge: int) -> SchnorrProof:
    responses = tuple((nonces[v] + challenge * witness[v]) % R for v in statement.variables)
    return SchnorrProof(tuple(commitments), challenge % R, responses)


def equations_hold(statement: LinearStatement, proof: SchnorrProof) -> bool:
    """Verification equations only, without recomputing the challenge."""
    if len(proof.commitments) != len(statement.equations):
        return False
    names = statement.variables
    if len(proof.responses) != len(names):
        return False
    z = dict(zip(names, proof.responses))
    c = proof.challenge
    for eq, t in zip(statement.equations, proof.commitments):
        if eq.evaluate(z) != t + c * eq.public:
            return False
    return True


def _bit_branches(c: G1, g: G1) -> tuple[G1, G1]:
    return c, c - g


def _bit_commit(bit: int, commitment: G1, randomness: int, rng, g: G1, h: G1):
    """Real branch ``bit``, simulated branch ``1 - bit``.  No statement check."""
    ys = _bit_branches(commitment, g)
    other = 1 - bit
    k = random_scalar(rng)
    c_other, z_other = random_scalar(rng), random_scalar(rng)
    t = [None, None]
    t[bit] = k * h
    t[other] = z_other * h - c_other * ys[other]
    return (bit, randomness, k, c_other, z_other), (t[0], t[1])


def _bit_respond(state, ts, challenge: int) -> BitProof:
    bit, randomness, k, c_other, z_other = state
    c_real = (challenge - c_other) % R
    z_real = (k + c_real * randomness) % R
    cs, zs = [0, 0], [0, 0]
    cs[bit], zs[bit] = c_real, z_real
    cs[1 - bit], zs[1 - bit] = c_other, z_other
    return BitProof(ts, (cs[0], cs[1]), (zs[0], zs[1]))


def bit_equations_hold(commitment: G1, proof: BitProof, challenge: int,
                       g: G1 = G1_GENERATOR, h: G1 = PEDERSEN_H) -> bool:
    if (proof.challenges[0] + proof.challenges[1]) % R != challenge % R:
        return False
    for y, t, c, z in zip(_bit_branches(commitment, g), proof.commitments,
                          proof.challenges, proof.responses):
        if z * h != t + c * y:
            return False
    return True


# -- composition --------------------------------------------------------------

def _composite_challenge(transcript: Transcript,
                         statements: Sequence[LinearStatement],
                         commitments: Sequence[Sequence[G1]],
                         bit_commitments: Sequence[G1],
                         bit_ts: Sequence[tuple[G1, G1]]) -> int:
    t = transcript.copy()
    for s in statements:
        s.absorb(t)
    for c in bit_commitments:
        t.append_point("bit_commitment", c)
    for ts in commitments:
        for x in ts:
            t.append_point("commitment", x)
    for t0, t1 in bit_ts:
        t.append_point("bit_t0", t0).append_point("bit_t1", t1)
    return t.challenge()


def prove_composite(transcript: Transcript,
                    parts: Sequence[tuple[LinearStatement, Mapping[str, int]]],
                    bits: Sequence[tuple[int, G1, int]] = (),
                    rng=None, g: G1 = G1_GENERATOR, h: G1 = PEDERSEN_H,
                    ) -> tuple[list[SchnorrProof], list[BitProof]]:
    """Prove every part and every ``(bit, commitment, randomness)`` at once."""
    for statement, witness in parts:
        missing = [v for v in statement.variables if v not in witness]
        if missing:
            raise StatementMismatch(f"witness lacks {missing}")
        if not statement.holds(witness):
            raise StatementMismatch("witness does not satisfy the statement")
    for bit, c, r in bits:
        if bit not in (0, 1):
            raise InvalidInput(f"bit must be 0 or 1, got {bit!r}")
        if bit * g + r * h != c:
            raise StatementMismatch("bit commitment does not open to the given bit")
    shared = _shared_values(parts)

    nonces: dict[str, int] = {}
    commitments = [commit_linear(s, rng, nonces)[1] for s, _ in parts]
    bit_states = [_bit_commit(b, c, r, rng, g, h) for b, c, r in bits]
    challenge = _composite_challenge(transcript, [s for s, _ in parts], commitments,
                                     [c for _, c, _ in bits], [ts for _, ts in bit_states])
    proofs = [respond_linear(s, shared, nonces, ts, challenge)
              for (s, _), ts in zip(parts, commitments)]
    bit_proofs = [_bit_respond(state, ts, challenge) for state, ts in bit_states]
    return proofs, bit_proofs


def _shared_values(parts) -> dict[str, int]:
    values: dict[str, int] = {}
    for statement, witness in parts:
        for v in statement.variables:
            w = witness[v] % R
            if values.setdefault(v, w) != w:
                raise StatementMismatch(f"variable {v!r} has inconsistent values across parts")
    return values


def verify_composite(transcript: Transcript,
                     parts: Sequence[tuple[LinearStatement, SchnorrProof]],
                     bits: Sequence[tuple[G1, BitProof]] = (),
                     g: G1 = G1_GENERATOR, h: G1 = PEDERSEN_H) -> bool:
    if not parts and not bits:
        return False
    challenges = {p.challenge for _, p in parts}
    if len(challenges) > 1:
        return False
    responses: dict[str, int] = {}
    for statement, proof in parts:
        if not equations_hold(statement, proof):
            return False
        for v, z in zip(statement.variables, proof.responses):
            if responses.setdefault(v, z) != z:
                return False
    if parts:
        challenge = parts[0][1].challenge
    else:
        challenge = sum(bits[0][1].challenges) % R
    for c, bp in bits:
        if not bit_equations_hold(c, bp, challenge, g, h):
            return False
    expected = _composite_challenge(transcript, [s for s, _ in parts],
                                    [p.commitments for _, p in parts],
                                    [c for c, _ in bits], [bp.commitments for _, bp in bits])
    return expected == challenge


# -- single-statement protocols ---------------------------------------------

def prove_linear(statement: LinearStatement, witness: Mapping[str, int],
                 transcript: Transcript, rng=None) -> SchnorrProof:
    return prove_composite(transcript, [(statement, witness)], rng=rng)[0][0]


def verify_linear(statement: LinearStatement, proof: SchnorrProof, transcript: Transcript) -> bool:
    return verify_composite(transcript, [(statement, proof)])


def simulate_linear(statement: LinearStatement, challenge: int, rng=None) -> SchnorrProof:
    """HVZK simulator: pick responses, solve for commitments.  Takes no witness."""
    names = statement.variables
    z = {v: random_scalar(rng) for v in names}
    c = challenge % R
    ts = tuple(eq.evaluate(z) - c * eq.public for eq in statement.equations)
    return SchnorrProof(ts, c, tuple(z[v] for v in names))


def extract_witness(statement: LinearStatement, first: SchnorrProof,
                    second: SchnorrProof) -> dict[str, int]:
    """Special-soundness extractor from two forked accepting transcripts."""
    if first.commitments != second.commitments:
        raise InvalidInput("transcripts must share their commitments")
    dc = (first.challenge - second.challenge) % R
    if dc == 0:
        raise InvalidInput("transcripts must have distinct challenges")
    k = inv(dc)
    return {v: (z1 - z2) * k % R
            for v, z1, z2 in zip(statement.variables, first.responses, second.responses)}


def dlog_statement(base: G1, public: G1) -> LinearStatement:
    return LinearStatement.of((public, [("x", base)]))


def dleq_statement(base1: G1, pub1: G1, base2: G1, pub2: G1) -> LinearStatement:
    return LinearStatement.of((pub1, [("x", base1)]), (pub2, [("x", base2)]))


def pedersen_statement(commitment: G1, g: G1 = G1_GENERATOR, h: G1 = PEDERSEN_H) -> LinearStatement:
    return LinearStatement.of((commitment, [("seed", g), ("nonce", h)]))


def _t(transcript: Optional[Transcript], name: str) -> Transcript:
    return transcript if transcript is not None else Transcript(name)


def prove_dlog(witness: int, base: G1, public: G1, transcript: Optional[Transcript] = None,
               rng=None) -> SchnorrProof:
    return prove_linear(dlog_statement(base, public), {"x": witness}, _t(transcript, "dlog"), rng)


def verify_dlog(proof: SchnorrProof, base: G1, public: G1,
                transcript: Optional[Transcript] = None) -> bool:
    return verify_linear(dlog_statement(base, public), proof, _t(transcript, "dlog"))


def simulate_dlog(base: G1, public: G1, challenge: int, rng=None) -> SchnorrProof:
    return simulate_linear(dlog_statement(base, public), challenge, rng)


def prove_dleq(witness: int, base1: G1, pub1: G1, base2: G1, pub2: G1,
               transcript: Optional[Transcript] = None, rng=None) -> SchnorrProof:
    return prove_linear(dleq_statement(base1, pub1, base2, pub2), {"x": witness},
                        _t(transcript, "dleq"), rng)


def verify_dleq(proof: SchnorrProof, base1: G1, pub1: G1, base2: G1, pub2: G1,
                transcript: Optional[Transcript] = None) -> bool:
    return verify_linear(dleq_statement(base1, pub1, base2, pub2), proof, _t(transcript, "dleq"))


def prove_pedersen_opening(seed_scalar: int, nonce_scalar: int, commitment: G1,
                           transcript: Optional[Transcript] = None, rng=None,
                           g: G1 = G1_GENERATOR, h: G1 = PEDERSEN_H) -> SchnorrProof:
    return prove_linear(pedersen_statement(commitment, g, h),
                        {"seed": seed_scalar, "nonce": nonce_scalar},
                        _t(transcript, "pedersen-opening"), rng)


def verify_pedersen_opening(proof: SchnorrProof, commitment: G1,
                            transcript: Optional[Transcript] = None,
                            g: G1 = G1_GENERATOR, h: G1 = PEDERSEN_H) -> bool:
    return verify_linear(pedersen_statement(commitment, g, h), proof,
                         _t(transcript, "pedersen-opening"))


def prove_bit(bit: int, commitment: G1, randomness: int,
              transcript: Optional[Transcript] = None, rng=None,
              g: G1 = G1_GENERATOR, h: G1 = PEDERSEN_H) -> BitProof:
    return prove_composite(_t(transcript, "bit"), [], [(bit, commitment, randomness)], rng, g, h)[1][0]


def verify_bit(proof: BitProof, commitment: G1, transcript: Optional[Transcript] = None,
               g: G1 = G1_GENERATOR, h: G1 = PEDERSEN_H) -> bool:
    return verify_composite(_t(transcript, "bit"), [], [(commitment, proof)], g, h)


# -- range proof ----------------------------------------------------------------

def range_width(bound: int) -> int:
    """Bits needed for values in ``[0, bound - 1]`` (at least one)."""
    if bound < 1:
        raise InvalidInput("range bound must be at least 1")
    return max(1, (bound - 1).bit_length())


@dataclass(frozen=True)
class RangeProof:
    """Proof that a committed ``idx`` satisfies ``1 <= idx <= bound``.

    ``idx - 1`` and ``bound - idx`` are each decomposed into ``width`` bits;
    both being non-negative pins ``idx`` to the interval.
    """

    bound: int
    lower_commitments: tuple[G1, ...]
    upper_commitments: tuple[G1, ...]
    bit_proofs: tuple[BitProof, ...]
    consistency: SchnorrProof

    @property
    def bit_commitments(self) -> tuple[G1, ...]:
        return self.lower_commitments + self.upper_commitments

    def encode(self, w: Writer) -> None:
        w.u64(self.bound).g1s(self.lower_commitments).g1s(self.upper_commitments)
        w.u32(len(self.bit_proofs))
        for bp in self.bit_proofs:
            bp.encode(w)
        self.consistency.encode(w)

    @classmethod
    def decode(cls, r: Reader) -> "RangeProof":
        bound = r.u64()
        lower, upper = tuple(r.g1s()), tuple(r.g1s())
        n = r.u32()
        if n != len(lower) + len(upper):
            raise DecodeError("bit proof count does not match bit commitments")
        bits = tuple(BitProof.decode(r) for _ in range(n))
        return cls(bound, lower, upper, bits, SchnorrProof.decode(r))

    def to_bytes(self) -> bytes:
        w = Writer()
        self.encode(w)
        return frame(Record.RANGE, w.getvalue())

    @classmethod
    def from_bytes(cls, data: bytes) -> "RangeProof":
        r = unframe(data, Record.RANGE)
        proof = cls.decode(r)
        r.finish()
        return proof


def range_statement(idx_commitment: G1, bound: int, lower: Sequence[G1], upper: Sequence[G1],
                    g: G1 = G1_GENERATOR, h: G1 = PEDERSEN_H) -> LinearStatement:
    """``C - g - sum 2^i L_i = a*h`` and ``bound*g - C - sum 2^i U_i = b*h``."""
    weights = [1 << i for i in range(len(lower))]
    lo = idx_commitment - g - multiexp(list(lower), weights)
    hi = bound * g - idx_commitment - multiexp(list(upper), [1 << i for i in range(len(upper))])
    return LinearStatement.of((lo, [("range_lo", h)]), (hi, [("range_hi", h)]))


@dataclass
class RangeWitness:
    lower: list[tuple[int, G1, int]]
    upper: list[tuple[int, G1, int]]
    lo_blind: int
    hi_blind: int

    @property
    def bits(self) -> list[tuple[int, G1, int]]:
        return self.lower + self.upper


def range_commit(idx: int, randomness: int, bound: int, rng=None,
                 g: G1 = G1_GENERATOR, h: G1 = PEDERSEN_H) -> RangeWitness:
    if not 1 <= idx <= bound:
        raise StatementMismatch(f"index {idx} outside [1, {bound}]")
    width = range_width(bound)

    def decompose(value: int):
        out = []
        for i in range(width):
            b = (value >> i) & 1
            r = random_scalar(rng)
            out.append((b, b * g + r * h, r))
        return out

    lower, upper = decompose(idx - 1), decompose(bound - idx)
    lo_sum = sum(r << i for i, (_, _, r) in enumerate(lower))
    hi_sum = sum(r << i for i, (_, _, r) in enumerate(upper))
    return RangeWitness(lower, upper, (randomness - lo_sum) % R, (-randomness - hi_sum) % R)


def prove_range(idx: int, idx_commitment: G1, randomness: int, bound: int,
                transcript: Optional[Transcript] = None, rng=None,
                g: G1 = G1_GENERATOR, h: G1 = PEDERSEN_H) -> RangeProof:
    if idx * g + randomness * h != idx_commitment:
        raise StatementMismatch("commitment does not open to idx")
    rw = range_commit(idx, randomness, bound, rng, g, h)
    lower = tuple(c for _, c, _ in rw.lower)
    upper = tuple(c for _, c, _ in rw.upper)
    statement = range_statement(idx_commitment, bound, lower, upper, g, h)
    t = _t(transcript, "range").copy().append("bound", bound.to_bytes(8, "big"))
    proofs, bit_proofs = prove_composite(
        t, [(statement, {"range_lo": rw.lo_blind, "range_hi": rw.hi_blind})], rw.bits, rng, g, h)
    return RangeProof(bound, lower, upper, tuple(bit_proofs), proofs[0])


def verify_range(proof: RangeProof, idx_commitment: G1, bound: int,
                 transcript: Optional[Transcript] = None,
                 g: G1 = G1_GENERATOR, h: G1 = PEDERSEN_H) -> bool:
    parts = range_parts(proof, idx_commitment, bound, g, h)
    if parts is None:
        return False
    statement, bits = parts
    t = _t(transcript, "range").copy().append("bound", bound.to_bytes(8, "big"))
    return verify_composite(t, [(statement, proof.consistency)], bits, g, h)


def range_parts(proof: RangeProof, idx_commitment: G1, bound: int,
                g: G1 = G1_GENERATOR, h: G1 = PEDERSEN_H):
    """Statement and bit list a verifier checks, or ``None`` if malformed."""
    width = range_width(bound)
    if (proof.bound != bound or len(proof.lower_commitments) != width
            or len(proof.upper_commitments) != width or len(proof.bit_proofs) != 2 * width):
        return None
    statement = range_statement(idx_commitment, bound, proof.lower_commitments,
                                proof.upper_commitments, g, h)
    return statement, list(zip(proof.bit_commitments, proof.bit_proofs))
