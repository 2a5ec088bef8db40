"""BBS signatures with blind issuance of the seed slot and pseudonymous presentations.

Slot layout of every credential:

* slot 0 -- the pseudonym seed scalar, committed blindly, never disclosed;
* slot 1 -- the wallet's device scalar (device binding), also blind;
* slots 2.. -- named clear attributes chosen by the issuer;
* one trailing blinding generator carries the per-issuance nonce.

A signature is ``(A, e)`` with ``A = (1 / (x + e)) * B`` and
``B = P1 + sum m_i H_i + nonce * H_blind``.
"""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Optional

from .codec import Reader, Record, Writer, frame, length_prefixed, unframe
from .commitments import CommitmentKind, PseudonymSeed, SeedCommitment
from .errors import (
    BadRequest,
    ContextMismatch,
    DecodeError,
    InvalidInput,
    MissingRangeProof,
    RangeViolation,
    ScopeMismatch,
    SeedDisclosure,
    VerificationError,
)
from .groups import (
    G1,
    G1_GENERATOR,
    G2,
    G2_GENERATOR,
    PEDERSEN_H,
    R,
    hash_to_group,
    hash_to_scalar,
    inv,
    multiexp,
    pairing_product_is_one,
    random_scalar,
    tag,
)
from .prf import (
    NymKind,
    Pseudonym,
    Scope,
    as_scope,
    check_index,
    dy_base,
    dy_nym,
    hashdh_base,
    hashdh_nym,
)
from .sigma import (
    LinearStatement,
    RangeProof,
    SchnorrProof,
    Transcript,
    prove_composite,
    range_commit,
    range_parts,
    range_statement,
    verify_composite,
)

SEED_SLOT = 0
DEVICE_SLOT = 1
RESERVED_NAMES = ("pns", "device_key")

ATTRIBUTE_TAG = tag("attribute")
GENERATOR_TAG = tag("bbs-generator")
P1 = hash_to_group(b"P1", tag("bbs-p1"))


def attribute_scalar(name: str, value: bytes) -> int:
    return hash_to_scalar(length_prefixed(name.encode("utf-8"), value), ATTRIBUTE_TAG)


def _as_bytes(value: str | bytes) -> bytes:
    return value.encode("utf-8") if isinstance(value, str) else bytes(value)


# -- keys -------------------------------------------------------------------

@dataclass(frozen=True)
class IssuerPublicKey:
    w: G2
    attribute_names: tuple[str, ...]

    @property
    def slot_count(self) -> int:
        return len(RESERVED_NAMES) + len(self.attribute_names)

    @cached_property
    def message_generators(self) -> tuple[G1, ...]:
        """One generator per slot followed by the blinding generator."""
        wb = self.w.to_bytes()
        return tuple(hash_to_group(wb + i.to_bytes(4, "big"), GENERATOR_TAG)
                     for i in range(self.slot_count + 1))

    @property
    def blinding_generator(self) -> G1:
        return self.message_generators[-1]

    @cached_property
    def fingerprint_base(self) -> G1:
        return hash_to_group(self.w.to_bytes(), tag("enrollment-fingerprint"))

    def slot_of(self, name: str) -> int:
        try:
            return len(RESERVED_NAMES) + self.attribute_names.index(name)
        except ValueError:
            raise InvalidInput(f"unknown attribute {name!r}") from None

    def encode(self, w: Writer) -> None:
        w.g2(self.w).u32(len(self.attribute_names))
        for n in self.attribute_names:
            w.text(n)

    @classmethod
    def decode(cls, r: Reader) -> "IssuerPublicKey":
        w = r.g2()
        names = tuple(r.text() for _ in range(r.u32()))
        return cls(w, names)

    def to_bytes(self) -> bytes:
        w = Writer()
        self.encode(w)
        return frame(Record.ISSUER_PUBLIC, w.getvalue())

    @classmethod
    def from_bytes(cls, data: bytes) -> "IssuerPublicKey":
        r = unframe(data, Record.ISSUER_PUBLIC)
        key = cls.decode(r)
        r.finish()
        return key


@dataclass(frozen=True)
class IssuerKeyPair:
    secret: int = field(repr=False)
    public: IssuerPublicKey

    @property
    def message_generators(self) -> tuple[G1, ...]:
        return self.public.message_generators


def keygen(attribute_slot_count: int, attribute_names: Optional[Iterable[str]] = None,
           rng=None) -> IssuerKeyPair:
    """Slot count includes the seed and device slots."""
    if attribute_slot_count < 2:
        raise InvalidInput("need at least the seed slot and one attribute slot")
    n_clear = attribute_slot_count - len(RESERVED_NAMES)
    names = tuple(attribute_names) if attribute_names is not None else tuple(
        f"attr{i}" for i in range(n_clear))
    if len(names) != n_clear:
        raise InvalidInput(f"expected {n_clear} attribute names, got {len(names)}")
    if len(set(names)) != len(names) or any(n in RESERVED_NAMES or not n for n in names):
        raise InvalidInput("attribute names must be unique, non-empty and not reserved")
    x = random_scalar(rng)
    return IssuerKeyPair(x, IssuerPublicKey(x * G2_GENERATOR, names))


def _b_value(public: IssuerPublicKey, messages: list[int]) -> G1:
    return P1 + multiexp(list(public.message_generators), messages)


# -- credentials --------------------------------------------------------------

@dataclass(frozen=True)
class Credential:
    a: G1
    e: int
    seed_scalar: int = field(repr=False)
    device_scalar: int = field(repr=False)
    nonce: int = field(repr=False)
    attributes: Mapping[str, bytes] = field(default_factory=dict)

    def messages(self, public: IssuerPublicKey) -> list[int]:
        """Scalars for every slot plus the blinding nonce."""
        if set(self.attributes) != set(public.attribute_names):
            raise InvalidInput("credential attributes do not match the issuer schema")
        clear = [attribute_scalar(n, self.attributes[n]) for n in public.attribute_names]
        return [self.seed_scalar, self.device_scalar, *clear, self.nonce]

    def encode(self, w: Writer) -> None:
        w.g1(self.a).scalar(self.e).scalar(self.seed_scalar).scalar(self.device_scalar)
        w.scalar(self.nonce)
        _encode_attrs(w, self.attributes)

    @classmethod
    def decode(cls, r: Reader) -> "Credential":
        a, e, s, d, n = r.g1(), r.scalar(), r.scalar(), r.scalar(), r.scalar()
        return cls(a, e, s, d, n, _decode_attrs(r))

    def to_bytes(self) -> bytes:
        w = Writer()
        self.encode(w)
        return frame(Record.CREDENTIAL, w.getvalue())

    @classmethod
    def from_bytes(cls, data: bytes) -> "Credential":
        r = unframe(data, Record.CREDENTIAL)
        cred = cls.decode(r)
        r.finish()
        return cred


def _encode_attrs(w: Writer, attrs: Mapping[str, bytes]) -> None:
    w.u32(len(attrs))
    for name in sorted(attrs):
        w.text(name).blob(attrs[name])


def _decode_attrs(r: Reader) -> dict[str, bytes]:
    out: dict[str, bytes] = {}
    prev = None
    for _ in range(r.u32()):
        name = r.text()
        if prev is not None and name <= prev:
            raise DecodeError("attribute names must be sorted and unique")
        prev = name
        out[name] = r.blob()
    return out


def sign(keypair: IssuerKeyPair, messages: list[int], rng=None) -> tuple[G1, int]:
    """Plain BBS signing over a full message vector (blinding slot included)."""
    b = _b_value(keypair.public, messages)
    while True:
        e = random_scalar(rng)
        if (keypair.secret + e) % R:
            return inv(keypair.secret + e) * b, e


def verify_signature(public: IssuerPublicKey, credential: Credential) -> bool:
    try:
        messages = credential.messages(public)
    except InvalidInput:
        return False
    if credential.a.is_identity():
        return False
    b = _b_value(public, messages)
    # e(A, W + e*g2) == e(B, g2)
    return pairing_product_is_one([
        (credential.a, public.w + credential.e * G2_GENERATOR),
        (-b, G2_GENERATOR),
    ])


# -- blind issuance -----------------------------------------------------------

@dataclass(frozen=True)
class BlindIssuanceRequest:
    """What the issuer sees: commitments and a proof, never the seed."""

    pnc: SeedCommitment
    device_commitment: G1
    enrollment_fingerprint: G1
    opening_proof: SchnorrProof

    def fingerprint_hex(self) -> str:
        return hashlib.sha256(self.enrollment_fingerprint.to_bytes()).hexdigest()

    def encode(self, w: Writer) -> None:
        w.g1(self.pnc.value).g1(self.device_commitment).g1(self.enrollment_fingerprint)
        self.opening_proof.encode(w)

    @classmethod
    def decode(cls, r: Reader) -> "BlindIssuanceRequest":
        pnc = SeedCommitment(CommitmentKind.PEDERSEN, r.g1())
        return cls(pnc, r.g1(), r.g1(), SchnorrProof.decode(r))

    def to_bytes(self) -> bytes:
        w = Writer()
        self.encode(w)
        return frame(Record.BLIND_REQUEST, w.getvalue())

    @classmethod
    def from_bytes(cls, data: bytes) -> "BlindIssuanceRequest":
        r = unframe(data, Record.BLIND_REQUEST)
        req = cls.decode(r)
        r.finish()
        return req


@dataclass(frozen=True)
class BlindingState:
    seed_scalar: int = field(repr=False)
    device_scalar: int = field(repr=False)
    nonce: int = field(repr=False)

    def encode(self, w: Writer) -> None:
        w.scalar(self.seed_scalar).scalar(self.device_scalar).scalar(self.nonce)

    @classmethod
    def decode(cls, r: Reader) -> "BlindingState":
        return cls(r.scalar(), r.scalar(), r.scalar())


def _issuance_statement(public: IssuerPublicKey, req: BlindIssuanceRequest) -> LinearStatement:
    h = public.message_generators
    return LinearStatement.of(
        (req.pnc.value, [("pns", h[SEED_SLOT]), ("nonce", public.blinding_generator)]),
        (req.device_commitment, [("device", h[DEVICE_SLOT])]),
        (req.enrollment_fingerprint, [("pns", public.fingerprint_base)]),
    )


def _issuance_transcript(public: IssuerPublicKey, context: bytes) -> Transcript:
    return Transcript("blind-issuance", context).append("issuer", public.to_bytes())


def blind_issuance_request(seed: PseudonymSeed | int, device_scalar: int,
                           public: IssuerPublicKey, rng=None,
                           context: bytes = b"") -> tuple[BlindIssuanceRequest, BlindingState]:
    """Commit to the seed under a fresh nonce and prove the opening.

    The request also carries the deterministic ``pns * F`` enrollment
    fingerprint (``F`` issuer specific), proven to share its exponent with
    the seed commitment so the issuer can recognize a re-enrolling seed.
    """
    s = seed.scalar if isinstance(seed, PseudonymSeed) else seed % R
    nonce = random_scalar(rng)
    h = public.message_generators
    pnc = SeedCommitment(CommitmentKind.PEDERSEN, s * h[SEED_SLOT] + nonce * public.blinding_generator)
    dc = device_scalar * h[DEVICE_SLOT]
    fp = s * public.fingerprint_base
    unproven = BlindIssuanceRequest(pnc, dc, fp, SchnorrProof((), 0, ()))
    statement = _issuance_statement(public, unproven)
    [proof], _ = prove_composite(_issuance_transcript(public, context),
                                 [(statement, {"pns": s, "nonce": nonce, "device": device_scalar})],
                                 rng=rng)
    req = BlindIssuanceRequest(pnc, dc, fp, proof)
    return req, BlindingState(s, device_scalar % R, nonce)


def verify_issuance_request(public: IssuerPublicKey, req: BlindIssuanceRequest,
                            context: bytes = b"") -> bool:
    if req.pnc.kind is not CommitmentKind.PEDERSEN:
        return False
    return verify_composite(_issuance_transcript(public, context),
                            [(_issuance_statement(public, req), req.opening_proof)])


@dataclass(frozen=True)
class BlindSignature:
    a: G1
    e: int
    attributes: Mapping[str, bytes]

    def encode(self, w: Writer) -> None:
        w.g1(self.a).scalar(self.e)
        _encode_attrs(w, self.attributes)

    @classmethod
    def decode(cls, r: Reader) -> "BlindSignature":
        return cls(r.g1(), r.scalar(), _decode_attrs(r))


def _clear_attributes(public: IssuerPublicKey, clear: Mapping[str, str | bytes]) -> dict[str, bytes]:
    attrs = {k: _as_bytes(v) for k, v in clear.items()}
    if set(attrs) != set(public.attribute_names):
        missing = set(public.attribute_names) - set(attrs)
        extra = set(attrs) - set(public.attribute_names)
        raise InvalidInput(f"attribute mismatch: missing {sorted(missing)}, unexpected {sorted(extra)}")
    return attrs


def blind_sign(keypair: IssuerKeyPair, request: BlindIssuanceRequest,
               clear_attributes: Mapping[str, str | bytes], rng=None,
               context: bytes = b"") -> BlindSignature:
    public = keypair.public
    if not verify_issuance_request(public, request, context):
        raise BadRequest("blind issuance request proof does not verify")
    attrs = _clear_attributes(public, clear_attributes)
    h = public.message_generators
    clear = [attribute_scalar(n, attrs[n]) for n in public.attribute_names]
    b = P1 + request.pnc.value + request.device_commitment + multiexp(list(h[2:-1]), clear)
    while True:
        e = random_scalar(rng)
        if (keypair.secret + e) % R:
            break
    return BlindSignature(inv(keypair.secret + e) * b, e, attrs)


def unblind(public: IssuerPublicKey, signature: BlindSignature, state: BlindingState) -> Credential:
    cred = Credential(signature.a, signature.e, state.seed_scalar, state.device_scalar,
                      state.nonce, dict(signature.attributes))
    if not verify_signature(public, cred):
        raise VerificationError("issued signature does not verify over the committed seed")
    return cred


# -- presentations ------------------------------------------------------------

class PresentationMode(enum.IntEnum):
    NONE = 0
    HASHDH = 1
    DY = 2


@dataclass(frozen=True)
class PresentationProof:
    mode: PresentationMode
    scope: Scope
    session_context: bytes
    index: Optional[int]            # disclosed index (hashdh mode only)
    abar: G1
    bbar: G1
    d: G1
    disclosed: Mapping[str, bytes]
    nym_value: Optional[G1]
    credential_proof: SchnorrProof
    nym_link: Optional[SchnorrProof]
    idx_commitment: Optional[G1] = None
    range_proof: Optional[RangeProof] = None

    @property
    def nym(self) -> Optional[Pseudonym]:
        if self.nym_value is None:
            return None
        return Pseudonym(NymKind.GROUP, self.nym_value, self.scope, self.index)

    def encode(self, w: Writer) -> None:
        w.u8(self.mode).text(self.scope.value).blob(self.session_context)
        w.optional(self.index, Writer.u64)
        w.g1(self.abar).g1(self.bbar).g1(self.d)
        _encode_attrs(w, self.disclosed)
        w.optional(self.nym_value, Writer.g1)
        self.credential_proof.encode(w)
        w.optional(self.nym_link, lambda w_, p: p.encode(w_))
        w.optional(self.idx_commitment, Writer.g1)
        w.optional(self.range_proof, lambda w_, p: p.encode(w_))

    @classmethod
    def decode(cls, r: Reader) -> "PresentationProof":
        try:
            mode = PresentationMode(r.u8())
        except ValueError as exc:
            raise DecodeError("unknown presentation mode") from exc
        try:
            scope = Scope(r.text())
        except InvalidInput as exc:
            raise DecodeError(str(exc)) from exc
        ctx = r.blob()
        index = r.optional(Reader.u64)
        abar, bbar, d = r.g1(), r.g1(), r.g1()
        disclosed = _decode_attrs(r)
        nym_value = r.optional(Reader.g1)
        cred_proof = SchnorrProof.decode(r)
        nym_link = r.optional(SchnorrProof.decode)
        idx_c = r.optional(Reader.g1)
        rp = r.optional(RangeProof.decode)
        return cls(mode, scope, ctx, index, abar, bbar, d, disclosed, nym_value,
                   cred_proof, nym_link, idx_c, rp)

    def to_bytes(self) -> bytes:
        w = Writer()
        self.encode(w)
        return frame(Record.PRESENTATION, w.getvalue())

    @classmethod
    def from_bytes(cls, data: bytes) -> "PresentationProof":
        r = unframe(data, Record.PRESENTATION)
        proof = cls.decode(r)
        r.finish()
        return proof


@dataclass(frozen=True)
class VerifiedPresentation:
    mode: PresentationMode
    disclosed: Mapping[str, bytes]
    nym: Optional[Pseudonym]


def _hidden_var(public: IssuerPublicKey, slot: int) -> str:
    if slot == SEED_SLOT:
        return "pns"
    if slot == DEVICE_SLOT:
        return "device"
    if slot == public.slot_count:
        return "blind"
    return "attr:" + public.attribute_names[slot - len(RESERVED_NAMES)]


def _credential_statement(public: IssuerPublicKey, disclosed: Mapping[str, bytes],
                          abar: G1, bbar: G1, d: G1) -> LinearStatement:
    h = public.message_generators
    disclosed_slots = {public.slot_of(n): n for n in disclosed}
    bv = P1 + multiexp([h[i] for i in disclosed_slots],
                       [attribute_scalar(n, disclosed[n]) for i, n in disclosed_slots.items()])
    hidden = [i for i in range(public.slot_count + 1) if i not in disclosed_slots]
    return LinearStatement.of(
        (bbar, [("r1", d), ("e", -abar)]),
        (bv, [("r3", d)] + [(_hidden_var(public, i), -h[i]) for i in hidden]),
    )


def _nym_statement(mode: PresentationMode, scope: Scope, index: Optional[int],
                   nym: G1, idx_commitment: Optional[G1]) -> LinearStatement:
    if mode is PresentationMode.HASHDH:
        return LinearStatement.of((nym, [("pns", hashdh_base(scope, index))]))
    # (pns + idx) * nym == G_scp, idx committed as idx*g + rho*h
    return LinearStatement.of(
        (dy_base(scope), [("pns", nym), ("idx", nym)]),
        (idx_commitment, [("idx", G1_GENERATOR), ("rho", PEDERSEN_H)]),
    )


def _presentation_transcript(public: IssuerPublicKey, mode: PresentationMode, scope: Scope,
                             session_context: bytes, index: Optional[int],
                             bound: Optional[int], disclosed: Mapping[str, bytes],
                             abar: G1, bbar: G1, d: G1, nym: Optional[G1],
                             idx_commitment: Optional[G1]) -> Transcript:
    t = Transcript("presentation", session_context)
    t.append("issuer", public.to_bytes())
    t.append("mode", bytes([mode]))
    t.append("scope", scope.encode())
    t.append("index", b"" if index is None else index.to_bytes(8, "big"))
    t.append("bound", b"" if bound is None else bound.to_bytes(8, "big"))
    for name in sorted(disclosed):
        t.append("disclosed", length_prefixed(name.encode(), disclosed[name]))
    t.append_point("abar", abar).append_point("bbar", bbar).append_point("d", d)
    t.append("nym", b"" if nym is None else nym.to_bytes())
    t.append("idx_commitment", b"" if idx_commitment is None else idx_commitment.to_bytes())
    return t


def _check_disclosure(public: IssuerPublicKey, names: Iterable[str]) -> list[str]:
    names = list(names)
    for n in names:
        if n in RESERVED_NAMES:
            raise SeedDisclosure(f"slot {n!r} must never be disclosed")
        public.slot_of(n)
    return names


def present(public: IssuerPublicKey, credential: Credential, disclose: Iterable[str],
            scp: Scope | str, idx: int = 0, mode: PresentationMode = PresentationMode.HASHDH,
            session_context: bytes = b"", bound: Optional[int] = None,
            rng=None) -> PresentationProof:
    scope = as_scope(scp)
    mode = PresentationMode(mode)
    check_index(idx)
    names = _check_disclosure(public, disclose)
    if mode is PresentationMode.DY:
        if bound is None:
            raise InvalidInput("rate-limited presentations need a bound")
        if not 1 <= idx <= bound:
            raise RangeViolation(f"index {idx} outside [1, {bound}]")

    messages = credential.messages(public)
    disclosed = {n: credential.attributes[n] for n in names}

    r1, r2 = random_scalar(rng), random_scalar(rng)
    b = _b_value(public, messages)
    d = r2 * b
    abar = (r1 * r2 % R) * credential.a
    bbar = r1 * d - credential.e * abar
    witness = {"r1": r1, "e": credential.e, "r3": inv(r2)}
    for i in range(public.slot_count + 1):
        witness[_hidden_var(public, i)] = messages[i]

    nym_value = idx_commitment = None
    index = None
    rw = None
    parts = [(_credential_statement(public, disclosed, abar, bbar, d), witness)]
    if mode is PresentationMode.HASHDH:
        index = idx
        nym_value = hashdh_nym(credential.seed_scalar, scope, idx).value
        parts.append((_nym_statement(mode, scope, idx, nym_value, None), {"pns": credential.seed_scalar}))
    elif mode is PresentationMode.DY:
        nym_value = dy_nym(credential.seed_scalar, scope, idx).value
        rho = random_scalar(rng)
        idx_commitment = idx * G1_GENERATOR + rho * PEDERSEN_H
        parts.append((_nym_statement(mode, scope, None, nym_value, idx_commitment),
                      {"pns": credential.seed_scalar, "idx": idx, "rho": rho}))
        rw = range_commit(idx, rho, bound, rng)
        lower = tuple(c for _, c, _ in rw.lower)
        upper = tuple(c for _, c, _ in rw.upper)
        parts.append((range_statement(idx_commitment, bound, lower, upper),
                      {"range_lo": rw.lo_blind, "range_hi": rw.hi_blind}))

    t = _presentation_transcript(public, mode, scope, session_context, index,
                                 bound if mode is PresentationMode.DY else None,
                                 disclosed, abar, bbar, d, nym_value, idx_commitment)
    proofs, bit_proofs = prove_composite(t, parts, rw.bits if rw else (), rng)
    range_proof = None
    if rw is not None:
        range_proof = RangeProof(bound, lower, upper, tuple(bit_proofs), proofs[2])
    return PresentationProof(mode, scope, bytes(session_context), index, abar, bbar, d,
                             disclosed, nym_value, proofs[0],
                             proofs[1] if len(proofs) > 1 else None,
                             idx_commitment, range_proof)


def verify_presentation(public: IssuerPublicKey, proof: PresentationProof,
                        expected_scope: Scope | str, bound: Optional[int] = None,
                        session_context: bytes = b"") -> VerifiedPresentation:
    """Accept or raise; each failure class has its own exception type."""
    expected_scope = as_scope(expected_scope)
    if proof.scope != expected_scope:
        raise ScopeMismatch(f"proof is bound to {proof.scope.value!r}, expected {expected_scope.value!r}")
    if proof.session_context != bytes(session_context):
        raise ContextMismatch("session context does not match")

    mode = proof.mode
    if mode is PresentationMode.DY:
        if proof.range_proof is None or proof.idx_commitment is None:
            raise MissingRangeProof("rate-limited presentation without a range proof")
        if bound is not None and proof.range_proof.bound != bound:
            raise RangeViolation(f"range proof is for bound {proof.range_proof.bound}, policy is {bound}")
        if proof.index is not None:
            raise VerificationError("rate-limited presentations must not disclose the index")
    elif bound is not None:
        if mode is PresentationMode.NONE:
            raise MissingRangeProof("policy requires a rate-limited pseudonym")
        if proof.index is None or not 1 <= proof.index <= bound:
            raise RangeViolation(f"index {proof.index} outside [1, {bound}]")

    if mode is PresentationMode.NONE:
        if proof.nym_value is not None or proof.nym_link is not None or proof.index is not None:
            raise VerificationError("anonymous presentation carries pseudonym fields")
    else:
        if proof.nym_value is None or proof.nym_link is None:
            raise VerificationError("presentation lacks its pseudonym")
        if proof.nym_value.is_identity():
            raise VerificationError("identity pseudonym")
        if mode is PresentationMode.HASHDH and proof.index is None:
            raise VerificationError("hashdh presentation lacks its index")
    if mode is not PresentationMode.DY and (proof.range_proof or proof.idx_commitment):
        raise VerificationError("unexpected range proof")

    try:
        _check_disclosure(public, proof.disclosed)
    except SeedDisclosure:
        raise
    except InvalidInput as exc:
        raise VerificationError(str(exc)) from exc

    if proof.abar.is_identity() or proof.d.is_identity():
        raise VerificationError("degenerate randomized signature")
    # e(Abar, W) == e(Bbar, g2)
    if not pairing_product_is_one([(proof.abar, public.w), (-proof.bbar, G2_GENERATOR)]):
        raise VerificationError("signature pairing check failed")

    range_bound = proof.range_proof.bound if mode is PresentationMode.DY else None
    parts = [(_credential_statement(public, proof.disclosed, proof.abar, proof.bbar, proof.d),
              proof.credential_proof)]
    bits = []
    if mode is not PresentationMode.NONE:
        parts.append((_nym_statement(mode, proof.scope, proof.index, proof.nym_value,
                                     proof.idx_commitment), proof.nym_link))
    if mode is PresentationMode.DY:
        rp = range_parts(proof.range_proof, proof.idx_commitment, range_bound)
        if rp is None:
            raise VerificationError("malformed range proof")
        statement, bits = rp
        parts.append((statement, proof.range_proof.consistency))

    t = _presentation_transcript(public, mode, expected_scope, bytes(session_context), proof.index,
                                 range_bound, proof.disclosed, proof.abar, proof.bbar, proof.d,
                                 proof.nym_value, proof.idx_commitment)
    if not verify_composite(t, parts, bits):
        raise VerificationError("presentation proof does not verify")
    return VerifiedPresentation(mode, dict(proof.disclosed), proof.nym)
