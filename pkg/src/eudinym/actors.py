"""Issuer, wallet and relying-party state machines plus their snapshot files."""

from __future__ import annotations

import enum
import hashlib
import os
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from . import bbs
from .bbs import (
    BlindingState,
    BlindIssuanceRequest,
    BlindSignature,
    Credential,
    IssuerKeyPair,
    IssuerPublicKey,
    PresentationMode,
    PresentationProof,
)
from .codec import Reader, Record, Writer, frame, unframe
from .commitments import PseudonymSeed
from .errors import (
    BadRequest,
    DecodeError,
    InvalidInput,
    NoCredential,
    NoPendingEnrollment,
    PolicyViolation,
    SeedConflict,
)
from .groups import random_scalar
from .prf import Pseudonym, Scope, as_scope, check_index, dy_nym, hashdh_nym, hmac_nym


def _now(now: Optional[int]) -> int:
    return int(time.time()) if now is None else now


def write_atomic(path: str | os.PathLike, data: bytes) -> None:
    """Replace ``path`` with ``data`` so readers never see a partial file."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- issuer -----------------------------------------------------------------

@dataclass(frozen=True)
class IssuanceRecord:
    holder_id: str
    credential_fingerprint: str
    timestamp: int


@dataclass(frozen=True)
class IssuanceResponse:
    signature: BlindSignature

    def to_bytes(self) -> bytes:
        w = Writer()
        self.signature.encode(w)
        return frame(Record.ISSUANCE_RESPONSE, w.getvalue())

    @classmethod
    def from_bytes(cls, data: bytes) -> "IssuanceResponse":
        r = unframe(data, Record.ISSUANCE_RESPONSE)
        sig = BlindSignature.decode(r)
        r.finish()
        return cls(sig)


@dataclass
class IssuerState:
    keypair: IssuerKeyPair
    enrollment_ledger: dict[str, str] = field(default_factory=dict)
    issuance_log: list[IssuanceRecord] = field(default_factory=list)

    @classmethod
    def create(cls, attribute_names: Iterable[str], rng=None) -> "IssuerState":
        names = list(attribute_names)
        return cls(bbs.keygen(len(names) + len(bbs.RESERVED_NAMES), names, rng))

    @property
    def public(self) -> IssuerPublicKey:
        return self.keypair.public

    def to_bytes(self) -> bytes:
        w = Writer().scalar(self.keypair.secret)
        self.keypair.public.encode(w)
        w.u32(len(self.enrollment_ledger))
        for holder in sorted(self.enrollment_ledger):
            w.text(holder).text(self.enrollment_ledger[holder])
        w.u32(len(self.issuance_log))
        for rec in self.issuance_log:
            w.text(rec.holder_id).text(rec.credential_fingerprint).u64(rec.timestamp)
        return frame(Record.ISSUER_STATE, w.getvalue())

    @classmethod
    def from_bytes(cls, data: bytes) -> "IssuerState":
        r = unframe(data, Record.ISSUER_STATE)
        secret = r.scalar()
        public = IssuerPublicKey.decode(r)
        ledger = {r.text(): r.text() for _ in range(r.u32())}
        log = [IssuanceRecord(r.text(), r.text(), r.u64()) for _ in range(r.u32())]
        r.finish()
        kp = IssuerKeyPair(secret, public)
        if bbs.G2_GENERATOR * secret != public.w:
            raise DecodeError("issuer secret does not match its public key")
        return cls(kp, ledger, log)


def issuer_enroll(state: IssuerState, holder_id: str, request: BlindIssuanceRequest,
                  clear_attributes, now: Optional[int] = None, rng=None) -> IssuanceResponse:
    """Issue a blind credential, allowing only one seed per holder, ever."""
    if not holder_id:
        raise InvalidInput("holder id must be non-empty")
    if not bbs.verify_issuance_request(state.public, request):
        raise BadRequest("blind issuance request proof does not verify")
    fingerprint = request.fingerprint_hex()
    recorded = state.enrollment_ledger.get(holder_id)
    if recorded is not None and recorded != fingerprint:
        raise SeedConflict(f"holder {holder_id!r} already enrolled a different seed")
    signature = bbs.blind_sign(state.keypair, request, clear_attributes, rng)
    if recorded is None:
        state.enrollment_ledger[holder_id] = fingerprint
    cred_fp = hashlib.sha256(signature.a.to_bytes()).hexdigest()
    state.issuance_log.append(IssuanceRecord(holder_id, cred_fp, _now(now)))
    return IssuanceResponse(signature)


# -- wallet -------------------------------------------------------------------

class NymMode(enum.IntEnum):
    HMAC = 1
    HASHDH = 2
    DY = 3

    @property
    def presentation_mode(self) -> PresentationMode:
        if self is NymMode.HASHDH:
            return PresentationMode.HASHDH
        if self is NymMode.DY:
            return PresentationMode.DY
        raise InvalidInput("HMAC pseudonyms cannot be presented with BBS proofs")


def derive_nym(seed: PseudonymSeed, scp: Scope | str, idx: int, mode: NymMode) -> Pseudonym:
    mode = NymMode(mode)
    if mode is NymMode.HMAC:
        return hmac_nym(seed, scp, idx)
    if mode is NymMode.HASHDH:
        return hashdh_nym(seed.scalar, scp, idx)
    return dy_nym(seed.scalar, scp, idx)


@dataclass
class LedgerEntry:
    label: str
    nym: Pseudonym
    last_used: Optional[int] = None


@dataclass(frozen=True)
class StoredCredential:
    issuer: IssuerPublicKey
    credential: Credential


LedgerKey = tuple[str, int, NymMode]


@dataclass
class WalletState:
    seed: PseudonymSeed
    device_scalar: int = field(repr=False)
    credentials: list[StoredCredential] = field(default_factory=list)
    pseudonym_ledger: dict[LedgerKey, LedgerEntry] = field(default_factory=dict)
    pending: Optional[tuple[IssuerPublicKey, BlindingState]] = field(default=None, repr=False)

    @classmethod
    def create(cls, rng=None) -> "WalletState":
        return cls(PseudonymSeed.generate(rng), random_scalar(rng))

    def credential_for(self, issuer: Optional[IssuerPublicKey] = None) -> StoredCredential:
        for stored in reversed(self.credentials):
            if issuer is None or stored.issuer == issuer:
                return stored
        raise NoCredential("wallet holds no credential" + (" from this issuer" if issuer else ""))

    def to_bytes(self) -> bytes:
        w = Writer().raw(self.seed.secret).scalar(self.device_scalar)
        w.u32(len(self.credentials))
        for sc in self.credentials:
            sc.issuer.encode(w)
            sc.credential.encode(w)
        w.u32(len(self.pseudonym_ledger))
        for key in sorted(self.pseudonym_ledger):
            entry = self.pseudonym_ledger[key]
            scope, idx, mode = key
            w.text(scope).u64(idx).u8(mode).text(entry.label)
            w.optional(entry.last_used, Writer.u64)
        w.optional(self.pending, lambda w_, p: (p[0].encode(w_), p[1].encode(w_)))
        return frame(Record.WALLET_STATE, w.getvalue())

    @classmethod
    def from_bytes(cls, data: bytes) -> "WalletState":
        r = unframe(data, Record.WALLET_STATE)
        seed = PseudonymSeed(r.raw(32))
        device = r.scalar()
        creds = []
        for _ in range(r.u32()):
            issuer = IssuerPublicKey.decode(r)
            creds.append(StoredCredential(issuer, Credential.decode(r)))
        state = cls(seed, device, creds)
        for _ in range(r.u32()):
            scope, idx = r.text(), r.u64()
            try:
                mode = NymMode(r.u8())
            except ValueError as exc:
                raise DecodeError("unknown pseudonym mode") from exc
            label = r.text()
            last = r.optional(Reader.u64)
            # ledger entries are never stored, only re-derived
            state.pseudonym_ledger[(scope, idx, mode)] = LedgerEntry(
                label, derive_nym(seed, scope, idx, mode), last)
        state.pending = r.optional(lambda r_: (IssuerPublicKey.decode(r_), BlindingState.decode(r_)))
        r.finish()
        return state


def wallet_enrollment_request(state: WalletState, issuer: IssuerPublicKey,
                              rng=None) -> BlindIssuanceRequest:
    request, blinding = bbs.blind_issuance_request(state.seed, state.device_scalar, issuer, rng)
    state.pending = (issuer, blinding)
    return request


def wallet_accept_issuance(state: WalletState, response: IssuanceResponse) -> Credential:
    if state.pending is None:
        raise NoPendingEnrollment("no enrollment request outstanding")
    issuer, blinding = state.pending
    credential = bbs.unblind(issuer, response.signature, blinding)
    state.credentials.append(StoredCredential(issuer, credential))
    state.pending = None
    return credential


def wallet_register_pseudonym(state: WalletState, scp: Scope | str, idx: int, mode: NymMode,
                              label: str = "") -> Pseudonym:
    if not state.credentials:
        raise NoCredential("register a pseudonym only after enrollment")
    scope = as_scope(scp)
    key = (scope.value, check_index(idx), NymMode(mode))
    entry = state.pseudonym_ledger.get(key)
    if entry is None:
        entry = LedgerEntry(label, derive_nym(state.seed, scope, idx, mode))
        state.pseudonym_ledger[key] = entry
    return entry.nym


def wallet_present(state: WalletState, scp: Scope | str, idx: int, mode: NymMode,
                   disclose: Iterable[str] = (), session_context: bytes = b"",
                   bound: Optional[int] = None, issuer: Optional[IssuerPublicKey] = None,
                   now: Optional[int] = None, rng=None) -> PresentationProof:
    stored = state.credential_for(issuer)
    mode = NymMode(mode)
    proof = bbs.present(stored.issuer, stored.credential, disclose, scp, idx,
                        mode.presentation_mode, session_context, bound, rng)
    wallet_register_pseudonym(state, scp, idx, mode)
    state.pseudonym_ledger[(as_scope(scp).value, idx, mode)].last_used = _now(now)
    return proof


# -- relying party --------------------------------------------------------------

@dataclass(frozen=True)
class Policy:
    mode: NymMode = NymMode.HASHDH
    bound: Optional[int] = None
    required_disclosures: tuple[str, ...] = ()

    def __post_init__(self):
        if self.mode is NymMode.HMAC:
            raise InvalidInput("relying parties verify hashdh or dy pseudonyms")
        if self.mode is NymMode.DY and self.bound is None:
            raise InvalidInput("rate-limited policy needs a bound")
        if self.bound is not None and self.bound < 1:
            raise InvalidInput("bound must be at least 1")


@dataclass
class AccountRecord:
    label: str
    created_at: int
    last_seen: int


class AccountStatus(enum.Enum):
    NEW = "new account"
    RETURNING = "returning account"


@dataclass(frozen=True)
class AccountDecision:
    status: AccountStatus
    account_id: str
    record: AccountRecord
    disclosed: dict


@dataclass
class RelyingPartyState:
    scope: Scope
    issuer_public: IssuerPublicKey
    policy: Policy = field(default_factory=Policy)
    account_registry: dict[str, AccountRecord] = field(default_factory=dict)

    def to_bytes(self) -> bytes:
        w = Writer().text(self.scope.value)
        self.issuer_public.encode(w)
        w.u8(self.policy.mode).optional(self.policy.bound, Writer.u64)
        w.u32(len(self.policy.required_disclosures))
        for n in self.policy.required_disclosures:
            w.text(n)
        w.u32(len(self.account_registry))
        for key in sorted(self.account_registry):
            rec = self.account_registry[key]
            w.text(key).text(rec.label).u64(rec.created_at).u64(rec.last_seen)
        return frame(Record.RP_STATE, w.getvalue())

    @classmethod
    def from_bytes(cls, data: bytes) -> "RelyingPartyState":
        r = unframe(data, Record.RP_STATE)
        scope = Scope(r.text())
        issuer = IssuerPublicKey.decode(r)
        try:
            mode = NymMode(r.u8())
        except ValueError as exc:
            raise DecodeError("unknown policy mode") from exc
        bound = r.optional(Reader.u64)
        required = tuple(r.text() for _ in range(r.u32()))
        registry = {}
        for _ in range(r.u32()):
            key = r.text()
            registry[key] = AccountRecord(r.text(), r.u64(), r.u64())
        r.finish()
        return cls(scope, issuer, Policy(mode, bound, required), registry)

    def session_context(self) -> bytes:
        """Default channel-binding stand-in derived from the RP identity."""
        return default_session_context(self.scope)


def default_session_context(scope: Scope | str) -> bytes:
    return hashlib.sha256(b"EUDINYM-v1-context" + as_scope(scope).encode()).digest()


def _lookup(state: RelyingPartyState, proof: PresentationProof, session_context: bytes,
            now: Optional[int], label: Optional[str]) -> AccountDecision:
    policy = state.policy
    if proof.mode is not policy.mode.presentation_mode:
        raise PolicyViolation(f"policy requires {policy.mode.name.lower()} pseudonyms")
    verified = bbs.verify_presentation(state.issuer_public, proof, state.scope,
                                       policy.bound, session_context)
    missing = set(policy.required_disclosures) - set(verified.disclosed)
    if missing:
        raise PolicyViolation(f"missing required disclosures {sorted(missing)}")
    key = verified.nym.fingerprint()
    t = _now(now)
    record = state.account_registry.get(key)
    if record is not None:
        record.last_seen = t
        return AccountDecision(AccountStatus.RETURNING, key, record, verified.disclosed)
    record = AccountRecord(label or f"account-{len(state.account_registry) + 1}", t, t)
    state.account_registry[key] = record
    return AccountDecision(AccountStatus.NEW, key, record, verified.disclosed)


def rp_authenticate(state: RelyingPartyState, proof: PresentationProof,
                    session_context: bytes, now: Optional[int] = None,
                    label: Optional[str] = None) -> AccountDecision:
    return _lookup(state, proof, session_context, now, label)


def rp_recover_account(state: RelyingPartyState, proof: PresentationProof,
                       session_context: bytes, now: Optional[int] = None) -> AccountDecision:
    """Recovery is a login: a stable pseudonym finds the old account."""
    return _lookup(state, proof, session_context, now, None)
