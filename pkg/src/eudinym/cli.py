"""``eudinym`` command-line driver.

Each actor keeps its state in a single snapshot file inside ``--state-dir``;
protocol messages travel as files.  Exit status is 0 on success and the
error class's ``exit_code`` otherwise (2 for usage errors).
"""

from __future__ import annotations

import argparse
import sys
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Optional

from filelock import FileLock

from . import actors, transfer, vectors
from .actors import (
    IssuanceResponse,
    IssuerState,
    NymMode,
    Policy,
    RelyingPartyState,
    WalletState,
    write_atomic,
)
from .bbs import BlindIssuanceRequest, IssuerPublicKey, PresentationProof
from .codec import Record, peek_record_type
from .errors import EudinymError, InvalidInput, MissingFile, StateExists, StateMissing
from .prf import Granularity, Scope, epoch_index

STATE_FILES = {"issuer": "issuer.state", "wallet": "wallet.state", "rp": "rp.state"}
TRANSFER_KEY_FILE = "transfer.key"


# -- file helpers -----------------------------------------------------------------

def _read(path: str | Path) -> bytes:
    try:
        return Path(path).read_bytes()
    except FileNotFoundError:
        raise MissingFile(f"no such file: {path}") from None


def _state_path(args, role: str) -> Path:
    return Path(args.state_dir) / STATE_FILES[role]


@contextmanager
def _locked(path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    with FileLock(str(path) + ".lock"):
        yield


def _load(args, role: str, cls):
    path = _state_path(args, role)
    if not path.exists():
        raise StateMissing(f"no {role} state in {args.state_dir}; run '{role} init' first")
    return cls.from_bytes(path.read_bytes())


@contextmanager
def _mutate(args, role: str, cls):
    """Load, yield, and atomically write back the actor state under a lock."""
    path = _state_path(args, role)
    with _locked(path):
        state = _load(args, role, cls)
        yield state
        write_atomic(path, state.to_bytes())


def _init(args, role: str, state) -> Path:
    path = _state_path(args, role)
    with _locked(path):
        if path.exists() and not args.force:
            raise StateExists(f"{path} exists; pass --force to overwrite")
        write_atomic(path, state.to_bytes())
    return path


def _write_out(path: str, data: bytes) -> None:
    write_atomic(Path(path), data)


def _emit(args, text: str, obj=None) -> None:
    print(text)
    if args.format == "text" and obj is not None:
        print(describe(obj))


def _context(args, scope: Scope) -> bytes:
    if args.context is None:
        return actors.default_session_context(scope)
    try:
        ctx = bytes.fromhex(args.context)
    except ValueError:
        raise InvalidInput("--context must be hex") from None
    if not ctx:
        print("warning: empty session context, presentation is not channel bound", file=sys.stderr)
    return ctx


def _index(args) -> int:
    if args.epoch:
        now = args.time if args.time is not None else int(time.time())
        return epoch_index(now, Granularity(args.epoch))
    return args.index


def _mode(name: str) -> NymMode:
    return NymMode[name.upper()]


# -- annotated text ---------------------------------------------------------------

def describe(obj) -> str:
    """Human-readable dump.  Never prints seed, device or nonce material."""
    lines = [f"# {type(obj).__name__}"]
    if isinstance(obj, IssuerPublicKey):
        lines += [f"w: {obj.w.to_bytes().hex()}", f"attributes: {', '.join(obj.attribute_names)}"]
    elif isinstance(obj, IssuerState):
        lines += [f"attributes: {', '.join(obj.public.attribute_names)}",
                  f"enrolled holders: {len(obj.enrollment_ledger)}",
                  f"issuances: {len(obj.issuance_log)}"]
        lines += [f"  {h}: {fp}" for h, fp in sorted(obj.enrollment_ledger.items())]
    elif isinstance(obj, WalletState):
        lines += [f"credentials: {len(obj.credentials)}",
                  f"pending enrollment: {'yes' if obj.pending else 'no'}",
                  f"pseudonyms: {len(obj.pseudonym_ledger)}"]
        for (scope, idx, mode), e in sorted(obj.pseudonym_ledger.items()):
            lines.append(f"  {scope} idx={idx} {mode.name.lower()} label={e.label!r} "
                         f"nym={e.nym.fingerprint()[:16]}")
    elif isinstance(obj, RelyingPartyState):
        p = obj.policy
        lines += [f"scope: {obj.scope}", f"mode: {p.mode.name.lower()}", f"bound: {p.bound}",
                  f"required: {', '.join(p.required_disclosures) or '-'}",
                  f"accounts: {len(obj.account_registry)}"]
        lines += [f"  {k[:16]} {r.label} created={r.created_at} last_seen={r.last_seen}"
                  for k, r in sorted(obj.account_registry.items())]
    elif isinstance(obj, BlindIssuanceRequest):
        lines += [f"pnc: {obj.pnc.value.to_bytes().hex()}",
                  f"device_commitment: {obj.device_commitment.to_bytes().hex()}",
                  f"enrollment_fingerprint: {obj.fingerprint_hex()}",
                  f"proof responses: {len(obj.opening_proof.responses)}"]
    elif isinstance(obj, IssuanceResponse):
        lines += [f"A: {obj.signature.a.to_bytes().hex()}",
                  f"attributes: {dict((k, v.decode(errors='replace')) for k, v in obj.signature.attributes.items())}"]
    elif isinstance(obj, PresentationProof):
        lines += [f"mode: {obj.mode.name.lower()}", f"scope: {obj.scope}",
                  f"session_context: {obj.session_context.hex()}", f"index: {obj.index}",
                  f"disclosed: {dict((k, v.decode(errors='replace')) for k, v in obj.disclosed.items())}",
                  f"nym: {obj.nym.value_bytes().hex() if obj.nym else '-'}",
                  f"range bound: {obj.range_proof.bound if obj.range_proof else '-'}"]
    elif isinstance(obj, transfer.TransferPackage):
        lines += [f"ephemeral_public: {obj.ephemeral_public.hex()}",
                  f"target_binding: {obj.target_binding.hex()}",
                  f"ciphertext: {len(obj.ciphertext)} bytes"]
    elif isinstance(obj, transfer.BackupBlob):
        lines += [f"salt: {obj.salt.hex()}", f"scrypt: n={obj.scrypt_n} r={obj.scrypt_r} p={obj.scrypt_p}",
                  f"ciphertext: {len(obj.ciphertext)} bytes"]
    return "\n".join(lines)


_DECODERS = {
    Record.ISSUER_PUBLIC: IssuerPublicKey,
    Record.BLIND_REQUEST: BlindIssuanceRequest,
    Record.ISSUANCE_RESPONSE: IssuanceResponse,
    Record.PRESENTATION: PresentationProof,
    Record.ISSUER_STATE: IssuerState,
    Record.WALLET_STATE: WalletState,
    Record.RP_STATE: RelyingPartyState,
    Record.TRANSFER_PACKAGE: transfer.TransferPackage,
    Record.BACKUP: transfer.BackupBlob,
}


# -- commands -------------------------------------------------------------------

def cmd_issuer_init(args) -> None:
    names = [n for n in args.attributes.split(",") if n]
    state = IssuerState.create(names)
    path = _init(args, "issuer", state)
    if args.public_out:
        _write_out(args.public_out, state.public.to_bytes())
    _emit(args, f"issuer initialized: {path}", state)


def cmd_issuer_pubkey(args) -> None:
    state = _load(args, "issuer", IssuerState)
    _write_out(args.out, state.public.to_bytes())
    _emit(args, f"issuer public key written to {args.out}", state.public)


def cmd_enroll(args) -> None:
    request = BlindIssuanceRequest.from_bytes(_read(args.request))
    attrs = {}
    for item in args.attr:
        name, sep, value = item.partition("=")
        if not sep:
            raise InvalidInput(f"--attr expects name=value, got {item!r}")
        attrs[name] = value
    with _mutate(args, "issuer", IssuerState) as state:
        response = actors.issuer_enroll(state, args.holder_id, request, attrs)
    _write_out(args.out, response.to_bytes())
    _emit(args, f"issued credential for {args.holder_id}", response)


def cmd_wallet_init(args) -> None:
    state = WalletState.create()
    path = _init(args, "wallet", state)
    _emit(args, f"wallet initialized: {path}", state)


def cmd_wallet_request(args) -> None:
    issuer = IssuerPublicKey.from_bytes(_read(args.issuer_key))
    with _mutate(args, "wallet", WalletState) as state:
        request = actors.wallet_enrollment_request(state, issuer)
    _write_out(args.out, request.to_bytes())
    _emit(args, f"enrollment request written to {args.out}", request)


def cmd_wallet_accept(args) -> None:
    response = IssuanceResponse.from_bytes(_read(args.response))
    with _mutate(args, "wallet", WalletState) as state:
        actors.wallet_accept_issuance(state, response)
    _emit(args, "credential stored")


def cmd_nym(args) -> None:
    idx = _index(args)
    with _mutate(args, "wallet", WalletState) as state:
        nym = actors.wallet_register_pseudonym(state, Scope(args.scope), idx, _mode(args.mode), args.label)
    _emit(args, f"nym {nym.fingerprint()} scope={args.scope} idx={idx} mode={args.mode}")


def cmd_present(args) -> None:
    scope = Scope(args.scope)
    idx = _index(args)
    ctx = _context(args, scope)
    disclose = [n for n in (args.disclose or "").split(",") if n]
    with _mutate(args, "wallet", WalletState) as state:
        proof = actors.wallet_present(state, scope, idx, _mode(args.mode), disclose, ctx, args.bound)
    _write_out(args.out, proof.to_bytes())
    _emit(args, f"presentation written to {args.out}", proof)


def cmd_rp_init(args) -> None:
    issuer = IssuerPublicKey.from_bytes(_read(args.issuer_key))
    required = tuple(n for n in (args.require or "").split(",") if n)
    policy = Policy(_mode(args.mode), args.bound, required)
    state = RelyingPartyState(Scope(args.scope), issuer, policy)
    path = _init(args, "rp", state)
    _emit(args, f"relying party initialized: {path}", state)


def cmd_verify(args) -> None:
    proof = PresentationProof.from_bytes(_read(args.proof))
    with _mutate(args, "rp", RelyingPartyState) as state:
        ctx = _context(args, state.scope)
        flow = actors.rp_recover_account if args.recover else actors.rp_authenticate
        decision = flow(state, proof, ctx)
    disclosed = ", ".join(f"{k}={v.decode(errors='replace')}" for k, v in sorted(decision.disclosed.items()))
    _emit(args, f"{decision.status.value} {decision.account_id} ({decision.record.label})"
          + (f" disclosed: {disclosed}" if disclosed else ""))


def cmd_transfer_key(args) -> None:
    key = transfer.TransferKeyPair.generate()
    path = Path(args.state_dir) / TRANSFER_KEY_FILE
    path.parent.mkdir(parents=True, exist_ok=True)
    if path.exists() and not args.force:
        raise StateExists(f"{path} exists; pass --force to overwrite")
    write_atomic(path, key.to_bytes())
    _write_out(args.out, key.public)
    _emit(args, f"transfer public key written to {args.out}")


def cmd_transfer_export(args) -> None:
    state = _load(args, "wallet", WalletState)
    package = transfer.export_to_target(state, _read(args.target_key))
    _write_out(args.out, package.to_bytes())
    _emit(args, f"transfer package written to {args.out}", package)


def cmd_transfer_import(args) -> None:
    package = transfer.TransferPackage.from_bytes(_read(args.package))
    key_path = Path(args.state_dir) / TRANSFER_KEY_FILE
    if not key_path.exists():
        raise StateMissing(f"no transfer key in {args.state_dir}; run 'wallet transfer-key' first")
    key = transfer.TransferKeyPair.from_bytes(key_path.read_bytes())
    state = transfer.import_from_package(package, key)
    _init(args, "wallet", state)
    _emit(args, f"wallet imported with {len(state.pseudonym_ledger)} pseudonyms; re-enroll to present")


def _passphrase(args) -> str:
    return _read(args.passphrase_file).decode("utf-8").rstrip("\r\n")


def cmd_backup(args) -> None:
    state = _load(args, "wallet", WalletState)
    blob = transfer.backup(state, _passphrase(args))
    _write_out(args.out, blob.to_bytes())
    _emit(args, f"backup written to {args.out}", blob)


def cmd_restore(args) -> None:
    blob = transfer.BackupBlob.from_bytes(_read(args.blob))
    state = transfer.restore(blob, _passphrase(args))
    _init(args, "wallet", state)
    _emit(args, f"wallet restored with {len(state.pseudonym_ledger)} pseudonyms; re-enroll to present")


def cmd_vectors(args) -> None:
    data = vectors.dumps(args.suite)
    if args.out == "-":
        sys.stdout.write(data.decode())
    else:
        _write_out(args.out, data)
        print(f"{args.suite} vectors written to {args.out}")


def cmd_inspect(args) -> None:
    data = _read(args.file)
    cls = _DECODERS.get(peek_record_type(data))
    if cls is None:
        raise InvalidInput("file type cannot be inspected")
    print(describe(cls.from_bytes(data)))


# -- parser ---------------------------------------------------------------------

def _index_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--index", type=int, default=0, help="pseudonym index (0 = unique per scope)")
    g.add_argument("--epoch", choices=[g.value for g in Granularity], help="derive index from time")
    p.add_argument("--time", type=int, help="unix time for --epoch (default: now)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eudinym", description=__doc__.splitlines()[0])
    parser.add_argument("--state-dir", default=".", help="directory holding the actor state")
    parser.add_argument("--format", choices=["binary", "text"], default="binary",
                        help="'text' also prints an annotated dump of what was produced")
    roles = parser.add_subparsers(dest="role", required=True)

    issuer = roles.add_parser("issuer").add_subparsers(dest="command", required=True)
    p = issuer.add_parser("init")
    p.add_argument("--attributes", default="age_over_18,expiry")
    p.add_argument("--public-out")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_issuer_init)
    p = issuer.add_parser("pubkey")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_issuer_pubkey)
    p = issuer.add_parser("enroll")
    p.add_argument("--holder-id", required=True)
    p.add_argument("--request", required=True)
    p.add_argument("--attr", action="append", default=[], metavar="NAME=VALUE")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_enroll)

    wallet = roles.add_parser("wallet").add_subparsers(dest="command", required=True)
    p = wallet.add_parser("init")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_wallet_init)
    p = wallet.add_parser("request")
    p.add_argument("--issuer-key", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_wallet_request)
    p = wallet.add_parser("accept")
    p.add_argument("--response", required=True)
    p.set_defaults(func=cmd_wallet_accept)
    p = wallet.add_parser("nym")
    p.add_argument("--scope", required=True)
    p.add_argument("--mode", choices=["hmac", "hashdh", "dy"], default="hashdh")
    p.add_argument("--label", default="")
    _index_flags(p)
    p.set_defaults(func=cmd_nym)
    p = wallet.add_parser("present")
    p.add_argument("--scope", required=True)
    p.add_argument("--mode", choices=["hashdh", "dy"], default="hashdh")
    p.add_argument("--bound", type=int)
    p.add_argument("--disclose", help="comma-separated attribute names")
    p.add_argument("--context", help="session context as hex (default: derived from scope)")
    p.add_argument("--out", required=True)
    _index_flags(p)
    p.set_defaults(func=cmd_present)
    p = wallet.add_parser("transfer-key")
    p.add_argument("--out", required=True)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_transfer_key)
    p = wallet.add_parser("export")
    p.add_argument("--target-key", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_transfer_export)
    p = wallet.add_parser("import")
    p.add_argument("--package", required=True)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_transfer_import)
    p = wallet.add_parser("backup")
    p.add_argument("--passphrase-file", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_backup)
    p = wallet.add_parser("restore")
    p.add_argument("--blob", required=True)
    p.add_argument("--passphrase-file", required=True)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_restore)

    rp = roles.add_parser("rp").add_subparsers(dest="command", required=True)
    p = rp.add_parser("init")
    p.add_argument("--scope", required=True)
    p.add_argument("--issuer-key", required=True)
    p.add_argument("--mode", choices=["hashdh", "dy"], default="hashdh")
    p.add_argument("--bound", type=int)
    p.add_argument("--require", help="comma-separated attributes that must be disclosed")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_rp_init)
    p = rp.add_parser("verify")
    p.add_argument("--proof", required=True)
    p.add_argument("--context", help="session context as hex (default: derived from scope)")
    p.add_argument("--recover", action="store_true", help="run the account recovery flow")
    p.set_defaults(func=cmd_verify)

    p = roles.add_parser("vectors")
    p.add_argument("--suite", choices=vectors.SUITES, required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_vectors)

    p = roles.add_parser("inspect")
    p.add_argument("file")
    p.set_defaults(func=cmd_inspect)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except EudinymError as exc:
        print(f"error [{exc.reason}]: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
