"""Moving a wallet's seed to another wallet instance.

Two paths: an online export encrypted to a known target key (ephemeral X25519,
HKDF-SHA256, ChaCha20-Poly1305) and an offline passphrase backup (scrypt,
ChaCha20-Poly1305).  Both carry only the seed and the pseudonym ledger's
labels; credentials and their nonces stay behind, and the receiving wallet
re-enrolls under the same seed.
"""

from __future__ import annotations

import hashlib
import secrets
from dataclasses import dataclass, field

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives import hashes, serialization
from cryptography.hazmat.primitives.asymmetric.x25519 import X25519PrivateKey, X25519PublicKey
from cryptography.hazmat.primitives.ciphers.aead import ChaCha20Poly1305
from cryptography.hazmat.primitives.kdf.hkdf import HKDF

from .actors import LedgerEntry, NymMode, WalletState, derive_nym
from .codec import MAGIC, VERSION, Reader, Record, Writer, frame, unframe
from .commitments import PseudonymSeed
from .errors import (
    AuthenticationFailure,
    BindingMismatch,
    DecodeError,
    InvalidInput,
    WeakPassphrase,
)
from .groups import random_scalar

KEY_LEN = 32
AEAD_NONCE_LEN = 12
SALT_LEN = 16
MIN_PASSPHRASE = 8

DEFAULT_SCRYPT_N = 1 << 15
SCRYPT_R = 8
SCRYPT_P = 1
MAX_SCRYPT_N = 1 << 20

_RAW = dict(encoding=serialization.Encoding.Raw, format=serialization.PublicFormat.Raw)


def _wallet_payload(wallet: WalletState) -> bytes:
    w = Writer().raw(wallet.seed.secret)
    w.u32(len(wallet.pseudonym_ledger))
    for (scope, idx, mode) in sorted(wallet.pseudonym_ledger):
        w.text(scope).u64(idx).u8(mode).text(wallet.pseudonym_ledger[(scope, idx, mode)].label)
    return w.getvalue()


def _wallet_from_payload(payload: bytes, rng=None) -> WalletState:
    r = Reader(payload)
    seed = PseudonymSeed(r.raw(32))
    # the device scalar is per device and never moves
    wallet = WalletState(seed, random_scalar(rng))
    for _ in range(r.u32()):
        scope, idx, mode, label = r.text(), r.u64(), NymMode(r.u8()), r.text()
        wallet.pseudonym_ledger[(scope, idx, mode)] = LedgerEntry(label, derive_nym(seed, scope, idx, mode))
    r.finish()
    return wallet


# -- online transfer ------------------------------------------------------------

@dataclass(frozen=True)
class TransferKeyPair:
    """Key-agreement key of the receiving wallet."""

    private: bytes = field(repr=False)

    @classmethod
    def generate(cls) -> "TransferKeyPair":
        return cls(X25519PrivateKey.generate().private_bytes(
            serialization.Encoding.Raw, serialization.PrivateFormat.Raw,
            serialization.NoEncryption()))

    @property
    def public(self) -> bytes:
        return X25519PrivateKey.from_private_bytes(self.private).public_key().public_bytes(**_RAW)

    def to_bytes(self) -> bytes:
        return frame(Record.TRANSFER_KEY, self.private)

    @classmethod
    def from_bytes(cls, data: bytes) -> "TransferKeyPair":
        r = unframe(data, Record.TRANSFER_KEY)
        key = r.raw(KEY_LEN)
        r.finish()
        return cls(key)


def target_binding(target_public: bytes) -> bytes:
    return hashlib.sha256(b"EUDINYM-v1-transfer-target" + target_public).digest()


@dataclass(frozen=True)
class TransferPackage:
    ephemeral_public: bytes
    target_binding: bytes
    nonce: bytes
    ciphertext: bytes
    version: int = VERSION

    def header(self) -> bytes:
        return MAGIC + bytes([self.version, Record.TRANSFER_PACKAGE]) + self.ephemeral_public + self.target_binding

    def to_bytes(self) -> bytes:
        body = Writer().raw(self.ephemeral_public).raw(self.target_binding).raw(self.nonce)
        return frame(Record.TRANSFER_PACKAGE, body.blob(self.ciphertext).getvalue())

    @classmethod
    def from_bytes(cls, data: bytes) -> "TransferPackage":
        r = unframe(data, Record.TRANSFER_PACKAGE)
        pkg = cls(r.raw(KEY_LEN), r.raw(32), r.raw(AEAD_NONCE_LEN), r.blob())
        r.finish()
        return pkg


def _shared_key(private: X25519PrivateKey, peer: bytes, binding: bytes) -> bytes:
    secret = private.exchange(X25519PublicKey.from_public_bytes(peer))
    return HKDF(hashes.SHA256(), KEY_LEN, salt=binding, info=b"EUDINYM-v1-transfer").derive(secret)


def export_to_target(wallet: WalletState, target_public: bytes) -> TransferPackage:
    if not isinstance(target_public, (bytes, bytearray)) or len(target_public) != KEY_LEN:
        raise InvalidInput("target key must be a 32-byte X25519 public key")
    target_public = bytes(target_public)
    try:
        X25519PublicKey.from_public_bytes(target_public)
    except ValueError as exc:
        raise InvalidInput("invalid target key") from exc
    ephemeral = X25519PrivateKey.generate()
    eph_pub = ephemeral.public_key().public_bytes(**_RAW)
    binding = target_binding(target_public)
    key = _shared_key(ephemeral, target_public, binding)
    nonce = secrets.token_bytes(AEAD_NONCE_LEN)
    pkg = TransferPackage(eph_pub, binding, nonce, b"")
    ct = ChaCha20Poly1305(key).encrypt(nonce, _wallet_payload(wallet), pkg.header())
    return TransferPackage(eph_pub, binding, nonce, ct)


def import_from_package(package: TransferPackage, target: TransferKeyPair, rng=None) -> WalletState:
    if package.target_binding != target_binding(target.public):
        raise BindingMismatch("package was exported for a different target key")
    private = X25519PrivateKey.from_private_bytes(target.private)
    try:
        key = _shared_key(private, package.ephemeral_public, package.target_binding)
        payload = ChaCha20Poly1305(key).decrypt(package.nonce, package.ciphertext, package.header())
    except (InvalidTag, ValueError) as exc:
        raise AuthenticationFailure("transfer package failed authentication") from exc
    return _wallet_from_payload(payload, rng)


# -- passphrase backup ----------------------------------------------------------

@dataclass(frozen=True)
class BackupBlob:
    salt: bytes
    scrypt_n: int
    scrypt_r: int
    scrypt_p: int
    nonce: bytes
    ciphertext: bytes
    version: int = VERSION

    def header(self) -> bytes:
        w = Writer().raw(MAGIC).u8(self.version).u8(Record.BACKUP).raw(self.salt)
        return w.u32(self.scrypt_n).u32(self.scrypt_r).u32(self.scrypt_p).getvalue()

    def to_bytes(self) -> bytes:
        w = Writer().raw(self.salt).u32(self.scrypt_n).u32(self.scrypt_r).u32(self.scrypt_p)
        return frame(Record.BACKUP, w.raw(self.nonce).blob(self.ciphertext).getvalue())

    @classmethod
    def from_bytes(cls, data: bytes) -> "BackupBlob":
        r = unframe(data, Record.BACKUP)
        blob = cls(r.raw(SALT_LEN), r.u32(), r.u32(), r.u32(), r.raw(AEAD_NONCE_LEN), r.blob())
        r.finish()
        return blob


def _check_passphrase(passphrase: str) -> bytes:
    if len(passphrase) < MIN_PASSPHRASE:
        raise WeakPassphrase(f"passphrase needs at least {MIN_PASSPHRASE} characters")
    return passphrase.encode("utf-8")


def _kdf(passphrase: bytes, salt: bytes, n: int, r: int, p: int) -> bytes:
    if not (2 <= n <= MAX_SCRYPT_N and n & (n - 1) == 0 and 1 <= r <= 32 and 1 <= p <= 16):
        raise DecodeError("backup KDF parameters out of range")
    return hashlib.scrypt(passphrase, salt=salt, n=n, r=r, p=p, dklen=KEY_LEN,
                          maxmem=256 * r * n + (1 << 20))


def backup(wallet: WalletState, passphrase: str, scrypt_n: int = DEFAULT_SCRYPT_N) -> BackupBlob:
    pw = _check_passphrase(passphrase)
    salt = secrets.token_bytes(SALT_LEN)
    nonce = secrets.token_bytes(AEAD_NONCE_LEN)
    blob = BackupBlob(salt, scrypt_n, SCRYPT_R, SCRYPT_P, nonce, b"")
    key = _kdf(pw, salt, scrypt_n, SCRYPT_R, SCRYPT_P)
    ct = ChaCha20Poly1305(key).encrypt(nonce, _wallet_payload(wallet), blob.header())
    return BackupBlob(salt, scrypt_n, SCRYPT_R, SCRYPT_P, nonce, ct)


def restore(blob: BackupBlob, passphrase: str, rng=None) -> WalletState:
    key = _kdf(passphrase.encode("utf-8"), blob.salt, blob.scrypt_n, blob.scrypt_r, blob.scrypt_p)
    try:
        payload = ChaCha20Poly1305(key).decrypt(blob.nonce, blob.ciphertext, blob.header())
    except InvalidTag as exc:
        raise AuthenticationFailure("wrong passphrase or corrupted backup") from exc
    return _wallet_from_payload(payload, rng)
