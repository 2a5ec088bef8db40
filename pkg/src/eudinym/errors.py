"""Exception hierarchy.

Every error carries a stable numeric ``exit_code`` which the CLI uses as its
process exit status. Codes are unique per class and must never be reused.
"""

from __future__ import annotations


class EudinymError(Exception):
    exit_code = 1
    reason = "error"


# -- encoding / input validation ------------------------------------------

class DecodeError(EudinymError, ValueError):
    exit_code = 10
    reason = "decode-error"


class InvalidInput(EudinymError, ValueError):
    exit_code = 11
    reason = "invalid-input"


class DegenerateInput(EudinymError, ArithmeticError):
    """A PRF input that would map to an undefined or trivial output."""

    exit_code = 12
    reason = "degenerate-input"


class StatementMismatch(EudinymError, ValueError):
    """Prover was handed a witness that does not satisfy the statement."""

    exit_code = 13
    reason = "statement-mismatch"


class OpeningMismatch(EudinymError, TypeError):
    """Commitment kind and nonce form disagree."""

    exit_code = 14
    reason = "opening-kind-mismatch"


# -- verification ---------------------------------------------------------

class VerificationError(EudinymError):
    exit_code = 20
    reason = "invalid-proof"


class ScopeMismatch(VerificationError):
    exit_code = 21
    reason = "scope-mismatch"


class ContextMismatch(VerificationError):
    exit_code = 22
    reason = "context-mismatch"


class MissingRangeProof(VerificationError):
    exit_code = 23
    reason = "missing-range-proof"


class RangeViolation(VerificationError):
    exit_code = 24
    reason = "range-violation"


class PolicyViolation(VerificationError):
    exit_code = 25
    reason = "policy-violation"


class SeedDisclosure(EudinymError, ValueError):
    """Attempt to disclose the hidden seed (or device) slot."""

    exit_code = 26
    reason = "seed-disclosure"


# -- issuance / wallet ----------------------------------------------------

class SeedConflict(EudinymError):
    exit_code = 30
    reason = "seed-conflict"


class BadRequest(EudinymError):
    exit_code = 31
    reason = "bad-request"


class NoCredential(EudinymError):
    exit_code = 32
    reason = "no-credential"


class NoPendingEnrollment(EudinymError):
    exit_code = 33
    reason = "no-pending-enrollment"


# -- transfer / backup ----------------------------------------------------

class BindingMismatch(EudinymError):
    exit_code = 40
    reason = "binding-mismatch"


class AuthenticationFailure(EudinymError):
    exit_code = 41
    reason = "authentication-failure"


class WeakPassphrase(EudinymError, ValueError):
    exit_code = 42
    reason = "weak-passphrase"


class UnsupportedVersion(EudinymError):
    exit_code = 43
    reason = "unsupported-version"


# -- CLI state handling ---------------------------------------------------

class StateExists(EudinymError):
    exit_code = 50
    reason = "state-exists"


class StateMissing(EudinymError):
    exit_code = 51
    reason = "state-missing"


class MissingFile(EudinymError):
    exit_code = 52
    reason = "missing-file"


def all_error_classes() -> list[type[EudinymError]]:
    seen: list[type[EudinymError]] = []
    stack = [EudinymError]
    while stack:
        cls = stack.pop()
        seen.append(cls)
        stack.extend(cls.__subclasses__())
    return seen
