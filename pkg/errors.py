"""Exception hierarchy shared by every module of the simulator."""

from __future__ import annotations


class ImdSimError(Exception):
    """Root of all simulator errors.  ``code`` is the short name used in traces."""

    code = "error"


# ── crypto ────────────────────────────────────────────────────────────────


class InvalidKeyLength(ImdSimError):
    code = "invalid_key_length"


class InvalidKey(ImdSimError):
    code = "invalid_key"


class KeyDestroyed(ImdSimError):
    code = "key_destroyed"


# ── pok ───────────────────────────────────────────────────────────────────


class InvalidSecret(ImdSimError):
    code = "invalid_secret"


class OtpFused(ImdSimError):
    code = "otp_fused"


# ── keygen ────────────────────────────────────────────────────────────────


class InvalidCycle(ImdSimError):
    code = "invalid_cycle"


class DesyncError(ImdSimError):
    code = "desync"


# ── fuzzy commitment ──────────────────────────────────────────────────────


class DecodeFailure(ImdSimError):
    code = "decode_failure"


class InvalidParameter(ImdSimError):
    code = "invalid_parameter"


# ── protocol ──────────────────────────────────────────────────────────────


class EnrollmentFailure(ImdSimError):
    code = "enrollment_failure"


class AuthRejected(ImdSimError):
    code = "auth_rejected"


class StaleTimestamp(AuthRejected):
    code = "stale_timestamp"


class BadDoctorIdentity(AuthRejected):
    code = "bad_doctor_identity"


class PolicyDenied(AuthRejected):
    code = "policy_denied"


class CacheExhausted(ImdSimError):
    code = "cache_exhausted"


class ProtocolError(ImdSimError):
    """Malformed frame, or a frame the receiver cannot accept in its current mode."""

    code = "protocol_error"


# ── simnet / energy / config ──────────────────────────────────────────────


class ScenarioStalled(ImdSimError):
    code = "scenario_stalled"


class ScriptError(ImdSimError):
    code = "script_error"


class LedgerError(ImdSimError):
    code = "ledger_error"


class ConfigError(ImdSimError):
    code = "config_error"


# Reject notices on the programmer links carry a numeric code.
REJECT_CODES: dict[int, type[ImdSimError]] = {
    1: AuthRejected,
    2: StaleTimestamp,
    3: BadDoctorIdentity,
    4: PolicyDenied,
    5: DesyncError,
    6: CacheExhausted,
    7: KeyDestroyed,
    8: ProtocolError,
}
_CODE_OF: dict[type[ImdSimError], int] = {cls: num for num, cls in REJECT_CODES.items()}


def reject_code(exc: ImdSimError) -> int:
    """Numeric wire code for *exc* (falls back to its nearest registered base)."""
    for cls in type(exc).__mro__:
        if cls in _CODE_OF:
            return _CODE_OF[cls]
    return _CODE_OF[ProtocolError]


def error_for_code(num: int) -> type[ImdSimError]:
    return REJECT_CODES.get(num, ProtocolError)
