"""The implanted device: issues challenges, verifies tokens and runs recovery."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

from cryptography.hazmat.primitives import constant_time

from crypto import hmac_sha256
from energy import EnergyLedger, OpEvent
from errors import EnrollmentFailure, ImdSimError, ProtocolError
from keygen import KeyGenerator, Lineage
from pok import PokContainer
from .base import (
    Action,
    Entity,
    Frame,
    Rejected,
    ResetComplete,
    Send,
    SessionEstablished,
    Timer,
)
from .messages import (
    R_RESET,
    ImdChallenge,
    ResetChallenge,
    ResetResponse,
    ServiceRequest,
    TokenSubmit,
)
from .tokens import (
    U32,
    assemble_token,
    card_share,
    challenge_a_input,
    challenge_b_input,
    elapsed_ms,
    has_share,
    session_key,
    token_proof,
)

logger = logging.getLogger(__name__)


class ImdMode(enum.Enum):
    LISTENING = "listening"
    AWAIT_TOKEN = "await_token"
    REGISTRATION = "registration"
    RECOVERY_CHALLENGE = "recovery_challenge"


@dataclass
class Pending:
    t1: int
    sa: bytes
    sb: bytes
    id_p: int
    r: int
    cycle: int
    peer: str


@dataclass
class RecoveryState:
    next_k: int
    remaining: int
    total: int
    sent_at: int
    peer: str


class Imd(Entity):
    """IMD state machine.  Starts in Registration mode until provisioned."""

    def __init__(
        self,
        id_i: int,
        ts_ms: int = 5000,
        cache_size: int = 4,
        ledger: EnergyLedger | None = None,
        name: str = "imd",
    ) -> None:
        super().__init__()
        self._name = name
        self.id_i = id_i
        self.ts_ms = ts_ms
        self.cache_size = cache_size
        self.ledger = ledger if ledger is not None else EnergyLedger()
        self.key1: PokContainer | None = None
        self.key2: PokContainer | None = None
        self.iv: bytes | None = None
        self.gen_a: KeyGenerator | None = None
        self.gen_b: KeyGenerator | None = None
        self.mode = ImdMode.REGISTRATION
        self.pending: Pending | None = None
        self.recovery: RecoveryState | None = None
        self.session_key: bytes | None = None
        self.last_outcome = None
        self._epoch = 0
        self._peer = ""  # who asked for the exchange in progress

    @property
    def name(self) -> str:
        return self._name

    @property
    def cycle(self) -> int:
        if self.gen_a is None:
            raise ProtocolError("IMD is not provisioned")
        return self.gen_a.cycle

    def __repr__(self) -> str:
        cycle = self.gen_a.cycle if self.gen_a else None
        return f"Imd(id_i={self.id_i}, mode={self.mode.value}, cycle={cycle})"

    # ── Provisioning ──────────────────────────────────────────────────────

    def provision(self, key1: bytes, key2: bytes, iv: bytes) -> None:
        if self.mode is not ImdMode.REGISTRATION:
            raise EnrollmentFailure("IMD only accepts master keys in Registration mode")
        self.key1 = PokContainer(key1, label=f"imd{self.id_i}.key1")
        self.key2 = PokContainer(key2, label=f"imd{self.id_i}.key2")
        self.iv = bytes(iv)
        # The IMD never answers for an old cycle, so it keeps no cache.
        self.gen_a = KeyGenerator(self.key1, self.iv, Lineage.SA, cache_enabled=False)
        self.gen_b = KeyGenerator(self.key2, self.iv, Lineage.SB, cache_enabled=False)
        self.mode = ImdMode.LISTENING
        self.pending = None
        self.recovery = None
        self.emit("state", "provisioned cycle=1")

    def _clear_keys(self) -> None:
        for container in (self.key1, self.key2):
            if container is not None:
                container.tamper()
        self.key1 = self.key2 = None
        self.gen_a = self.gen_b = None
        self.iv = None

    # ── Accounting ────────────────────────────────────────────────────────

    def _cost(self, kind: str, amount: int = 1) -> None:
        self.ledger.record(OpEvent("imd", kind, amount))

    # ── Service request (steps i-ii) ──────────────────────────────────────

    def handle_request(self, msg: ServiceRequest, now: int, peer: str = "programmer"):
        if self.mode is ImdMode.REGISTRATION:
            raise ProtocolError("IMD has no master keys")
        if self.mode is ImdMode.RECOVERY_CHALLENGE:
            self._finish(Rejected("recovery_aborted"))
        self._peer = peer
        if msg.r == R_RESET:
            return self._start_recovery(msg, now, peer)
        if self.mode is ImdMode.AWAIT_TOKEN:
            self.emit("state", "pending request overwritten")

        sa = self.gen_a.current_key().key
        sb = self.gen_b.current_key().key
        self._cost("generator")
        t1 = now & U32
        challenge = ImdChallenge(
            id_i=self.id_i,
            i=self.cycle,
            t1=t1,
            hmac_a=hmac_sha256(sa, challenge_a_input(t1)),
            hmac_b=hmac_sha256(sb, challenge_b_input(t1, msg.id_p, self.id_i)),
        )
        self._cost("hmac", 2)
        self.pending = Pending(t1, sa, sb, msg.id_p, msg.r, self.cycle, peer)
        self.mode = ImdMode.AWAIT_TOKEN
        self.emit("state", f"challenge issued cycle={self.cycle} t1={t1}")
        return challenge

    # ── Session establishment (step vii) ──────────────────────────────────

    def verify_token(self, msg: TokenSubmit, now: int):
        if self.mode is not ImdMode.AWAIT_TOKEN or self.pending is None:
            return self._reject_quietly("not_awaiting_token")
        p = self.pending
        self.pending = None
        self.mode = ImdMode.LISTENING
        if elapsed_ms(now, p.t1) > self.ts_ms:
            return self._finish(Rejected("timeout"))

        card_resp = card_share(p.sa, p.t1, p.r)
        has_resp = has_share(p.sb, p.t1, p.id_p, self.id_i, p.r)
        self._cost("hmac", 2)
        expected = token_proof(p.t1, assemble_token(card_resp, has_resp))
        self._cost("sha256")
        if not constant_time.bytes_eq(expected, msg.proof):
            return self._finish(Rejected("bad_proof"))

        skey = session_key(card_resp, has_resp)
        self._cost("sha256", 2)
        self.gen_a.advance()
        self.gen_b.advance()
        self.session_key = skey
        return self._finish(SessionEstablished(skey, p.cycle, p.r, p.id_p))

    # ── Recovery mode ─────────────────────────────────────────────────────

    def _start_recovery(self, msg: ServiceRequest, now: int, peer: str) -> ResetChallenge:
        self.pending = None
        total = 2 * self.cache_size
        self.recovery = RecoveryState(self.cycle, total, total, now, peer)
        self.mode = ImdMode.RECOVERY_CHALLENGE
        self.emit("state", f"recovery requested by id_p={msg.id_p}, {total} challenges")
        return ResetChallenge(self.cycle)

    def verify_reset_response(self, msg: ResetResponse, now: int):
        rec = self.recovery
        if self.mode is not ImdMode.RECOVERY_CHALLENGE or rec is None:
            return self._reject_quietly("not_in_recovery")
        if elapsed_ms(now, rec.sent_at) > self.ts_ms:
            return self._finish(Rejected("timeout"))
        expected = self.gen_b.derive_key(rec.next_k).key
        self._cost("generator")
        if not constant_time.bytes_eq(expected, msg.sb_k):
            return self._finish(Rejected(f"bad_reset_response k={rec.next_k}"))
        rec.remaining -= 1
        if rec.remaining == 0:
            self._clear_keys()
            self.recovery = None
            self.mode = ImdMode.REGISTRATION
            return self._finish(ResetComplete(rec.total), keep_mode=True)
        rec.next_k += 1
        rec.sent_at = now
        return ResetChallenge(rec.next_k)

    # ── Outcomes ──────────────────────────────────────────────────────────

    def _finish(self, outcome, keep_mode: bool = False):
        if not keep_mode:
            self.mode = ImdMode.LISTENING
            self.recovery = None
        self.last_outcome = outcome
        if isinstance(outcome, SessionEstablished):
            self.emit("verdict", f"session_established cycle={outcome.cycle}", outcome, self._peer)
        elif isinstance(outcome, ResetComplete):
            self.emit("verdict", f"reset_complete challenges={outcome.challenges}", outcome, self._peer)
        else:
            logger.info("IMD %d rejected: %s", self.id_i, outcome.reason)
            self.emit("verdict", f"rejected:{outcome.reason}", outcome, self._peer)
        return outcome

    def _reject_quietly(self, reason: str) -> Rejected:
        # Stray frames do not disturb an exchange in progress.
        outcome = Rejected(reason)
        self.last_outcome = outcome
        self.emit("discard", f"rejected:{reason}", outcome)
        return outcome

    # ── Wire dispatch ─────────────────────────────────────────────────────

    def _reply(self, dst: str, msg) -> list[Action]:
        # Every challenge re-arms the expiry timer; older timers go stale.
        self._cost("tx", msg.bits)
        self._epoch += 1
        return [Send(dst, msg), Timer(self.ts_ms + 1, f"expire:{self._epoch}")]

    def on_frame(self, frame: Frame, now: int) -> list[Action]:
        # The IMD only sees raw bits; the frame label is not trusted.
        self._cost("rx", frame.bits)
        raw = frame.payload
        try:
            if len(raw) == ServiceRequest.LAYOUT.size:
                reply = self.handle_request(ServiceRequest.decode(raw), now, frame.src)
                return self._reply(frame.src, reply)
            if len(raw) == TokenSubmit.LAYOUT.size:
                if self.mode is ImdMode.RECOVERY_CHALLENGE:
                    reply = self.verify_reset_response(ResetResponse.decode(raw), now)
                    if isinstance(reply, ResetChallenge):
                        return self._reply(frame.src, reply)
                    return []
                self.verify_token(TokenSubmit.decode(raw), now)
                return []
            raise ProtocolError(f"unexpected {len(raw)}-byte frame")
        except ImdSimError as exc:
            self.emit("error", f"{exc.code}: {exc}")
            return []

    def on_timer(self, tag: str, now: int) -> list[Action]:
        if tag != f"expire:{self._epoch}":
            return []
        if self.mode is ImdMode.AWAIT_TOKEN:
            self.pending = None
            self._finish(Rejected("timeout"))
        elif self.mode is ImdMode.RECOVERY_CHALLENGE:
            self._finish(Rejected("timeout"))
        return []
