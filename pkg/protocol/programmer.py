"""The clinician's programmer: drives normal, emergent and recovery flows.

The programmer is the only entity that talks to all the others.  It relays
the IMD's challenge to the patient card (contact) and to the HAS (the
doctor's authenticated pipe), assembles the token from the two shares and
submits its proof over the air.  The final verdict belongs to the IMD; the
programmer only reports a verdict when it has to give up on a flow itself.
"""

from __future__ import annotations

import enum
import logging
from collections.abc import Callable
from dataclasses import dataclass

from crypto import hmac_verify
from errors import DecodeFailure, ImdSimError, ProtocolError, error_for_code
from fuzzycommit import IrisCode, unlock
from .base import Action, Entity, Frame, Rejected, Send, Timer
from .doctor_card import DoctorCard
from .emergency import CacheItem, decrypt_sb
from .messages import (
    FIRST_AIDER,
    NO_UMAC,
    R_READ,
    R_RESET,
    CardAuthRequest,
    CardAuthResponse,
    EmergentCardRequest,
    EmergentCardResponse,
    HasAuthRequest,
    HasAuthResponse,
    HasResetRequest,
    HasResetResponse,
    ImdChallenge,
    RejectNotice,
    ResetChallenge,
    ResetResponse,
    ServiceRequest,
    TokenSubmit,
    decode_frame,
)
from .patient_card import PatientCard
from .tokens import assemble_token, challenge_b_input, has_share, session_key, token_proof

logger = logging.getLogger(__name__)

# Answers a reset challenge for counter k without the HAS, or None if it cannot.
ResetOracle = Callable[[int], bytes | None]


class ProgrammerMode(enum.Enum):
    IDLE = "idle"
    NORMAL = "normal"
    EMERGENT = "emergent"
    RECOVERY = "recovery"


@dataclass
class Flow:
    mode: ProgrammerMode
    r: int
    id_p: int
    id_i: int | None = None
    challenge: ImdChallenge | None = None
    card_resp: bytes | None = None
    has_resp: bytes | None = None
    theta_sam: IrisCode | None = None
    answered: int = 0
    serial: int = 0
    heard_imd: bool = False  # the IMD armed its own expiry timer for this flow


class Programmer(Entity):
    def __init__(
        self,
        name: str = "programmer",
        imd: str = "imd",
        has: str = "has",
        id_p: int | None = None,
        reset_oracle: ResetOracle | None = None,
        ts_ms: int = 5000,
    ) -> None:
        super().__init__()
        self._name = name
        self.ts_ms = ts_ms
        self.imd_addr = imd
        self.has_addr = has
        self.id_p = id_p
        self.doctor_card: DoctorCard | None = None
        self.patient_card: PatientCard | None = None
        self.reset_oracle = reset_oracle
        self.flow: Flow | None = None
        self.session_key: bytes | None = None
        self._serial = 0

    @property
    def name(self) -> str:
        return self._name

    @property
    def abandon_after_ms(self) -> int:
        """How long a flow may wait on the IMD; past the IMD's own TS + 1 expiry."""
        return 2 * self.ts_ms

    @property
    def mode(self) -> ProgrammerMode:
        return self.flow.mode if self.flow else ProgrammerMode.IDLE

    def __repr__(self) -> str:
        return f"Programmer(id_p={self.id_p}, mode={self.mode.value})"

    # ── Session setup ─────────────────────────────────────────────────────

    def login(self, has, id_p: int, password: str, doctor_card: DoctorCard | None = None) -> None:
        """Open the doctor's pipe to the HAS; raises BadDoctorIdentity on failure."""
        has.login(self.name, id_p, password)
        self.id_p = id_p
        self.doctor_card = doctor_card

    def insert_doctor_card(self, card: DoctorCard | None) -> None:
        self.doctor_card = card

    def insert_patient_card(self, card: PatientCard | None) -> None:
        self.patient_card = card

    def _sign(self, signed: bytes) -> bytes:
        if self.doctor_card is None:
            return NO_UMAC
        return self.doctor_card.sign(signed)

    # ── Flow starters ─────────────────────────────────────────────────────

    def _begin(self, flow: Flow) -> list[Action]:
        if self.flow is not None:
            self.emit("state", f"abandoning {self.flow.mode.value} flow")
        self._serial += 1
        flow.serial = self._serial
        self.flow = flow
        self.session_key = None
        self.emit("state", f"{flow.mode.value} flow started r={flow.r:#x}")
        return [
            Send(self.imd_addr, ServiceRequest(flow.r, flow.id_p)),
            Timer(self.abandon_after_ms, f"abandon:{flow.serial}"),
        ]

    def start_normal(self, r: int = R_READ) -> list[Action]:
        if self.id_p is None:
            raise ProtocolError("no doctor identity on this programmer")
        return self._begin(Flow(ProgrammerMode.NORMAL, r, self.id_p))

    def start_emergent(self, theta_sam: IrisCode, r: int = R_READ) -> list[Action]:
        if self.patient_card is None or self.patient_card.theta_lock is None:
            raise ProtocolError("emergent access needs a patient card carrying a locked iris code")
        return self._begin(Flow(ProgrammerMode.EMERGENT, r, FIRST_AIDER, theta_sam=theta_sam))

    def start_recovery(self, id_i: int) -> list[Action]:
        if self.reset_oracle is None and self.id_p is None:
            raise ProtocolError("recovery needs a doctor session or a reset oracle")
        id_p = self.id_p if self.id_p is not None else FIRST_AIDER
        return self._begin(Flow(ProgrammerMode.RECOVERY, R_RESET, id_p, id_i=id_i))

    def _abort(self, reason: str) -> list[Action]:
        outcome = Rejected(reason)
        logger.info("programmer %s gave up: %s", self.name, reason)
        self.emit("verdict", f"rejected:{reason}", outcome, self.name)
        self.flow = None
        return []

    # ── Normal and emergent access ────────────────────────────────────────

    def _on_challenge(self, msg: ImdChallenge) -> list[Action]:
        flow = self.flow
        if flow is None or flow.mode not in (ProgrammerMode.NORMAL, ProgrammerMode.EMERGENT):
            self.emit("state", "unsolicited challenge ignored")
            return []
        flow.heard_imd = True
        if self.patient_card is None:
            return self._abort("no_patient_card")
        flow.challenge = msg
        card = self.patient_card.name
        if flow.mode is ProgrammerMode.EMERGENT:
            return [Send(card, EmergentCardRequest(msg.i, msg.t1, msg.hmac_a, flow.r))]

        unsigned = HasAuthRequest(msg.i, msg.t1, msg.id_i, flow.id_p, flow.r, msg.hmac_b)
        signed = HasAuthRequest(
            msg.i, msg.t1, msg.id_i, flow.id_p, flow.r, msg.hmac_b,
            self._sign(unsigned.signed_part()),
        )
        return [
            Send(card, CardAuthRequest(msg.i, msg.t1, msg.hmac_a, flow.r)),
            Send(self.has_addr, signed),
        ]

    def _on_card_share(self, msg: CardAuthResponse) -> list[Action]:
        if self.flow is None or self.flow.mode is not ProgrammerMode.NORMAL:
            return []
        self.flow.card_resp = msg.hmac
        return self._maybe_submit()

    def _on_has_share(self, msg: HasAuthResponse) -> list[Action]:
        if self.flow is None or self.flow.mode is not ProgrammerMode.NORMAL:
            return []
        self.flow.has_resp = msg.hmac
        return self._maybe_submit()

    def _on_emergent_share(self, msg: EmergentCardResponse) -> list[Action]:
        flow = self.flow
        if flow is None or flow.mode is not ProgrammerMode.EMERGENT:
            return []
        if self.patient_card is None:
            return self._abort("no_patient_card")
        challenge = flow.challenge
        try:
            ck = unlock(self.patient_card.theta_lock, flow.theta_sam)
        except DecodeFailure:
            return self._abort("iris_decode_failure")
        if msg.cache_i != challenge.i:
            return self._abort("cache_cycle_mismatch")
        sb = decrypt_sb(ck, CacheItem(msg.cache_i, msg.cache_ct))
        # A wrong Ck decrypts to garbage; the IMD's own HMAC_SB exposes it.
        expected_input = challenge_b_input(challenge.t1, flow.id_p, challenge.id_i)
        if not hmac_verify(challenge.hmac_b, sb, expected_input):
            return self._abort("cache_key_mismatch")
        flow.card_resp = msg.hmac_a_resp
        flow.has_resp = has_share(sb, challenge.t1, flow.id_p, challenge.id_i, flow.r)
        return self._maybe_submit()

    def _maybe_submit(self) -> list[Action]:
        flow = self.flow
        if flow.card_resp is None or flow.has_resp is None:
            return []
        token = assemble_token(flow.card_resp, flow.has_resp)
        proof = token_proof(flow.challenge.t1, token)
        self.session_key = session_key(flow.card_resp, flow.has_resp)
        self.emit("state", f"token submitted for cycle {flow.challenge.i}")
        self.flow = None
        return [Send(self.imd_addr, TokenSubmit(proof))]

    # ── Recovery ──────────────────────────────────────────────────────────

    def _on_reset_challenge(self, msg: ResetChallenge) -> list[Action]:
        flow = self.flow
        if flow is None or flow.mode is not ProgrammerMode.RECOVERY:
            self.emit("state", "unsolicited reset challenge ignored")
            return []
        flow.heard_imd = True
        if self.reset_oracle is not None:
            answer = self.reset_oracle(msg.k)
            if answer is None:
                self.emit("state", f"no answer for reset challenge k={msg.k}, guessing")
                answer = bytes(32)
            flow.answered += 1
            return [Send(self.imd_addr, ResetResponse(answer))]
        unsigned = HasResetRequest(msg.k, flow.id_i, flow.id_p)
        signed = HasResetRequest(msg.k, flow.id_i, flow.id_p, self._sign(unsigned.signed_part()))
        return [Send(self.has_addr, signed)]

    def _on_reset_key(self, msg: HasResetResponse) -> list[Action]:
        if self.flow is None or self.flow.mode is not ProgrammerMode.RECOVERY:
            return []
        self.flow.answered += 1
        return [Send(self.imd_addr, ResetResponse(msg.sb_k))]

    # ── Dispatch ──────────────────────────────────────────────────────────

    def on_timer(self, tag: str, now: int) -> list[Action]:
        flow = self.flow
        if flow is None or tag != f"abandon:{flow.serial}":
            return []
        if flow.heard_imd:
            # The IMD settles this flow with its own timeout verdict.
            self.emit("state", f"stale {flow.mode.value} flow dropped")
            self.flow = None
            return []
        return self._abort("timeout")

    def on_frame(self, frame: Frame, now: int) -> list[Action]:
        try:
            msg = decode_frame(frame.kind, frame.payload)
        except ImdSimError as exc:
            self.emit("error", f"{exc.code}: {exc}")
            return self._abort(exc.code) if self.flow else []
        if isinstance(msg, RejectNotice):
            if self.flow is None:
                return []
            return self._abort(error_for_code(msg.code).code)
        handlers = {
            ImdChallenge: self._on_challenge,
            CardAuthResponse: self._on_card_share,
            HasAuthResponse: self._on_has_share,
            EmergentCardResponse: self._on_emergent_share,
            ResetChallenge: self._on_reset_challenge,
            HasResetResponse: self._on_reset_key,
        }
        handler = handlers.get(type(msg))
        if handler is None:
            self.emit("error", f"programmer cannot handle {frame.kind}")
            return []
        return handler(msg)
