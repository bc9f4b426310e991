"""Hospital Authentication Server.

Holds every patient's Key2 and every doctor's Key3, authenticates doctors at
login, and hands out the SB share of the access token after checking the
request's freshness, the doctor's card signature and the access policy.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from cryptography.exceptions import InvalidKey as KdfMismatch
from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.kdf.pbkdf2 import PBKDF2HMAC

from crypto import hmac_verify, umac_verify
from errors import (
    AuthRejected,
    BadDoctorIdentity,
    EnrollmentFailure,
    ImdSimError,
    InvalidParameter,
    PolicyDenied,
    ProtocolError,
    StaleTimestamp,
    reject_code,
)
from fuzzycommit import CacheKey
from keygen import KeyGenerator, Lineage, Resolution
from pok import ServerKey
from .base import Action, Entity, Frame, Send
from .emergency import CacheItem, encrypt_sb
from .messages import (
    R_READ,
    R_REPROGRAM,
    R_RESET,
    HasAuthRequest,
    HasAuthResponse,
    HasResetRequest,
    HasResetResponse,
    RejectNotice,
)
from .tokens import challenge_b_input, elapsed_ms, has_share

logger = logging.getLogger(__name__)

SALT_BYTES = 16

# Request codes each doctor role may issue on its patients.
ROLE_GRANTS: dict[str, frozenset[int]] = {
    "attending": frozenset({R_READ}),
    "chief": frozenset({R_READ, R_REPROGRAM}),
    "security_admin": frozenset({R_RESET}),
}


@dataclass
class PatientRecord:
    id_i: int
    key2: ServerKey
    iv: bytes
    gen_b: KeyGenerator
    ck: CacheKey | None = None
    profile: dict = field(default_factory=dict)
    cached_through: int = 0  # last cycle handed out in the emergency cache


@dataclass
class DoctorRecord:
    id_p: int
    key3: bytes
    salt: bytes
    password_hash: bytes
    role: str
    patients: frozenset[int] | None = None  # None: every patient


def _kdf(salt: bytes, iterations: int) -> PBKDF2HMAC:
    return PBKDF2HMAC(algorithm=hashes.SHA256(), length=32, salt=salt, iterations=iterations)


class Has(Entity):
    def __init__(
        self,
        ts_ms: int = 5000,
        cache_size: int = 4,
        pbkdf2_iterations: int = 1000,
        name: str = "has",
    ) -> None:
        super().__init__()
        self._name = name
        self.ts_ms = ts_ms
        self.cache_size = cache_size
        self.pbkdf2_iterations = pbkdf2_iterations
        self.patients: dict[int, PatientRecord] = {}
        self.doctors: dict[int, DoctorRecord] = {}
        self.grants: dict[tuple[int, int], set[int]] = {}
        self.sessions: dict[str, int] = {}

    @property
    def name(self) -> str:
        return self._name

    def __repr__(self) -> str:
        return f"Has(patients={sorted(self.patients)}, doctors={sorted(self.doctors)})"

    # ── Registration ──────────────────────────────────────────────────────

    def register_patient(
        self,
        id_i: int,
        key2: bytes,
        iv: bytes,
        ck: CacheKey | None = None,
        profile: dict | None = None,
    ) -> PatientRecord:
        """Store (or replace, after a reset) the key material of patient *id_i*."""
        server_key = ServerKey(key2)
        record = PatientRecord(
            id_i=id_i,
            key2=server_key,
            iv=bytes(iv),
            gen_b=KeyGenerator(server_key, iv, Lineage.SB),
            ck=ck,
            profile=dict(profile or {}),
        )
        if id_i in self.patients:
            logger.info("patient %d re-enrolled, previous key material dropped", id_i)
        self.patients[id_i] = record
        return record

    def register_doctor(
        self,
        id_p: int,
        key3: bytes,
        password: str,
        role: str,
        rng: np.random.Generator,
        patients: frozenset[int] | None = None,
    ) -> DoctorRecord:
        if id_p in self.doctors:
            raise EnrollmentFailure(f"doctor {id_p} is already registered")
        if role not in ROLE_GRANTS:
            raise EnrollmentFailure(f"unknown doctor role {role!r}")
        salt = rng.bytes(SALT_BYTES)
        digest = _kdf(salt, self.pbkdf2_iterations).derive(password.encode("utf-8"))
        record = DoctorRecord(id_p, bytes(key3), salt, digest, role, patients)
        self.doctors[id_p] = record
        return record

    def grant(self, id_p: int, id_i: int, codes: set[int]) -> None:
        self.grants.setdefault((id_p, id_i), set()).update(codes)

    def allowed_codes(self, id_p: int, id_i: int) -> set[int]:
        codes = set(self.grants.get((id_p, id_i), set()))
        doctor = self.doctors.get(id_p)
        if doctor is not None and (doctor.patients is None or id_i in doctor.patients):
            codes |= ROLE_GRANTS[doctor.role]
        return codes

    # ── Doctor sessions ───────────────────────────────────────────────────

    def login(self, programmer: str, id_p: int, password: str) -> None:
        doctor = self.doctors.get(id_p)
        if doctor is None:
            raise BadDoctorIdentity(f"unknown doctor {id_p}")
        try:
            kdf = _kdf(doctor.salt, self.pbkdf2_iterations)
            kdf.verify(password.encode("utf-8"), doctor.password_hash)
        except KdfMismatch:
            raise BadDoctorIdentity(f"wrong password for doctor {id_p}") from None
        self.sessions[programmer] = id_p
        self.emit("state", f"doctor {id_p} logged in on {programmer}")

    def logout(self, programmer: str) -> None:
        self.sessions.pop(programmer, None)

    def _check_identity(self, programmer: str, id_p: int, umac: bytes, signed: bytes) -> DoctorRecord:
        if self.sessions.get(programmer) != id_p:
            raise BadDoctorIdentity(f"no session for doctor {id_p} on {programmer}")
        doctor = self.doctors.get(id_p)
        if doctor is None or not umac_verify(umac, doctor.key3, signed):
            raise BadDoctorIdentity(f"doctor card signature for {id_p} does not verify")
        return doctor

    def _patient(self, id_i: int) -> PatientRecord:
        record = self.patients.get(id_i)
        if record is None:
            raise AuthRejected(f"unknown patient {id_i}")
        return record

    # ── Normal access (steps v-vi) ────────────────────────────────────────

    def authorize(self, msg: HasAuthRequest, now: int, programmer: str = "programmer") -> HasAuthResponse:
        record = self._patient(msg.id_i)
        gen = record.gen_b
        offline = gen.cycle < msg.i <= record.cached_through + 1
        if offline:
            # The card spent cached keys offline; the IMD is ahead of us.
            res = Resolution(gen.derive_key(msg.i), recovered=False)
        else:
            res = gen.resolve_for_counter(msg.i)
        sb = res.key.key
        if not hmac_verify(msg.hmac_b, sb, challenge_b_input(msg.t1, msg.id_p, msg.id_i)):
            raise AuthRejected(f"HMAC_SB does not verify for cycle {msg.i}")
        if abs(elapsed_ms(now, msg.t1)) > self.ts_ms:
            raise StaleTimestamp(f"T1={msg.t1} is outside the {self.ts_ms} ms window at {now}")
        self._check_identity(programmer, msg.id_p, msg.umac, msg.signed_part())
        if msg.r not in self.allowed_codes(msg.id_p, msg.id_i):
            raise PolicyDenied(f"doctor {msg.id_p} may not issue request {msg.r:#x} on patient {msg.id_i}")

        if offline:
            logger.info("patient %d ran offline from cycle %d to %d", msg.id_i, gen.cycle, msg.i)
            self.resync(msg.id_i, msg.i)
        response = HasAuthResponse(has_share(sb, msg.t1, msg.id_p, msg.id_i, msg.r))
        if not res.recovered:
            gen.advance()
        self.emit("state", f"share issued for patient {msg.id_i} cycle {msg.i}")
        return response

    # ── Recovery assistance ───────────────────────────────────────────────

    def reset_key(self, msg: HasResetRequest, programmer: str = "programmer") -> HasResetResponse:
        record = self._patient(msg.id_i)
        self._check_identity(programmer, msg.id_p, msg.umac, msg.signed_part())
        if R_RESET not in self.allowed_codes(msg.id_p, msg.id_i):
            raise PolicyDenied(f"doctor {msg.id_p} may not reset patient {msg.id_i}")
        return HasResetResponse(record.gen_b.derive_key(msg.k).key)

    # ── Emergency cache ───────────────────────────────────────────────────

    def resync(self, id_i: int, cycle: int) -> None:
        """Roll the SB generator forward to *cycle*; it never moves back."""
        gen = self._patient(id_i).gen_b
        while gen.cycle < cycle:
            gen.advance()

    def cache_items(self, id_i: int, start: int, count: int) -> list[CacheItem]:
        if count > self.cache_size:
            raise InvalidParameter(f"at most {self.cache_size} keys can be cached, asked for {count}")
        if count < 0:
            raise InvalidParameter("cache refill count must be non-negative")
        record = self._patient(id_i)
        if record.ck is None:
            raise ProtocolError(f"patient {id_i} has no iris-bound cache key")
        items = [
            encrypt_sb(record.ck, i, record.gen_b.derive_key(i).key)
            for i in range(start, start + count)
        ]
        if items:
            record.cached_through = max(record.cached_through, items[-1].i)
        return items

    # ── Pipe interface ────────────────────────────────────────────────────

    def on_frame(self, frame: Frame, now: int) -> list[Action]:
        try:
            if frame.kind == HasAuthRequest.KIND:
                reply = self.authorize(HasAuthRequest.decode(frame.payload), now, frame.src)
            elif frame.kind == HasResetRequest.KIND:
                reply = self.reset_key(HasResetRequest.decode(frame.payload), frame.src)
            else:
                raise ProtocolError(f"HAS cannot handle {frame.kind}")
        except ImdSimError as exc:
            logger.info("HAS refused %s from %s: %s", frame.kind, frame.src, exc)
            self.emit("error", f"{exc.code}: {exc}")
            return [Send(frame.src, RejectNotice(reject_code(exc)))]
        return [Send(frame.src, reply)]
