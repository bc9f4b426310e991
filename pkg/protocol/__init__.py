"""Protocol entities and the operations of the access-control scheme."""

from __future__ import annotations

from .base import (
    Action,
    Entity,
    EntityEvent,
    Frame,
    Outcome,
    Rejected,
    ResetComplete,
    Send,
    SessionEstablished,
    Timer,
)
from .doctor_card import DoctorCard
from .emergency import CacheItem, decrypt_sb, encrypt_sb
from .enrollment import enroll_doctor, enroll_patient
from .has import ROLE_GRANTS, Has
from .imd import Imd, ImdMode
from .messages import FIRST_AIDER, R_READ, R_REPROGRAM, R_RESET
from .patient_card import PatientCard
from .programmer import Programmer, ProgrammerMode
from .session import LocalRouter, emergent_access, normal_access, recovery_reset, refill_cache
from .tokens import assemble_token


def imd_handle_request(imd: Imd, msg, now: int):
    return imd.handle_request(msg, now)


def card_authorize(card: PatientCard, msg):
    return card.authorize(msg)


def has_authorize(has: Has, msg, now: int, programmer: str = "programmer"):
    return has.authorize(msg, now, programmer)


def imd_verify_token(imd: Imd, msg, now: int):
    return imd.verify_token(msg, now)


__all__ = [
    "Action",
    "CacheItem",
    "DoctorCard",
    "Entity",
    "EntityEvent",
    "FIRST_AIDER",
    "Frame",
    "Has",
    "Imd",
    "ImdMode",
    "LocalRouter",
    "Outcome",
    "PatientCard",
    "Programmer",
    "ProgrammerMode",
    "R_READ",
    "R_REPROGRAM",
    "R_RESET",
    "ROLE_GRANTS",
    "Rejected",
    "ResetComplete",
    "Send",
    "SessionEstablished",
    "Timer",
    "assemble_token",
    "card_authorize",
    "decrypt_sb",
    "emergent_access",
    "encrypt_sb",
    "enroll_doctor",
    "enroll_patient",
    "has_authorize",
    "imd_handle_request",
    "imd_verify_token",
    "normal_access",
    "recovery_reset",
    "refill_cache",
]
