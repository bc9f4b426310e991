"""Commissioning: loading master keys into a fresh IMD, the HAS and the IC cards."""

from __future__ import annotations

import logging

import numpy as np

from crypto import TRIVIUM_IV_BYTES, TRIVIUM_KEY_BYTES
from errors import EnrollmentFailure, KeyDestroyed, OtpFused
from fuzzycommit import IrisCode, lock, random_cache_key
from .doctor_card import DoctorCard
from .has import Has
from .imd import Imd
from .patient_card import PatientCard

logger = logging.getLogger(__name__)


def enroll_patient(
    has: Has,
    imd: Imd,
    card: PatientCard,
    rng: np.random.Generator,
    theta_ref: IrisCode | None = None,
    profile: dict | None = None,
) -> tuple[PatientCard, Has, Imd]:
    """Extract Key1 through the card's OTP port and commission all three parties.

    Key2 and the IV are drawn from *rng*.  When a reference iris code is given,
    a fresh cache key is locked to it and the locked code is written to the
    card so the emergency cache can be used.
    """
    try:
        key1 = card.key1.otp_extract()
    except (OtpFused, KeyDestroyed) as exc:
        raise EnrollmentFailure(f"cannot extract Key1 from patient card: {exc}") from exc

    key2 = rng.bytes(TRIVIUM_KEY_BYTES)
    iv = rng.bytes(TRIVIUM_IV_BYTES)
    imd.provision(key1, key2, iv)
    card.enroll(imd.id_i, iv)

    ck = None
    if theta_ref is not None:
        ck = random_cache_key(rng)
        card.theta_lock = lock(ck, theta_ref)
    has.register_patient(imd.id_i, key2, iv, ck, profile)
    logger.debug("patient %d enrolled, emergency cache %s", imd.id_i, "on" if ck else "off")
    return card, has, imd


def enroll_doctor(
    has: Has,
    card: DoctorCard,
    password: str,
    role: str,
    rng: np.random.Generator,
    patients: frozenset[int] | None = None,
) -> Has:
    if card.id_p in has.doctors:
        raise EnrollmentFailure(f"doctor {card.id_p} is already registered")
    try:
        key3 = card.key3.otp_extract()
    except (OtpFused, KeyDestroyed) as exc:
        raise EnrollmentFailure(f"cannot extract Key3 from doctor card: {exc}") from exc
    has.register_doctor(card.id_p, key3, password, role, rng, patients)
    logger.debug("doctor %d enrolled as %s", card.id_p, role)
    return has
