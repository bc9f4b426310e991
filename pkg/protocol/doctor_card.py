"""Doctor IC card: Key3 sealed in a POK, used to sign programmer-to-HAS requests."""

from __future__ import annotations

import numpy as np

from crypto import KEY3_BYTES, umac_key3
from pok import PokContainer


class DoctorCard:
    def __init__(self, id_p: int, key3: PokContainer) -> None:
        self.id_p = id_p
        self.key3 = key3

    @classmethod
    def blank(cls, id_p: int, rng: np.random.Generator) -> DoctorCard:
        return cls(id_p, PokContainer(rng.bytes(KEY3_BYTES), label=f"doctor{id_p}.key3"))

    def __repr__(self) -> str:
        return f"DoctorCard(id_p={self.id_p}, sound={self.key3.sound})"

    def sign(self, message: bytes) -> bytes:
        """UMAC tag computed inside the card; Key3 never leaves the POK."""
        return umac_key3(self.key3, message)
