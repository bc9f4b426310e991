"""Deterministic discrete-event network with a scripted adversary."""

from __future__ import annotations

from .adversary import (
    Adversary,
    AdversaryAction,
    Drop,
    Eavesdrop,
    Inject,
    Replay,
    StealCard,
    Tamper,
    TamperCard,
    adversary_drop,
    adversary_replay,
    adversary_tamper,
    flip_bits,
)
from .channel import Channel, contact, server_pipe, wireless
from .clock import SimClock
from .scheduler import FlowStart, Simulator, run_scenario
from .trace import FlowRecord, Trace, TraceEvent, describe

__all__ = [
    "Adversary",
    "AdversaryAction",
    "Channel",
    "Drop",
    "Eavesdrop",
    "FlowRecord",
    "FlowStart",
    "Inject",
    "Replay",
    "SimClock",
    "Simulator",
    "StealCard",
    "Tamper",
    "TamperCard",
    "Trace",
    "TraceEvent",
    "adversary_drop",
    "adversary_replay",
    "adversary_tamper",
    "contact",
    "describe",
    "flip_bits",
    "run_scenario",
    "server_pipe",
    "wireless",
]
