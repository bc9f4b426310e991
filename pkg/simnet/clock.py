from __future__ import annotations


class SimClock:
    """Logical milliseconds; only the scheduler moves it, and never backwards."""

    def __init__(self, start: int = 0) -> None:
        self.now = start

    def advance_to(self, t: int) -> None:
        if t < self.now:
            raise ValueError(f"clock cannot go back from {self.now} to {t}")
        self.now = t

    def __repr__(self) -> str:
        return f"SimClock(now={self.now})"
