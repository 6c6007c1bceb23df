from __future__ import annotations

import time
from dataclasses import dataclass


@dataclass(frozen=True, slots=True)
class Clock:
    """Clock abstraction so training time can be measured for real or pinned in tests."""

    def now_ns(self) -> int:
        raise NotImplementedError

    def elapsed_seconds(self, start_ns: int) -> float:
        return (self.now_ns() - start_ns) / 1e9


@dataclass(frozen=True, slots=True)
class SystemClock(Clock):
    def now_ns(self) -> int:
        return time.perf_counter_ns()


@dataclass(frozen=True, slots=True)
class FixedClock(Clock):
    t: int = 0

    def now_ns(self) -> int:
        return self.t
