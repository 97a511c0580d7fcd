"""Resource budgets checked cooperatively at layer boundaries."""

from __future__ import annotations

import time
from dataclasses import dataclass, field


class ResourceLimitError(RuntimeError):
    """A node, label, time or memory budget was exceeded."""


class TimeLimitError(ResourceLimitError):
    pass


class MemoryLimitError(ResourceLimitError):
    pass


class InfeasibleError(ValueError):
    """The model has no feasible solution, so no network exists."""


@dataclass
class Budget:
    max_nodes: int = 50_000_000
    max_labels: int = 100_000_000
    time_limit: float | None = None
    started: float = field(default_factory=time.perf_counter)

    def check_time(self) -> None:
        if self.time_limit is not None and time.perf_counter() - self.started > self.time_limit:
            raise TimeLimitError(f"time limit of {self.time_limit:g}s exceeded")

    def check_nodes(self, count: int) -> None:
        if count > self.max_nodes:
            raise MemoryLimitError(f"node budget of {self.max_nodes} exceeded")
        self.check_time()

    def check_labels(self, count: int) -> None:
        if count > self.max_labels:
            raise MemoryLimitError(f"label budget of {self.max_labels} exceeded")
        self.check_time()
