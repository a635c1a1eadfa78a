"""Toolkit exception hierarchy.

Exit-code mapping used by the CLI: ConfigError -> 2, model infeasibility
(InstabilityError, InfeasibleError, DegenerateChainError) -> 3, anything
else -> 4.
"""


class VmmeCapError(Exception):
    """Base class for all toolkit errors."""


class ParameterError(VmmeCapError):
    """A distribution or model parameter violates its invariants."""


class ConfigError(VmmeCapError):
    """Bad configuration file or flag combination."""


class InstabilityError(VmmeCapError):
    """A queueing stage is driven at or beyond its service capacity."""

    def __init__(self, stage: str, lam: float, capacity: float):
        self.stage = stage
        self.lam = lam
        self.capacity = capacity
        super().__init__(
            f"stage '{stage}' unstable: arrival rate {lam:g}/s >= capacity {capacity:g}/s"
        )


class InfeasibleError(VmmeCapError):
    """No feasible solution exists (e.g. no instance count meets the delay budget)."""

    def __init__(self, msg: str, stage: str | None = None):
        self.stage = stage
        super().__init__(msg)


class DegenerateChainError(VmmeCapError):
    """Markov chain has no unique stationary distribution."""
