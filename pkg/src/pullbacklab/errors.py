"""Exception types shared across the package."""

from __future__ import annotations


class ContractViolation(ValueError):
    """An argument or precondition contract was violated by the caller."""


class DivergenceError(RuntimeError):
    """A trajectory left the finite range during integration."""

    def __init__(self, message: str, last_finite_time: float):
        super().__init__(f"{message} (last finite time t={last_finite_time:g})")
        self.last_finite_time = last_finite_time


class ConcatenationError(ValueError):
    """Junction states of two trajectories do not match."""

    def __init__(self, gap: float, junction_tol: float):
        super().__init__(
            f"junction mismatch {gap:.3e} exceeds tolerance {junction_tol:.3e}"
        )
        self.gap = gap


class NoPredecessorError(RuntimeError):
    """Backward orbit extension found no admissible predecessor."""

    def __init__(self, time: float, best_gap: float):
        super().__init__(
            f"no predecessor found at t={time:g} (best candidate gap {best_gap:.3e})"
        )
        self.time = time
        self.best_gap = best_gap


class HorizonExhaustedError(RuntimeError):
    """Pullback iteration did not become Cauchy across the configured horizons."""

    def __init__(self, gaps: list[float]):
        super().__init__(f"no Cauchy horizon pair; gap sequence {gaps}")
        self.gaps = list(gaps)


class NonSettlingError(RuntimeError):
    """Forward ensemble did not stabilise when the settle time was doubled."""

    def __init__(self, gap: float, tol: float):
        super().__init__(f"cloud moved by {gap:.3e} > {tol:.3e} under time doubling")
        self.gap = gap


class IntegralDivergenceError(RuntimeError):
    """An improper integral failed to converge under adaptive truncation."""
