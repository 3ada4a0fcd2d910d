# Copyright (c) 2025, Equilibrium Bandits Contributors
# SPDX-License-Identifier: MIT

from __future__ import annotations

from typing import Optional


class EquilibriumBanditError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(EquilibriumBanditError, ValueError):
    pass


class ConvergenceError(EquilibriumBanditError):
    """The fixed-point oracle ran out of iterations."""

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(f"{message} (residual={residual:.3e} after {iterations} iterations)")
        self.message = message
        self.residual = residual
        self.iterations = iterations

    def __reduce__(self):
        return type(self), (self.message, self.residual, self.iterations)


class ScheduleOverflowError(EquilibriumBanditError):
    pass


class DynamicsInstabilityError(EquilibriumBanditError):
    pass


class DomainError(EquilibriumBanditError):
    pass


class MultipleEquilibriaError(EquilibriumBanditError):
    pass


class ConfigError(EquilibriumBanditError):
    pass


class ExportError(EquilibriumBanditError):
    pass


class RealizationError(EquilibriumBanditError):
    """Wraps a failure inside one realization with the timestep it happened at."""

    def __init__(self, message: str, timestep: int, algorithm: Optional[str] = None, seed: Optional[int] = None):
        where = f"t={timestep}"
        if algorithm is not None:
            where += f", algorithm={algorithm}"
        if seed is not None:
            where += f", seed={seed}"
        super().__init__(f"{message} [{where}]")
        self.message = message
        self.timestep = timestep
        self.algorithm = algorithm
        self.seed = seed

    # Realizations may fail inside worker processes; keep the context when pickled back.
    def __reduce__(self):
        return type(self), (self.message, self.timestep, self.algorithm, self.seed)
