# Copyright (c) 2025, Equilibrium Bandits Contributors
# SPDX-License-Identifier: MIT

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from equilibrium_bandits.core.exceptions import InvalidInputError
from equilibrium_bandits.core.model import ConvergenceKnowledge, EnvironmentModel, StateVector


def tau_from_factor(factor: float) -> float:
    """Smallest tau_c >= 1 with exp(-1/tau_c) >= factor."""
    if factor <= 0.0:
        return 1.0
    return max(1.0, -1.0 / math.log(factor))


class LinearContractionEnvironment(EnvironmentModel):
    """
    Scalar toy system on [0, 1]: z' = z_a* + c_a (z - z_a*), rewarded with f(a; z) = z.
    Each action pulls the state towards its own fixed point at its own rate.
    """

    name = "linear_contraction"

    def __init__(
        self,
        fixed_points: Sequence[float],
        factors: Sequence[float],
        initial_state: float = 0.5,
        noise_sigma: float = 0.0,
        lipschitz: float = 1.0,
    ):
        fixed_points = np.asarray(fixed_points, dtype=float)
        factors = np.asarray(factors, dtype=float)
        if fixed_points.ndim != 1 or fixed_points.shape != factors.shape:
            raise InvalidInputError("fixed_points and factors need one entry per action")
        if np.any((fixed_points < 0) | (fixed_points > 1)):
            raise InvalidInputError(f"fixed points must lie in [0, 1], got {fixed_points.tolist()}")
        if np.any((factors < 0) | (factors >= 1)):
            raise InvalidInputError(f"contraction factors must lie in [0, 1), got {factors.tolist()}")
        if not 0.0 <= initial_state <= 1.0:
            raise InvalidInputError(f"initial_state must lie in [0, 1], got {initial_state}")

        self.fixed_points = fixed_points
        self.factors = factors
        knowledge = ConvergenceKnowledge(
            tau_c=max(tau_from_factor(c) for c in factors),
            lipschitz_L=lipschitz,
            sigma=noise_sigma,
        )
        super().__init__(fixed_points.shape[0], 1, noise_sigma, [initial_state], knowledge)

    @classmethod
    def from_tau(
        cls,
        fixed_points: Sequence[float],
        tau_c: float,
        initial_state: float = 0.5,
        noise_sigma: float = 0.0,
    ) -> "LinearContractionEnvironment":
        """Every action contracts with the same factor exp(-1/tau_c)."""
        factor = math.exp(-1.0 / tau_c)
        env = cls(fixed_points, [factor] * len(fixed_points), initial_state, noise_sigma)
        return env.with_knowledge(tau_c=tau_c)

    def evolution(self, a: int, z: StateVector) -> StateVector:
        target = self.fixed_points[a]
        return target + self.factors[a] * (np.asarray(z, dtype=float) - target)

    def _reward(self, a: int, z: StateVector) -> float:
        return float(z[0])

    def sample_state(self, rng: np.random.Generator) -> StateVector:
        return rng.uniform(0.0, 1.0, size=1)
