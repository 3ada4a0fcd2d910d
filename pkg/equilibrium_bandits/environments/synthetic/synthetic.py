# Copyright (c) 2025, Equilibrium Bandits Contributors
# SPDX-License-Identifier: MIT

"""Two-arm counterexample instances: one that keeps UCB switching forever, one whose arms look identical for a long prefix."""

from __future__ import annotations

import math
from typing import Dict, Tuple

import numpy as np

from equilibrium_bandits.core.exceptions import DomainError, InvalidInputError
from equilibrium_bandits.core.model import ConvergenceKnowledge, EnvironmentModel, StateVector

# --- UCB breaker ---

# (action, state) -> next state. Arm 1 settles at -1, arm 2 at 1.5.
BREAKER_TABLE: Dict[Tuple[int, float], float] = {
    (0, 0.5): -0.5,
    (0, -0.5): -1.0,
    (0, -1.0): -1.0,
    (0, 1.5): 0.5,
    (1, -0.5): 0.5,
    (1, 0.5): 1.5,
    (1, 1.5): 1.5,
    (1, -1.0): -0.5,
}
BREAKER_STATES = (-1.0, -0.5, 0.5, 1.5)
_TABLE_TOL = 1e-12


class TabulatedEnvironment(EnvironmentModel):
    """
    Scalar system given by a finite transition table and f(a; z) = z^2. Rewards are
    not clamped, so this environment only serves baseline-failure experiments.
    """

    name = "ucb_breaker"
    reward_clamped = False

    def __init__(self, table: Dict[Tuple[int, float], float], initial_state: float, knowledge: ConvergenceKnowledge):
        self.table = dict(table)
        self.states = tuple(sorted({z for _, z in table}))
        action_count = 1 + max(a for a, _ in table)
        super().__init__(action_count, 1, 0.0, [initial_state], knowledge)
        self._lookup(0, float(initial_state))

    def _lookup(self, a: int, z: float) -> float:
        for state in self.states:
            if abs(state - z) <= _TABLE_TOL:
                key = (a, state)
                if key in self.table:
                    return self.table[key]
                break
        raise DomainError(f"{self.name}: no transition for action {a + 1} at state {z}")

    def evolution(self, a: int, z: StateVector) -> StateVector:
        return np.array([self._lookup(a, float(z[0]))])

    def _reward(self, a: int, z: StateVector) -> float:
        return float(z[0]) ** 2

    def sample_state(self, rng: np.random.Generator) -> StateVector:
        return np.array([self.states[int(rng.integers(len(self.states)))]])


def build_ucb_breaker() -> TabulatedEnvironment:
    """Start at 0.5; every reachable state stays in the table and no step contracts by less than 0.8."""
    knowledge = ConvergenceKnowledge(tau_c=5.0, lipschitz_L=3.0, sigma=0.0)
    return TabulatedEnvironment(BREAKER_TABLE, initial_state=0.5, knowledge=knowledge)


# --- Lower-bound pair ---

class LowerBoundPair(EnvironmentModel):
    """
    Arm 1 heads to -2 and always pays 0. Arm 2 heads to 2 and pays delta + z - 2
    once z >= 2 - delta, 0 before. From z = 1 both arms pay exactly 0 for the first
    ceil(tau_c log(1/delta)) plays.
    """

    name = "lower_bound_pair"
    norm_ord = 2

    def __init__(self, delta: float, tau_c: float, initial_state: float = 1.0, noise_sigma: float = 0.0):
        if not 0 < delta < 1:
            raise InvalidInputError(f"delta must lie in (0, 1), got {delta}")
        if not tau_c >= 1.0 / math.log(2.0):
            raise InvalidInputError(f"tau_c must be >= 1/ln 2 for the jump to 1 to contract, got {tau_c}")
        if not -2.0 <= initial_state <= 2.0:
            raise InvalidInputError(f"initial_state must lie in [-2, 2], got {initial_state}")
        self.delta = float(delta)
        self.tau_c = float(tau_c)
        self.factor = math.exp(-1.0 / tau_c)
        self.fixed_points = (-2.0, 2.0)
        knowledge = ConvergenceKnowledge(tau_c=float(tau_c), lipschitz_L=1.0, sigma=noise_sigma)
        super().__init__(2, 1, noise_sigma, [initial_state], knowledge)

    def evolution(self, a: int, z: StateVector) -> StateVector:
        value = float(z[0])
        target = self.fixed_points[a]
        if a == 0 and value > 0:
            return np.array([-1.0])
        if a == 1 and value < 0:
            return np.array([1.0])
        return np.array([(1.0 - self.factor) * target + self.factor * value])

    def _reward(self, a: int, z: StateVector) -> float:
        if a == 0:
            return 0.0
        value = float(z[0])
        if value < 2.0 - self.delta:
            return 0.0
        return self.delta + value - 2.0

    def sample_state(self, rng: np.random.Generator) -> StateVector:
        return rng.uniform(-2.0, 2.0, size=1)

    @property
    def identical_prefix(self) -> int:
        """Plays from z = 1 before arm 2 first pays anything."""
        return int(math.ceil(self.tau_c * math.log(1.0 / self.delta)))


def build_lower_bound_pair(delta: float, tau_c: float) -> LowerBoundPair:
    return LowerBoundPair(delta, tau_c)
