# Copyright (c) 2025, Equilibrium Bandits Contributors
# SPDX-License-Identifier: MIT

"""Try-then-commit: t_try consecutive plays per arm, then the arm whose last try looked best."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from equilibrium_bandits.bandits.policy import Policy
from equilibrium_bandits.core.exceptions import InvalidInputError


@dataclass(frozen=True)
class NaiveParams:
    t_try: int

    def __post_init__(self):
        if self.t_try < 1:
            raise InvalidInputError(f"t_try must be >= 1, got {self.t_try}")


def naive_select(t: int, action_count: int, params: NaiveParams, committed: Optional[int] = None) -> int:
    """Arm for timestep t (1-based): block exploration, then the committed arm."""
    if t < 1:
        raise InvalidInputError(f"t must be >= 1, got {t}")
    if t <= action_count * params.t_try:
        return int(math.ceil(t / params.t_try)) - 1
    if committed is None:
        raise InvalidInputError("exploration is over but no arm has been committed to")
    return committed


class NaivePolicy(Policy):
    name = "naive"

    def __init__(self, action_count: int, params: NaiveParams, rng: np.random.Generator | None = None):
        super().__init__(action_count, rng)
        self.params = params
        self.final_rewards = np.full(self.action_count, -np.inf)
        self.committed: Optional[int] = None
        self._t = 0

    def select_arm(self, t: int) -> int:
        self._t = t
        return naive_select(t, self.action_count, self.params, self.committed)

    def update(self, arm: int, reward: float) -> None:
        if self.committed is not None:
            return
        if self._t % self.params.t_try == 0:
            self.final_rewards[arm] = reward
        if self._t == self.action_count * self.params.t_try:
            self.committed = int(np.argmax(self.final_rewards))

    def __str__(self) -> str:
        return f"Naive(t_try={self.params.t_try})"
