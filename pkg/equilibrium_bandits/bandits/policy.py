# Copyright (c) 2025, Equilibrium Bandits Contributors
# SPDX-License-Identifier: MIT

from __future__ import annotations

import abc

import numpy as np


class Policy(abc.ABC):
    """
    Per-timestep interface shared by UECB and the baselines. The runner calls
    `select_arm(t)` with t = 1, 2, ..., then `update(arm, reward)` with the noisy
    reward of that play, and `finish()` once the horizon is reached. Policies only
    ever see noisy rewards, never the state.
    """

    name: str = "policy"

    def __init__(self, action_count: int, rng: np.random.Generator | None = None):
        self.action_count = int(action_count)
        self.rng = rng if rng is not None else np.random.default_rng(0)

    @abc.abstractmethod
    def select_arm(self, t: int) -> int:
        pass

    @abc.abstractmethod
    def update(self, arm: int, reward: float) -> None:
        pass

    def finish(self) -> None:
        """Flush any partially collected information at the end of the horizon."""

    def __str__(self) -> str:
        return self.name
