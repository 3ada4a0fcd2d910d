# Copyright (c) 2025, Equilibrium Bandits Contributors
# SPDX-License-Identifier: MIT

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from equilibrium_bandits.bandits.policy import Policy
from equilibrium_bandits.core.exceptions import InvalidInputError

# Radius scale used when the rewards are noiseless, so exploration never switches off.
BOUNDED_REWARD_SIGMA = 0.5


def ucb_select(counts: Sequence[int], means: Sequence[float], t: int, sigma: float) -> int:
    """UCB1 with a subgaussian radius sqrt(2*sigma^2*log(t)/n); unplayed arms come first."""
    if t < 1:
        raise InvalidInputError(f"t must be >= 1, got {t}")
    counts = np.asarray(counts)
    means = np.asarray(means, dtype=float)
    unplayed = np.flatnonzero(counts == 0)
    if unplayed.size:
        return int(unplayed[0])
    scale = sigma if sigma > 0 else BOUNDED_REWARD_SIGMA
    bonus = np.sqrt(2.0 * scale * scale * math.log(t) / counts)
    return int(np.argmax(means + bonus))


class UcbPolicy(Policy):
    name = "ucb"

    def __init__(self, action_count: int, sigma: float, rng: np.random.Generator | None = None):
        super().__init__(action_count, rng)
        self.sigma = float(sigma)
        self.counts = np.zeros(self.action_count, dtype=np.int64)
        self.means = np.zeros(self.action_count)

    def select_arm(self, t: int) -> int:
        return ucb_select(self.counts, self.means, t, self.sigma)

    def update(self, arm: int, reward: float) -> None:
        self.counts[arm] += 1
        n = self.counts[arm]
        self.means[arm] += (reward - self.means[arm]) / n

    def __str__(self) -> str:
        return f"UCB1(sigma={self.sigma:.4g})"
