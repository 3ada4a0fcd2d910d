# Copyright (c) 2025, Equilibrium Bandits Contributors
# SPDX-License-Identifier: MIT

"""EXP3 with importance-weighted exponential updates, and REXP3 which restarts it on a fixed window."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from equilibrium_bandits.bandits.policy import Policy
from equilibrium_bandits.core.exceptions import InvalidInputError

# Weights are rescaled once the largest exceeds this, which leaves the probabilities unchanged.
_RESCALE_ABOVE = 1e100
_LOG_RESCALE_ABOVE = math.log(_RESCALE_ABOVE)
# No weight falls further than this below the largest, so no probability underflows to zero.
_RELATIVE_FLOOR = 1e-200


@dataclass(frozen=True)
class Exp3Params:
    learning_rate: float
    restart_window: Optional[int] = None

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise InvalidInputError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.restart_window is not None and self.restart_window < 1:
            raise InvalidInputError(f"restart_window must be >= 1, got {self.restart_window}")


def default_learning_rate(action_count: int, horizon: int) -> float:
    return math.sqrt(2.0 * math.log(max(action_count, 2)) / (action_count * horizon))


def default_restart_window(horizon: int) -> int:
    return max(1, int(round(horizon ** (2.0 / 3.0))))


def exp3_probabilities(weights: Sequence[float]) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    return w / w.sum()


def exp3_update(
    weights: Sequence[float], played: int, reward: float, probs: Sequence[float], params: Exp3Params
) -> np.ndarray:
    """weights[played] *= exp(eta * reward / probs[played] / K), reward clamped to [0, 1]."""
    w = np.array(weights, dtype=float)
    p = float(probs[played])
    if not p > 0:
        raise InvalidInputError(f"arm {played} was played with probability {p}")
    reward = min(1.0, max(0.0, float(reward)))
    if reward == 0.0:
        return w

    log_new = math.log(w[played]) + params.learning_rate * reward / p / w.shape[0]
    if log_new <= _LOG_RESCALE_ABOVE:
        w[played] = math.exp(log_new)
    else:
        log_w = np.log(w)
        log_w[played] = log_new
        w = np.exp(log_w - log_w.max())
    return np.maximum(w, w.max() * _RELATIVE_FLOOR)


class Exp3Policy(Policy):
    name = "exp3"

    def __init__(self, action_count: int, params: Exp3Params, rng: np.random.Generator | None = None):
        super().__init__(action_count, rng)
        self.params = params
        self.weights = np.ones(self.action_count)
        self.probs = exp3_probabilities(self.weights)

    def select_arm(self, t: int) -> int:
        window = self.params.restart_window
        if window is not None and (t - 1) % window == 0:
            self.weights = np.ones(self.action_count)
        self.probs = exp3_probabilities(self.weights)
        return int(self.rng.choice(self.action_count, p=self.probs))

    def update(self, arm: int, reward: float) -> None:
        self.weights = exp3_update(self.weights, arm, reward, self.probs, self.params)

    def __str__(self) -> str:
        if self.params.restart_window is None:
            return f"EXP3(eta={self.params.learning_rate:.4g})"
        return f"REXP3(eta={self.params.learning_rate:.4g}, window={self.params.restart_window})"
