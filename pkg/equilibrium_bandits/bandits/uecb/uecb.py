# Copyright (c) 2025, Equilibrium Bandits Contributors
# SPDX-License-Identifier: MIT

"""
Upper Equilibrium Confidence Bound.

An arm chosen by the index is played for a whole epoch whose length grows
geometrically with the number of epochs that arm already received. At the end
of the epoch the arm's estimate is refreshed from the rewards of that epoch
(last sample when noiseless, mean of the second half when noisy) and the index
adds a bonus for the distance to equilibrium that may remain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from equilibrium_bandits.bandits.policy import Policy
from equilibrium_bandits.core.exceptions import InvalidInputError, ScheduleOverflowError
from equilibrium_bandits.core.model import ConvergenceKnowledge

# --- Constants ---
NOISELESS = "noiseless"
NOISY = "noisy"
MODES = (NOISELESS, NOISY)
MAX_EPOCH_LEN = 2 ** 62
_SNAP = 1e-9


@dataclass(frozen=True)
class UecbParams:
    knowledge: ConvergenceKnowledge
    rho1: float = math.log(2.0)
    rho2: float = 1.0
    mode: str = NOISY

    def __post_init__(self):
        if not self.rho1 > 0 or not self.rho2 > 0:
            raise InvalidInputError(f"rho1 and rho2 must be > 0, got {self.rho1}, {self.rho2}")
        if self.mode not in MODES:
            raise InvalidInputError(f"mode must be one of {MODES}, got {self.mode!r}")


@dataclass(frozen=True)
class EpochState:
    """Per-arm bookkeeping plus the global clock at the end of the last epoch."""

    m: np.ndarray
    last_epoch_len: np.ndarray
    x_hat: np.ndarray
    index: np.ndarray
    t: int = 0
    n: int = 0

    @classmethod
    def initial(cls, action_count: int) -> "EpochState":
        return cls(
            m=np.zeros(action_count, dtype=np.int64),
            last_epoch_len=np.zeros(action_count, dtype=np.int64),
            x_hat=np.zeros(action_count),
            index=np.full(action_count, np.inf),
        )


# --- Schedule and index terms ---

def epoch_length(m_prior: int, params: UecbParams) -> int:
    """2*rho2*exp(rho1*(m_prior+1)) rounded up to an even integer >= 2."""
    return scheduled_length(m_prior, params.rho1, params.rho2)


def scheduled_length(m_prior: int, rho1: float, rho2: float) -> int:
    if m_prior < 0:
        raise InvalidInputError(f"m_prior must be >= 0, got {m_prior}")
    try:
        raw = 2.0 * rho2 * math.exp(rho1 * (m_prior + 1))
    except OverflowError as exc:
        raise ScheduleOverflowError(f"epoch length overflows after {m_prior} epochs") from exc
    if not math.isfinite(raw) or raw > MAX_EPOCH_LEN:
        raise ScheduleOverflowError(f"epoch length {raw:.3e} after {m_prior} epochs exceeds the integer range")
    # exp(log 2) is not exactly 2 in floating point
    nearest = round(raw)
    if abs(raw - nearest) <= _SNAP * max(1.0, raw):
        raw = float(nearest)
    return max(2, 2 * int(math.ceil(raw / 2.0)))


def noiseless_index(x_last: float, epoch_len: int, knowledge: ConvergenceKnowledge) -> float:
    if epoch_len < 1:
        raise InvalidInputError(f"epoch_len must be >= 1, got {epoch_len}")
    return x_last + knowledge.lipschitz_L * math.exp(-epoch_len / knowledge.tau_c)


def equilibrium_noise_term(epoch_len: int, knowledge: ConvergenceKnowledge) -> float:
    """Bound on how far a second-half average can sit from the equilibrium reward."""
    if epoch_len < 1:
        raise InvalidInputError(f"epoch_len must be >= 1, got {epoch_len}")
    tau = knowledge.tau_c
    return (2.0 / epoch_len) * knowledge.lipschitz_L * math.exp(-(1.0 + epoch_len / 2.0) / tau) / -math.expm1(-1.0 / tau)


def confidence_radius(epoch_len: int, sigma: float, delta_n: float) -> float:
    if epoch_len < 1:
        raise InvalidInputError(f"epoch_len must be >= 1, got {epoch_len}")
    if not 0 < delta_n < 2:
        raise InvalidInputError(f"delta_n must lie in (0, 2), got {delta_n}")
    return math.sqrt((4.0 * sigma * sigma / epoch_len) * math.log(2.0 / delta_n))


# --- Epoch bookkeeping ---

def update_after_epoch(
    state: EpochState,
    played: int,
    rewards: Sequence[float],
    params: UecbParams,
    truncated: bool = False,
) -> EpochState:
    """
    Close the epoch just played by `played`. A truncated epoch (cut by the horizon)
    may be shorter than scheduled; in noisy mode it needs at least two samples,
    otherwise the state is returned unchanged.
    """
    rewards = np.asarray(rewards, dtype=float)
    scheduled = epoch_length(int(state.m[played]), params)
    ell = rewards.shape[0]
    if truncated:
        if not 1 <= ell <= scheduled:
            raise InvalidInputError(f"truncated epoch has {ell} rewards, schedule allows 1..{scheduled}")
        if params.mode == NOISY and ell < 2:
            return state
    elif ell != scheduled:
        raise InvalidInputError(f"epoch for arm {played} has {ell} rewards, expected {scheduled}")

    m = state.m.copy()
    lengths = state.last_epoch_len.copy()
    x_hat = state.x_hat.copy()
    index = state.index.copy()
    knowledge = params.knowledge

    m[played] += 1
    lengths[played] = ell
    t = state.t + ell

    if params.mode == NOISELESS:
        x_hat[played] = rewards[-1]
        index[played] = noiseless_index(x_hat[played], ell, knowledge)
    else:
        x_hat[played] = rewards[ell - ell // 2:].mean()
        delta_n = 1.0 / float(t) ** 3
        for a in np.flatnonzero(m):
            index[a] = (
                x_hat[a]
                + equilibrium_noise_term(int(lengths[a]), knowledge)
                + confidence_radius(int(lengths[a]), knowledge.sigma, delta_n)
            )

    return EpochState(m=m, last_epoch_len=lengths, x_hat=x_hat, index=index, t=t, n=state.n + 1)


def select_action(state: EpochState, action_count: int) -> int:
    """Round-robin over the arms for the first K epochs, then the largest index (lowest arm on ties)."""
    if state.n < action_count:
        return state.n
    return int(np.argmax(state.index))


# --- Diagnostics ---

def play_thresholds(delta_a: float, delta_n: float, knowledge: ConvergenceKnowledge) -> Tuple[float, float]:
    """
    Epoch lengths past which a suboptimal arm's estimate stays below x_a* + delta_a/2:
    one for the observation noise, one for the distance to equilibrium. Never read by
    the algorithm itself.
    """
    if not delta_a > 0:
        raise InvalidInputError(f"delta_a must be > 0, got {delta_a}")
    if not 0 < delta_n < 2:
        raise InvalidInputError(f"delta_n must lie in (0, 2), got {delta_n}")
    ell1 = 64.0 * knowledge.sigma ** 2 / delta_a ** 2 * math.log(2.0 / delta_n)
    ell2 = 2.0 * knowledge.tau_c * math.log(8.0 * knowledge.lipschitz_L / delta_a) if knowledge.lipschitz_L > 0 else 0.0
    return ell1, ell2


def threshold_epochs(ell1: float, ell2: float, params: UecbParams) -> Tuple[int, int]:
    """Epoch counts m with 2*rho2*exp(rho1*m) reaching each threshold."""

    def _epochs(ell: float) -> int:
        if ell <= 2.0 * params.rho2:
            return 0
        return int(math.ceil(math.log(ell / (2.0 * params.rho2)) / params.rho1))

    return _epochs(ell1), _epochs(ell2)


def noiseless_play_bound(delta_a: float, knowledge: ConvergenceKnowledge, params: UecbParams) -> float:
    """Timesteps a noiseless run may spend on an arm with gap delta_a, before even-rounding slack."""
    if not delta_a > 0:
        raise InvalidInputError(f"delta_a must be > 0, got {delta_a}")
    log_plus = max(0.0, math.log(2.0 * knowledge.lipschitz_L / delta_a)) if knowledge.lipschitz_L > 0 else 0.0
    growth = math.exp(2.0 * params.rho1) / math.expm1(params.rho1)
    return growth * knowledge.tau_c * log_plus + 2.0 * params.rho2


# --- Policy ---

class UecbPolicy(Policy):
    name = "uecb"

    def __init__(self, action_count: int, params: UecbParams, rng: np.random.Generator | None = None):
        super().__init__(action_count, rng)
        self.params = params
        self.state = EpochState.initial(self.action_count)
        self.epoch_log: List[Tuple[int, int]] = []
        self._arm: int | None = None
        self._length = 0
        self._rewards: List[float] = []

    def select_arm(self, t: int) -> int:
        if self._arm is None:
            self._arm = select_action(self.state, self.action_count)
            self._length = epoch_length(int(self.state.m[self._arm]), self.params)
            self._rewards = []
        return self._arm

    def update(self, arm: int, reward: float) -> None:
        if arm != self._arm:
            raise InvalidInputError(f"reward for arm {arm} arrived during an epoch of arm {self._arm}")
        self._rewards.append(float(reward))
        if len(self._rewards) == self._length:
            self._close_epoch(truncated=False)

    def finish(self) -> None:
        if self._arm is not None and self._rewards:
            self._close_epoch(truncated=True)

    def _close_epoch(self, truncated: bool) -> None:
        self.state = update_after_epoch(self.state, self._arm, self._rewards, self.params, truncated=truncated)
        self.epoch_log.append((self._arm, len(self._rewards)))
        self._arm = None
        self._rewards = []

    def __str__(self) -> str:
        return f"UECB(rho1={self.params.rho1:.4g}, rho2={self.params.rho2:.4g}, mode={self.params.mode})"
