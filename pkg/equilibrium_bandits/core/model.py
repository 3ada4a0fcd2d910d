# Copyright (c) 2025, Equilibrium Bandits Contributors
# SPDX-License-Identifier: MIT

"""
The equilibrium-bandit abstraction: an environment is a pair (g, f) acting on a
hidden state, plus observation noise. Every algorithm and every environment in
this package plugs into the types and operations defined here.
"""

from __future__ import annotations

import abc
import copy
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from equilibrium_bandits.core.exceptions import (
    ConvergenceError,
    InvalidInputError,
    MultipleEquilibriaError,
)
from equilibrium_bandits.services.logger import logger

# --- Constants ---
DEFAULT_TOL = 1e-10
TIE_TOL = 1e-12

StateVector = np.ndarray


# --- Agent-side knowledge ---

@dataclass(frozen=True)
class ConvergenceKnowledge:
    """Bounds the agent is given: convergence time, reward Lipschitz constant, noise level."""

    tau_c: float
    lipschitz_L: float
    sigma: float

    def __post_init__(self):
        if not self.tau_c >= 1:
            raise InvalidInputError(f"tau_c must be >= 1, got {self.tau_c}")
        # L = 0 is accepted: it switches the equilibrium bonus off.
        if not self.lipschitz_L >= 0:
            raise InvalidInputError(f"lipschitz_L must be >= 0, got {self.lipschitz_L}")
        if not self.sigma >= 0:
            raise InvalidInputError(f"sigma must be >= 0, got {self.sigma}")

    @property
    def contraction_bound(self) -> float:
        return math.exp(-1.0 / self.tau_c)

    @classmethod
    def from_contraction_factor(cls, factor: float, lipschitz_L: float, sigma: float) -> "ConvergenceKnowledge":
        """tau_c for which exp(-1/tau_c) equals the given per-step contraction factor."""
        if not 0 < factor < 1:
            raise InvalidInputError(f"contraction factor must lie in (0, 1), got {factor}")
        return cls(tau_c=max(1.0, -1.0 / math.log(factor)), lipschitz_L=lipschitz_L, sigma=sigma)


# --- Environment ---

class EnvironmentModel(abc.ABC):
    """
    Deterministic evolution z' = g(a; z) and expected reward x = f(a; z), observed
    through Gaussian noise of standard deviation `noise_sigma`.

    Subclasses implement `evolution`, `_reward` and `sample_state`. They also declare
    the norm in which their contraction holds (`norm_ord`, as understood by
    numpy.linalg.norm) and whether rewards are clamped to [0, 1].
    """

    name: str = "environment"
    norm_ord: float = 2
    reward_clamped: bool = True
    observable: bool = False

    def __init__(
        self,
        action_count: int,
        state_dim: int,
        noise_sigma: float,
        initial_state: Sequence[float],
        knowledge: ConvergenceKnowledge,
    ):
        if action_count < 1:
            raise InvalidInputError("an environment needs at least one action")
        if noise_sigma < 0:
            raise InvalidInputError(f"noise_sigma must be >= 0, got {noise_sigma}")
        self.action_count = int(action_count)
        self.state_dim = int(state_dim)
        self.noise_sigma = float(noise_sigma)
        self.initial_state = self.check_state(np.asarray(initial_state, dtype=float))
        self.knowledge = knowledge

    @abc.abstractmethod
    def evolution(self, a: int, z: StateVector) -> StateVector:
        """g(a; z)."""

    @abc.abstractmethod
    def _reward(self, a: int, z: StateVector) -> float:
        """Raw f(a; z) before clamping."""

    @abc.abstractmethod
    def sample_state(self, rng: np.random.Generator) -> StateVector:
        """Draw a state from the declared feasible set."""

    def expected_reward(self, a: int, z: StateVector) -> float:
        value = float(self._reward(a, z))
        if self.reward_clamped:
            return min(1.0, max(0.0, value))
        return value

    def distance(self, z1: StateVector, z2: StateVector) -> float:
        return float(np.linalg.norm(np.asarray(z1) - np.asarray(z2), ord=self.norm_ord))

    def check_action(self, a: int) -> int:
        if isinstance(a, bool) or not isinstance(a, (int, np.integer)) or not 0 <= a < self.action_count:
            raise InvalidInputError(f"invalid action {a!r} for {self.name} with K={self.action_count}")
        return int(a)

    def check_state(self, z: StateVector) -> StateVector:
        z = np.asarray(z, dtype=float)
        if z.ndim != 1 or z.shape[0] != self.state_dim:
            raise InvalidInputError(f"state has shape {z.shape}, {self.name} expects ({self.state_dim},)")
        return z

    def with_knowledge(self, tau_c: Optional[float] = None, lipschitz: Optional[float] = None) -> "EnvironmentModel":
        """A copy telling the agent different bounds; the dynamics and `self` are untouched."""
        other = copy.copy(self)
        other.knowledge = ConvergenceKnowledge(
            tau_c=self.knowledge.tau_c if tau_c is None else float(tau_c),
            lipschitz_L=self.knowledge.lipschitz_L if lipschitz is None else float(lipschitz),
            sigma=self.knowledge.sigma,
        )
        return other

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name} K={self.action_count} d={self.state_dim} sigma={self.noise_sigma}>"


def step_environment(
    env: EnvironmentModel, a: int, z: StateVector, rng: np.random.Generator
) -> Tuple[StateVector, float, float]:
    """Play `a` once from state `z`: returns (next_state, expected_reward, noisy_reward)."""
    a = env.check_action(a)
    z = env.check_state(z)
    expected = env.expected_reward(a, z)
    noisy = expected + env.noise_sigma * rng.standard_normal() if env.noise_sigma > 0 else expected
    return env.evolution(a, z), expected, noisy


# --- Equilibrium oracle ---

@dataclass(frozen=True)
class EquilibriumEntry:
    action: int
    z_star: StateVector
    x_star: float
    residual: float
    iterations: int


@dataclass(frozen=True)
class GapReport:
    optimal_action: int
    delta: np.ndarray
    tie: bool


@dataclass(frozen=True)
class EquilibriumInfo:
    """Oracle-side view used only for regret accounting."""

    z_star: Tuple[StateVector, ...]
    x_star: np.ndarray
    delta: np.ndarray
    optimal_action: int
    tie: bool = False
    residuals: Tuple[float, ...] = ()

    @property
    def x_star_opt(self) -> float:
        return float(self.x_star[self.optimal_action])


def default_max_iters(knowledge: ConvergenceKnowledge, tol: float) -> int:
    return int(math.ceil(10.0 * knowledge.tau_c * math.log(1.0 / tol)))


def compute_equilibrium(
    env: EnvironmentModel,
    a: int,
    tol: float = DEFAULT_TOL,
    max_iters: Optional[int] = None,
    start: Optional[StateVector] = None,
) -> EquilibriumEntry:
    """Iterate z <- g(a; z) until successive iterates are closer than `tol`."""
    if not tol > 0:
        raise InvalidInputError(f"tol must be > 0, got {tol}")
    if max_iters is None:
        max_iters = default_max_iters(env.knowledge, tol)
    if max_iters < 1:
        raise InvalidInputError(f"max_iters must be >= 1, got {max_iters}")
    a = env.check_action(a)
    z = env.check_state(env.initial_state if start is None else start)

    residual = math.inf
    for k in range(1, max_iters + 1):
        z_next = env.evolution(a, z)
        residual = env.distance(z_next, z)
        z = z_next
        if residual < tol:
            return EquilibriumEntry(a, z, env.expected_reward(a, z), residual, k)
    raise ConvergenceError(f"{env.name}: action {a} did not reach a fixed point", residual, max_iters)


def compute_gaps(x_star: Sequence[float]) -> GapReport:
    """Optimal action (lowest index among ties) and per-action gaps."""
    x = np.asarray(x_star, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise InvalidInputError("compute_gaps needs one equilibrium reward per action")
    best = int(np.argmax(x))
    tie = int(np.count_nonzero(x >= x[best] - TIE_TOL)) > 1
    if tie:
        logger.warning("Optimal action is not unique (x_star=%s); using lowest index %d", x.tolist(), best)
    return GapReport(optimal_action=best, delta=x[best] - x, tie=tie)


def solve_equilibria(
    env: EnvironmentModel,
    tol: float = DEFAULT_TOL,
    max_iters: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
    extra_starts: int = 0,
) -> EquilibriumInfo:
    """
    Equilibrium of every action plus the gaps. With `extra_starts` > 0 the oracle is
    re-run from sampled feasible states and an environment whose limits depend on
    the start is rejected.
    """
    entries: List[EquilibriumEntry] = [compute_equilibrium(env, a, tol, max_iters) for a in range(env.action_count)]
    if extra_starts:
        rng = rng if rng is not None else np.random.default_rng(0)
        agreement = max(1e-6, 1e4 * tol)
        for entry in entries:
            for _ in range(extra_starts):
                other = compute_equilibrium(env, entry.action, tol, max_iters, start=env.sample_state(rng))
                gap = env.distance(other.z_star, entry.z_star)
                if gap > agreement:
                    raise MultipleEquilibriaError(
                        f"{env.name}: action {entry.action} converges to different states ({gap:.3e} apart) "
                        "depending on the start"
                    )

    gaps = compute_gaps([e.x_star for e in entries])
    return EquilibriumInfo(
        z_star=tuple(e.z_star for e in entries),
        x_star=np.array([e.x_star for e in entries]),
        delta=gaps.delta,
        optimal_action=gaps.optimal_action,
        tie=gaps.tie,
        residuals=tuple(e.residual for e in entries),
    )


# --- Regret accounting ---

@dataclass
class RegretTrajectory:
    """Cumulative pseudo-regret (against x_t) and realized regret (against y_t)."""

    horizon: int
    pseudo_regret: np.ndarray = field(repr=False)
    realized_regret: np.ndarray = field(repr=False)
    actions: np.ndarray = field(repr=False)
    length: int = 0

    @classmethod
    def empty(cls, horizon: int) -> "RegretTrajectory":
        if horizon < 1:
            raise InvalidInputError(f"horizon must be >= 1, got {horizon}")
        return cls(
            horizon=horizon,
            pseudo_regret=np.zeros(horizon),
            realized_regret=np.zeros(horizon),
            actions=np.full(horizon, -1, dtype=np.int64),
        )

    @property
    def complete(self) -> bool:
        return self.length == self.horizon

    @property
    def final_pseudo_regret(self) -> float:
        return float(self.pseudo_regret[self.length - 1]) if self.length else 0.0

    @property
    def final_realized_regret(self) -> float:
        return float(self.realized_regret[self.length - 1]) if self.length else 0.0


def accumulate_regret(
    trajectory: RegretTrajectory, x_star_opt: float, x_t: float, y_t: float, a_t: int
) -> RegretTrajectory:
    """Append one step's increments to the running sums."""
    i = trajectory.length
    if i >= trajectory.horizon:
        raise InvalidInputError(f"trajectory already holds {trajectory.horizon} steps")
    prev_pseudo = trajectory.pseudo_regret[i - 1] if i else 0.0
    prev_realized = trajectory.realized_regret[i - 1] if i else 0.0
    trajectory.pseudo_regret[i] = prev_pseudo + (x_star_opt - x_t)
    trajectory.realized_regret[i] = prev_realized + (x_star_opt - y_t)
    trajectory.actions[i] = a_t
    trajectory.length = i + 1
    return trajectory
