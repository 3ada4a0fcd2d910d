# Copyright (c) 2025, Equilibrium Bandits Contributors
# SPDX-License-Identifier: MIT

"""Entry points that turn config sections into environments and policies."""

from __future__ import annotations

from typing import Any, Callable, Dict, Optional

import numpy as np

from equilibrium_bandits.bandits.exp3.exp3 import (
    Exp3Params,
    Exp3Policy,
    default_learning_rate,
    default_restart_window,
)
from equilibrium_bandits.bandits.naive.naive import NaiveParams, NaivePolicy
from equilibrium_bandits.bandits.policy import Policy
from equilibrium_bandits.bandits.ucb.ucb import UcbPolicy
from equilibrium_bandits.bandits.uecb.uecb import NOISELESS, NOISY, UecbParams, UecbPolicy
from equilibrium_bandits.config import AlgorithmSpec, EnvironmentSpec
from equilibrium_bandits.core.model import DEFAULT_TOL, EnvironmentModel, EquilibriumInfo, solve_equilibria
from equilibrium_bandits.environments.game.game import build_game
from equilibrium_bandits.environments.linear_contraction.linear_contraction import LinearContractionEnvironment
from equilibrium_bandits.environments.sis.sis import build_sis
from equilibrium_bandits.environments.synthetic.synthetic import LowerBoundPair, build_ucb_breaker
from equilibrium_bandits.services.logger import logger

# Extra random starts the equilibrium oracle uses to reject start-dependent limits.
UNIQUENESS_STARTS = 3

EnvironmentBuilder = Callable[[Dict[str, Any]], EnvironmentModel]
PolicyFactory = Callable[[Dict[str, Any], EnvironmentModel, int, np.random.Generator], Policy]


# --- Environments ---

def _linear_contraction(p: Dict[str, Any]) -> EnvironmentModel:
    return LinearContractionEnvironment(p["fixed_points"], p["factors"], p["initial_state"], p["sigma"])


def _sis(p: Dict[str, Any]) -> EnvironmentModel:
    return build_sis(
        seed=p["seed"],
        sigma=p["sigma"],
        nodes=p["nodes"],
        beta=p["beta"],
        gamma=p["gamma"],
        dt=p["dt"],
        alpha_lb=p["alpha_lb"],
        edge_probability=p["edge_probability"],
        row_sum_low=p["row_sum_low"],
        row_sum_high=p["row_sum_high"],
        initial_infection=p["initial_infection"],
        costs=p["costs"],
        operational_price=p["operational_price"],
    )


def _game(p: Dict[str, Any]) -> EnvironmentModel:
    return build_game(
        seed=p["seed"],
        sigma=p["sigma"],
        players=p["players"],
        resources=p["resources"],
        actions=p["actions"],
        mask_density=p["mask_density"],
        alpha=p["alpha"],
        z_max=p["z_max"],
    )


def _ucb_breaker(p: Dict[str, Any]) -> EnvironmentModel:
    return build_ucb_breaker()


def _lower_bound_pair(p: Dict[str, Any]) -> EnvironmentModel:
    return LowerBoundPair(p["delta"], p["convergence_time"], noise_sigma=p["sigma"])


ENVIRONMENT_ROUTER: Dict[str, EnvironmentBuilder] = {
    "linear_contraction": _linear_contraction,
    "sis": _sis,
    "game": _game,
    "ucb_breaker": _ucb_breaker,
    "lower_bound_pair": _lower_bound_pair,
}


def build_environment(spec: EnvironmentSpec) -> EnvironmentModel:
    """Build the environment and apply the agent-side tau_c / lipschitz overrides."""
    env = ENVIRONMENT_ROUTER[spec.name](spec.params)
    tau_c, lipschitz = spec.params.get("tau_c"), spec.params.get("lipschitz")
    if tau_c is not None or lipschitz is not None:
        env = env.with_knowledge(tau_c=tau_c, lipschitz=lipschitz)
        logger.info("Agent knowledge for %s overridden: %s", env.name, env.knowledge)
    return env


# --- Policies ---

def _uecb(p: Dict[str, Any], env: EnvironmentModel, horizon: int, rng: np.random.Generator) -> Policy:
    mode = p["mode"]
    if mode == "auto":
        mode = NOISELESS if env.noise_sigma == 0 else NOISY
    params = UecbParams(knowledge=env.knowledge, rho1=p["rho1"], rho2=p["rho2"], mode=mode)
    return UecbPolicy(env.action_count, params, rng)


def _naive(p: Dict[str, Any], env: EnvironmentModel, horizon: int, rng: np.random.Generator) -> Policy:
    return NaivePolicy(env.action_count, NaiveParams(t_try=p["t_try"]), rng)


def _ucb(p: Dict[str, Any], env: EnvironmentModel, horizon: int, rng: np.random.Generator) -> Policy:
    sigma = env.noise_sigma if p["sigma"] is None else p["sigma"]
    return UcbPolicy(env.action_count, sigma, rng)


def _exp3(p: Dict[str, Any], env: EnvironmentModel, horizon: int, rng: np.random.Generator) -> Policy:
    rate = p["learning_rate"] if p["learning_rate"] is not None else default_learning_rate(env.action_count, horizon)
    return Exp3Policy(env.action_count, Exp3Params(learning_rate=rate), rng)


def _rexp3(p: Dict[str, Any], env: EnvironmentModel, horizon: int, rng: np.random.Generator) -> Policy:
    window = p["restart_window"] if p["restart_window"] is not None else default_restart_window(horizon)
    # Each restart is a fresh EXP3 run over one window.
    rate = p["learning_rate"] if p["learning_rate"] is not None else default_learning_rate(env.action_count, window)
    return Exp3Policy(env.action_count, Exp3Params(learning_rate=rate, restart_window=window), rng)


ALGORITHM_ROUTER: Dict[str, PolicyFactory] = {
    "uecb": _uecb,
    "naive": _naive,
    "ucb": _ucb,
    "exp3": _exp3,
    "rexp3": _rexp3,
}


def build_policy(spec: AlgorithmSpec, env: EnvironmentModel, horizon: int, rng: np.random.Generator) -> Policy:
    return ALGORITHM_ROUTER[spec.kind](spec.params, env, horizon, rng)


# --- Equilibria ---

def equilibria(
    env: EnvironmentModel,
    tol: float = DEFAULT_TOL,
    uniqueness_starts: int = UNIQUENESS_STARTS,
    seed: Optional[int] = 0,
) -> EquilibriumInfo:
    """Equilibrium of every action, checked against `uniqueness_starts` sampled starts."""
    return solve_equilibria(env, tol=tol, rng=np.random.default_rng(seed), extra_starts=uniqueness_starts)
