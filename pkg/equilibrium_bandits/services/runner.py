# Copyright (c) 2025, Equilibrium Bandits Contributors
# SPDX-License-Identifier: MIT

"""
Drives realizations: one (algorithm, seed) pair plays the environment for T
steps while regret is accumulated against the optimal equilibrium reward.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from equilibrium_bandits.api import build_policy, equilibria
from equilibrium_bandits.bandits.policy import Policy
from equilibrium_bandits.config import AlgorithmSpec, ExperimentConfig
from equilibrium_bandits.core.exceptions import EquilibriumBanditError, RealizationError
from equilibrium_bandits.core.model import (
    EnvironmentModel,
    EquilibriumInfo,
    RegretTrajectory,
    StateVector,
    accumulate_regret,
    step_environment,
)
from equilibrium_bandits.services.logger import logger


@dataclass(frozen=True)
class SeedStreams:
    """Independent generators of one realization: initial state, observation noise, policy."""

    init: np.random.Generator
    noise: np.random.Generator
    policy: np.random.Generator


def seed_streams(master_seed: int, seed_index: int) -> SeedStreams:
    """Child `seed_index` of the master seed, split three ways. Same for every algorithm."""
    child = np.random.SeedSequence(master_seed, spawn_key=(seed_index,))
    init, noise, policy = (np.random.default_rng(s) for s in child.spawn(3))
    return SeedStreams(init=init, noise=noise, policy=policy)


def play(
    env: EnvironmentModel,
    policy: Policy,
    horizon: int,
    x_star_opt: float,
    noise_rng: np.random.Generator,
    initial_state: Optional[StateVector] = None,
    algorithm: Optional[str] = None,
    seed: Optional[int] = None,
) -> RegretTrajectory:
    """select -> step -> accumulate -> update for t = 1..horizon, then let the policy flush."""
    trajectory = RegretTrajectory.empty(horizon)
    z = env.initial_state if initial_state is None else env.check_state(initial_state)
    t = 0
    try:
        for t in range(1, horizon + 1):
            a = policy.select_arm(t)
            z, x_t, y_t = step_environment(env, a, z, noise_rng)
            accumulate_regret(trajectory, x_star_opt, x_t, y_t, a)
            policy.update(a, y_t)
        policy.finish()
    except EquilibriumBanditError as exc:
        raise RealizationError(str(exc), t, algorithm, seed) from exc
    except (ArithmeticError, ValueError) as exc:
        raise RealizationError(f"{type(exc).__name__}: {exc}", t, algorithm, seed) from exc
    return trajectory


def run_realization(
    env: EnvironmentModel,
    algorithm: AlgorithmSpec,
    horizon: int,
    seed: int,
    info: EquilibriumInfo,
    master_seed: int = 0,
    random_initial_state: bool = False,
) -> RegretTrajectory:
    """Realization `seed` of one algorithm; deterministic given (master_seed, seed)."""
    streams = seed_streams(master_seed, seed)
    start = env.sample_state(streams.init) if random_initial_state else env.initial_state
    policy = build_policy(algorithm, env, horizon, streams.policy)
    return play(env, policy, horizon, info.x_star_opt, streams.noise, start, algorithm.label, seed)


# --- Experiments ---

@dataclass
class ExperimentResult:
    config: ExperimentConfig
    info: EquilibriumInfo
    trajectories: Dict[str, List[RegretTrajectory]] = field(default_factory=dict)
    wall_time: float = 0.0


def _realization_task(args: Tuple[EnvironmentModel, AlgorithmSpec, int, int, EquilibriumInfo, int, bool]) -> RegretTrajectory:
    return run_realization(*args)


def run_experiment(
    config: ExperimentConfig,
    env: EnvironmentModel,
    info: Optional[EquilibriumInfo] = None,
    progress: Optional[Callable[[str, int], None]] = None,
) -> ExperimentResult:
    """
    Every algorithm over seeds 0..num_seeds-1. With workers > 1 the realizations run
    in a process pool; results are always ordered by seed index.
    """
    started = time.perf_counter()
    config.validate(env.action_count)
    if info is None:
        info = equilibria(env)
    logger.info(
        "Experiment %s on %s: %d algorithm(s) x %d seed(s), T=%d, x*_opt=%.6g (action %d)",
        config.config_hash()[:12], env.name, len(config.algorithms), config.num_seeds, config.horizon,
        info.x_star_opt, info.optimal_action + 1,
    )

    result = ExperimentResult(config=config, info=info)
    for algorithm in config.algorithms:
        tasks: Sequence[tuple] = [
            (env, algorithm, config.horizon, k, info, config.master_seed, config.random_initial_state)
            for k in range(config.num_seeds)
        ]
        if config.workers > 1:
            with ProcessPoolExecutor(max_workers=config.workers) as pool:
                trajectories = []
                for k, trajectory in enumerate(pool.map(_realization_task, tasks)):
                    trajectories.append(trajectory)
                    if progress is not None:
                        progress(algorithm.label, k)
        else:
            trajectories = []
            for k, task in enumerate(tasks):
                trajectories.append(_realization_task(task))
                if progress is not None:
                    progress(algorithm.label, k)
        result.trajectories[algorithm.label] = trajectories
        finals = np.array([tr.final_pseudo_regret for tr in trajectories])
        logger.info(
            "%s finished %d realization(s): final pseudo-regret mean %.6g, std %.6g",
            algorithm.label, len(trajectories), finals.mean(), finals.std(),
        )

    result.wall_time = time.perf_counter() - started
    return result
