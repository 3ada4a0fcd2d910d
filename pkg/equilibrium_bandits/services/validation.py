# Copyright (c) 2025, Equilibrium Bandits Contributors
# SPDX-License-Identifier: MIT

"""
Checks of the assumptions the agent relies on, run against sampled states:
per-step contraction within the declared tau_c, rewards in [0, 1], a reward
envelope no wider than the declared L, exact fixed points, and for games the
declared monotonicity and Lipschitz constants.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from equilibrium_bandits.core.model import EnvironmentModel, EquilibriumInfo
from equilibrium_bandits.environments.game.game import GameEnvironment, utility_gradient

RATIO_TOL = 1e-9
# Rounding slack on d(g(z), z*) <= bound d(z, z*) + slack. The slack also carries twice
# the error residual / (1 - bound) the oracle may leave in z*.
STEP_SLACK = 1e-9
MIN_DISTANCE = 1e-6
# Distances are only compared while they dwarf the error left in z* by the oracle.
ORACLE_ERROR_MARGIN = 1e4


@dataclass(frozen=True)
class CheckResult:
    name: str
    action: Optional[int]
    ok: bool
    low: float = float("nan")
    high: float = float("nan")
    limit: float = float("nan")
    detail: str = ""


@dataclass
class ValidationReport:
    environment: str
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(check.ok for check in self.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.ok]


def check_contraction(
    env: EnvironmentModel, info: EquilibriumInfo, rng: np.random.Generator, samples: int = 50, steps: int = 20
) -> List[CheckResult]:
    """Observed ratios d(g(a;z), z_a*) / d(z, z_a*) along short trajectories from sampled starts."""
    bound = env.knowledge.contraction_bound
    results = []
    for a in range(env.action_count):
        target = info.z_star[a]
        residual = info.residuals[a] if info.residuals else 0.0
        oracle_error = residual / (1.0 - bound)
        floor = max(MIN_DISTANCE, ORACLE_ERROR_MARGIN * oracle_error)
        slack = STEP_SLACK + 2.0 * oracle_error
        ratios, excess = [], []
        starts = [env.initial_state] + [env.sample_state(rng) for _ in range(samples)]
        for z in starts:
            for _ in range(steps):
                before = env.distance(z, target)
                if before < floor:
                    break
                z = env.evolution(a, z)
                after = env.distance(z, target)
                ratios.append(after / before)
                excess.append(after - bound * before)
        if not ratios:
            results.append(CheckResult("contraction", a, True, detail="every start already at equilibrium"))
            continue
        high = max(ratios)
        results.append(
            CheckResult("contraction", a, max(excess) <= slack, min(ratios), high, bound)
        )
    return results


def check_rewards(env: EnvironmentModel, info: EquilibriumInfo, rng: np.random.Generator, samples: int = 50) -> List[CheckResult]:
    """Raw rewards at sampled states and at equilibrium; only the equilibrium must already lie in [0, 1]."""
    if not env.reward_clamped:
        return [CheckResult("rewards", None, True, detail=f"{env.name} is exempt from the [0, 1] normalization")]
    results = []
    for a in range(env.action_count):
        raw = [env._reward(a, env.sample_state(rng)) for _ in range(samples)]
        at_equilibrium = env._reward(a, info.z_star[a])
        clamped = sum(1 for r in raw if r < 0.0 or r > 1.0)
        results.append(
            CheckResult(
                "rewards",
                a,
                0.0 <= at_equilibrium <= 1.0,
                min(raw),
                max(raw),
                at_equilibrium,
                detail=f"{clamped} of {samples} sampled rewards clamped",
            )
        )
    return results


def check_reward_envelope(
    env: EnvironmentModel, info: EquilibriumInfo, rng: np.random.Generator, samples: int = 50
) -> List[CheckResult]:
    """|f(a; z) - x_a*| <= L from any feasible start, so L exp(-t/tau_c) bounds the equilibrium noise."""
    if not env.reward_clamped:
        return [CheckResult("envelope", None, True, detail=f"{env.name} is exempt from the unit-ball normalization")]
    lipschitz = env.knowledge.lipschitz_L
    results = []
    for a in range(env.action_count):
        starts = [env.initial_state] + [env.sample_state(rng) for _ in range(samples)]
        gaps = [abs(env.expected_reward(a, z) - info.x_star[a]) for z in starts]
        results.append(CheckResult("envelope", a, max(gaps) <= lipschitz + 1e-12, min(gaps), max(gaps), lipschitz))
    return results


def check_fixed_points(env: EnvironmentModel, info: EquilibriumInfo, tol: float = 1e-8) -> List[CheckResult]:
    results = []
    for a in range(env.action_count):
        residual = env.distance(env.evolution(a, info.z_star[a]), info.z_star[a])
        results.append(CheckResult("fixed_point", a, residual <= tol, residual, residual, tol))
    return results


def check_game_bounds(env: GameEnvironment, rng: np.random.Generator, samples: int = 50) -> List[CheckResult]:
    """Sampled <F(z1)-F(z2), z1-z2>/|z1-z2|^2 must stay >= lambda_a and |F(z1)-F(z2)|/|z1-z2| <= beta_a, F = -h."""
    cfg = env.cfg
    results = []
    for a in range(cfg.action_count):
        mask = cfg.masks[a].ravel()
        monotone, lipschitz = [], []
        for _ in range(samples):
            z1 = np.where(mask, env.sample_state(rng), 0.0)
            z2 = np.where(mask, env.sample_state(rng), 0.0)
            diff = z1 - z2
            norm_sq = float(diff @ diff)
            if norm_sq == 0.0:
                continue
            delta_f = (utility_gradient(cfg, a, z2) - utility_gradient(cfg, a, z1)).ravel()
            monotone.append(float(delta_f @ diff) / norm_sq)
            lipschitz.append(float(np.linalg.norm(delta_f)) / np.sqrt(norm_sq))
        lam, beta = float(env.lambdas[a]), float(env.betas[a])
        results.append(CheckResult("game_monotonicity", a, min(monotone) >= lam * (1.0 - RATIO_TOL), min(monotone), max(monotone), lam))
        results.append(CheckResult("game_lipschitz", a, max(lipschitz) <= beta * (1.0 + RATIO_TOL), min(lipschitz), max(lipschitz), beta))
    return results


def validate_environment(
    env: EnvironmentModel, info: EquilibriumInfo, seed: int = 0, samples: int = 50, steps: int = 20
) -> ValidationReport:
    rng = np.random.default_rng(seed)
    report = ValidationReport(environment=env.name)
    report.checks.extend(check_contraction(env, info, rng, samples, steps))
    report.checks.extend(check_rewards(env, info, rng, samples))
    report.checks.extend(check_reward_envelope(env, info, rng, samples))
    report.checks.extend(check_fixed_points(env, info))
    if isinstance(env, GameEnvironment):
        report.checks.extend(check_game_bounds(env, rng, samples))
    return report
