# Copyright (c) 2025, Equilibrium Bandits Contributors
# SPDX-License-Identifier: MIT

"""
Resource-allocation game played by gradient ascent. Player i uses z_i^l of
resource l and earns

    u_i = sum_l gamma_il log(1 + z_i^l) - zeta_il z_i^l s_l,    s_l = sum_i z_i^l.

An action of the policymaker restricts every player to a subset R_i(a) of the
resources; the players then follow z <- Proj(z + alpha h(a; z)) with h the exact
partial derivatives of their own utilities. The joint state is stored flat,
player-major, with M*d entries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from equilibrium_bandits.core.exceptions import InvalidInputError
from equilibrium_bandits.core.model import ConvergenceKnowledge, EnvironmentModel, StateVector

# --- Constants ---
REFERENCE_PLAYERS = 1000
REFERENCE_RESOURCES = 10
DEFAULT_ACTIONS = 4
COEFFICIENT_RANGE = (0.8, 1.0)
MASK_DENSITY = 0.5
Z_MAX = 10.0
LIPSCHITZ_SAMPLES = 64


@dataclass(frozen=True)
class GameConfig:
    gamma: np.ndarray
    zeta: np.ndarray
    masks: np.ndarray
    alpha: float
    z_max: float = Z_MAX

    def __post_init__(self):
        if self.gamma.ndim != 2 or self.gamma.shape != self.zeta.shape:
            raise InvalidInputError("gamma and zeta need shape (players, resources)")
        if self.masks.ndim != 3 or self.masks.shape[1:] != self.gamma.shape:
            raise InvalidInputError(f"masks need shape (actions, {self.gamma.shape[0]}, {self.gamma.shape[1]})")
        if np.any(self.gamma <= 0) or np.any(self.zeta <= 0):
            raise InvalidInputError("gamma and zeta must be positive")
        if not self.alpha > 0:
            raise InvalidInputError(f"alpha must be > 0, got {self.alpha}")
        if not self.z_max > 0:
            raise InvalidInputError(f"z_max must be > 0, got {self.z_max}")

    @property
    def players(self) -> int:
        return self.gamma.shape[0]

    @property
    def resources(self) -> int:
        return self.gamma.shape[1]

    @property
    def action_count(self) -> int:
        return self.masks.shape[0]


# --- Dynamics ---

def resource_loads(cfg: GameConfig, z: StateVector) -> np.ndarray:
    """s_l = sum_i z_i^l."""
    return np.asarray(z, dtype=float).reshape(cfg.players, cfg.resources).sum(axis=0)


def utility_gradient(cfg: GameConfig, a: int, z: StateVector) -> np.ndarray:
    """h(a; z) as an (M, d) array, zero on masked resources."""
    joint = np.asarray(z, dtype=float).reshape(cfg.players, cfg.resources)
    loads = joint.sum(axis=0)
    grad = cfg.gamma / (1.0 + joint) - cfg.zeta * (loads + joint)
    return np.where(cfg.masks[a], grad, 0.0)


def game_step(cfg: GameConfig, a: int, z: StateVector) -> np.ndarray:
    """Projected simultaneous gradient step onto the box [0, z_max] and the action's mask."""
    mask = cfg.masks[a]
    joint = np.where(mask, np.asarray(z, dtype=float).reshape(cfg.players, cfg.resources), 0.0)
    stepped = joint + cfg.alpha * utility_gradient(cfg, a, joint.ravel())
    return np.where(mask, np.clip(stepped, 0.0, cfg.z_max), 0.0).ravel()


def welfare(cfg: GameConfig, a: int, z: StateVector) -> float:
    """Sum of the players' utilities on the action's feasible set."""
    joint = np.where(cfg.masks[a], np.asarray(z, dtype=float).reshape(cfg.players, cfg.resources), 0.0)
    loads = joint.sum(axis=0)
    return float(np.sum(cfg.gamma * np.log1p(joint) - cfg.zeta * joint * loads))


def welfare_gradient(cfg: GameConfig, a: int, z: StateVector) -> np.ndarray:
    joint = np.where(cfg.masks[a], np.asarray(z, dtype=float).reshape(cfg.players, cfg.resources), 0.0)
    loads = joint.sum(axis=0)
    priced = (cfg.zeta * joint).sum(axis=0)
    grad = cfg.gamma / (1.0 + joint) - cfg.zeta * loads - priced
    return np.where(cfg.masks[a], grad, 0.0).ravel()


# --- Monotonicity and Lipschitz bounds ---

def monotonicity_bound(cfg: GameConfig, a: int) -> float:
    """
    Lower bound on the smallest eigenvalue of the symmetrized Jacobian of -h over the
    box, taken resource by resource over the players that may use it.
    """
    bounds = []
    for l in range(cfg.resources):
        active = cfg.masks[a][:, l]
        n = int(active.sum())
        if n == 0:
            continue
        gamma, zeta = cfg.gamma[active, l], cfg.zeta[active, l]
        diagonal = np.min(gamma / (1.0 + cfg.z_max) ** 2 + zeta)
        if n == 1:
            coupling = float(zeta[0])
        else:
            coupling = 0.5 * (zeta.sum() - math.sqrt(n * float(np.sum(zeta ** 2))))
        bounds.append(float(diagonal) + coupling)
    return min(bounds) if bounds else 1.0


def gradient_lipschitz_bound(cfg: GameConfig, a: int) -> float:
    """Upper bound on the spectral norm of the Jacobian of h over the box."""
    bounds = []
    for l in range(cfg.resources):
        active = cfg.masks[a][:, l]
        n = int(active.sum())
        if n == 0:
            continue
        gamma, zeta = cfg.gamma[active, l], cfg.zeta[active, l]
        bounds.append(float(np.max(gamma + zeta) + np.linalg.norm(zeta) * math.sqrt(n)))
    return max(bounds) if bounds else 1.0


def contraction_factor(lam: float, beta: float, alpha: float) -> float:
    """sqrt(1 - 2 lam alpha + alpha^2 beta^2); requires 0 < alpha <= 2 lam / beta^2."""
    if not lam > 0 or not beta > 0:
        raise InvalidInputError(f"lambda and beta must be > 0, got {lam}, {beta}")
    if not 0 < alpha <= 2.0 * lam / beta ** 2 * (1.0 + 1e-12):
        raise InvalidInputError(f"alpha={alpha} outside (0, 2*lambda/beta^2 = {2.0 * lam / beta ** 2}]")
    return math.sqrt(max(0.0, 1.0 - 2.0 * lam * alpha + alpha * alpha * beta * beta))


def game_contraction_factor(cfg: GameConfig, a: int) -> float:
    return contraction_factor(monotonicity_bound(cfg, a), gradient_lipschitz_bound(cfg, a), cfg.alpha)


def default_step_size(gamma: np.ndarray, zeta: np.ndarray, masks: np.ndarray, z_max: float = Z_MAX) -> float:
    """alpha = min_a lambda_a / beta_a^2, the step that minimizes the slowest contraction factor."""
    unit_step = GameConfig(gamma, zeta, masks, alpha=1.0, z_max=z_max)
    steps = []
    for a in range(unit_step.action_count):
        lam = monotonicity_bound(unit_step, a)
        if not lam > 0:
            raise InvalidInputError(f"the game restricted by action {a + 1} is not strongly monotone (lambda={lam:.3e})")
        steps.append(lam / gradient_lipschitz_bound(unit_step, a) ** 2)
    return min(steps)


# --- Reward normalization ---

def welfare_bounds(cfg: GameConfig) -> Tuple[float, float]:
    """
    Range of W over the box and every action's mask. Per resource with n active
    players, W_l >= -zeta_max (n z_max)^2, and W_l <= gamma_max s - zeta_min s^2 <=
    gamma_max^2 / (4 zeta_min) since log(1 + z) <= z.
    """
    lows, highs = [], []
    for a in range(cfg.action_count):
        low = high = 0.0
        for l in range(cfg.resources):
            active = cfg.masks[a][:, l]
            n = int(active.sum())
            if n == 0:
                continue
            gamma, zeta = cfg.gamma[active, l], cfg.zeta[active, l]
            low -= float(zeta.max()) * (n * cfg.z_max) ** 2
            high += min(float(gamma.max()) ** 2 / (4.0 * float(zeta.min())), float(gamma.sum()) * math.log1p(cfg.z_max))
        lows.append(low)
        highs.append(high)
    return min(lows), max(highs)


# --- Environment ---

class GameEnvironment(EnvironmentModel):
    """
    Reward (W - W_min) / (W_max - W_min), where W is the welfare of the current
    profile and [W_min, W_max] bounds it over the box under every action. The agent
    is told tau_c from the slowest per-action contraction factor and an envelope
    from sampled reward gradients, at most 1.
    """

    name = "game"
    norm_ord = 2
    observable = True

    def __init__(
        self,
        cfg: GameConfig,
        noise_sigma: float = 0.0,
        initial_state: Optional[StateVector] = None,
        lipschitz: Optional[float] = None,
        seed: int = 0,
    ):
        self.cfg = cfg
        self.welfare_low, self.welfare_high = welfare_bounds(cfg)
        if not self.welfare_high > self.welfare_low:
            raise InvalidInputError("every action masks out every resource: the welfare is constant")
        self.lambdas = np.array([monotonicity_bound(cfg, a) for a in range(cfg.action_count)])
        self.betas = np.array([gradient_lipschitz_bound(cfg, a) for a in range(cfg.action_count)])
        if np.any(self.lambdas <= 0):
            raise InvalidInputError(f"some action leaves the game without strong monotonicity: {self.lambdas.tolist()}")
        self.factors = np.array(
            [contraction_factor(lam, beta, cfg.alpha) for lam, beta in zip(self.lambdas, self.betas)]
        )
        slowest = float(self.factors.max())
        if slowest <= 0.0:
            tau_c = 1.0
        elif slowest >= 1.0:
            raise InvalidInputError("alpha sits on the boundary 2*lambda/beta^2: no contraction")
        else:
            tau_c = max(1.0, -1.0 / math.log(slowest))
        if lipschitz is None:
            lipschitz = self.estimate_lipschitz(np.random.default_rng(seed))
        knowledge = ConvergenceKnowledge(tau_c=tau_c, lipschitz_L=lipschitz, sigma=noise_sigma)
        if initial_state is None:
            initial_state = np.zeros(cfg.players * cfg.resources)
        super().__init__(cfg.action_count, cfg.players * cfg.resources, noise_sigma, initial_state, knowledge)

    @property
    def welfare_span(self) -> float:
        return self.welfare_high - self.welfare_low

    def evolution(self, a: int, z: StateVector) -> StateVector:
        return game_step(self.cfg, a, z)

    def _reward(self, a: int, z: StateVector) -> float:
        return (welfare(self.cfg, a, z) - self.welfare_low) / self.welfare_span

    def sample_state(self, rng: np.random.Generator) -> StateVector:
        return rng.uniform(0.0, self.cfg.z_max, size=self.cfg.players * self.cfg.resources)

    def estimate_lipschitz(self, rng: np.random.Generator, samples: int = LIPSCHITZ_SAMPLES) -> float:
        """
        Largest ||grad f||_2 over the fully loaded profile and sampled profiles, times
        the diameter of the action's box, capped at 1 since f lies in [0, 1].
        """
        largest = 0.0
        for a in range(self.cfg.action_count):
            mask = self.cfg.masks[a].ravel()
            diameter = self.cfg.z_max * math.sqrt(int(mask.sum()))
            profiles = [mask * self.cfg.z_max] + [np.where(mask, self.sample_state(rng), 0.0) for _ in range(samples)]
            for z in profiles:
                gradient = float(np.linalg.norm(welfare_gradient(self.cfg, a, z))) / self.welfare_span
                largest = max(largest, gradient * diameter)
        return min(1.0, largest)


def generate_game_config(
    seed: int,
    players: int,
    resources: int,
    actions: int = DEFAULT_ACTIONS,
    mask_density: float = MASK_DENSITY,
    alpha: Optional[float] = None,
    z_max: float = Z_MAX,
    coefficient_range: Tuple[float, float] = COEFFICIENT_RANGE,
) -> GameConfig:
    if players < 1 or resources < 1 or actions < 1:
        raise InvalidInputError("players, resources and actions must all be >= 1")
    if not 0 < mask_density <= 1:
        raise InvalidInputError(f"mask_density must lie in (0, 1], got {mask_density}")
    rng = np.random.default_rng(seed)
    gamma = rng.uniform(*coefficient_range, size=(players, resources))
    zeta = rng.uniform(*coefficient_range, size=(players, resources))
    masks = rng.random((actions, players, resources)) < mask_density
    if alpha is None:
        alpha = default_step_size(gamma, zeta, masks, z_max)
    cfg = GameConfig(gamma, zeta, masks, float(alpha), float(z_max))
    for a in range(actions):
        limit = 2.0 * monotonicity_bound(cfg, a) / gradient_lipschitz_bound(cfg, a) ** 2
        if alpha > limit:
            raise InvalidInputError(f"alpha={alpha} exceeds 2*lambda/beta^2 = {limit:.3e} for action {a + 1}")
    return cfg


def build_game(
    seed: int,
    sigma: float = 0.0,
    players: int = REFERENCE_PLAYERS,
    resources: int = REFERENCE_RESOURCES,
    actions: int = DEFAULT_ACTIONS,
    mask_density: float = MASK_DENSITY,
    alpha: Optional[float] = None,
    z_max: float = Z_MAX,
) -> GameEnvironment:
    cfg = generate_game_config(seed, players, resources, actions, mask_density, alpha, z_max)
    return GameEnvironment(cfg, noise_sigma=sigma, seed=seed)


def build_paper_game(seed: int, sigma: float = 0.0) -> GameEnvironment:
    """d=10 resources shared by M=1000 players, coefficients uniform in [0.8, 1]."""
    return build_game(seed, sigma=sigma)
