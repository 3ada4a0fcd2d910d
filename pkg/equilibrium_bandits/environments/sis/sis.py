# Copyright (c) 2025, Equilibrium Bandits Contributors
# SPDX-License-Identifier: MIT

"""
Networked SIS epidemic. An action fixes the contact matrix A_a and the infection
rate beta_a; the state is the infected fraction of every node and one outer step
is ceil(1/dt) forward-Euler steps of

    dI/dt = beta_a (1 - diag(I)) A_a I - gamma I.

The reward is the negated cost w0_a + w_a . I mapped affinely onto [0, 1] over the
feasible set. By default the cost is priced: every action shares the health weights
w and a looser policy pays less to operate, so the cheapest action right now is the
one whose equilibrium costs most.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from equilibrium_bandits.core.exceptions import DynamicsInstabilityError, InvalidInputError
from equilibrium_bandits.core.model import ConvergenceKnowledge, EnvironmentModel, StateVector
from equilibrium_bandits.services.logger import logger

# --- Constants ---
REFERENCE_BETAS = (0.011, 0.012, 0.013, 0.014)
REFERENCE_GAMMA = 0.01
REFERENCE_NODES = 10
DEFAULT_DT = 0.1
EDGE_PROBABILITY = 0.4
ROW_SUM_RANGE = (3.0, 5.0)
COST_MODELS = ("priced", "random")
# Share of an action's equilibrium health cost that its operation saves under priced costs.
OPERATIONAL_PRICE = 0.8
OPERATIONAL_BASE = 0.1
# Default alpha_lb as a share of the slowest local rate min_a(beta_a r_a - gamma).
ALPHA_LB_SHARE = 0.75
# Margin by which the lowest feasible infection keeps beta_a (A_a I)_i above alpha_lb.
FEASIBLE_MARGIN = 1.25
_SCALING_TOL = 1e-13
_SCALING_MAX_ITERS = 10_000
_POWER_TOL = 1e-12
_POWER_MAX_ITERS = 10_000


@dataclass(frozen=True)
class SisConfig:
    adjacency: Tuple[np.ndarray, ...]
    beta: np.ndarray
    gamma: float
    dt: float
    w0: np.ndarray
    w: np.ndarray
    alpha_lb: float

    def __post_init__(self):
        k = len(self.adjacency)
        if k == 0:
            raise InvalidInputError("SIS needs at least one action")
        m = self.adjacency[0].shape[0]
        for a, mat in enumerate(self.adjacency):
            if mat.shape != (m, m):
                raise InvalidInputError(f"A_{a + 1} has shape {mat.shape}, expected ({m}, {m})")
            if np.any(mat < 0):
                raise InvalidInputError(f"A_{a + 1} has negative entries")
            if not np.array_equal(mat, mat.T):
                raise InvalidInputError(f"A_{a + 1} is not symmetric")
        if self.beta.shape != (k,) or np.any(self.beta <= 0):
            raise InvalidInputError("beta needs one positive rate per action")
        if not self.gamma > 0:
            raise InvalidInputError(f"gamma must be > 0, got {self.gamma}")
        if not 0 < self.dt < 1:
            raise InvalidInputError(f"dt must lie in (0, 1), got {self.dt}")
        if self.gamma * self.dt >= 1:
            raise DynamicsInstabilityError(f"gamma*dt = {self.gamma * self.dt} leaves no room for recovery")
        if self.w0.shape != (k,) or np.any(self.w0 <= 0):
            raise InvalidInputError("w0 needs one positive operational cost per action")
        if self.w.shape != (k, m) or np.any((self.w <= 0) | (self.w > 1)):
            raise InvalidInputError(f"w needs shape ({k}, {m}) with entries in (0, 1]")
        if not self.alpha_lb > 0:
            raise InvalidInputError(f"alpha_lb must be > 0, got {self.alpha_lb}")

    @property
    def nodes(self) -> int:
        return self.adjacency[0].shape[0]

    @property
    def action_count(self) -> int:
        return len(self.adjacency)

    @property
    def inner_steps(self) -> int:
        raw = 1.0 / self.dt
        nearest = round(raw)
        if abs(raw - nearest) <= 1e-9 * raw:
            return int(nearest)
        return int(math.ceil(raw))


# --- Dynamics ---

def sis_inner_step(cfg: SisConfig, a: int, infected: np.ndarray) -> np.ndarray:
    """One forward-Euler step h(beta_a, gamma, A_a, dt; I)."""
    pressure = cfg.beta[a] * cfg.dt * (cfg.adjacency[a] @ infected)
    if np.any(pressure > 1.0):
        raise DynamicsInstabilityError(
            f"dt={cfg.dt} is too large for action {a + 1}: infection factor {1.0 - pressure.max():.3e} < 0"
        )
    return infected + pressure * (1.0 - infected) - cfg.gamma * cfg.dt * infected


def sis_step(cfg: SisConfig, a: int, infected: StateVector) -> np.ndarray:
    """g(a; I): ceil(1/dt) inner Euler steps, clamped to [0, 1]^M."""
    current = np.asarray(infected, dtype=float)
    if current.shape != (cfg.nodes,):
        raise InvalidInputError(f"infection vector has shape {current.shape}, expected ({cfg.nodes},)")
    if np.any((current < 0) | (current > 1)):
        raise InvalidInputError("infection fractions must lie in [0, 1]")
    for _ in range(cfg.inner_steps):
        current = sis_inner_step(cfg, a, current)
    clamped = np.clip(current, 0.0, 1.0)
    if not np.array_equal(clamped, current):
        logger.warning("SIS step for action %d left [0, 1]; clamped by %.3e", a + 1, np.abs(clamped - current).max())
    return clamped


def sis_contraction_factor(cfg: SisConfig, a: int, infected: StateVector) -> float:
    """Per-inner-step l1 contraction factor max_i(1 - beta_a dt (A_a I)_i)."""
    infected = np.asarray(infected, dtype=float)
    return float(np.max(1.0 - cfg.beta[a] * cfg.dt * (cfg.adjacency[a] @ infected)))


def power_iteration(matrix: np.ndarray, tol: float = _POWER_TOL, max_iters: int = _POWER_MAX_ITERS) -> float:
    """Largest eigenvalue of a nonnegative symmetric matrix."""
    v = np.full(matrix.shape[0], 1.0 / math.sqrt(matrix.shape[0]))
    eigenvalue = 0.0
    for _ in range(max_iters):
        w = matrix @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        v_next = w / norm
        next_eigenvalue = float(v_next @ matrix @ v_next)
        if abs(next_eigenvalue - eigenvalue) <= tol * max(1.0, abs(next_eigenvalue)):
            return next_eigenvalue
        v, eigenvalue = v_next, next_eigenvalue
    return eigenvalue


# --- Contact matrices ---

def scale_to_row_sum(matrix: np.ndarray, row_sum: float) -> np.ndarray:
    """Symmetric scaling D A D whose every row sums to `row_sum`."""
    x = np.ones(matrix.shape[0])
    for _ in range(_SCALING_MAX_ITERS):
        x = np.sqrt(x * row_sum / (matrix @ x))
        scaled = matrix * np.outer(x, x)
        if np.max(np.abs(scaled.sum(axis=1) - row_sum)) <= _SCALING_TOL * row_sum:
            return scaled
    raise DynamicsInstabilityError(f"contact matrix could not be scaled to row sum {row_sum}")


def random_contact_matrix(
    rng: np.random.Generator,
    nodes: int,
    row_sum: float,
    edge_probability: float = EDGE_PROBABILITY,
) -> np.ndarray:
    """Sparse symmetric contact matrix with self-contact whose rows all sum to `row_sum`."""
    upper = np.triu(rng.random((nodes, nodes)) < edge_probability, k=1)
    mask = upper | upper.T | np.eye(nodes, dtype=bool)
    weights = rng.uniform(0.1, 1.0, size=(nodes, nodes))
    weights = np.triu(weights) + np.triu(weights, k=1).T
    return scale_to_row_sum(np.where(mask, weights, 0.0), row_sum)


def spread_row_sums(beta: np.ndarray, row_sum_range: Tuple[float, float]) -> np.ndarray:
    """Row sums evenly spread over the range in the order of beta: a stricter policy also cuts contacts."""
    row_sums = np.empty(len(beta))
    row_sums[np.argsort(beta, kind="stable")] = np.linspace(*row_sum_range, num=len(beta))
    return row_sums


def priced_costs(
    health: np.ndarray, beta: np.ndarray, row_sums: np.ndarray, gamma: float, price: float = OPERATIONAL_PRICE
) -> np.ndarray:
    """w0_a = base + price * sum(w) * (max_b I_b* - I_a*), so that x_a* still falls as I_a* rises."""
    endemic = 1.0 - gamma / (beta * row_sums)
    return OPERATIONAL_BASE + price * health.sum() * (endemic.max() - endemic)


def generate_sis_config(
    seed: int,
    nodes: int = REFERENCE_NODES,
    beta: Sequence[float] = REFERENCE_BETAS,
    gamma: float = REFERENCE_GAMMA,
    dt: float = DEFAULT_DT,
    alpha_lb: Optional[float] = None,
    edge_probability: float = EDGE_PROBABILITY,
    row_sum_range: Tuple[float, float] = ROW_SUM_RANGE,
    costs: str = "priced",
    operational_price: float = OPERATIONAL_PRICE,
) -> SisConfig:
    """Draw contact matrices and cost weights from `seed`; every action must satisfy beta_a lambda_max > gamma.

    Without `alpha_lb` the agent is told ALPHA_LB_SHARE of the slowest local rate
    beta_a r_a - gamma, which keeps the feasible floor below every endemic level.
    """
    if costs not in COST_MODELS:
        raise InvalidInputError(f"unknown cost model {costs!r}; expected one of {', '.join(COST_MODELS)}")
    if not 0 <= operational_price < 1:
        raise InvalidInputError(f"operational_price must lie in [0, 1), got {operational_price}")
    beta = np.asarray(beta, dtype=float)
    streams = np.random.SeedSequence(seed).spawn(len(beta) + 1)
    row_sums = spread_row_sums(beta, row_sum_range)
    adjacency: List[np.ndarray] = []
    for a, stream in enumerate(streams[:-1]):
        matrix = random_contact_matrix(np.random.default_rng(stream), nodes, row_sums[a], edge_probability)
        # Every row sums to r_a, so lambda_max = r_a and no redraw can change this verdict.
        if not beta[a] * power_iteration(matrix) > gamma:
            logger.warning("Action %d has no endemic equilibrium at row sum %.3f", a + 1, row_sums[a])
            raise DynamicsInstabilityError(
                f"action {a + 1}: beta*lambda_max = {beta[a] * row_sums[a]:.4f} <= gamma = {gamma}; raise row_sum_low"
            )
        adjacency.append(matrix)

    if alpha_lb is None:
        alpha_lb = ALPHA_LB_SHARE * float(np.min(beta * row_sums - gamma))
        logger.info("SIS seed %d: alpha_lb derived as %.5f", seed, alpha_lb)

    cost_rng = np.random.default_rng(streams[-1])
    if costs == "random":
        w0 = 1.0 - cost_rng.random(len(beta))
        w = 1.0 - cost_rng.random((len(beta), nodes))
    else:
        health = 1.0 - cost_rng.random(nodes)
        w0 = priced_costs(health, beta, row_sums, gamma, operational_price)
        w = np.tile(health, (len(beta), 1))
    return SisConfig(tuple(adjacency), beta, float(gamma), float(dt), w0, w, float(alpha_lb))


# --- Environment ---

class SisEnvironment(EnvironmentModel):
    name = "sis"
    norm_ord = 1

    def __init__(
        self,
        cfg: SisConfig,
        noise_sigma: float = 0.0,
        initial_state: Optional[Sequence[float]] = None,
        lipschitz: float = 1.0,
    ):
        self.cfg = cfg
        self.infection_floor = FEASIBLE_MARGIN * cfg.alpha_lb / float(
            min(cfg.beta[a] * cfg.adjacency[a].sum(axis=1).min() for a in range(cfg.action_count))
        )
        if self.infection_floor >= 1.0:
            raise InvalidInputError(
                f"alpha_lb={cfg.alpha_lb} is too large: contraction would need infections above {self.infection_floor:.3f}"
            )
        # Extremes of the cost over the feasible box [floor, 1]^M.
        self.cost_high = float(np.max(cfg.w0 + cfg.w.sum(axis=1)))
        self.cost_low = float(np.min(cfg.w0 + self.infection_floor * cfg.w.sum(axis=1)))
        if initial_state is None:
            initial_state = np.full(cfg.nodes, 0.5 * (1.0 + self.infection_floor))
        knowledge = ConvergenceKnowledge(tau_c=1.0 / cfg.alpha_lb, lipschitz_L=lipschitz, sigma=noise_sigma)
        super().__init__(cfg.action_count, cfg.nodes, noise_sigma, initial_state, knowledge)

    def evolution(self, a: int, z: StateVector) -> StateVector:
        return sis_step(self.cfg, a, z)

    def cost(self, a: int, z: StateVector) -> float:
        return float(self.cfg.w0[a] + self.cfg.w[a] @ np.asarray(z, dtype=float))

    def _reward(self, a: int, z: StateVector) -> float:
        return (self.cost_high - self.cost(a, z)) / (self.cost_high - self.cost_low)

    def sample_state(self, rng: np.random.Generator) -> StateVector:
        return rng.uniform(self.infection_floor, 1.0, size=self.state_dim)

    def endemic_level(self, a: int) -> float:
        """Closed-form equilibrium 1 - gamma/(beta_a r_a) shared by every node when rows sum to r_a."""
        row_sum = float(self.cfg.adjacency[a].sum(axis=1).mean())
        return 1.0 - self.cfg.gamma / (self.cfg.beta[a] * row_sum)


def build_sis(
    seed: int,
    sigma: float = 0.0,
    nodes: int = REFERENCE_NODES,
    beta: Sequence[float] = REFERENCE_BETAS,
    gamma: float = REFERENCE_GAMMA,
    dt: float = DEFAULT_DT,
    alpha_lb: Optional[float] = None,
    edge_probability: float = EDGE_PROBABILITY,
    row_sum_low: float = ROW_SUM_RANGE[0],
    row_sum_high: float = ROW_SUM_RANGE[1],
    initial_infection: Optional[float] = None,
    costs: str = "priced",
    operational_price: float = OPERATIONAL_PRICE,
) -> SisEnvironment:
    if not 0 < row_sum_low <= row_sum_high:
        raise InvalidInputError(f"row sum range [{row_sum_low}, {row_sum_high}] is empty")
    cfg = generate_sis_config(
        seed, nodes, beta, gamma, dt, alpha_lb, edge_probability, (row_sum_low, row_sum_high), costs, operational_price
    )
    initial = None if initial_infection is None else np.full(nodes, float(initial_infection))
    return SisEnvironment(cfg, noise_sigma=sigma, initial_state=initial)


def build_paper_sis(
    seed: int, sigma: float = 0.0, alpha_lb: Optional[float] = None, dt: float = DEFAULT_DT
) -> SisEnvironment:
    """K=4 actions on M=10 nodes, gamma=0.01, beta = 0.011..0.014 and priced costs."""
    return build_sis(seed, sigma=sigma, alpha_lb=alpha_lb, dt=dt)


def dump_contact_matrices(env: SisEnvironment, directory: str) -> List[str]:
    """Write A_a to `<directory>/contact_matrix_<a>.txt`, one space-separated row per line."""
    os.makedirs(directory, exist_ok=True)
    paths = []
    for a, matrix in enumerate(env.cfg.adjacency):
        path = os.path.join(directory, f"contact_matrix_{a + 1}.txt")
        np.savetxt(path, matrix, fmt="%.17g", delimiter=" ")
        paths.append(path)
    return paths
