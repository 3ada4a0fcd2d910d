# Copyright (c) 2025, Equilibrium Bandits Contributors
# See license.txt

import math
import unittest

import numpy as np

from equilibrium_bandits.api import build_environment, equilibria
from equilibrium_bandits.config import parse_config
from equilibrium_bandits.core.exceptions import InvalidInputError
from equilibrium_bandits.core.model import compute_equilibrium
from equilibrium_bandits.environments.game.game import (
    GameConfig,
    GameEnvironment,
    build_game,
    build_paper_game,
    contraction_factor,
    default_step_size,
    game_step,
    resource_loads,
    utility_gradient,
    welfare,
    welfare_bounds,
)


def _single_player(alpha=None):
    gamma, zeta, masks = np.ones((1, 1)), np.ones((1, 1)), np.ones((1, 1, 1), dtype=bool)
    if alpha is None:
        alpha = default_step_size(gamma, zeta, masks)
    return GameConfig(gamma, zeta, masks, alpha)


class TestContractionFactor(unittest.TestCase):
    def test_values(self):
        self.assertEqual(contraction_factor(1.0, 1.0, 1.0), 0.0)
        self.assertAlmostEqual(contraction_factor(1.0, 1.0, 2.0), 1.0)
        self.assertAlmostEqual(contraction_factor(0.5, 1.0, 0.5), math.sqrt(0.75))

    def test_step_outside_the_contraction_range(self):
        with self.assertRaises(InvalidInputError):
            contraction_factor(0.5, 1.0, 1.5)
        with self.assertRaises(InvalidInputError):
            contraction_factor(0.5, 1.0, 0.0)


class TestSinglePlayer(unittest.TestCase):
    def test_nash_equilibrium(self):
        env = GameEnvironment(_single_player(), lipschitz=1.0)
        entry = compute_equilibrium(env, 0, tol=1e-13)
        self.assertAlmostEqual(float(entry.z_star[0]), (math.sqrt(3.0) - 1.0) / 2.0, delta=1e-8)
        np.testing.assert_allclose(game_step(env.cfg, 0, entry.z_star), entry.z_star, atol=1e-9)

    def test_gradient(self):
        cfg = _single_player(alpha=0.1)
        # gamma/(1+z) - zeta*(s+z) at z=1
        np.testing.assert_allclose(utility_gradient(cfg, 0, np.array([1.0])), [[0.5 - 2.0]])


class TestDeskGame(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.env = build_game(seed=1, players=20, resources=5)

    def test_shapes(self):
        cfg = self.env.cfg
        self.assertEqual(cfg.masks.shape, (4, 20, 5))
        self.assertEqual(self.env.state_dim, 100)
        self.assertTrue(self.env.observable)
        self.assertTrue(np.all((cfg.gamma >= 0.8) & (cfg.gamma <= 1.0)))
        self.assertTrue(np.all(self.env.lambdas > 0))
        self.assertTrue(np.all(self.env.factors < 1))
        self.assertGreater(self.env.knowledge.lipschitz_L, 0)

    def test_loads(self):
        z = np.random.default_rng(0).uniform(0, 1, size=100)
        np.testing.assert_allclose(resource_loads(self.env.cfg, z), z.reshape(20, 5).sum(axis=0))

    def test_masked_resources_stay_empty(self):
        cfg = self.env.cfg
        z = self.env.sample_state(np.random.default_rng(1))
        for a in range(cfg.action_count):
            stepped = game_step(cfg, a, z).reshape(20, 5)
            self.assertTrue(np.all(stepped[~cfg.masks[a]] == 0.0))
            self.assertTrue(np.all((stepped >= 0.0) & (stepped <= cfg.z_max)))

    def test_every_step_contracts_at_the_declared_rate(self):
        """||z_{t+1} - z*|| <= sqrt(1 - 2 lambda alpha + alpha^2 beta^2) ||z_t - z*||."""
        rng = np.random.default_rng(3)
        for a in range(self.env.action_count):
            target = compute_equilibrium(self.env, a, tol=1e-12).z_star
            factor = self.env.factors[a]
            for _ in range(3):
                z = self.env.sample_state(rng)
                for _ in range(200):
                    before = np.linalg.norm(z - target)
                    if before < 1e-6:
                        break
                    z = game_step(self.env.cfg, a, z)
                    self.assertLessEqual(np.linalg.norm(z - target), factor * before + 1e-9)

    def test_step_size_beyond_the_limit(self):
        cfg = self.env.cfg
        too_large = 2.5 * self.env.lambdas.min() / self.env.betas.max() ** 2 * 1e3
        with self.assertRaises(InvalidInputError):
            GameEnvironment(GameConfig(cfg.gamma, cfg.zeta, cfg.masks, too_large), lipschitz=1.0)


class TestRewardNormalization(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.env = build_game(seed=2, players=8, resources=3, z_max=1.0)

    def test_single_player_bounds(self):
        # W = log(1 + z) - z^2 on [0, 10]: low -zeta z_max^2, high gamma^2 / (4 zeta)
        low, high = welfare_bounds(_single_player())
        self.assertAlmostEqual(low, -100.0)
        self.assertAlmostEqual(high, 0.25)

    def test_rewards_need_no_clamp(self):
        cfg, rng = self.env.cfg, np.random.default_rng(4)
        for a in range(cfg.action_count):
            corner = cfg.masks[a].ravel() * cfg.z_max
            for z in [corner, np.zeros(self.env.state_dim)] + [self.env.sample_state(rng) for _ in range(100)]:
                self.assertGreaterEqual(welfare(cfg, a, z), self.env.welfare_low)
                self.assertLessEqual(welfare(cfg, a, z), self.env.welfare_high)
                self.assertTrue(0.0 <= self.env._reward(a, z) <= 1.0)

    def test_equilibrium_rewards_are_spread(self):
        info = equilibria(self.env)
        self.assertTrue(np.all((info.x_star > 0.0) & (info.x_star < 1.0)))
        self.assertGreater(float(info.delta.max()), 0.0)

    def test_envelope_covers_every_start(self):
        info = equilibria(self.env)
        rng = np.random.default_rng(5)
        lipschitz = self.env.knowledge.lipschitz_L
        self.assertLessEqual(lipschitz, 1.0)
        for a in range(self.env.action_count):
            for _ in range(50):
                gap = abs(self.env.expected_reward(a, self.env.sample_state(rng)) - info.x_star[a])
                self.assertLessEqual(gap, lipschitz)

    def test_empty_masks_are_rejected(self):
        cfg = _single_player()
        with self.assertRaises(InvalidInputError):
            GameEnvironment(GameConfig(cfg.gamma, cfg.zeta, np.zeros((1, 1, 1), dtype=bool), 0.1), lipschitz=1.0)


class TestConfiguredGame(unittest.TestCase):
    def test_builds_through_the_environment_router(self):
        config = parse_config({
            "run": {"horizon": 1000},
            "environment": {"name": "game", "seed": 1, "players": 6, "resources": 3, "z_max": 1.0},
            "algorithm": {"uecb": {}},
        })
        env = build_environment(config.environment)
        self.assertIsInstance(env, GameEnvironment)
        self.assertEqual(env.state_dim, 18)
        self.assertEqual(env.action_count, 4)
        self.assertEqual(env.cfg.z_max, 1.0)
        self.assertGreater(env.knowledge.tau_c, 1.0)

    def test_knowledge_overrides_leave_the_built_game_alone(self):
        config = parse_config({
            "run": {"horizon": 1000},
            "environment": {"name": "game", "seed": 1, "players": 6, "resources": 3, "z_max": 1.0, "tau_c": 5000.0},
            "algorithm": {"uecb": {}},
        })
        env = build_environment(config.environment)
        self.assertEqual(env.knowledge.tau_c, 5000.0)
        self.assertLess(build_game(seed=1, players=6, resources=3, z_max=1.0).knowledge.tau_c, 5000.0)


class TestFullSizeGame(unittest.TestCase):
    def test_full_size_instance_contracts(self):
        env = build_paper_game(seed=0)
        self.assertEqual(env.cfg.masks.shape, (4, 1000, 10))
        self.assertEqual(env.state_dim, 10_000)
        self.assertTrue(np.all(env.lambdas > 0))
        self.assertTrue(np.all(env.factors < 1))
        # Hundreds of players per resource make convergence very slow.
        self.assertGreater(env.knowledge.tau_c, 1e3)


if __name__ == "__main__":
    unittest.main()
