# Copyright (c) 2025, Equilibrium Bandits Contributors
# See license.txt

import os
import unittest

from equilibrium_bandits.api import build_environment, equilibria
from equilibrium_bandits.config import load_config
from equilibrium_bandits.environments.game.game import build_game
from equilibrium_bandits.environments.linear_contraction.linear_contraction import LinearContractionEnvironment
from equilibrium_bandits.environments.sis.sis import build_paper_sis
from equilibrium_bandits.environments.synthetic.synthetic import build_lower_bound_pair, build_ucb_breaker
from equilibrium_bandits.services.validation import validate_environment


CONFIG_DIR = os.path.join(os.path.dirname(__file__), "..", "..", "configs")


def _validate(env):
    return validate_environment(env, equilibria(env))


class TestValidation(unittest.TestCase):
    def test_linear_instance_passes(self):
        report = _validate(LinearContractionEnvironment([0.8, 0.5], [0.9, 0.5]))
        self.assertTrue(report.ok, report.failures)
        self.assertEqual({c.name for c in report.checks}, {"contraction", "rewards", "envelope", "fixed_point"})

    def test_exact_contraction_at_the_declared_rate_passes(self):
        # factor 0.9 gives exactly exp(-1/tau_c) = 0.9; only the oracle's error in z* separates them
        env = LinearContractionEnvironment([0.8, 0.5], [0.9, 0.9], initial_state=0.5)
        report = _validate(env)
        self.assertTrue(report.ok, [(c.name, c.action, c.high, c.limit) for c in report.failures])
        contraction = [c for c in report.checks if c.name == "contraction"]
        for check in contraction:
            self.assertAlmostEqual(check.high, 0.9, delta=1e-3)

    def test_shipped_configs_validate(self):
        for name in ("tiny_linear.toml", "game_desk.toml", "ucb_breaker.toml"):
            env = build_environment(load_config(os.path.join(CONFIG_DIR, name)).environment)
            report = _validate(env)
            self.assertTrue(report.ok, (name, [(c.name, c.action, c.high, c.limit) for c in report.failures]))

    def test_understated_convergence_time_is_caught(self):
        env = LinearContractionEnvironment([0.8, 0.5], [0.9, 0.9]).with_knowledge(tau_c=1.0)
        report = _validate(env)
        self.assertFalse(report.ok)
        self.assertEqual({c.name for c in report.failures}, {"contraction"})

    def test_understated_lipschitz_is_caught(self):
        env = LinearContractionEnvironment([0.8, 0.5], [0.9, 0.9]).with_knowledge(lipschitz=0.01)
        report = _validate(env)
        self.assertIn("envelope", {c.name for c in report.failures})

    def test_breaker_is_exempt_from_reward_normalization(self):
        report = _validate(build_ucb_breaker())
        self.assertTrue(report.ok, report.failures)
        rewards = [c for c in report.checks if c.name == "rewards"]
        self.assertIn("exempt", rewards[0].detail)

    def test_lower_bound_pair(self):
        self.assertTrue(_validate(build_lower_bound_pair(0.1, 10.0)).ok)

    def test_reference_sis(self):
        report = _validate(build_paper_sis(0))
        self.assertTrue(report.ok, [(c.name, c.action, c.high, c.limit) for c in report.failures])

    def test_desk_game_bounds(self):
        report = _validate(build_game(seed=1, players=20, resources=5))
        self.assertTrue(report.ok, [(c.name, c.action, c.high, c.limit) for c in report.failures])
        self.assertEqual(sum(c.name.startswith("game_") for c in report.checks), 8)


if __name__ == "__main__":
    unittest.main()
