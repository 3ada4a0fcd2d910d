# Copyright (c) 2025, Equilibrium Bandits Contributors
# See license.txt

import math
import unittest

import numpy as np
from hypothesis import given, settings, strategies as st

from equilibrium_bandits.bandits.exp3.exp3 import (
    Exp3Params,
    Exp3Policy,
    default_learning_rate,
    default_restart_window,
    exp3_probabilities,
    exp3_update,
)
from equilibrium_bandits.core.exceptions import InvalidInputError


class TestExp3Update(unittest.TestCase):
    def test_uniform_start(self):
        np.testing.assert_allclose(exp3_probabilities(np.ones(4)), [0.25] * 4)

    def test_zero_reward_changes_nothing(self):
        weights = np.array([1.0, 2.0])
        updated = exp3_update(weights, 0, 0.0, exp3_probabilities(weights), Exp3Params(0.3))
        np.testing.assert_array_equal(updated, weights)

    def test_importance_weighted_step(self):
        weights = np.ones(2)
        updated = exp3_update(weights, 0, 1.0, [0.5, 0.5], Exp3Params(0.3))
        self.assertAlmostEqual(updated[0], math.exp(0.3), places=12)
        self.assertEqual(updated[1], 1.0)

    def test_rewards_are_clamped(self):
        weights = np.ones(2)
        high = exp3_update(weights, 0, 7.0, [0.5, 0.5], Exp3Params(0.3))
        one = exp3_update(weights, 0, 1.0, [0.5, 0.5], Exp3Params(0.3))
        np.testing.assert_array_equal(high, one)
        np.testing.assert_array_equal(exp3_update(weights, 0, -3.0, [0.5, 0.5], Exp3Params(0.3)), weights)

    def test_rescaling_keeps_the_distribution(self):
        weights = np.array([1e99, 1.0])
        updated = exp3_update(weights, 0, 1.0, [0.999, 0.001], Exp3Params(10.0))
        self.assertTrue(np.all(np.isfinite(updated)))
        self.assertEqual(updated.max(), 1.0)
        probs = exp3_probabilities(updated)
        self.assertAlmostEqual(probs.sum(), 1.0, places=12)

    def test_zero_probability_is_rejected(self):
        with self.assertRaises(InvalidInputError):
            exp3_update(np.ones(2), 0, 1.0, [0.0, 1.0], Exp3Params(0.3))

    def test_long_runs_stay_finite(self):
        policy = Exp3Policy(3, Exp3Params(learning_rate=5.0), np.random.default_rng(3))
        rewards = np.random.default_rng(4).random(200_000)
        for t, reward in enumerate(rewards, start=1):
            arm = policy.select_arm(t)
            policy.update(arm, reward if arm == 0 else 0.5 * reward)
        probs = exp3_probabilities(policy.weights)
        self.assertTrue(np.all(np.isfinite(probs)))
        self.assertAlmostEqual(probs.sum(), 1.0, places=12)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.tuples(st.integers(0, 3), st.floats(-1.0, 2.0)), min_size=1, max_size=200))
    def test_probabilities_remain_a_distribution(self, plays):
        weights = np.ones(4)
        params = Exp3Params(learning_rate=2.0)
        for arm, reward in plays:
            probs = exp3_probabilities(weights)
            weights = exp3_update(weights, arm, reward, probs, params)
        probs = exp3_probabilities(weights)
        self.assertTrue(np.all(probs > 0))
        self.assertAlmostEqual(float(probs.sum()), 1.0, places=12)


class TestExp3Policy(unittest.TestCase):
    def test_defaults(self):
        self.assertAlmostEqual(default_learning_rate(4, 100), math.sqrt(2.0 * math.log(4) / 400.0))
        self.assertEqual(default_restart_window(1000), 100)
        self.assertEqual(default_restart_window(1), 1)

    def test_restart_resets_to_uniform(self):
        policy = Exp3Policy(2, Exp3Params(learning_rate=1.0, restart_window=5), np.random.default_rng(0))
        for t in range(1, 6):
            arm = policy.select_arm(t)
            policy.update(arm, 1.0)
        self.assertFalse(np.allclose(policy.weights, 1.0))
        policy.select_arm(6)
        np.testing.assert_allclose(policy.probs, [0.5, 0.5])

    def test_plain_exp3_never_restarts(self):
        policy = Exp3Policy(2, Exp3Params(learning_rate=1.0), np.random.default_rng(0))
        for t in range(1, 6):
            arm = policy.select_arm(t)
            policy.update(arm, 1.0)
        policy.select_arm(6)
        self.assertFalse(np.allclose(policy.probs, [0.5, 0.5]))
        self.assertTrue(str(policy).startswith("EXP3"))

    def test_bad_params(self):
        with self.assertRaises(InvalidInputError):
            Exp3Params(learning_rate=0.0)
        with self.assertRaises(InvalidInputError):
            Exp3Params(learning_rate=0.1, restart_window=0)


if __name__ == "__main__":
    unittest.main()
