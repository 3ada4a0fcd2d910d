# Copyright (c) 2025, Equilibrium Bandits Contributors
# See license.txt

import unittest

import numpy as np

from equilibrium_bandits.api import build_environment
from equilibrium_bandits.config import parse_config
from equilibrium_bandits.core.exceptions import InvalidInputError
from equilibrium_bandits.core.model import RegretTrajectory
from equilibrium_bandits.services.aggregate import aggregate, aggregate_experiment
from equilibrium_bandits.services.runner import run_experiment


def _trajectory(curve, length=None):
    curve = np.asarray(curve, dtype=float)
    return RegretTrajectory(
        horizon=curve.shape[0],
        pseudo_regret=curve,
        realized_regret=curve + 0.5,
        actions=np.zeros(curve.shape[0], dtype=np.int64),
        length=curve.shape[0] if length is None else length,
    )


class TestAggregate(unittest.TestCase):
    def test_mean_and_population_std(self):
        summary = aggregate([_trajectory([1, 2, 3]), _trajectory([3, 2, 1])], "uecb")
        np.testing.assert_allclose(summary.mean, [2, 2, 2])
        np.testing.assert_allclose(summary.std, [1, 0, 1])
        np.testing.assert_allclose(summary.final_pseudo_regret, [3, 1])
        np.testing.assert_allclose(summary.final_realized_regret, [3.5, 1.5])
        self.assertEqual((summary.horizon, summary.num_seeds), (3, 2))

    def test_single_seed_has_zero_spread(self):
        summary = aggregate([_trajectory([0.5, 1.0])])
        np.testing.assert_array_equal(summary.std, [0.0, 0.0])

    def test_rejected_inputs(self):
        with self.assertRaises(InvalidInputError):
            aggregate([])
        with self.assertRaises(InvalidInputError):
            aggregate([_trajectory([1, 2]), _trajectory([1, 2, 3])])
        with self.assertRaises(InvalidInputError):
            aggregate([_trajectory([1, 2, 3], length=2)])


class TestAggregateExperiment(unittest.TestCase):
    def test_metadata(self):
        config = parse_config({
            "run": {"horizon": 50, "num_seeds": 2},
            "environment": {"name": "linear_contraction", "fixed_points": [0.8, 0.5], "factors": [0.5, 0.5]},
            "algorithm": {"uecb": {}},
        })
        result = run_experiment(config, build_environment(config.environment))
        aggregated = aggregate_experiment(result)
        self.assertEqual(list(aggregated.summaries), ["uecb"])
        meta = aggregated.metadata
        self.assertEqual(meta["config_hash"], config.config_hash())
        self.assertEqual(meta["equilibria"]["optimal_action"], 1)
        np.testing.assert_allclose(meta["equilibria"]["x_star"], [0.8, 0.5], atol=1e-9)
        self.assertEqual(meta["config"]["run"]["horizon"], 50)


if __name__ == "__main__":
    unittest.main()
