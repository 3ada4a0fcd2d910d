# Copyright (c) 2025, Equilibrium Bandits Contributors
# See license.txt

import csv
import os
import tempfile
import unittest
from unittest import mock

from click.testing import CliRunner

from equilibrium_bandits.commands import cli, cli_main
from equilibrium_bandits.commands.utils import EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME

LINEAR = """
[run]
horizon = 300
num_seeds = 3

[environment]
name = "linear_contraction"
fixed_points = [0.8, 0.5]
factors = [0.9, 0.9]
sigma = {sigma}
{extra}

[algorithm.uecb]

[algorithm.naive]
t_try = 20

[algorithm.rexp3]
"""

GAME = """
[run]
horizon = 1000
num_seeds = 1

[environment]
name = "game"
seed = 1
players = 6
resources = 3
z_max = 1.0

[algorithm.uecb]
"""

BREAKER = """
[run]
horizon = 100
num_seeds = 1

[environment]
name = "ucb_breaker"

[algorithm.ucb]
"""


class TestCommands(unittest.TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.directory = self._tmp.name
        self.runner = CliRunner()

    def tearDown(self):
        self._tmp.cleanup()

    def _config(self, text, name="config.toml"):
        path = os.path.join(self.directory, name)
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
        return path

    def _linear(self, sigma=0.05, extra=""):
        return self._config(LINEAR.format(sigma=sigma, extra=extra))

    def test_run_writes_every_file(self):
        out = os.path.join(self.directory, "out")
        result = self.runner.invoke(cli, ["run", "--config", self._linear(), "--out", out])
        self.assertEqual(result.exit_code, EXIT_OK, result.output)
        files = sorted(os.listdir(out))
        for label in ("uecb", "naive", "rexp3"):
            self.assertIn(f"regret_{label}.csv", files)
            self.assertIn(f"per_seed_{label}.csv", files)
        self.assertIn("meta.json", files)
        with open(os.path.join(out, "per_seed_uecb.csv"), newline="", encoding="utf-8") as f:
            rows = list(csv.reader(f))
        self.assertEqual(rows[0], ["seed", "final_pseudo_regret", "final_realized_regret"])
        self.assertEqual([row[0] for row in rows[1:]], ["0", "1", "2"])

    def test_overrides(self):
        out = os.path.join(self.directory, "out")
        result = self.runner.invoke(
            cli, ["run", "--config", self._linear(), "--out", out, "--seeds", "2", "--horizon", "100"]
        )
        self.assertEqual(result.exit_code, EXIT_OK, result.output)
        with open(os.path.join(out, "regret_naive.csv"), encoding="utf-8") as f:
            lines = f.read().splitlines()
        self.assertEqual(len(lines), 101)
        with open(os.path.join(out, "per_seed_naive.csv"), encoding="utf-8") as f:
            self.assertEqual(len(f.read().splitlines()), 3)

    def test_runs_are_reproducible(self):
        path = self._linear()
        first, second = os.path.join(self.directory, "a"), os.path.join(self.directory, "b")
        for out in (first, second):
            result = self.runner.invoke(cli, ["run", "--config", path, "--out", out])
            self.assertEqual(result.exit_code, EXIT_OK, result.output)
        for name in os.listdir(first):
            if name.endswith(".csv"):
                with open(os.path.join(first, name), "rb") as a, open(os.path.join(second, name), "rb") as b:
                    self.assertEqual(a.read(), b.read(), name)

    def test_invalid_config(self):
        path = self._config(BREAKER.replace("num_seeds = 1", "num_seeds = 1\nseeds = 3"))
        result = self.runner.invoke(cli, ["run", "--config", path, "--out", os.path.join(self.directory, "out")])
        self.assertEqual(result.exit_code, EXIT_CONFIG)
        self.assertIn("seeds", result.output)
        self.assertFalse(os.path.exists(os.path.join(self.directory, "out")))

    def test_horizon_shorter_than_one_block_per_arm(self):
        result = self.runner.invoke(cli, ["run", "--config", self._linear(), "--horizon", "30"])
        self.assertEqual(result.exit_code, EXIT_CONFIG)

    def test_equilibria(self):
        result = self.runner.invoke(cli, ["equilibria", "--config", self._config(BREAKER)])
        self.assertEqual(result.exit_code, EXIT_OK, result.output)
        self.assertIn("x* = (1, 2.25)", result.output)
        self.assertIn("a* = 2", result.output)
        self.assertIn("State observable: no", result.output)

    def test_validate(self):
        result = self.runner.invoke(cli, ["validate", "--config", self._linear()])
        self.assertEqual(result.exit_code, EXIT_OK, result.output)
        self.assertIn("All checks passed.", result.output)

        lying = self._linear(extra="tau_c = 1.0")
        result = self.runner.invoke(cli, ["validate", "--config", lying])
        self.assertEqual(result.exit_code, EXIT_RUNTIME)
        self.assertIn("VIOLATED", result.output)

    def test_game_equilibria_and_validation(self):
        path = self._config(GAME)
        result = self.runner.invoke(cli, ["equilibria", "--config", path])
        self.assertEqual(result.exit_code, EXIT_OK, result.output)
        self.assertIn("K=4, state dim 18", result.output)
        self.assertIn("State observable: yes", result.output)

        result = self.runner.invoke(cli, ["validate", "--config", path])
        self.assertEqual(result.exit_code, EXIT_OK, result.output)
        self.assertIn("game_monotonicity", result.output)

    def test_unexpected_errors_become_runtime_failures(self):
        path = self._config(GAME)
        with mock.patch("equilibrium_bandits.commands.utils.build_environment", side_effect=AttributeError("state_dim")):
            result = self.runner.invoke(cli, ["validate", "--config", path])
        self.assertEqual(result.exit_code, EXIT_RUNTIME)
        self.assertIn("AttributeError", result.output)

    def test_cli_main_reports_usage_errors(self):
        self.assertEqual(cli_main(["run"]), EXIT_CONFIG)
        self.assertEqual(cli_main(["equilibria", "--config", self._config(BREAKER)]), EXIT_OK)


if __name__ == "__main__":
    unittest.main()
