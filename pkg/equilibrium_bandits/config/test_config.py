# Copyright (c) 2025, Equilibrium Bandits Contributors
# See license.txt

import math
import os
import tempfile
import unittest

from equilibrium_bandits.config import (
    ALGORITHM_SCHEMAS,
    ENVIRONMENT_SCHEMAS,
    RUN_SCHEMA,
    load_config,
    load_schema,
    parse_config,
)
from equilibrium_bandits.core.exceptions import ConfigError

TINY = """
[run]
horizon = 100
num_seeds = 2

[environment]
name = "linear_contraction"
fixed_points = [0.8, 0.5]
factors = [0.9, 0.9]

[algorithm.uecb]

[algorithm.naive_5]
kind = "naive"
t_try = 5
"""


def _data(**run):
    return {
        "run": {"horizon": 100, **run},
        "environment": {"name": "linear_contraction", "fixed_points": [0.8, 0.5], "factors": [0.9, 0.9]},
        "algorithm": {"uecb": {}},
    }


class TestSchemas(unittest.TestCase):
    def test_every_schema_loads(self):
        for path in [RUN_SCHEMA, *ENVIRONMENT_SCHEMAS.values(), *ALGORITHM_SCHEMAS.values()]:
            schema = load_schema(path)
            self.assertTrue(schema.fields, path)

    def test_defaults_are_typed(self):
        uecb = load_schema(ALGORITHM_SCHEMAS["uecb"])
        self.assertAlmostEqual(uecb.field("rho1").default, math.log(2.0), places=15)
        self.assertEqual(uecb.field("mode").options, ("auto", "noiseless", "noisy"))
        self.assertIs(load_schema(RUN_SCHEMA).field("save_curves").default, False)


class TestLoadConfig(unittest.TestCase):
    def test_toml_file_with_defaults(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "tiny.toml")
            with open(path, "w", encoding="utf-8") as f:
                f.write(TINY)
            config = load_config(path)

        self.assertEqual(config.horizon, 100)
        self.assertEqual(config.num_seeds, 2)
        self.assertEqual(config.output_dir, "results")
        self.assertEqual(config.stride, 1)
        self.assertEqual(config.environment.params["initial_state"], 0.5)
        self.assertEqual([a.label for a in config.algorithms], ["uecb", "naive_5"])
        self.assertEqual(config.algorithms[0].params["mode"], "auto")
        self.assertEqual(config.algorithms[1].kind, "naive")
        self.assertEqual(config.algorithms[1].params["t_try"], 5)
        self.assertEqual(config.source, path)

    def test_missing_or_broken_file(self):
        with self.assertRaises(ConfigError):
            load_config("/nonexistent/config.toml")
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "broken.toml")
            with open(path, "w", encoding="utf-8") as f:
                f.write("[run\nhorizon = ")
            with self.assertRaises(ConfigError):
                load_config(path)


class TestParseConfig(unittest.TestCase):
    def test_unknown_keys_and_sections(self):
        with self.assertRaisesRegex(ConfigError, "horizn"):
            parse_config({**_data(), "run": {"horizon": 100, "horizn": 5}})
        with self.assertRaises(ConfigError):
            parse_config({**_data(), "plots": {}})
        data = _data()
        data["algorithm"] = {"uecb": {"rho3": 1.0}}
        with self.assertRaisesRegex(ConfigError, "algorithm.uecb"):
            parse_config(data)

    def test_type_errors(self):
        with self.assertRaises(ConfigError):
            parse_config(_data(num_seeds="many"))
        with self.assertRaises(ConfigError):
            parse_config(_data(num_seeds=True))
        with self.assertRaises(ConfigError):
            parse_config(_data(save_curves=1))
        data = _data()
        data["algorithm"] = {"uecb": {"mode": "sometimes"}}
        with self.assertRaises(ConfigError):
            parse_config(data)

    def test_required_and_negative_values(self):
        data = _data()
        del data["run"]["horizon"]
        with self.assertRaisesRegex(ConfigError, "horizon"):
            parse_config(data)
        with self.assertRaises(ConfigError):
            parse_config(_data(master_seed=-1))
        with self.assertRaises(ConfigError):
            parse_config(_data(num_seeds=0))

    def test_unknown_environment_and_kind(self):
        data = _data()
        data["environment"] = {"name": "weather"}
        with self.assertRaises(ConfigError):
            parse_config(data)
        data = _data()
        data["algorithm"] = {"mine": {"kind": "thompson"}}
        with self.assertRaises(ConfigError):
            parse_config(data)

    def test_horizon_must_cover_one_block_per_arm(self):
        config = parse_config(_data(horizon=7))
        with self.assertRaises(ConfigError):
            config.validate(action_count=2)
        config.with_overrides(horizon=8).validate(action_count=2)

    def test_stride_default(self):
        self.assertEqual(parse_config(_data(horizon=50000)).stride, 25)
        self.assertEqual(parse_config(_data(record_stride=7)).stride, 7)

    def test_hash_ignores_output_location_and_workers(self):
        config = parse_config(_data())
        moved = config.with_overrides(output_dir="elsewhere", workers=4)
        self.assertEqual(config.config_hash(), moved.config_hash())
        self.assertNotEqual(config.config_hash(), config.with_overrides(num_seeds=3).config_hash())


if __name__ == "__main__":
    unittest.main()
