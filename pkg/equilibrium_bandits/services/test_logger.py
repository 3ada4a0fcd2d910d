# Copyright (c) 2025, Equilibrium Bandits Contributors
# See license.txt

import os
import tempfile
import unittest
from unittest import mock

from equilibrium_bandits.services.logger import LOG_DIR_ENV, get_experiment_logger, get_log_dir


class TestExperimentLogger(unittest.TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.log_dir = os.path.join(self._tmp.name, "nested", "logs")

    def tearDown(self):
        self._tmp.cleanup()

    def test_directory_is_created_on_first_record(self):
        with mock.patch.dict(os.environ, {LOG_DIR_ENV: self.log_dir}):
            self.assertEqual(get_log_dir(), self.log_dir)
            log = get_experiment_logger("equilibrium_bandits.lazy_directory")
            log.propagate = False
            handler = log.handlers[0]
            try:
                self.assertFalse(os.path.exists(self.log_dir))
                log.info("first record")
                handler.flush()
                self.assertTrue(os.path.isfile(os.path.join(self.log_dir, "equilibrium_bandits.log")))
            finally:
                log.removeHandler(handler)
                handler.close()

    def test_handlers_are_not_duplicated(self):
        with mock.patch.dict(os.environ, {LOG_DIR_ENV: self.log_dir}):
            log = get_experiment_logger("equilibrium_bandits.single_handler")
            try:
                self.assertIs(get_experiment_logger("equilibrium_bandits.single_handler"), log)
                self.assertEqual(len(log.handlers), 1)
            finally:
                for handler in list(log.handlers):
                    log.removeHandler(handler)
                    handler.close()


if __name__ == "__main__":
    unittest.main()
