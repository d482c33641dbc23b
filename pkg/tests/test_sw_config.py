""" This file is part of sandwich.

test_sw_config.py : tests for configuration files, option merging and log setup

  - each case is defined by 3 steps: prepare, execute, evaluate
  - files live in a temporary directory used as the configuration directory
"""
import argparse
import io
import logging
import os
import tempfile
import unittest
from logging import handlers
from unittest import TestCase
from unittest.mock import patch

from sandwich.sw_config import LOGLEVELS, default_logpath, sw_config
from sandwich.sw_linalg import ZeroThreshold
from sandwich.sw_util import ValidationError

ASSERT_INVALID_VALUE_FMT = "{} is invalid"


class ConfigCase(TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.logger = logging.getLogger(__class__.__name__)
        self.cfg = sw_config(self.logger, self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def write(self, name, text):
        path = os.path.join(self.tmp.name, name)
        with open(path, 'w') as fp:
            fp.write(text)
        return path

    def test_defaults(self):
        self.assertEqual(self.cfg.zero, ZeroThreshold(1e-12, 1e-10))
        self.assertEqual(self.cfg.base, 2)
        self.assertEqual(self.cfg.get_int('precision'), 6)
        self.assertEqual(self.cfg.check_method(), 'mirror_descent')
        self.assertEqual(self.cfg.level, logging.INFO)

    def test_parse_file(self):
        # Prepare test
        path = self.write('a.conf', '# comment\n\nzero_abs 1e-14\nlog_base e\nmethod fixed_point\n')

        # Execute test
        self.cfg.parse_file(path)

        # Evaluate results
        self.assertEqual(self.cfg.zero.eps_abs, 1e-14)
        self.assertEqual(self.cfg.base, 'e')
        self.assertEqual(self.cfg.check_method(), 'fixed_point')

    def test_parse_file__declare_and_include(self):
        # Prepare test
        self.write('inner.conf', 'logpath ${OUT}/sw.log\n')
        path = self.write('outer.conf', 'declare env OUT=/tmp/runs\ninclude inner.conf\nseed ${PRECISION}\n')

        # Execute test
        self.cfg.parse_file(path)

        # Evaluate results
        self.assertEqual(self.cfg.logpath, '/tmp/runs/sw.log')
        self.assertEqual(self.cfg.get_int('seed'), 6)

    def test_parse_file__environment(self):
        # Prepare test
        path = self.write('env.conf', 'logpath ${SW_TEST_LOGDIR}/x.log\n')

        # Execute test
        with patch.dict(os.environ, {'SW_TEST_LOGDIR': '/var/tmp'}):
            cfg = sw_config(self.logger, self.tmp.name)
            cfg.parse_file(path)

        # Evaluate results
        self.assertEqual(cfg.logpath, '/var/tmp/x.log')

    def test_parse_file__undefined_variable_warns(self):
        path = self.write('undef.conf', 'logpath ${SW_NO_SUCH_VARIABLE}/x.log\n')
        with self.assertLogs(self.logger, level='WARNING'):
            self.cfg.parse_file(path)
        self.assertEqual(self.cfg.logpath, '${SW_NO_SUCH_VARIABLE}/x.log')

    def test_parse_file__unknown_option(self):
        path = self.write('bad.conf', 'colour blue\n')
        with self.assertRaisesRegex(ValidationError, 'colour'):
            self.cfg.parse_file(path)

    def test_parse_file__bad_declare(self):
        path = self.write('bad.conf', 'declare env OUT\n')
        with self.assertRaises(ValidationError):
            self.cfg.parse_file(path)

    def test_read_default(self):
        # Prepare test
        self.write('default.conf', 'workers 4\n')

        # Execute test
        self.cfg.read_default()

        # Evaluate results
        self.assertEqual(self.cfg.get_int('workers'), 4)

    def test_override(self):
        # Prepare test
        args = argparse.Namespace(precision=3, tolerance=None, colour='blue')

        # Execute test
        self.cfg.override(args)
        self.cfg.override({'zero_rel': 1e-9})

        # Evaluate results
        self.assertEqual(self.cfg.get_int('precision'), 3)
        self.assertEqual(self.cfg.get_float('tolerance'), 1e-5)
        self.assertFalse(hasattr(self.cfg, 'colour'))
        self.assertEqual(self.cfg.zero.eps_rel, 1e-9)

    def test_typed_accessors__bad_values(self):
        # Prepare test
        self.cfg.override({'tolerance': 'small', 'seed': '1.5', 'log_base': '10', 'loglevel': 'loud',
                           'method': 'newton'})

        # Execute test / Evaluate results
        with self.assertRaisesRegex(ValidationError, 'tolerance'):
            self.cfg.get_float('tolerance')
        with self.assertRaisesRegex(ValidationError, 'seed'):
            self.cfg.get_int('seed')
        with self.assertRaises(ValidationError):
            self.cfg.base
        with self.assertRaises(ValidationError):
            self.cfg.level
        with self.assertRaises(ValidationError):
            self.cfg.check_method()

    def test_dump(self):
        # Execute test
        with patch('sys.stdout', new_callable=io.StringIO) as out:
            self.cfg.dump()

        # Evaluate results
        lines = out.getvalue().splitlines()
        self.assertIn('tolerance=1e-05', lines)
        self.assertIn('method=mirror_descent', lines)
        self.assertEqual(lines, sorted(lines))


class LogCase(TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.cfg = sw_config(logging.getLogger(__class__.__name__), self.tmp.name)
        self.root = logging.getLogger()
        self.saved = list(self.root.handlers), self.root.level

    def tearDown(self):
        for h in list(self.root.handlers):
            h.close()
            self.root.removeHandler(h)
        for h in self.saved[0]:
            self.root.addHandler(h)
        self.root.setLevel(self.saved[1])
        self.tmp.cleanup()

    def test_setlog__rotating_file(self):
        # Prepare test
        self.cfg.override({'logpath': os.path.join(self.tmp.name, 'logs', 'sw.log'), 'loglevel': 'debug'})

        # Execute test
        self.cfg.setlog()

        # Evaluate results
        self.assertEqual(len(self.root.handlers), 1)
        self.assertIsInstance(self.root.handlers[0], handlers.TimedRotatingFileHandler)
        self.assertEqual(self.root.level, logging.DEBUG)
        self.assertTrue(os.path.isdir(os.path.join(self.tmp.name, 'logs')))

    def test_setlog__no_rotation(self):
        # Prepare test
        self.cfg.override({'logpath': os.path.join(self.tmp.name, 'sw.log'), 'lr_backupCount': 0})

        # Execute test
        self.cfg.setlog()

        # Evaluate results
        handler = self.root.handlers[0]
        self.assertIsInstance(handler, logging.FileHandler)
        self.assertNotIsInstance(handler, handlers.TimedRotatingFileHandler)

    def test_setlog__console_level_none(self):
        # Prepare test
        self.cfg.override({'loglevel': 'none'})

        # Execute test
        self.cfg.setlog()

        # Evaluate results
        self.assertEqual(self.root.level, LOGLEVELS['none'])
        self.assertFalse(any(isinstance(h, logging.FileHandler) for h in self.root.handlers))

    def test_default_logpath(self):
        self.assertTrue(default_logpath('suite').endswith('sw_suite.log'))
        self.assertTrue(default_logpath().endswith(os.sep + 'sw.log'))

    def test_setlog__default_logpath_per_command(self):
        # Prepare test
        self.cfg.override({'logpath': 'default'})

        # Execute test
        with patch('sandwich.sw_config.user_log_dir', return_value=os.path.join(self.tmp.name, 'logs')):
            self.cfg.setlog('mine')

        # Evaluate results
        expected = os.path.join(self.tmp.name, 'logs', 'sw_mine.log')
        self.assertEqual(self.cfg.logpath, expected)
        self.assertIsInstance(self.root.handlers[0], handlers.TimedRotatingFileHandler)
        self.assertEqual(self.root.handlers[0].baseFilename, expected)


def suite():
    """ Create the test suite that include all sw_config test cases

    :return: sw_config test suite
    """
    sw_config_suite = unittest.TestSuite()
    for case in [ConfigCase, LogCase]:
        sw_config_suite.addTests(unittest.TestLoader().loadTestsFromTestCase(case))
    return sw_config_suite


if __name__ == '__main__':
    unittest.main()
