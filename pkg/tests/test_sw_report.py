""" This file is part of sandwich.

test_sw_report.py : tests for property reports and counterexample records

  - each case is defined by 3 steps: prepare, execute, evaluate
"""
import json
import math
import unittest
from unittest import TestCase

import numpy as np
from numpy.testing import assert_allclose

from sandwich.sw_report import FAIL, PASS, CounterexampleRecord, PropertyReport, reports_from_json
from sandwich.sw_states import QuantumChannel, basis_state, plus_state
from sandwich.sw_util import ValidationError

ASSERT_INVALID_RETURNED_VALUE_FMT = "{} returned a misleading value"


def _record():
    channel = QuantumChannel([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
    return CounterexampleRecord(0.3, basis_state(2, 0), plus_state(), channel, 4 / 7)


class PropertyReportCase(TestCase):

    def test_verdict(self):
        self.assertEqual(PropertyReport('positivity', 10, 0, 1e-9, 1e-8).verdict, PASS)
        self.assertEqual(PropertyReport('positivity', 10, 0, -0.5, 1e-8).verdict, PASS)
        self.assertEqual(PropertyReport('positivity', 10, 0, 1e-7, 1e-8).verdict, FAIL)
        self.assertFalse(PropertyReport('positivity', 10, 0, math.inf, 1e-8).passed)

    def test_to_json__infinite_violation(self):
        # Prepare test
        report = PropertyReport('axioms', 5, 3, math.inf, 1e-8, {'dims': [3]})

        # Execute test
        obj = json.loads(report.dumps())

        # Evaluate results
        self.assertEqual(obj['worst_violation'], 'inf')
        self.assertEqual(obj['verdict'], FAIL)
        back = PropertyReport.from_json(obj)
        self.assertTrue(math.isinf(back.worst_violation))
        self.assertEqual(back.params, {'dims': [3]})

    def test_dumps__sorted_keys(self):
        # Execute test
        text = PropertyReport('limits', 1, 0, 0.0, 0.0).dumps()

        # Evaluate results
        keys = list(json.loads(text).keys())
        self.assertEqual(keys, sorted(keys))

    def test_from_json__verdict_mismatch_warns(self):
        # Prepare test
        obj = PropertyReport('limits', 1, 0, 0.5, 0.0).to_json()
        obj['verdict'] = PASS

        # Execute test / Evaluate results
        with self.assertLogs('sandwich.sw_report', level='WARNING'):
            report = PropertyReport.from_json(obj)
        self.assertEqual(report.verdict, FAIL)

    def test_from_json__missing_keys(self):
        with self.assertRaises(ValidationError):
            PropertyReport.from_json({'property_id': 'limits'})
        with self.assertRaises(ValidationError):
            PropertyReport.from_json([])

    def test_reports_from_json__list(self):
        # Prepare test
        reports = [PropertyReport('a', 1, 0, 0.0, 0.0).to_json(), PropertyReport('b', 1, 0, 0.0, 0.0).to_json()]

        # Execute test
        out = reports_from_json(reports)

        # Evaluate results
        self.assertEqual([r.property_id for r in out], ['a', 'b'])
        self.assertEqual(len(reports_from_json(reports[0])), 1)

    def test_summary(self):
        text = PropertyReport('pinching', 200, 0, 1.5e-12, 1e-8).summary(3)
        self.assertTrue(text.startswith('pinching: pass worst_violation=1.5e-12'), text)


class CounterexampleRecordCase(TestCase):

    def test_init__violation_threshold(self):
        with self.assertRaises(ValidationError):
            CounterexampleRecord(0.3, basis_state(2, 0), plus_state(), QuantumChannel([np.eye(2)]), 1e-7)

    def test_json_round_trip(self):
        # Prepare test
        record = _record()

        # Execute test
        back = CounterexampleRecord.from_json(json.loads(json.dumps(record.to_json())))

        # Evaluate results
        self.assertEqual(back.alpha, 0.3)
        self.assertAlmostEqual(back.violation, 4 / 7, places=15)
        assert_allclose(back.sigma.entries, plus_state().entries, atol=0)
        self.assertEqual(len(back.channel.kraus_ops), 2)

    def test_report_carries_records(self):
        # Prepare test
        report = PropertyReport('DP-counterexamples', 100, 0, 4 / 7, 1e-6, {'alpha': 0.3}, [_record()])

        # Execute test
        back = PropertyReport.from_json(json.loads(report.dumps()))

        # Evaluate results
        self.assertEqual(back.verdict, FAIL)
        self.assertEqual(len(back.counterexamples), 1)

    def test_from_json__missing_key(self):
        obj = _record().to_json()
        del obj['sigma']
        with self.assertRaises(ValidationError):
            CounterexampleRecord.from_json(obj)


def suite():
    """ Create the test suite that include all sw_report test cases

    :return: sw_report test suite
    """
    sw_report_suite = unittest.TestSuite()
    for case in [PropertyReportCase, CounterexampleRecordCase]:
        sw_report_suite.addTests(unittest.TestLoader().loadTestsFromTestCase(case))
    return sw_report_suite


if __name__ == '__main__':
    unittest.main()
