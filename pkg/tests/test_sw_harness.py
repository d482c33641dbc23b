""" This file is part of sandwich.

test_sw_harness.py : tests for the property suites, the counterexample miner,
                     recheck and the joint convexity search

  - each case is defined by 3 steps: prepare, execute, evaluate
  - suites run with few trials; the full trial counts belong to `sw suite`
"""
import json
import math
import unittest
from unittest import TestCase
from unittest.mock import patch

import numpy as np

from sandwich.sw_conditional import conditional_renyi
from sandwich.sw_divergence import DivergenceValue, petz_divergence
from sandwich.sw_harness import convexity_probe, dp_violation, mine_counterexamples, mining_report, recheck, \
    resolve_workers, run_suite
from sandwich.sw_report import CounterexampleRecord, PropertyReport
from sandwich.sw_states import DensityOperator, QuantumChannel, basis_state, plus_state, random_pure
from sandwich.sw_suites import SUITES, get_suite
from sandwich.sw_util import ValidationError, refine_stream, rng_stream

ASSERT_VERDICT_FMT = "{} verdict misleading: {}"

SUITE_IDS = ['DP-conditional', 'DP-sandwiched', 'alt-ordering', 'axioms', 'chain-rule', 'classical-decomposition',
             'derivative', 'duality', 'joint-concavity', 'joint-convexity', 'limits', 'monotone-alpha', 'pinching',
             'positivity', 'sigma-monotone', 'uncertainty']


def _corrupted(rho, sigma, alpha):
    """ decreasing in the order """
    return DivergenceValue(-float(alpha))


def _measurement():
    return QuantumChannel([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])


class RegistryCase(TestCase):

    def test_registered_ids(self):
        self.assertEqual(sorted(SUITES), SUITE_IDS)

    def test_get_suite__unknown(self):
        with self.assertRaises(ValidationError):
            get_suite('no-such-suite')

    def test_check_dims(self):
        with self.assertRaises(ValidationError):
            get_suite('duality').check_dims([2, 2])


class DivergenceSuiteCase(TestCase):

    def check_passes(self, suite_id, trials, dims=None):
        # Execute test
        report = run_suite(suite_id, trials=trials, dims=dims, seed=1)

        # Evaluate results
        self.assertTrue(report.passed, ASSERT_VERDICT_FMT.format(suite_id, report.summary()))
        self.assertEqual(report.trials, trials)
        return report

    def test_axioms(self):
        self.check_passes('axioms', 5)

    def test_positivity(self):
        self.check_passes('positivity', 10)

    def test_sigma_monotone(self):
        self.check_passes('sigma-monotone', 10)

    def test_pinching(self):
        self.check_passes('pinching', 10)

    def test_alt_ordering(self):
        self.check_passes('alt-ordering', 10)

    def test_monotone_alpha(self):
        self.check_passes('monotone-alpha', 10)

    def test_data_processing(self):
        self.check_passes('DP-sandwiched', 10, [2])

    def test_joint_convexity(self):
        self.check_passes('joint-convexity', 5)

    def test_joint_concavity(self):
        self.check_passes('joint-concavity', 5)

    def test_limits(self):
        self.check_passes('limits', 10)

    def test_derivative(self):
        self.check_passes('derivative', 5)

    def test_report_params(self):
        # Execute test
        report = run_suite('positivity', trials=4, dims=[2], seed=7)

        # Evaluate results
        self.assertEqual(report.params['dims'], [2])
        self.assertIn(report.params['worst_trial'], range(4))
        self.assertEqual(report.seed, 7)

    def test_reproducible(self):
        # Execute test
        first = run_suite('monotone-alpha', trials=4, seed=5)
        second = run_suite('monotone-alpha', trials=4, seed=5)

        # Evaluate results
        self.assertEqual(first.worst_violation, second.worst_violation)
        self.assertEqual(first.params['worst_trial'], second.params['worst_trial'])

    def test_workers_do_not_change_result(self):
        # Execute test
        serial = run_suite('positivity', trials=6, seed=2, workers=1)
        parallel = run_suite('positivity', trials=6, seed=2, workers=2)

        # Evaluate results
        self.assertEqual(serial.worst_violation, parallel.worst_violation)
        self.assertEqual(parallel.params['workers'], 2)

    def test_corrupted_evaluator_fails(self):
        # Execute test
        report = run_suite('monotone-alpha', trials=3, seed=0, evaluator=_corrupted)

        # Evaluate results
        self.assertFalse(report.passed, ASSERT_VERDICT_FMT.format('monotone-alpha', report.summary()))
        self.assertGreater(report.worst_violation, 0.09)

    def test_run_suite__bad_input(self):
        with self.assertRaises(ValidationError):
            run_suite('positivity', trials=-1)
        with self.assertRaises(ValidationError):
            run_suite('positivity', trials=2, seed=-3)
        with self.assertRaises(ValidationError):
            run_suite('positivity', trials=2, dims=[2, 2])

    @patch('sandwich.sw_harness.psutil.cpu_count', return_value=3)
    def test_resolve_workers(self, cpu_count):
        self.assertEqual(resolve_workers(0), 3)
        self.assertEqual(resolve_workers(2), 2)
        with self.assertRaises(ValidationError):
            resolve_workers(-1)


class ConditionalSuiteCase(TestCase):

    def check_passes(self, suite_id, trials):
        report = run_suite(suite_id, trials=trials, seed=3)
        self.assertTrue(report.passed, ASSERT_VERDICT_FMT.format(suite_id, report.summary()))

    def test_data_processing(self):
        self.check_passes('DP-conditional', 2)

    def test_duality(self):
        self.check_passes('duality', 1)

    def test_chain_rule(self):
        self.check_passes('chain-rule', 1)

    def test_classical_decomposition(self):
        # Execute test
        report = run_suite('classical-decomposition', trials=2, seed=3)

        # Evaluate results
        self.assertEqual(report.tolerance, 2e-5)
        self.assertTrue(report.passed, ASSERT_VERDICT_FMT.format('classical-decomposition', report.summary()))

    def test_default_trials(self):
        for suite_id in ('DP-conditional', 'duality', 'chain-rule', 'classical-decomposition', 'uncertainty'):
            self.assertGreaterEqual(get_suite(suite_id).trials, 50, suite_id)

    def test_duality_certificate(self):
        # Prepare test
        suite = get_suite('duality')
        phi = random_pure([2, 2, 2], 5)
        ab = phi.marginal([0, 1])
        h = conditional_renyi(ab, 2.0).value

        # Execute test
        agreeing = suite.certificate(h, ab, 2.0)
        drifted = suite.certificate(h + 2e-4, ab, 2.0)

        # Evaluate results
        self.assertLessEqual(agreeing, suite.tolerance)
        self.assertGreater(drifted, suite.tolerance)

    def test_uncertainty(self):
        self.check_passes('uncertainty', 1)


class MiningCase(TestCase):

    def test_dp_violation__measured_pure_states(self):
        # ideal measurement of |0> and |+>: 1 - 3/7 at order 0.3
        value = dp_violation(basis_state(2, 0), plus_state(), _measurement(), 0.3)
        self.assertAlmostEqual(value, 4 / 7, places=10)

    def test_dp_violation__holds_from_half(self):
        for alpha in (0.5, 0.75, 2.0):
            self.assertLessEqual(dp_violation(basis_state(2, 0), plus_state(), _measurement(), alpha), 1e-10)

    def test_recheck(self):
        # Prepare test
        record = CounterexampleRecord(0.3, basis_state(2, 0), plus_state(), _measurement(), 4 / 7)

        # Execute test
        again = recheck(CounterexampleRecord.from_json(json.loads(json.dumps(record.to_json()))))

        # Evaluate results
        self.assertAlmostEqual(again, record.violation, places=12)

    def test_mine__finds_violations(self):
        # Execute test
        records = mine_counterexamples(0.3, max_trials=2000, seed=0)

        # Evaluate results
        self.assertTrue(records, "no counterexample in 2000 trials")
        self.assertGreater(records[0].violation, 1e-6)
        self.assertEqual([r.violation for r in records], sorted((r.violation for r in records), reverse=True))
        self.assertAlmostEqual(recheck(records[0]), records[0].violation, delta=1e-9)

        report = mining_report(0.3, records, 2000, 0)
        self.assertEqual(report.property_id, 'DP-counterexamples')
        self.assertEqual(len(PropertyReport.from_json(json.loads(report.dumps())).counterexamples), len(records))

    def test_mine__rejects_core_orders(self):
        for alpha in (0.5, 0.6, 2.0):
            with self.assertRaises(ValidationError):
                mine_counterexamples(alpha, max_trials=10)
        with self.assertRaises(ValidationError):
            mine_counterexamples(0.3, max_trials=10, dim=4)

    def test_mining_report__empty(self):
        report = mining_report(0.3, [], 10, 0)
        self.assertTrue(report.passed)
        self.assertTrue(math.isinf(report.worst_violation))


class ConvexityCase(TestCase):

    def test_sandwiched_convex_above_one(self):
        # Execute test
        report = convexity_probe(2.0, trials=40, seed=1)

        # Evaluate results
        self.assertTrue(report.passed, report.summary())
        self.assertEqual(report.property_id, 'convexity-probe-sandwiched')

    def test_sandwiched_concave_below_one(self):
        report = convexity_probe(0.75, trials=40, seed=1)
        self.assertTrue(report.passed, report.summary())

    def test_petz_convexity_fails_at_three(self):
        # Execute test
        report = convexity_probe(3.0, trials=60, seed=1, family='petz')

        # Evaluate results
        self.assertGreater(report.params['convexity_violation'], 1e-9, report.summary())
        self.assertGreater(report.params['concavity_violation'], 1e-9)
        self.assertFalse(report.passed)

    def test_petz_convexity__ill_conditioned_pair(self):
        # Prepare test
        b = 8.48528e-5
        s1 = np.array([[0.992, b], [b, 0.008]])
        s2 = np.array([[0.988, -b], [-b, 0.012]])
        v = np.array([1.0, 2.83e-4])
        rho = DensityOperator(np.outer(v, v) / v.dot(v))

        def Q(sigma):
            return 2.0 ** (2.0 * petz_divergence(rho, DensityOperator(sigma), 3.0).value)

        # Execute test
        gap = Q((s1 + s2) / 2) - Q(s1) / 2 - Q(s2) / 2

        # Evaluate results
        self.assertGreater(gap, 1e-6)
        self.assertLess(gap, 1e-4)

    def test_sandwiched_convex_on_ill_conditioned_pairs(self):
        report = convexity_probe(3.0, trials=60, seed=1)
        self.assertLessEqual(report.params['convexity_violation'], 1e-9, report.summary())

    def test_unknown_family(self):
        with self.assertRaises(ValidationError):
            convexity_probe(2.0, trials=1, family='umegaki')


class StreamCase(TestCase):

    def test_rng_stream__per_trial(self):
        a = rng_stream(4, 1).standard_normal(3)
        b = rng_stream(4, 1).standard_normal(3)
        c = rng_stream(4, 2).standard_normal(3)
        np.testing.assert_array_equal(a, b)
        self.assertFalse(np.array_equal(a, c))

    def test_refine_stream__apart_from_trials(self):
        # Prepare test
        trial_draws = [rng_stream(s, t).standard_normal(2) for s in range(4) for t in range(8)]

        # Execute test
        refine_draws = [refine_stream(s, t, b).standard_normal(2) for s in range(4) for t in range(8) for b in (0, 1)]

        # Evaluate results
        np.testing.assert_array_equal(refine_stream(2, 3).standard_normal(2), refine_stream(2, 3).standard_normal(2))
        for r in refine_draws:
            self.assertFalse(any(np.array_equal(r, x) for x in trial_draws))
        self.assertFalse(np.array_equal(refine_draws[0], refine_draws[1]))


def suite():
    """ Create the test suite that include all sw_harness test cases

    :return: sw_harness test suite
    """
    sw_harness_suite = unittest.TestSuite()
    for case in [RegistryCase, DivergenceSuiteCase, ConditionalSuiteCase, MiningCase, ConvexityCase, StreamCase]:
        sw_harness_suite.addTests(unittest.TestLoader().loadTestsFromTestCase(case))
    return sw_harness_suite


if __name__ == '__main__':
    unittest.main()
