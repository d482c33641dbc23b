""" This file is part of sandwich.

test_sw_linalg.py : tests for the Hermitian operator layer

  - each case is defined by 3 steps: prepare, execute, evaluate
  - matrices are small and chosen so the expected values are known in closed form
"""
import math
import unittest
from unittest import TestCase

import numpy as np
from numpy.testing import assert_allclose

from sandwich.sw_linalg import HermitianOperator, ZeroThreshold, commutator_norm, dominates, direct_sum, \
    eigendecompose, is_psd, log_trace_power, loewner_leq, matrix_log_on_support, matrix_power_on_support, overlap, \
    partial_trace, permute_subsystems, pinching, psd_spectrum, schatten_norm, support, tensor_product, \
    variational_norm_check
from sandwich.sw_util import ValidationError

ASSERT_INVALID_RETURNED_VALUE_FMT = "{} returned a misleading value"
ASSERT_RAISES_FMT = "{} accepted invalid input"


class HermitianOperatorCase(TestCase):

    def test_init__rejects_non_hermitian(self):
        # Prepare test
        a = np.array([[1, 2], [0, 1]], dtype=complex)

        # Execute test / Evaluate results
        with self.assertRaises(ValidationError, msg=ASSERT_RAISES_FMT.format('HermitianOperator')):
            HermitianOperator(a)

    def test_init__rejects_non_square(self):
        with self.assertRaises(ValidationError):
            HermitianOperator(np.zeros((2, 3)))

    def test_spectrum__descending(self):
        # Prepare test
        A = HermitianOperator.diagonal([0.2, 0.5, 0.3])

        # Execute test
        lam = A.eigenvalues

        # Evaluate results
        assert_allclose(lam, [0.5, 0.3, 0.2], atol=1e-14)

    def test_arithmetic(self):
        # Prepare test
        A = HermitianOperator.diagonal([1, 2])
        B = HermitianOperator.identity(2)

        # Execute test
        C = 2 * A - B

        # Evaluate results
        assert_allclose(C.entries, np.diag([1, 3]), atol=1e-14)
        with self.assertRaises(ValidationError):
            A * 1j


class SpectralCase(TestCase):

    def setUp(self):
        self.rho = HermitianOperator.diagonal([0.5, 0.5, 0.0])
        self.sigma = HermitianOperator.diagonal([0.3, 0.7, 0.0])

    def test_psd_spectrum__rejects_negative(self):
        with self.assertRaises(ValidationError):
            psd_spectrum(HermitianOperator.diagonal([1.0, -0.1]))

    def test_psd_spectrum__keeps_support(self):
        # Execute test
        lam, V, keep = psd_spectrum(self.rho)

        # Evaluate results
        self.assertEqual(int(np.sum(keep)), 2, ASSERT_INVALID_RETURNED_VALUE_FMT.format('psd_spectrum'))

    def test_zero_threshold__relative(self):
        # Prepare test
        zero = ZeroThreshold(1e-12, 1e-10)

        # Execute test / Evaluate results
        self.assertEqual(zero.cutoff(1e-6), 1e-12)
        self.assertAlmostEqual(zero.cutoff(100.0), 1e-8)

    def test_eigendecompose__descending(self):
        # Prepare test
        A = HermitianOperator([[2.0, 1.0], [1.0, 2.0]])

        # Execute test
        lam, V = eigendecompose(A)

        # Evaluate results
        assert_allclose(lam, [3.0, 1.0], atol=1e-12)
        assert_allclose((V * lam) @ V.conj().T, A.entries, atol=1e-12)
        with self.assertRaises(ValidationError):
            eigendecompose(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_log_on_support__zero_stays_zero(self):
        # Prepare test
        A = HermitianOperator.diagonal([0.5, 0.25, 0.0])

        # Execute test
        bits = matrix_log_on_support(A)
        nats = matrix_log_on_support(A, base='e')

        # Evaluate results
        assert_allclose(bits.entries, np.diag([-1.0, -2.0, 0.0]), atol=1e-12)
        assert_allclose(nats.entries, np.diag([math.log(0.5), math.log(0.25), 0.0]), atol=1e-12)
        with self.assertRaises(ValidationError):
            matrix_log_on_support(A, base=10)

    def test_power_on_support__generalized_inverse(self):
        # Execute test
        inv = matrix_power_on_support(self.sigma, -1)

        # Evaluate results
        assert_allclose(inv.entries, np.diag([1 / 0.3, 1 / 0.7, 0.0]), atol=1e-12)

    def test_eigendecompose__pauli_x(self):
        # Execute test
        lam, V = eigendecompose(np.array([[0.0, 1.0], [1.0, 0.0]]))

        # Evaluate results
        assert_allclose(lam, [1.0, -1.0], atol=1e-12)
        assert_allclose(np.abs(V[:, 0]), [2 ** -0.5, 2 ** -0.5], atol=1e-12)
        assert_allclose(abs(np.vdot(V[:, 0], V[:, 1])), 0.0, atol=1e-12)

    def test_power_on_support__inverse_powers_give_projector(self):
        # Prepare test
        rng = np.random.default_rng(8)
        G = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
        A = HermitianOperator(G @ G.conj().T)
        P = support(A).projector.entries

        for p in (0.5, -0.5, 2.0, -2.0):
            # Execute test
            product = matrix_power_on_support(A, p).entries @ matrix_power_on_support(A, 1.0 / p).entries

            # Evaluate results
            assert_allclose(product, P, atol=1e-9, err_msg="p={}".format(p))

    def test_support__rank_and_projector(self):
        # Execute test
        s = support(self.rho)

        # Evaluate results
        self.assertEqual(s.rank, 2)
        assert_allclose(s.projector.entries, np.diag([1, 1, 0]), atol=1e-12)

    def test_dominates(self):
        # Prepare test
        narrow = HermitianOperator.diagonal([1.0, 0.0, 0.0])

        # Execute test / Evaluate results
        self.assertTrue(dominates(self.sigma, self.rho))
        self.assertTrue(dominates(self.rho, narrow))
        self.assertFalse(dominates(narrow, self.rho))
        self.assertAlmostEqual(overlap(self.rho, narrow), 1.0)

    def test_is_psd_and_loewner(self):
        self.assertTrue(is_psd(self.rho))
        self.assertTrue(loewner_leq(self.rho * 0.5, self.rho))
        self.assertFalse(loewner_leq(self.rho, self.sigma))


class NormCase(TestCase):

    def setUp(self):
        self.X = HermitianOperator.diagonal([0.5, 0.3, 0.2])

    def test_schatten_norm(self):
        self.assertAlmostEqual(schatten_norm(self.X, 1), 1.0, places=12)
        self.assertAlmostEqual(schatten_norm(self.X, 2), math.sqrt(0.38), places=12)
        self.assertAlmostEqual(schatten_norm(self.X, math.inf), 0.5, places=12)

    def test_schatten_norm__gram_matrices_agree(self):
        # Prepare test
        rng = np.random.default_rng(5)
        X = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))

        for p in (0.5, 1, 2, 3.5, math.inf):
            # Execute test
            left = schatten_norm(X.conj().T @ X, p)
            right = schatten_norm(X @ X.conj().T, p)

            # Evaluate results
            self.assertAlmostEqual(left, right, places=10, msg="p={}".format(p))

    def test_schatten_norm__rejects_zero_exponent(self):
        with self.assertRaises(ValidationError):
            schatten_norm(self.X, 0)

    def test_variational_norm_check__above_one(self):
        # Execute test
        direct, variational = variational_norm_check(self.X, 2.0)

        # Evaluate results
        self.assertAlmostEqual(direct, variational, delta=1e-6 * direct)

    def test_variational_norm_check__below_one(self):
        # Execute test
        direct, variational = variational_norm_check(self.X, 0.5)

        # Evaluate results
        self.assertAlmostEqual(direct, (math.sqrt(0.5) + math.sqrt(0.3) + math.sqrt(0.2)) ** 2, places=10)
        self.assertAlmostEqual(direct, variational, delta=1e-6 * direct)

    def test_log_trace_power__large_exponent(self):
        # Prepare test
        A = HermitianOperator.diagonal([0.9, 0.1])

        # Execute test
        value = log_trace_power(A, 400)

        # Evaluate results
        expected = 400 * math.log(0.9) + math.log1p((0.1 / 0.9) ** 400)
        self.assertTrue(math.isfinite(value))
        self.assertAlmostEqual(value, expected, places=9)


class SubsystemCase(TestCase):

    def setUp(self):
        self.A = HermitianOperator.diagonal([0.25, 0.75])
        self.B = HermitianOperator(np.array([[0.5, 0.5j], [-0.5j, 0.5]]))
        self.C = HermitianOperator.diagonal([0.1, 0.2, 0.7])

    def test_partial_trace__product(self):
        # Prepare test
        ABC = tensor_product(self.A, self.B, self.C)

        # Execute test
        B = partial_trace(ABC, [2, 2, 3], [0, 2])
        AC = partial_trace(ABC, [2, 2, 3], 'B')

        # Evaluate results
        assert_allclose(B.entries, self.B.entries, atol=1e-12)
        assert_allclose(AC.entries, tensor_product(self.A, self.C).entries, atol=1e-12)

    def test_partial_trace__bad_dims(self):
        with self.assertRaises(ValidationError):
            partial_trace(tensor_product(self.A, self.B), [3, 2], [0])

    def test_permute_subsystems(self):
        # Execute test
        out = permute_subsystems(tensor_product(self.A, self.C), [2, 3], [1, 0])

        # Evaluate results
        assert_allclose(out.entries, tensor_product(self.C, self.A).entries, atol=1e-12)

    def test_permute_subsystems__not_a_permutation(self):
        with self.assertRaises(ValidationError):
            permute_subsystems(tensor_product(self.A, self.C), [2, 3], [1])

    def test_pinching__diagonal_sigma(self):
        # Prepare test
        rho = HermitianOperator(np.array([[0.5, 0.2], [0.2, 0.5]]))
        sigma = HermitianOperator.diagonal([0.3, 0.7])

        # Execute test
        out = pinching(sigma, rho)

        # Evaluate results
        assert_allclose(out.entries, np.diag([0.5, 0.5]), atol=1e-12)

    def test_pinching__commutes_with_sigma(self):
        # Prepare test
        rng = np.random.default_rng(3)
        U = np.linalg.qr(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))[0]
        G = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        rho = HermitianOperator(G @ G.conj().T)
        sigmas = [HermitianOperator((U * w) @ U.conj().T) for w in ([0.5, 0.3, 0.2], [0.5, 0.25, 0.25])]

        for sigma in sigmas:
            # Execute test
            out = pinching(sigma, rho)

            # Evaluate results
            self.assertLess(commutator_norm(out, sigma), 1e-12)
            self.assertAlmostEqual(out.trace(), rho.trace(), places=12)
        self.assertGreater(commutator_norm(rho, sigmas[0]), 1e-3)

    def test_pinching__degenerate_sigma_is_identity(self):
        # Prepare test
        rho = HermitianOperator(np.array([[0.5, 0.2], [0.2, 0.5]]))

        # Execute test
        out = pinching(HermitianOperator.identity(2), rho)

        # Evaluate results
        assert_allclose(out.entries, rho.entries, atol=1e-12)

    def test_direct_sum(self):
        out = direct_sum(self.A, self.C)
        self.assertEqual(out.dim, 5)
        assert_allclose(np.diag(out.entries).real, [0.25, 0.75, 0.1, 0.2, 0.7], atol=1e-14)


def suite():
    """ Create the test suite that include all sw_linalg test cases

    :return: sw_linalg test suite
    """
    sw_linalg_suite = unittest.TestSuite()
    for case in [HermitianOperatorCase, SpectralCase, NormCase, SubsystemCase]:
        sw_linalg_suite.addTests(unittest.TestLoader().loadTestsFromTestCase(case))
    return sw_linalg_suite


if __name__ == '__main__':
    unittest.main()
