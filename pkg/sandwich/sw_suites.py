#!/usr/bin/env python3
#
# This file is part of sandwich.
#
# sw_suites.py : randomized property suites.  Each suite samples one instance
#                per trial and returns the signed violation of its inequality
#                (positive means violated), the harness keeps the worst.
#
########################################################################
#  This program is free software; you can redistribute it and/or modify
#  it under the terms of the GNU General Public License as published by
#  the Free Software Foundation; version 2 of the License.
#
#  This program is distributed in the hope that it will be useful,
#  but WITHOUT ANY WARRANTY; without even the implied warranty of
#  MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
#  GNU General Public License for more details.
#
#  You should have received a copy of the GNU General Public License
#  along with this program; if not, write to the Free Software
#  Foundation, Inc., 59 Temple Place, Suite 330, Boston, MA 02111-1307  USA
#
#

"""

A suite is chosen by its registered name.  The built-in suites cover the
axioms, the inequalities between divergences, the limits and the derivative
in the order, data processing for the divergence and the conditional entropy,
joint convexity, and the conditional entropy relations (duality, chain rule,
classical conditioning, uncertainty).

The API of a suite class:
   __init__      -- optionally given an evaluator replacing the sandwiched divergence.
   registered_as -- return the name under which the suite is run.
   check_dims    -- validate the dims given for a run.
   trial         -- given a random Generator and dims, return the signed violation.

Every random draw of a trial comes from the Generator it is given, so a trial
is replayed exactly from (seed, trial index).

"""

import logging
import math

import numpy as np

from sandwich.sw_conditional import Method, arimoto_conditional, chain_rule_check, classical_conditional, \
    conditional_renyi, duality_check, duality_pair, uncertainty_check
from sandwich.sw_divergence import auxiliary_divergence, divergence_alpha_derivative, \
    finite_difference_derivative, limit_checks, petz_divergence, relative_entropy, sandwiched_divergence
from sandwich.sw_linalg import commutator_norm, direct_sum, pinching, tensor_product
from sandwich.sw_states import DensityOperator, MultipartiteState, apply_channel, classical_quantum_assemble, \
    random_channel, random_density, random_povm, random_pure, random_unitary
from sandwich.sw_util import LN2, ValidationError, slack

logger = logging.getLogger(__name__)

ANALYTIC_TOL = 1e-8
OPTIMIZER_TOL = 2e-4
CONDITIONAL_TOLERANCE = 1e-5
CERTIFICATE_TOL = 1e-4
CLASSICAL_TOL = 2e-5
TIGHT_TOLERANCE = 1e-8
TIGHT_ITERATIONS = 3000


def _log2_mean(values, weights):
    return math.log2(np.dot(weights, values) / np.sum(weights))


class sw_suite(object):
    """
    base of the property suites.  tolerance bounds the worst violation of a
    passing run, alphas is the order grid every trial sweeps.
    """
    tolerance = ANALYTIC_TOL
    alphas = (0.5, 0.7, 1.3, 2.0, 3.0)
    dims = (3,)
    trials = 200

    def __init__(self, evaluator=None):
        self.evaluator = evaluator if evaluator is not None else sandwiched_divergence
        self.overridden = evaluator is not None

    def registered_as(self):
        return None

    def check_dims(self, dims):
        dims = tuple(int(d) for d in dims)
        if len(dims) != len(self.dims) or any(d < 1 for d in dims):
            raise ValidationError("suite {} needs {} subsystem dims: {}".format(
                self.registered_as(), len(self.dims), list(dims)))
        return dims

    def trial(self, rng, dims):
        raise NotImplementedError

    def D(self, rho, sigma, alpha):
        return float(self.evaluator(rho, sigma, alpha))

    def pair(self, rng, d):
        """ random rho of random rank, full rank sigma """
        rank = int(rng.integers(1, d + 1))
        return random_density(d, rank, rng), random_density(d, None, rng)


#============================================================
# divergence suites

class Axioms(sw_suite):
    """ continuity, unitary invariance, normalization, order, additivity, mean """

    def registered_as(self):
        return 'axioms'

    def trial(self, rng, dims):
        d = dims[0]
        rho, sigma = self.pair(rng, d)
        tau, omega = self.pair(rng, d)
        U = random_unitary(d, rng)
        # lower = upper^1/2 C upper^1/2 with C <= id, so lower <= upper
        upper = random_density(d, None, rng)
        C = random_density(d, None, rng)
        root = _sqrt_entries(upper.entries)
        lower = DensityOperator(root @ (C.entries / C.eigenvalues[0]) @ root, check=False)
        p, q = (float(x) for x in rng.uniform(0.2, 0.8, size=2))
        nudged = DensityOperator((1.0 - 1e-12) * rho.entries + 1e-12 * np.eye(d) / d, check=False)
        worst = -math.inf
        for a in self.alphas:
            base = self.D(rho, sigma, a)
            # continuity
            worst = max(worst, abs(self.D(nudged, sigma, a) - base) - 1e-7)
            # unitary invariance
            worst = max(worst, abs(self.D(rho.conjugate_by(U), sigma.conjugate_by(U), a) - base))
            # normalization on scalars
            worst = max(worst, abs(self.D(DensityOperator([[1.0]]), np.array([[0.5]]), a) - 1.0))
            # order
            worst = max(worst, -self.D(upper, lower, a), self.D(lower, upper, a))
            # additivity
            joint = self.D(tensor_product(rho, tau), tensor_product(sigma, omega), a)
            worst = max(worst, abs(joint - base - self.D(tau, omega, a)))
            # mean over a direct sum with g(t) = 2^((a-1)t)
            left = self.D(direct_sum(p * rho, (1 - p) * tau), direct_sum(q * sigma, (1 - q) * omega), a)
            parts = [self.D(p * rho, q * sigma, a), self.D((1 - p) * tau, (1 - q) * omega, a)]
            right = _log2_mean([2.0 ** ((a - 1.0) * x) for x in parts], [p, 1 - p]) / (a - 1.0)
            worst = max(worst, abs(left - right))
        return worst


def _sqrt_entries(a):
    w, V = np.linalg.eigh(a)
    return (V * np.sqrt(np.clip(w, 0.0, None))) @ V.conj().T


class Positivity(sw_suite):
    """ tr rho >= tr sigma implies D~(rho||sigma) >= 0 """

    def registered_as(self):
        return 'positivity'

    def trial(self, rng, dims):
        d = dims[0]
        rho, sigma = self.pair(rng, d)
        sigma = sigma * float(rng.uniform(0.2, 1.0))
        return max(-self.D(rho, sigma, a) for a in self.alphas)


class SigmaMonotone(sw_suite):
    """ sigma' >= sigma implies D~(rho||sigma') <= D~(rho||sigma) """

    def registered_as(self):
        return 'sigma-monotone'

    def trial(self, rng, dims):
        d = dims[0]
        rho, sigma = self.pair(rng, d)
        bigger = sigma + float(rng.uniform(0.0, 1.0)) * random_density(d, int(rng.integers(1, d + 1)), rng)
        return max(slack(self.D(rho, bigger, a), self.D(rho, sigma, a)) for a in self.alphas)


class Pinching(sw_suite):
    """ D~(rho||sigma) >= D~(P_sigma(rho)||sigma), including orders below 1/2; P_sigma(rho) commutes with sigma """
    alphas = (0.3, 0.5, 0.7, 1.3, 2.0, 3.0)

    def registered_as(self):
        return 'pinching'

    def trial(self, rng, dims):
        d = dims[0]
        rho, sigma = self.pair(rng, d)
        if d > 2 and rng.uniform() < 0.5:
            # a degenerate sigma pinches onto blocks instead of the diagonal
            U = random_unitary(d, rng)
            w = np.full(d, 1.0)
            w[0] = 2.0
            sigma = DensityOperator((U * (w / w.sum())) @ U.conj().T, check=False)
        pinched = DensityOperator(pinching(sigma, rho), check=False)
        worst = max(slack(self.D(pinched, sigma, a), self.D(rho, sigma, a)) for a in self.alphas)
        return max(worst, commutator_norm(pinched, sigma))


class AltOrdering(sw_suite):
    """ sandwiched <= Petz """

    def registered_as(self):
        return 'alt-ordering'

    def trial(self, rng, dims):
        rho, sigma = self.pair(rng, dims[0])
        return max(slack(self.D(rho, sigma, a), petz_divergence(rho, sigma, a).value) for a in self.alphas)


class MonotoneAlpha(sw_suite):
    """ D~ and the auxiliary quantity at fixed tau are nondecreasing in the order """
    alphas = (0.5, 0.6, 0.8, 0.9, 1.2, 1.5, 2.0, 3.0)

    def registered_as(self):
        return 'monotone-alpha'

    def trial(self, rng, dims):
        d = dims[0]
        rho, sigma = self.pair(rng, d)
        tau = random_density(d, None, rng)
        divergences = [self.D(rho, sigma, a) for a in self.alphas]
        auxiliary = [auxiliary_divergence(rho, sigma, tau, a).value for a in self.alphas]
        worst = -math.inf
        for values in (divergences, auxiliary):
            for lower, upper in zip(values, values[1:]):
                worst = max(worst, slack(lower, upper))
        return worst


class DataProcessing(sw_suite):
    """ D~(E(rho)||E(sigma)) <= D~(rho||sigma) for random channels """
    alphas = (0.5, 0.7, 0.9, 1.3, 2.0, 3.0, 5.0)

    def registered_as(self):
        return 'DP-sandwiched'

    def trial(self, rng, dims):
        d = dims[0]
        rho, sigma = self.pair(rng, d)
        d_out = int(rng.integers(1, d + 1)) + 1
        E = random_channel(d, d_out, int(rng.integers(1, d * d_out + 1)), rng)
        rho_out, sigma_out = apply_channel(E, rho), apply_channel(E, sigma)
        return max(slack(self.D(rho_out, sigma_out, a), self.D(rho, sigma, a)) for a in self.alphas)


class JointConvexity(sw_suite):
    """ 2^((a-1)D~) is jointly convex on states for a > 1 """
    alphas = (1.3, 1.5, 2.0, 3.0)
    weights = (0.25, 0.5, 0.75)
    sign = 1.0

    def registered_as(self):
        return 'joint-convexity'

    def Q(self, rho, sigma, a):
        return 2.0 ** ((a - 1.0) * self.D(rho, sigma, a))

    def trial(self, rng, dims):
        d = dims[0]
        r1, s1 = self.pair(rng, d)
        r2, s2 = self.pair(rng, d)
        worst = -math.inf
        for a in self.alphas:
            q1, q2 = self.Q(r1, s1, a), self.Q(r2, s2, a)
            for lam in self.weights:
                mixed = self.Q(lam * r1 + (1 - lam) * r2, lam * s1 + (1 - lam) * s2, a)
                worst = max(worst, self.sign * (mixed - lam * q1 - (1 - lam) * q2))
        return worst


class JointConcavity(JointConvexity):
    """ 2^((a-1)D~) is jointly concave on states for 1/2 <= a < 1 """
    alphas = (0.5, 0.75, 0.9)
    sign = -1.0

    def registered_as(self):
        return 'joint-concavity'


class Limits(sw_suite):
    """ orders 1 -/+ 1e-3 against D, order 200 against D_max """
    dims = (2,)
    tolerance = 0.0

    def registered_as(self):
        return 'limits'

    def trial(self, rng, dims):
        d = dims[0]
        rho = random_density(d, None, rng)
        sigma = DensityOperator(0.3 * random_density(d, None, rng).entries + 0.7 * np.eye(d) / d, check=False)
        report = limit_checks(rho, sigma)
        return max(report.gap_one - 5e-3 * (1 + abs(report.relative_entropy)), report.gap_max - 1e-2)


class Derivative(sw_suite):
    """ analytic d/da tr Z^a against central differences, and ln2 D at a = 1 """
    alphas = (0.7, 1.0, 1.7)
    tolerance = 0.0
    floor = 1e-3

    def registered_as(self):
        return 'derivative'

    def trial(self, rng, dims):
        d = dims[0]
        X = random_density(d, int(rng.integers(1, d + 1)), rng)
        Y = random_density(d, None, rng)
        worst = -math.inf
        for a in self.alphas:
            analytic = divergence_alpha_derivative(X, Y, a)
            numeric = finite_difference_derivative(X, Y, a)
            worst = max(worst, abs(analytic - numeric) / max(abs(numeric), self.floor) - 1e-4)
            if a == 1.0:
                expected = LN2 * relative_entropy(X, Y).value
                worst = max(worst, abs(analytic - expected) / max(abs(expected), self.floor) - 1e-6)
        return worst


#============================================================
# conditional entropy suites

class ConditionalSuite(sw_suite):
    tolerance = OPTIMIZER_TOL
    alphas = (0.75, 2.0)
    dims = (2, 2)
    trials = 50

    def H(self, state, alpha, conditioning=None):
        return conditional_renyi(state, alpha, tolerance=CONDITIONAL_TOLERANCE, conditioning=conditioning).value


class ConditionalDataProcessing(ConditionalSuite):
    """ H~(A|B) can only increase under a channel on B """

    def registered_as(self):
        return 'DP-conditional'

    def trial(self, rng, dims):
        dA, dB = dims
        rho = MultipartiteState(random_density(dA * dB, None, rng), [dA, dB])
        E = random_channel(dB, dB, int(rng.integers(1, dB * dB + 1)), rng).on_subsystem([dA, dB], 1)
        out = MultipartiteState(apply_channel(E, rho.op), [dA, dB])
        return max(self.H(rho, a) - self.H(out, a) for a in self.alphas)


class Duality(ConditionalSuite):
    """
    H~a(A|B) = -H~b(A|C) on pure states.  Both sides are certified against the
    Bloch grid oracle; a disagreement of CERTIFICATE_TOL counts as the suite
    tolerance.
    """
    alphas = (2.0, 1.5, 0.75)
    dims = (2, 2, 2)

    def registered_as(self):
        return 'duality'

    def certificate(self, value, state, alpha):
        oracle = conditional_renyi(state, alpha, Method.grid_oracle).value
        return abs(value - oracle) * self.tolerance / CERTIFICATE_TOL

    def trial(self, rng, dims):
        phi = random_pure(dims, rng)
        worst = -math.inf
        for a in self.alphas:
            check = duality_check(phi, a, CONDITIONAL_TOLERANCE)
            worst = max(worst, check.gap,
                        self.certificate(check.h_ab, phi.marginal([0, 1]), a),
                        self.certificate(-check.minus_h_ac, phi.marginal([0, 2]), duality_pair(a)))
        return worst


class ChainRule(ConditionalSuite):
    """ H~(A|BC) >= H~(AC|B) - log2 rank(rho_C) """
    dims = (2, 2, 2)

    def registered_as(self):
        return 'chain-rule'

    def trial(self, rng, dims):
        D = int(np.prod(dims))
        rho = MultipartiteState(random_density(D, int(rng.integers(1, D + 1)), rng), dims)
        return max(-chain_rule_check(rho, a, CONDITIONAL_TOLERANCE).slack for a in self.alphas)


class ClassicalDecomposition(ConditionalSuite):
    """ closed form over classical blocks against the optimizer on the block state """
    tolerance = CLASSICAL_TOL

    def registered_as(self):
        return 'classical-decomposition'

    def trial(self, rng, dims):
        dA, dB = dims
        p = rng.dirichlet([1.0, 1.0])
        blocks = [random_density(dA * dB, None, rng) for _ in range(2)]
        state = classical_quantum_assemble(p, blocks, [dA, dB])
        worst = -math.inf
        for a in self.alphas:
            closed = classical_conditional(p, blocks, a, block_dims=[dA, dB], tolerance=TIGHT_TOLERANCE,
                                           max_iterations=TIGHT_ITERATIONS)
            direct = conditional_renyi(state, a, tolerance=TIGHT_TOLERANCE, conditioning=[0, 2],
                                       max_iterations=TIGHT_ITERATIONS).value
            worst = max(worst, abs(closed - direct))

        # no quantum side information: the scalar formula
        px = [rng.dirichlet(np.ones(dA)) for _ in range(2)]
        for a in self.alphas:
            diag = [DensityOperator(np.diag(x), check=False) for x in px]
            worst = max(worst, abs(arimoto_conditional(p, px, a) - classical_conditional(p, diag, a)) -
                        ANALYTIC_TOL)
        return worst


class Uncertainty(ConditionalSuite):
    """ H~a(X|B) + H~b(Y|C) >= log2 1/c with c the squared overlap """
    alphas = (2.0, 0.75)
    dims = (2, 2, 2)

    def registered_as(self):
        return 'uncertainty'

    def trial(self, rng, dims):
        D = int(np.prod(dims))
        state = MultipartiteState(random_density(D, int(rng.integers(1, D + 1)), rng), dims)
        M = random_povm(dims[0], 2, rng)
        N = random_povm(dims[0], 2, rng)
        return max(-uncertainty_check(state, M, N, a, CONDITIONAL_TOLERANCE).margin for a in self.alphas)


SUITES = {}
for _cls in (Axioms, Positivity, SigmaMonotone, Pinching, AltOrdering, MonotoneAlpha, DataProcessing,
             ConditionalDataProcessing, JointConvexity, JointConcavity, Limits, Derivative, Duality, ChainRule,
             ClassicalDecomposition, Uncertainty):
    SUITES[_cls().registered_as()] = _cls


def get_suite(suite_id, evaluator=None):
    if suite_id not in SUITES:
        raise ValidationError("unknown suite: {} (one of {})".format(suite_id, ', '.join(sorted(SUITES))))
    return SUITES[suite_id](evaluator)
