#!/usr/bin/env python3
#
# This file is part of sandwich.
#
# sw_divergence.py : the sandwiched Renyi divergence and its relatives: Petz
#                    divergence, relative entropy, max relative entropy, fidelity,
#                    Renyi entropies, the auxiliary two state quantity, the alpha
#                    derivative and the regularized limits.
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
All values are in bits.  Infinite values are never the result of a floating
point overflow: they come out of the support tests, carried by DivergenceValue
together with the reason.

  D~a(rho||sigma) = 1/(a-1) log tr[(sigma^g rho sigma^g)^a] / tr rho,  g = (1-a)/2a

is +inf when rho and sigma are orthogonal, or when a > 1 and the support of
sigma does not contain the support of rho.
"""

import logging
import math

from collections import namedtuple
from dataclasses import dataclass
from enum import Enum

import numpy as np

from scipy.special import logsumexp

from sandwich.sw_linalg import DEFAULT_ZERO, as_operator, dominates, log_trace_power, \
    log_trace_power_values, matrix_log_on_support, matrix_power_on_support, overlap, psd_spectrum, support
from sandwich.sw_states import as_density, require_normalized
from sandwich.sw_util import LN2, ComputationError, ValidationError, format_value, to_base

logger = logging.getLogger(__name__)

ORTHOGONAL_TOL = 1e-9
ALPHA_ONE_GAP = 1e-4
REGULARIZATION_XIS = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8)


class Validity(Enum):
    core = 'core'
    extended = 'extended'


class Reason(Enum):
    ok = 'ok'
    sigma_not_dominating = 'sigma_not_dominating'
    orthogonal_states = 'orthogonal_states'
    tau_not_dominating = 'tau_not_dominating'


class RenyiOrder:
    """
    order alpha > 0, alpha != 1.  Orders in [1/2,1) u (1,inf) form the core
    family, orders in (0,1/2) are computable but flagged extended.
    """

    def __init__(self, alpha):
        try:
            a = float(alpha)
        except (TypeError, ValueError):
            raise ValidationError("invalid order: alpha={}".format(alpha))
        if not math.isfinite(a) or a <= 0:
            raise ValidationError("order must be a positive real: alpha={}".format(alpha))
        if abs(a - 1.0) < ALPHA_ONE_GAP:
            raise ValidationError(
                "order too close to 1 for direct evaluation: alpha={} (use the relative entropy)".format(alpha))
        self.alpha = a
        self.validity = Validity.core if a >= 0.5 else Validity.extended

    @property
    def core(self):
        return self.validity is Validity.core

    def __float__(self):
        return self.alpha

    def __eq__(self, other):
        return isinstance(other, RenyiOrder) and other.alpha == self.alpha

    def __hash__(self):
        return hash(self.alpha)

    def __repr__(self):
        return "RenyiOrder({}, {})".format(self.alpha, self.validity.value)


def as_order(alpha):
    return alpha if isinstance(alpha, RenyiOrder) else RenyiOrder(alpha)


class DivergenceValue:
    """ extended real with the reason behind an infinite value """

    __slots__ = ('value', 'reason')

    def __init__(self, value, reason=Reason.ok):
        value = float(value)
        if math.isnan(value):
            raise ComputationError("divergence evaluated to nan")
        if math.isinf(value) and reason is Reason.ok:
            raise ComputationError("infinite divergence without a reason")
        self.value = value
        self.reason = reason

    @property
    def is_finite(self):
        return math.isfinite(self.value)

    def __float__(self):
        return self.value

    def format(self, precision=6, base=2):
        text = format_value(to_base(self.value, base), precision)
        if self.reason is not Reason.ok:
            text += " ({})".format(self.reason.value)
        return text

    def __repr__(self):
        return "DivergenceValue({}, {})".format(self.value, self.reason.value)


INF_NOT_DOMINATING = DivergenceValue(math.inf, Reason.sigma_not_dominating)
INF_ORTHOGONAL = DivergenceValue(math.inf, Reason.orthogonal_states)


def _pair(rho, sigma, zero):
    rho = as_density(rho, zero)
    sigma = as_operator(sigma)
    psd_spectrum(sigma, zero)
    if rho.dim != sigma.dim:
        raise ValidationError("dimension mismatch: rho dim={} sigma dim={}".format(rho.dim, sigma.dim))
    return rho, sigma


def _support_case(rho, sigma, alpha, zero):
    """ the infinite branches of the definition, or None when the value is finite """
    if alpha > 1 and not dominates(sigma, rho, zero):
        return INF_NOT_DOMINATING
    if overlap(rho, sigma, zero) <= ORTHOGONAL_TOL:
        return INF_ORTHOGONAL
    return None


def sandwich_log_trace(rho, sigma_power, alpha, zero=DEFAULT_ZERO):
    """ ln tr[(S rho S)^alpha] for arrays rho and S = sigma^g """
    Z = sigma_power @ rho @ sigma_power
    lam = np.clip(np.linalg.eigvalsh((Z + Z.conj().T) / 2), 0.0, None)
    keep = lam > zero.cutoff(lam[-1])
    return log_trace_power_values(lam[keep], alpha)


def sandwiched_divergence(rho, sigma, alpha, zero=DEFAULT_ZERO):
    a = as_order(alpha).alpha
    rho, sigma = _pair(rho, sigma, zero)
    infinite = _support_case(rho, sigma, a, zero)
    if infinite is not None:
        return infinite
    S = matrix_power_on_support(sigma, (1.0 - a) / (2.0 * a), zero).entries
    ltr = sandwich_log_trace(rho.entries, S, a, zero)
    if math.isinf(ltr):
        return INF_ORTHOGONAL
    return DivergenceValue((ltr - math.log(rho.trace())) / ((a - 1.0) * LN2))


def petz_divergence(rho, sigma, alpha, zero=DEFAULT_ZERO):
    a = as_order(alpha).alpha
    rho, sigma = _pair(rho, sigma, zero)
    infinite = _support_case(rho, sigma, a, zero)
    if infinite is not None:
        return infinite
    Q = np.real(np.trace(matrix_power_on_support(rho, a, zero).entries @
                         matrix_power_on_support(sigma, 1.0 - a, zero).entries))
    if Q <= 0:
        return INF_ORTHOGONAL
    return DivergenceValue((math.log(Q) - math.log(rho.trace())) / ((a - 1.0) * LN2))


def classical_renyi_divergence(p, q, alpha):
    """ (1/(a-1)) log sum p^a q^(1-a) / sum p for nonnegative vectors """
    a = as_order(alpha).alpha
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    both = (p > 0) & (q > 0)
    if not np.any(both):
        return INF_ORTHOGONAL
    if a > 1 and np.any((p > 0) & (q <= 0)):
        return INF_NOT_DOMINATING
    lse = logsumexp(a * np.log(p[both]) + (1.0 - a) * np.log(q[both]))
    return DivergenceValue((lse - math.log(p.sum())) / ((a - 1.0) * LN2))


def relative_entropy(rho, sigma, zero=DEFAULT_ZERO):
    rho, sigma = _pair(rho, sigma, zero)
    infinite = _support_case(rho, sigma, 2.0, zero)
    if infinite is not None:
        return infinite
    L = matrix_log_on_support(rho, 2, zero).entries - matrix_log_on_support(sigma, 2, zero).entries
    return DivergenceValue(np.real(np.trace(rho.entries @ L)) / rho.trace())


def max_relative_entropy(rho, sigma, zero=DEFAULT_ZERO):
    """ log2 of the largest eigenvalue of sigma^-1/2 rho sigma^-1/2 on supp sigma """
    rho, sigma = _pair(rho, sigma, zero)
    infinite = _support_case(rho, sigma, 2.0, zero)
    if infinite is not None:
        return infinite
    M = rho.conjugate_by(matrix_power_on_support(sigma, -0.5, zero).entries)
    return DivergenceValue(math.log2(max(M.eigenvalues[0], np.finfo(float).tiny)))


def relative_min_entropy(rho, sigma, zero=DEFAULT_ZERO):
    """ -log2 tr[P_rho sigma], a standalone helper """
    rho, sigma = _pair(rho, sigma, zero)
    t = np.real(np.trace(support(rho, zero).projector.entries @ sigma.entries))
    if t <= 0:
        return INF_ORTHOGONAL
    return DivergenceValue(-math.log2(t))


def collision_divergence(rho, sigma, zero=DEFAULT_ZERO):
    """ log2 tr[rho sigma^-1/2 rho sigma^-1/2] / tr rho """
    rho, sigma = _pair(rho, sigma, zero)
    infinite = _support_case(rho, sigma, 2.0, zero)
    if infinite is not None:
        return infinite
    S = matrix_power_on_support(sigma, -0.5, zero).entries
    A = rho.entries @ S
    return DivergenceValue(math.log2(np.real(np.trace(A @ A)) / rho.trace()))


def fidelity(rho, sigma, zero=DEFAULT_ZERO):
    """ trace norm of sqrt(rho) sqrt(sigma) """
    rho, sigma = as_operator(rho), as_operator(sigma)
    A = matrix_power_on_support(rho, 0.5, zero).entries @ matrix_power_on_support(sigma, 0.5, zero).entries
    return float(np.sum(np.linalg.svd(A, compute_uv=False)))


def renyi_entropy(rho, alpha, zero=DEFAULT_ZERO):
    if alpha == math.inf:
        return min_entropy(rho, zero)
    a = as_order(alpha).alpha
    rho = as_density(rho, zero)
    return (log_trace_power(rho, a, zero) - math.log(rho.trace())) / ((1.0 - a) * LN2)


def min_entropy(rho, zero=DEFAULT_ZERO):
    rho = as_density(rho, zero)
    return -math.log2(rho.eigenvalues[0])


def von_neumann_entropy(rho, zero=DEFAULT_ZERO):
    """ -tr[rho log2 rho] / tr rho """
    rho = as_density(rho, zero)
    lam, V, keep = psd_spectrum(rho, zero)
    x = lam[keep]
    return float(-np.sum(x * np.log2(x)) / rho.trace())


#============================================================
# auxiliary quantity

def _sqrt_rho(rho, zero):
    rho = as_density(rho, zero)
    require_normalized(rho, what='rho')
    return rho, matrix_power_on_support(rho, 0.5, zero)


def auxiliary_divergence(rho, sigma, tau, alpha, zero=DEFAULT_ZERO):
    """
    a/(a-1) log tr(rho^1/2 sigma^s rho^1/2 tau^-s),  s = (1-a)/a, rho normalized.
    +inf for a > 1 when sigma misses rho^1/2 tau^-s rho^1/2, -inf for a < 1
    when tau misses rho^1/2 sigma^s rho^1/2.
    """
    a = as_order(alpha).alpha
    rho, R = _sqrt_rho(rho, zero)
    sigma, tau = as_operator(sigma), as_operator(tau)
    s = (1.0 - a) / a
    A = matrix_power_on_support(sigma, s, zero).conjugate_by(R.entries)
    T = matrix_power_on_support(tau, -s, zero)
    if a > 1 and not dominates(sigma, T.conjugate_by(R.entries), zero):
        return INF_NOT_DOMINATING
    if a < 1 and not dominates(tau, A, zero):
        return DivergenceValue(-math.inf, Reason.tau_not_dominating)
    t = float(np.real(np.trace(A.entries @ T.entries)))
    if t <= 0:
        return DivergenceValue(-math.inf if a > 1 else math.inf, Reason.orthogonal_states)
    return DivergenceValue(a / (a - 1.0) * math.log2(t))


def optimal_tau(rho, sigma, alpha, zero=DEFAULT_ZERO):
    """ the tau maximizing the auxiliary quantity: (rho^1/2 sigma^s rho^1/2)^a normalized """
    a = as_order(alpha).alpha
    rho, R = _sqrt_rho(rho, zero)
    A = matrix_power_on_support(as_operator(sigma), (1.0 - a) / a, zero).conjugate_by(R.entries)
    lam, V, keep = psd_spectrum(A, zero)
    if not np.any(keep):
        raise ComputationError("no maximizing tau: rho and sigma are orthogonal")
    w = np.zeros(lam.shape)
    w[keep] = np.exp(a * np.log(lam[keep]) - logsumexp(a * np.log(lam[keep])))
    return as_density((V * w) @ V.conj().T, zero)


#============================================================
# alpha derivative

def _restricted(X, Y, zero):
    X, Y = as_operator(X), as_operator(Y)
    psd_spectrum(X, zero)
    if not dominates(Y, X, zero):
        raise ValidationError("Y must dominate X for the alpha derivative")
    B = support(Y, zero).basis.conj().T
    return X.conjugate_by(B), Y.conjugate_by(B)


def _z_alpha(X, Y, alpha, zero):
    if not alpha > 0:
        raise ValidationError("order must be a positive real: alpha={}".format(alpha))
    return X.conjugate_by(matrix_power_on_support(Y, (1.0 - alpha) / (2.0 * alpha), zero).entries)


def trace_power_alpha(X, Y, alpha, zero=DEFAULT_ZERO):
    """ tr Z^alpha with Z = Y^g X Y^g, on supp Y """
    Xc, Yc = _restricted(X, Y, zero)
    return math.exp(log_trace_power(_z_alpha(Xc, Yc, alpha, zero), alpha, zero))


def divergence_alpha_derivative(X, Y, alpha, zero=DEFAULT_ZERO):
    """ d/da tr Z^a = tr[Z^a ln Z] - (1/a) tr[Z^a ln Y], natural logs """
    alpha = float(alpha)
    Xc, Yc = _restricted(X, Y, zero)
    Z = _z_alpha(Xc, Yc, alpha, zero)
    lam, W, keep = psd_spectrum(Z, zero)
    x = lam[keep]
    Wk = W[:, keep]
    Za = (Wk * x ** alpha) @ Wk.conj().T
    first = float(np.sum(x ** alpha * np.log(x)))
    second = float(np.real(np.trace(Za @ matrix_log_on_support(Yc, 'e', zero).entries)))
    return first - second / alpha


def finite_difference_derivative(X, Y, alpha, h=1e-5, zero=DEFAULT_ZERO):
    return (trace_power_alpha(X, Y, alpha + h, zero) - trace_power_alpha(X, Y, alpha - h, zero)) / (2.0 * h)


#============================================================
# regularization and limits

RegularizedLimit = namedtuple('RegularizedLimit', ['xis', 'values', 'target', 'converged', 'diverging'])


def regularized_divergence(rho, sigma, alpha, xi, zero=DEFAULT_ZERO):
    """ sandwiched divergence against sigma + xi id, always finite for xi > 0 """
    if not xi > 0:
        raise ValidationError("regularization must be positive: xi={}".format(xi))
    sigma = as_operator(sigma)
    return sandwiched_divergence(rho, sigma + xi * np.eye(sigma.dim), alpha, zero).value


def limit_extrapolation(rho, sigma, alpha, xis=REGULARIZATION_XIS, tol=1e-4, zero=DEFAULT_ZERO):
    values = [regularized_divergence(rho, sigma, alpha, xi, zero) for xi in xis]
    target = sandwiched_divergence(rho, sigma, alpha, zero)
    converged = target.is_finite and abs(values[-1] - target.value) <= tol
    diverging = (not target.is_finite) and all(b > a for a, b in zip(values, values[1:]))
    logger.debug("limit_extrapolation alpha=%s values=%s target=%s" % (alpha, values, target))
    return RegularizedLimit(tuple(xis), tuple(values), target, converged, diverging)


def _gap(a, b):
    if a == b:
        return 0.0
    return abs(a - b)


@dataclass
class LimitReport:
    relative_entropy: float
    below: float
    above: float
    max_relative_entropy: float
    large_order: float
    gap_one: float
    gap_max: float
    passed: bool


def limit_checks(rho, sigma, zero=DEFAULT_ZERO):
    """ orders 1 -/+ 1e-3 against the relative entropy, order 200 against D_max """
    D = relative_entropy(rho, sigma, zero).value
    below = sandwiched_divergence(rho, sigma, 1 - 1e-3, zero).value
    above = sandwiched_divergence(rho, sigma, 1 + 1e-3, zero).value
    Dmax = max_relative_entropy(rho, sigma, zero).value
    large = sandwiched_divergence(rho, sigma, 200, zero).value
    gap_one = max(_gap(below, D), _gap(above, D))
    gap_max = _gap(large, Dmax)
    passed = gap_one <= 5e-3 * (1 + abs(D)) if math.isfinite(D) else math.isinf(above)
    passed = passed and gap_max <= 1e-2
    return LimitReport(D, below, above, Dmax, large, gap_one, gap_max, passed)


#============================================================
# classical registers

def classical_register_divergence(p, q, rho_blocks, sigma_blocks, alpha, zero=DEFAULT_ZERO):
    """
    divergence of (+)_y p_y rho^y against (+)_y q_y sigma^y from the block
    divergences: 1/(a-1) log sum_y p_y^a q_y^(1-a) 2^((a-1) D~a(rho^y||sigma^y)).
    """
    a = as_order(alpha).alpha
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if not (len(p) == len(q) == len(rho_blocks) == len(sigma_blocks)):
        raise ValidationError("need one weight pair per block")
    terms = []
    for py, qy, r, s in zip(p, q, rho_blocks, sigma_blocks):
        if py <= 0:
            continue
        if qy <= 0:
            if a > 1:
                return INF_NOT_DOMINATING
            continue
        d = sandwiched_divergence(r, s, a, zero)
        if not d.is_finite:
            if a > 1:
                return d
            continue
        terms.append(a * math.log(py) + (1 - a) * math.log(qy) + (a - 1) * LN2 * d.value)
    if not terms:
        return INF_ORTHOGONAL
    return DivergenceValue(logsumexp(terms) / ((a - 1.0) * LN2))
