#!/usr/bin/env python3
#
# This file is part of sandwich.
#
# sw_conditional.py : conditional Renyi entropies, computed by optimizing the
#                     conditioning state, with the closed forms for classical
#                     conditioning, chain rule, duality, minimax and uncertainty
#                     relation checks built on top.
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
  H~a(A|B) = sup over states sigma_B of  -D~a(rho_AB || id_A (x) sigma_B)

The search for sigma_B is restricted to the support of rho_B: any sigma_B is
no better than its compression onto that support (data processing under the
map that projects B onto supp rho_B and sends the rest to a fixed state of
the support), so the problem is solved on A (x) supp rho_B where rho_B is full
rank and the objective is finite everywhere in the interior.

Three methods:

  mirror_descent  sigma <- exp(log sigma - eta G) / tr, G a central difference
                  gradient on an orthonormal Hermitian basis, eta by
                  backtracking (grown after each accepted step).
  fixed_point     damped iteration of the stationarity condition
                  sigma ~ (tr_A[rho^1/2 (rho^1/2 (id (x) sigma)^s rho^1/2)^(a-1) rho^1/2])^(a/(2a-1)),
                  accepted only when the objective decreases, a mirror descent
                  step otherwise.  Not available at a = 1/2.
  grid_oracle     Bloch ball search, qubit conditioning systems only.
"""

import logging
import math

from collections import namedtuple
from dataclasses import dataclass
from enum import Enum

import numpy as np

from scipy.special import logsumexp

from sandwich.sw_bloch import BlochOracle, bloch_state
from sandwich.sw_divergence import as_order, renyi_entropy, sandwich_log_trace, von_neumann_entropy
from sandwich.sw_linalg import DEFAULT_ZERO, log_trace_power_values, matrix_power_on_support, partial_trace, \
    psd_spectrum, subsystem_indices, support
from sandwich.sw_states import DensityOperator, MultipartiteState, as_state, measure, require_normalized
from sandwich.sw_util import LN2, ComputationError, ValidationError

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-5
MAX_ITERATIONS = 500
GRADIENT_STEP = 1e-6
ETA_MIN = 1e-12
ARMIJO = 0.25
STATE_TOL = 1e-8
MIN_ENTROPY_ORDER = 200


class Method(Enum):
    mirror_descent = 'mirror_descent'
    fixed_point = 'fixed_point'
    grid_oracle = 'grid_oracle'


@dataclass(frozen=True)
class ConditionalEntropyResult:
    value: float
    optimizer_state: DensityOperator
    method: Method
    iterations: int
    residual: float

    def __post_init__(self):
        if abs(self.optimizer_state.trace() - 1.0) > STATE_TOL:
            raise ComputationError("optimizer state is not normalized: trace={:.12g}".format(
                self.optimizer_state.trace()))


def duality_pair(alpha):
    """ the beta with 1/alpha + 1/beta = 2 """
    a = float(alpha)
    if not a > 0.5 or a == 1.0 or math.isinf(a):
        raise ValidationError("duality needs alpha in (1/2,1) or (1,inf): alpha={}".format(alpha))
    return a / (2.0 * a - 1.0)


def _core_order(alpha):
    order = as_order(alpha)
    if not order.core:
        raise ValidationError("order outside [1/2,1) u (1,inf): alpha={}".format(order.alpha))
    return order.alpha


#============================================================
# the optimization problem

def _hermitian_basis(k):
    basis = []
    for i in range(k):
        E = np.zeros((k, k), dtype=complex)
        E[i, i] = 1.0
        basis.append(E)
    for i in range(k):
        for j in range(i + 1, k):
            E = np.zeros((k, k), dtype=complex)
            E[i, j] = E[j, i] = 1.0 / math.sqrt(2.0)
            basis.append(E)
            E = np.zeros((k, k), dtype=complex)
            E[i, j] = 1j / math.sqrt(2.0)
            E[j, i] = -1j / math.sqrt(2.0)
            basis.append(E)
    return basis


def _eigh(S):
    w, U = np.linalg.eigh((S + S.conj().T) / 2)
    return w, U


def _power(S, p):
    w, U = _eigh(S)
    return (U * np.clip(w, 1e-300, None) ** p) @ U.conj().T


def _logm(S):
    w, U = _eigh(S)
    return (U * np.log(np.clip(w, 1e-300, None))) @ U.conj().T


def _expm_normalized(H):
    w, U = _eigh(H)
    e = np.exp(w - w.max())
    return (U * (e / e.sum())) @ U.conj().T


class ConditioningProblem:
    """
    rho_AB with the conditioning subsystems moved last and B compressed to the
    support of rho_B.  value(S) is the objective in bits for a k x k state S
    on supp rho_B: D~a(rho || id (x) S), or the Petz or max divergence.
    """

    def __init__(self, state, alpha, conditioning=None, zero=DEFAULT_ZERO, kind='sandwiched'):
        state = as_state(state)
        if abs(state.trace() - 1.0) > STATE_TOL:
            raise ValidationError("state is not normalized: trace={:.12g}".format(state.trace()))
        n = len(state.dims)
        if conditioning is None:
            conditioning = [n - 1] if n > 1 else []
        conditioning = subsystem_indices(conditioning, n) if conditioning else []
        rest = [i for i in range(n) if i not in conditioning]
        if not rest:
            raise ValidationError("nothing left to condition: conditioning={}".format(conditioning))
        if rest + conditioning != list(range(n)):
            state = state.permute(rest + conditioning)
        self.dA = int(np.prod([state.dims[i] for i in range(len(rest))]))
        self.dB = state.dim // self.dA
        self.alpha = float(alpha)
        self.zero = zero
        self.kind = kind
        self.full = state.op.entries

        rho_B = partial_trace(state.op, [self.dA, self.dB], [0])
        self.V = support(rho_B, zero).basis
        self.k = self.V.shape[1]
        W = np.kron(np.eye(self.dA), self.V)
        self.rho = W.conj().T @ self.full @ W
        self.rho = (self.rho + self.rho.conj().T) / 2
        self.rho_B = self.V.conj().T @ rho_B.entries @ self.V
        self._basis = _hermitian_basis(self.k)
        if kind == 'petz':
            self._rho_alpha = matrix_power_on_support(self.rho, self.alpha, zero).entries
        self._rho_sqrt = None
        self.evaluations = 0

    def initial(self):
        S = (self.rho_B + self.rho_B.conj().T) / 2
        return S / np.real(np.trace(S))

    def lift(self, X):
        return np.kron(np.eye(self.dA), X)

    def value(self, S):
        self.evaluations += 1
        a = self.alpha
        if self.kind == 'sandwiched':
            ltr = sandwich_log_trace(self.rho, self.lift(_power(S, (1.0 - a) / (2.0 * a))), a, self.zero)
            return ltr / ((a - 1.0) * LN2)
        if self.kind == 'petz':
            Q = np.real(np.trace(self._rho_alpha @ self.lift(_power(S, 1.0 - a))))
            return math.log(Q) / ((a - 1.0) * LN2)
        if self.kind == 'max':
            G = self.lift(_power(S, -0.5))
            return math.log2(np.linalg.eigvalsh(G @ self.rho @ G)[-1])
        raise ValidationError("unknown objective: {}".format(self.kind))

    def gradient(self, S):
        w = np.linalg.eigvalsh(S)
        h = min(GRADIENT_STEP, 0.5 * float(w[0]))
        G = np.zeros_like(S)
        for B in self._basis:
            G += (self.value(S + h * B) - self.value(S - h * B)) / (2.0 * h) * B
        return G

    def expand(self, S):
        sigma = self.V @ S @ self.V.conj().T
        sigma = (sigma + sigma.conj().T) / 2
        return DensityOperator(sigma / np.real(np.trace(sigma)), check=False)

    def compress(self, sigma):
        S = self.V.conj().T @ np.asarray(sigma.entries if hasattr(sigma, 'entries') else sigma) @ self.V
        S = (S + S.conj().T) / 2
        w = np.linalg.eigvalsh(S)
        if w[0] <= 1e-14:
            S = S + (1e-14 - w[0]) * np.eye(self.k)
        return S / np.real(np.trace(S))

    def sqrt_rho(self):
        if self._rho_sqrt is None:
            self._rho_sqrt = matrix_power_on_support(self.rho, 0.5, self.zero).entries
        return self._rho_sqrt


def _stationarity(S, G):
    R = G - np.real(np.trace(S @ G)) * np.eye(S.shape[0])
    r = _power(S, 0.5)
    return float(np.linalg.norm(r @ R @ r))


def _md_step(problem, S, f, eta):
    """ one backtracking mirror descent step: (S, f, eta, residual, accepted) """
    G = problem.gradient(S)
    residual = _stationarity(S, G)
    L = _logm(S)
    while eta > ETA_MIN:
        T = _expm_normalized(L - eta * G)
        fT = problem.value(T)
        predicted = float(np.real(np.trace(G @ (S - T))))
        if fT < f and fT <= f - ARMIJO * max(predicted, 0.0):
            return T, fT, min(2.0 * eta, 1e6), residual, True
        eta /= 2.0
    return S, f, eta, residual, False


def _mirror_descent(problem, S, tolerance, max_iterations):
    f = problem.value(S)
    eta = 1.0
    residual = math.inf
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        T, fT, eta, residual, accepted = _md_step(problem, S, f, eta)
        if not accepted:
            break
        decrement = f - fT
        S, f = T, fT
        logger.debug("mirror descent iteration=%d value=%.12g decrement=%.3e eta=%.3e" %
                     (iterations, f, decrement, eta))
        if decrement < tolerance / 10:
            residual = decrement
            break
    return S, f, iterations, residual


def _fixed_point(problem, S, tolerance, max_iterations):
    a = problem.alpha
    if a <= 0.5:
        logger.debug("fixed point unavailable at alpha=%s, using mirror descent" % a)
        return _mirror_descent(problem, S, tolerance, max_iterations)
    R = problem.sqrt_rho()
    theta = (2.0 * a - 1.0) / (a * a)
    f = problem.value(S)
    eta = 1.0
    residual = math.inf
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        A = R @ problem.lift(_power(S, (1.0 - a) / a)) @ R
        M = R @ matrix_power_on_support(A, a - 1.0, problem.zero).entries @ R
        MB = partial_trace(M, [problem.dA, problem.k], [0]).entries
        w = np.linalg.eigvalsh(MB)
        T = None
        if w[0] > 0:
            T = _expm_normalized((1.0 - theta) * _logm(S) + theta * (a / (2.0 * a - 1.0)) * _logm(MB))
            fT = problem.value(T)
        if T is None or not fT < f:
            T, fT, eta, residual, accepted = _md_step(problem, S, f, eta)
            if not accepted:
                break
        decrement = f - fT
        S, f = T, fT
        logger.debug("fixed point iteration=%d value=%.12g decrement=%.3e" % (iterations, f, decrement))
        if decrement < tolerance / 10:
            residual = decrement
            break
    return S, f, iterations, residual


def conditional_renyi(state, alpha, method=Method.mirror_descent, tolerance=DEFAULT_TOLERANCE,
                      conditioning=None, zero=DEFAULT_ZERO, max_iterations=MAX_ITERATIONS):
    """
    H~a(A|B) for a normalized state; conditioning lists the subsystems forming
    B (default the last one), the others form A.
    """
    a = _core_order(alpha)
    method = Method(method)
    problem = ConditioningProblem(state, a, conditioning, zero)

    if method is Method.grid_oracle:
        if problem.dB != 2:
            raise ValidationError("grid oracle needs a qubit conditioning system: dB={}".format(problem.dB))
        oracle = BlochOracle(problem.full, problem.dA, a, zero)
        value, r = oracle.best()
        return ConditionalEntropyResult(-value, DensityOperator(bloch_state(r), check=False), method,
                                        oracle.evaluations, 0.0)

    S = problem.initial()
    if problem.k == 1:
        f, iterations, residual = problem.value(S), 0, 0.0
    elif method is Method.fixed_point:
        S, f, iterations, residual = _fixed_point(problem, S, tolerance, max_iterations)
    else:
        S, f, iterations, residual = _mirror_descent(problem, S, tolerance, max_iterations)
    if not math.isfinite(f):
        raise ComputationError("conditional entropy objective is not finite: {}".format(f))
    logger.debug("conditional_renyi alpha=%s method=%s value=%.12g iterations=%d evaluations=%d" %
                 (a, method.value, -f, iterations, problem.evaluations))
    return ConditionalEntropyResult(-f, problem.expand(S), method, iterations, residual)


def conditional_min_entropy(state, tolerance=DEFAULT_TOLERANCE, conditioning=None, zero=DEFAULT_ZERO):
    """ sup over sigma of -D_max(rho_AB || id (x) sigma), warm started at order 200 """
    warm = conditional_renyi(state, MIN_ENTROPY_ORDER, tolerance=tolerance, conditioning=conditioning, zero=zero)
    problem = ConditioningProblem(state, MIN_ENTROPY_ORDER, conditioning, zero, kind='max')
    S0 = problem.compress(warm.optimizer_state)
    candidates = [(problem.value(S0), S0), (problem.value(problem.initial()), problem.initial())]
    if problem.k > 1:
        S, f, iterations, residual = _mirror_descent(problem, S0, tolerance, MAX_ITERATIONS)
        candidates.append((f, S))
    return -min(c[0] for c in candidates)


def conditional_max_entropy(state, tolerance=DEFAULT_TOLERANCE, conditioning=None, zero=DEFAULT_ZERO):
    return conditional_renyi(state, 0.5, tolerance=tolerance, conditioning=conditioning, zero=zero).value


def conditional_vn_entropy(state, conditioning=None, zero=DEFAULT_ZERO):
    """ H(A|B) = H(AB) - H(B) """
    problem = ConditioningProblem(state, 2.0, conditioning, zero)
    rho_B = partial_trace(problem.full, [problem.dA, problem.dB], [0])
    return von_neumann_entropy(problem.full, zero) - von_neumann_entropy(rho_B, zero)


def petz_conditional_renyi(state, alpha, conditioning=None, zero=DEFAULT_ZERO):
    """ closed form a/(1-a) log tr[(tr_A rho^a)^(1/a)] of the Petz conditional entropy """
    a = as_order(alpha).alpha
    problem = ConditioningProblem(state, a, conditioning, zero, kind='petz')
    X = partial_trace(problem._rho_alpha, [problem.dA, problem.k], [0])
    lam, V, keep = psd_spectrum(X, zero)
    return a / (1.0 - a) * log_trace_power_values(lam[keep], 1.0 / a) / LN2


#============================================================
# classical conditioning

def optimal_classical_weights(weights, entropies, alpha):
    a = float(alpha)
    p = np.asarray(weights, dtype=float)
    h = np.asarray(entropies, dtype=float)
    logs = np.where(p > 0, np.log(np.where(p > 0, p, 1.0)) + (1.0 - a) / a * LN2 * h, -np.inf)
    return np.exp(logs - logsumexp(logs))


def _classical_combine(weights, entropies, alpha):
    a = float(alpha)
    p = np.asarray(weights, dtype=float)
    h = np.asarray(entropies, dtype=float)
    live = p > 0
    lse = logsumexp(np.log(p[live]) + (1.0 - a) / a * LN2 * h[live])
    return a / (1.0 - a) * lse / LN2


def classical_conditional(weights, blocks, alpha, block_dims=None, tolerance=DEFAULT_TOLERANCE,
                          method=Method.mirror_descent, zero=DEFAULT_ZERO, max_iterations=MAX_ITERATIONS):
    """
    H~a(A|BY) of (+)_y p_y rho_AB^y from the block entropies:
    a/(1-a) log sum_y p_y 2^((1-a)/a H~a(A|B)_y).  Blocks without B (block_dims
    of length one) use the Renyi entropy of the block.
    """
    a = _core_order(alpha)
    p = np.asarray(weights, dtype=float)
    if len(p) != len(blocks):
        raise ValidationError("need one weight per block: {} weights, {} blocks".format(len(p), len(blocks)))
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-10:
        raise ValidationError("weights are not a probability distribution: {}".format(p.tolist()))
    entropies = []
    for py, block in zip(p, blocks):
        if py <= 0:
            entropies.append(0.0)
            continue
        block = DensityOperator(block) if not isinstance(block, DensityOperator) else block
        if block_dims is None or len(block_dims) == 1:
            require_normalized(block, what='block')
            entropies.append(renyi_entropy(block, a, zero))
        else:
            entropies.append(conditional_renyi(MultipartiteState(block, block_dims), a, method, tolerance,
                                               zero=zero, max_iterations=max_iterations).value)
    return _classical_combine(p, entropies, a)


def arimoto_conditional(p_y, p_x_given_y, alpha):
    """ classical a/(1-a) log sum_y p_y (sum_x p(x|y)^a)^(1/a) """
    a = as_order(alpha).alpha
    p = np.asarray(p_y, dtype=float)
    total = 0.0
    for py, px in zip(p, p_x_given_y):
        px = np.asarray(px, dtype=float)
        px = px[px > 0]
        total += py * np.sum(px ** a) ** (1.0 / a)
    return a / (1.0 - a) * math.log2(total)


#============================================================
# chain rule, duality, minimax, uncertainty

ChainRule = namedtuple('ChainRule', ['lhs', 'rhs', 'slack'])
Duality = namedtuple('Duality', ['h_ab', 'minus_h_ac', 'gap'])
Uncertainty = namedtuple('Uncertainty', ['lhs', 'c_printed', 'c_squared', 'bound_printed', 'bound_squared',
                                         'margin'])
Minimax = namedtuple('Minimax', ['value', 'sigma', 'tau', 'iterations'])


def _tripartite(state):
    state = as_state(state)
    if len(state.dims) != 3:
        raise ValidationError("need a tripartite state: dims={}".format(list(state.dims)))
    return state


def chain_rule_check(state, alpha, tolerance=DEFAULT_TOLERANCE, method=Method.mirror_descent, zero=DEFAULT_ZERO):
    """ H~a(A|BC) against H~a(AC|B) - log2 rank(rho_C) """
    state = _tripartite(state)
    lhs = conditional_renyi(state, alpha, method, tolerance, conditioning=[1, 2], zero=zero).value
    rank_C = support(state.marginal([2]).op, zero).rank
    rhs = conditional_renyi(state, alpha, method, tolerance, conditioning=[1], zero=zero).value - math.log2(rank_C)
    return ChainRule(lhs, rhs, lhs - rhs)


def _require_pure(state, zero):
    if not state.is_pure(zero):
        raise ValidationError("state is not pure: rank={}".format(state.rank(zero)))
    require_normalized(state.op)


def duality_check(state, alpha, tolerance=DEFAULT_TOLERANCE, method=Method.mirror_descent, zero=DEFAULT_ZERO):
    """ H~a(A|B) and -H~b(A|C) for a pure tripartite state, 1/a + 1/b = 2 """
    state = _tripartite(state)
    _require_pure(state, zero)
    beta = duality_pair(alpha)
    h_ab = conditional_renyi(state.marginal([0, 1]), alpha, method, tolerance, zero=zero).value
    h_ac = conditional_renyi(state.marginal([0, 2]), beta, method, tolerance, zero=zero).value
    return Duality(h_ab, -h_ac, abs(h_ab + h_ac))


def minimax_objective(state, sigma_B, tau_C, alpha, zero=DEFAULT_ZERO):
    """ a/(1-a) log <phi| id_A (x) sigma^(1/a - 1) (x) tau^(1 - 1/a) |phi> """
    a = as_order(alpha).alpha
    state = _tripartite(state)
    dA, dB, dC = state.dims
    O = np.kron(np.kron(np.eye(dA), matrix_power_on_support(sigma_B, 1.0 / a - 1.0, zero).entries),
                matrix_power_on_support(tau_C, 1.0 - 1.0 / a, zero).entries)
    t = float(np.real(np.trace(state.op.entries @ O)))
    if t <= 0:
        return -math.inf if a < 1 else math.inf
    return a / (1.0 - a) * math.log2(t)


def _normalized_power(X, p, zero):
    lam, V, keep = psd_spectrum(X, zero)
    if not np.any(keep):
        raise ComputationError("best response of a zero operator")
    w = np.zeros(lam.shape)
    w[keep] = np.exp(p * np.log(lam[keep]) - logsumexp(p * np.log(lam[keep])))
    return (V * w) @ V.conj().T


def minimax_alternating(state, alpha, tolerance=DEFAULT_TOLERANCE, max_iterations=MAX_ITERATIONS,
                        zero=DEFAULT_ZERO):
    """
    alternate best responses from maximally mixed starts: tau_C ~ K_C^a for the
    current sigma_B, then a damped update sigma_B ~ L_B^(a/(2a-1)).  The value
    reported is the objective at the best sigma with its best tau.
    """
    a = _core_order(alpha)
    if a == 0.5:
        raise ValidationError("alternating minimax needs alpha > 1/2")
    state = _tripartite(state)
    _require_pure(state, zero)
    dA, dB, dC = state.dims
    rho = state.op.entries
    theta = (2.0 * a - 1.0) / (a * a)

    def respond_tau(sigma):
        h = np.kron(np.kron(np.eye(dA), matrix_power_on_support(sigma, (1.0 - a) / (2.0 * a), zero).entries),
                    np.eye(dC))
        K = partial_trace(h @ rho @ h, [dA, dB, dC], [0, 1])
        return _normalized_power(K, a, zero)

    def respond_sigma(tau):
        h = np.kron(np.eye(dA * dB), matrix_power_on_support(tau, (a - 1.0) / (2.0 * a), zero).entries)
        L = partial_trace(h @ rho @ h, [dA, dB, dC], [0, 2])
        return _normalized_power(L, a / (2.0 * a - 1.0), zero)

    sigma = np.eye(dB) / dB
    tau = respond_tau(sigma)
    best = (minimax_objective(state, sigma, tau, a, zero), sigma, tau)
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        target = respond_sigma(tau)
        sigma = _expm_normalized((1.0 - theta) * _logm(sigma) + theta * _logm(target + 1e-300 * np.eye(dB)))
        tau = respond_tau(sigma)
        value = minimax_objective(state, sigma, tau, a, zero)
        improvement = value - best[0]
        if improvement > 0:
            best = (value, sigma, tau)
        logger.debug("minimax iteration=%d value=%.12g" % (iterations, value))
        if abs(improvement) < tolerance / 10:
            break
    return Minimax(best[0], DensityOperator(best[1], check=False), DensityOperator(best[2], check=False),
                   iterations)


def overlap_constant(M, N):
    """ max over outcomes of the operator norm of sqrt(M_x) sqrt(N_y) """
    c = 0.0
    for Mx in M.elements:
        a = matrix_power_on_support(Mx, 0.5).entries
        for Ny in N.elements:
            b = matrix_power_on_support(Ny, 0.5).entries
            c = max(c, float(np.linalg.norm(a @ b, 2)))
    return c


def uncertainty_check(state, M, N, alpha, tolerance=DEFAULT_TOLERANCE, method=Method.mirror_descent,
                      zero=DEFAULT_ZERO):
    """
    H~a(X|B) + H~b(Y|C) against log2(1/c) where X, Y are the outcomes of M, N
    on A.  Both the printed constant c and its square are reported; the
    margin uses the squared one.
    """
    state = _tripartite(state)
    require_normalized(state.op)
    beta = duality_pair(alpha)
    h_xb = conditional_renyi(measure(state, M, 0, keep=[1]), alpha, method, tolerance, zero=zero).value
    h_yc = conditional_renyi(measure(state, N, 0, keep=[2]), beta, method, tolerance, zero=zero).value
    c = overlap_constant(M, N)
    lhs = h_xb + h_yc
    bound_printed = -math.log2(c)
    bound_squared = -2.0 * math.log2(c)
    return Uncertainty(lhs, c, c * c, bound_printed, bound_squared, lhs - bound_squared)
