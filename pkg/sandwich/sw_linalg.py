#!/usr/bin/env python3
#
# This file is part of sandwich.
#
# sw_linalg.py : dense Hermitian operators, generalized matrix functions on the
#                support, Schatten (quasi-)norms and tensor structure helpers.
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
Every function here accepts a HermitianOperator or anything numpy can turn
into a square complex matrix, and returns HermitianOperator values.

Matrix functions follow the support convention: f is applied to the
eigenvalues classified as nonzero, and the zero eigenvalues stay zero,
whatever f does at 0 (negative powers and logarithms included).
An eigenvalue is zero when it does not exceed max(eps_abs, eps_rel * lambda_max).

Composite indices put the first subsystem major: index = a * dB + b.
"""

import logging
import math
import threading

from collections import namedtuple
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from scipy.optimize import minimize
from scipy.special import logsumexp, softmax

from sandwich.sw_util import ValidationError, ComputationError

logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
DEGENERACY_TOL = 1e-9
DOMINANCE_TOL = 1e-9

SUBSYSTEM_NAMES = 'ABCDEFGH'

Spectrum = namedtuple('Spectrum', ['eigenvalues', 'eigenvectors'])

_spectrum_lock = threading.Lock()


@dataclass(frozen=True)
class ZeroThreshold:
    eps_abs: float = 1e-12
    eps_rel: float = 1e-10

    def cutoff(self, scale):
        return max(self.eps_abs, self.eps_rel * max(scale, 0.0))


DEFAULT_ZERO = ZeroThreshold()


@dataclass(frozen=True)
class SupportInfo:
    rank: int
    projector: 'HermitianOperator'
    zero_threshold: float
    basis: np.ndarray = field(repr=False, compare=False, default=None)


class HermitianOperator:
    """
    dense d x d Hermitian matrix, read-only once built.
    the spectrum is computed on first use and then kept.
    """

    def __init__(self, entries, check=True):
        if isinstance(entries, HermitianOperator):
            entries, check = entries.entries, False
        a = np.array(entries, dtype=complex)
        if a.ndim == 0:
            a = a.reshape(1, 1)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise ValidationError("operator is not a square matrix: shape={}".format(a.shape))
        if not np.all(np.isfinite(a)):
            raise ValidationError("operator has non finite entries")
        if check:
            check_hermitian(a)
        a = (a + a.conj().T) / 2
        a.setflags(write=False)
        self._entries = a
        self._spectrum = None

    @classmethod
    def identity(cls, dim):
        return cls(np.eye(dim), check=False)

    @classmethod
    def diagonal(cls, values):
        return cls(np.diag(np.asarray(values, dtype=complex)), check=False)

    @classmethod
    def projector(cls, vector):
        v = np.asarray(vector, dtype=complex).reshape(-1)
        return cls(np.outer(v, v.conj()), check=False)

    @property
    def dim(self):
        return self._entries.shape[0]

    @property
    def entries(self):
        return self._entries

    @property
    def spectrum(self):
        if self._spectrum is None:
            with _spectrum_lock:
                if self._spectrum is None:
                    self._spectrum = eigendecompose(self._entries)
        return self._spectrum

    @property
    def eigenvalues(self):
        return self.spectrum.eigenvalues

    @property
    def eigenvectors(self):
        return self.spectrum.eigenvectors

    def trace(self):
        return float(np.real(np.trace(self._entries)))

    def conjugate_by(self, K):
        """ K A K^dagger, K may be rectangular. """
        K = np.asarray(K, dtype=complex)
        if K.ndim != 2 or K.shape[1] != self.dim:
            raise ValidationError("dimension mismatch: {} applied to dim={}".format(K.shape, self.dim))
        return HermitianOperator(K @ self._entries @ K.conj().T, check=False)

    def allclose(self, other, atol=1e-10):
        other = as_operator(other)
        return self.dim == other.dim and np.allclose(self._entries, other.entries, rtol=0, atol=atol)

    def __add__(self, other):
        return HermitianOperator(self._entries + as_operator(other).entries, check=False)

    def __sub__(self, other):
        return HermitianOperator(self._entries - as_operator(other).entries, check=False)

    def __mul__(self, scalar):
        if not np.isrealobj(scalar):
            raise ValidationError("Hermitian operators scale by real numbers only: {}".format(scalar))
        return HermitianOperator(self._entries * float(scalar), check=False)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __getstate__(self):
        return {'_entries': np.array(self._entries), '_spectrum': None}

    def __setstate__(self, state):
        a = state['_entries']
        a.setflags(write=False)
        self._entries = a
        self._spectrum = None

    def __repr__(self):
        return "{}(dim={})".format(type(self).__name__, self.dim)


def as_operator(A):
    if isinstance(A, HermitianOperator):
        return A
    return HermitianOperator(A)


def check_hermitian(a, tol=HERMITIAN_TOL):
    scale = np.max(np.abs(a)) if a.size else 0.0
    diff = np.abs(a - a.conj().T)
    worst = np.unravel_index(np.argmax(diff), diff.shape)
    if diff[worst] > tol * scale:
        i, j = int(worst[0]), int(worst[1])
        raise ValidationError("operator is not Hermitian: entries ({},{}) and ({},{}) differ by {:.3e}".format(
            i, j, j, i, diff[worst]))


def eigendecompose(A):
    """ eigenvalues in descending order with orthonormal eigenvectors as columns.
    """
    a = A.entries if isinstance(A, HermitianOperator) else np.asarray(A, dtype=complex)
    if not isinstance(A, HermitianOperator):
        check_hermitian(a)
    try:
        lam, V = np.linalg.eigh(a)
    except np.linalg.LinAlgError as ex:
        raise ComputationError("eigendecomposition failed: {}".format(ex))
    order = np.argsort(lam)[::-1]
    lam = lam[order]
    V = V[:, order]
    lam.setflags(write=False)
    V.setflags(write=False)
    return Spectrum(lam, V)


def psd_spectrum(A, zero=DEFAULT_ZERO):
    """ spectrum of a positive semi-definite operator with the support mask.
        small negative eigenvalues (rounding) are clipped to zero.
    """
    A = as_operator(A)
    lam, V = A.spectrum
    scale = float(np.max(np.abs(lam)))
    if lam[-1] < -max(PSD_TOL * scale, zero.eps_abs):
        raise ValidationError("operator is not positive semi-definite: min eigenvalue={:.3e}".format(lam[-1]))
    lam = np.clip(lam, 0.0, None)
    keep = lam > zero.cutoff(lam[0])
    return lam, V, keep


def is_psd(A, zero=DEFAULT_ZERO):
    try:
        psd_spectrum(A, zero)
    except ValidationError:
        return False
    return True


def matrix_function_on_support(A, f, zero=DEFAULT_ZERO):
    lam, V, keep = psd_spectrum(A, zero)
    values = np.zeros(lam.shape)
    values[keep] = f(lam[keep])
    if not np.all(np.isfinite(values)):
        raise ComputationError("matrix function produced non finite eigenvalues")
    return HermitianOperator((V * values) @ V.conj().T, check=False)


def matrix_power_on_support(A, p, zero=DEFAULT_ZERO):
    return matrix_function_on_support(A, lambda x: x ** p, zero)


def matrix_log_on_support(A, base=2, zero=DEFAULT_ZERO):
    if base in (2, '2'):
        return matrix_function_on_support(A, np.log2, zero)
    if base in ('e', math.e):
        return matrix_function_on_support(A, np.log, zero)
    raise ValidationError("invalid log base: base={}".format(base))


def support(A, zero=DEFAULT_ZERO):
    lam, V, keep = psd_spectrum(A, zero)
    basis = V[:, keep]
    return SupportInfo(rank=int(np.count_nonzero(keep)),
                       projector=HermitianOperator(basis @ basis.conj().T, check=False),
                       zero_threshold=zero.cutoff(lam[0]),
                       basis=basis)


def overlap(rho, sigma, zero=DEFAULT_ZERO):
    """ tr[P_rho P_sigma] of the support projectors """
    P = support(rho, zero).projector.entries
    Q = support(sigma, zero).projector.entries
    return float(np.real(np.trace(P @ Q)))


def dominates(sigma, rho, zero=DEFAULT_ZERO):
    """ True when the kernel of sigma is contained in the kernel of rho """
    s = support(rho, zero)
    return s.rank - overlap(rho, sigma, zero) <= DOMINANCE_TOL


def schatten_norm(A, p, zero=DEFAULT_ZERO):
    """ (sum of lambda^p over the support)^(1/p); p = inf gives the largest eigenvalue.
    """
    if p == 0 or (isinstance(p, float) and math.isnan(p)):
        raise ValidationError("invalid schatten exponent: p={}".format(p))
    lam, V, keep = psd_spectrum(A, zero)
    s = lam[keep]
    if s.size == 0:
        if p > 0:
            return 0.0
        raise ValidationError("zero operator: schatten norm undefined for p={}".format(p))
    if math.isinf(p):
        return float(s.max()) if p > 0 else float(s.min())
    return float(np.exp(logsumexp(p * np.log(s)) / p))


def log_trace_power(A, p, zero=DEFAULT_ZERO):
    """ natural log of tr A^p over the support, -inf for the zero operator. """
    lam, V, keep = psd_spectrum(A, zero)
    return log_trace_power_values(lam[keep], p)


def log_trace_power_values(values, p):
    if values.size == 0:
        return -math.inf
    return float(logsumexp(p * np.log(values)))


def variational_norm_check(X, p, zero=DEFAULT_ZERO):
    """
    compare the Schatten p-norm of X with its variational form: the sup (p > 1)
    or inf (p < 1) of tr[X Z^(1-1/p)] over states Z.  Z is searched among the
    states diagonal in the eigenbasis of X and supported on supp X, written as
    a softmax of free parameters.
    """
    if not (0 < p < 1 or 1 < p < math.inf):
        raise ValidationError("variational form needs p in (0,1) or (1,inf): p={}".format(p))
    direct = schatten_norm(X, p, zero)
    lam, V, keep = psd_spectrum(X, zero)
    x = lam[keep]
    if x.size == 0:
        return direct, 0.0

    r = 1.0 - 1.0 / p
    sign = -1.0 if p > 1 else 1.0

    def objective(theta):
        z = softmax(theta)
        g = x * r * z ** (r - 1.0)
        value = x @ z ** r
        return sign * value, sign * z * (g - z @ g)

    res = minimize(objective, np.zeros(x.size), jac=True, method='BFGS',
                   options={'gtol': 1e-12, 'maxiter': 5000})
    variational = float(x @ softmax(res.x) ** r)
    logger.debug("variational_norm_check p=%s direct=%.12g variational=%.12g nit=%d" %
                 (p, direct, variational, res.nit))
    return direct, variational


def tensor_product(*ops):
    out = np.ones((1, 1), dtype=complex)
    for A in ops:
        out = np.kron(out, as_operator(A).entries)
    return HermitianOperator(out, check=False)


def check_dims(dims, dim):
    dims = [int(d) for d in dims]
    if any(d < 1 for d in dims) or int(np.prod(dims)) != dim:
        raise ValidationError("subsystem dims {} do not match operator dim={}".format(dims, dim))
    return dims


def subsystem_indices(subsystems, count):
    if isinstance(subsystems, (int, np.integer, str)):
        subsystems = [subsystems]
    out = []
    for s in subsystems:
        if isinstance(s, str):
            if len(s) != 1 or s.upper() not in SUBSYSTEM_NAMES[:count]:
                raise ValidationError("unknown subsystem: {}".format(s))
            s = SUBSYSTEM_NAMES.index(s.upper())
        s = int(s)
        if not 0 <= s < count:
            raise ValidationError("unknown subsystem: {} (have {})".format(s, count))
        if s not in out:
            out.append(s)
    return out


def partial_trace(A, dims, traced):
    """ trace out the subsystems listed in traced (indices or letters). """
    A = as_operator(A)
    dims = check_dims(dims, A.dim)
    traced = subsystem_indices(traced, len(dims))
    t = A.entries.reshape(dims + dims)
    for k in sorted(traced, reverse=True):
        m = t.ndim // 2
        t = np.trace(t, axis1=k, axis2=k + m)
    kept = int(np.prod([d for i, d in enumerate(dims) if i not in traced]))
    return HermitianOperator(np.asarray(t).reshape(kept, kept), check=False)


def permute_subsystems(A, dims, order):
    """ reorder tensor factors: factor order[i] of the input becomes factor i. """
    A = as_operator(A)
    dims = check_dims(dims, A.dim)
    order = subsystem_indices(order, len(dims))
    if sorted(order) != list(range(len(dims))):
        raise ValidationError("not a permutation of {} subsystems: {}".format(len(dims), order))
    n = len(dims)
    t = A.entries.reshape(dims + dims).transpose(order + [n + i for i in order])
    return HermitianOperator(t.reshape(A.dim, A.dim), check=False)


def eigenprojectors(sigma):
    """ isometries spanning the eigenspaces of sigma, with eigenvalues closer than
        DEGENERACY_TOL (relative to the largest magnitude) sharing one eigenspace.
    """
    lam, V = as_operator(sigma).spectrum
    cut = DEGENERACY_TOL * float(np.max(np.abs(lam)))
    blocks = []
    start = 0
    for i in range(1, lam.size + 1):
        if i == lam.size or lam[i - 1] - lam[i] > cut:
            blocks.append(V[:, start:i])
            start = i
    return blocks


def pinching(sigma, rho):
    sigma = as_operator(sigma)
    rho = as_operator(rho)
    if sigma.dim != rho.dim:
        raise ValidationError("dimension mismatch: sigma dim={} rho dim={}".format(sigma.dim, rho.dim))
    out = np.zeros((rho.dim, rho.dim), dtype=complex)
    for B in eigenprojectors(sigma):
        P = B @ B.conj().T
        out += P @ rho.entries @ P
    return HermitianOperator(out, check=False)


def commutator_norm(A, B):
    a = as_operator(A).entries
    b = as_operator(B).entries
    return float(np.linalg.norm(a @ b - b @ a, 2))


def direct_sum(*blocks):
    return HermitianOperator(scipy.linalg.block_diag(*[as_operator(b).entries for b in blocks]), check=False)


def loewner_leq(A, B, zero=DEFAULT_ZERO):
    """ A <= B in the positive semi-definite order """
    return is_psd(as_operator(B) - as_operator(A), zero)
