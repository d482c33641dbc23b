#!/usr/bin/env python3
#
# This file is part of sandwich.
#
# sw_states.py : density operators, multipartite states, channels in Kraus form,
#                POVMs, purification, measurement and the seeded samplers used
#                by the property suites.
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

import itertools
import logging

import numpy as np

from sandwich.sw_linalg import HermitianOperator, DEFAULT_ZERO, as_operator, check_dims, direct_sum, \
    eigenprojectors, matrix_power_on_support, partial_trace, permute_subsystems, psd_spectrum, \
    subsystem_indices, support
from sandwich.sw_util import ValidationError, as_generator

logger = logging.getLogger(__name__)

TRACE_TOL = 1e-12
NORMALIZED_TOL = 1e-10
TP_TOL = 1e-10

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class DensityOperator(HermitianOperator):
    """ positive semi-definite operator with trace in (0,1] """

    def __init__(self, entries, check=True, zero=DEFAULT_ZERO):
        super().__init__(entries, check=check)
        psd_spectrum(self, zero)
        t = self.trace()
        if not 0 < t <= 1 + TRACE_TOL:
            raise ValidationError("density operator trace out of range (0,1]: trace={:.12g}".format(t))

    def is_normalized(self, tol=NORMALIZED_TOL):
        return abs(self.trace() - 1.0) <= tol


def as_density(rho, zero=DEFAULT_ZERO):
    if isinstance(rho, DensityOperator):
        return rho
    return DensityOperator(rho, zero=zero)


def require_normalized(rho, what='state', tol=NORMALIZED_TOL):
    if abs(rho.trace() - 1.0) > tol:
        raise ValidationError("{} is not normalized: trace={:.12g}".format(what, rho.trace()))


class MultipartiteState:
    """
    density operator with declared subsystem dimensions.  Subsystems listed in
    classical hold a classical register: the operator is block diagonal in its
    computational basis.
    """

    def __init__(self, op, dims, classical=()):
        self.op = as_density(op)
        self.dims = tuple(check_dims(dims, self.op.dim))
        self.classical = tuple(subsystem_indices(list(classical), len(self.dims)))

    @property
    def dim(self):
        return self.op.dim

    def trace(self):
        return self.op.trace()

    def marginal(self, keep):
        keep = subsystem_indices(keep, len(self.dims))
        traced = [i for i in range(len(self.dims)) if i not in keep]
        kept = sorted(keep)
        op = partial_trace(self.op, self.dims, traced) if traced else self.op
        return MultipartiteState(DensityOperator(op, check=False), [self.dims[i] for i in kept],
                                 [kept.index(c) for c in self.classical if c in kept])

    def permute(self, order):
        order = subsystem_indices(order, len(self.dims))
        op = permute_subsystems(self.op, self.dims, order)
        return MultipartiteState(DensityOperator(op, check=False), [self.dims[i] for i in order],
                                 [order.index(c) for c in self.classical])

    def rank(self, zero=DEFAULT_ZERO):
        return support(self.op, zero).rank

    def is_pure(self, zero=DEFAULT_ZERO):
        return self.rank(zero) == 1

    def __repr__(self):
        return "MultipartiteState(dims={}, classical={})".format(list(self.dims), list(self.classical))


def as_state(state, dims=None):
    if isinstance(state, MultipartiteState):
        return state
    op = as_density(state)
    return MultipartiteState(op, dims if dims is not None else [op.dim])


def embed_operator(K, dims, index):
    """ identity on every factor but index, K on that one (K may be rectangular). """
    K = np.asarray(K, dtype=complex)
    out = np.ones((1, 1), dtype=complex)
    for i, d in enumerate(dims):
        out = np.kron(out, K if i == index else np.eye(d))
    return out


class QuantumChannel:
    """ CPTP map given by Kraus operators of shape d_out x d_in """

    def __init__(self, kraus, tol=TP_TOL):
        ks = [np.array(k, dtype=complex) for k in kraus]
        if len(ks) == 0:
            raise ValidationError("channel needs at least one Kraus operator")
        shape = ks[0].shape
        for i, k in enumerate(ks):
            if k.ndim != 2 or k.shape != shape:
                raise ValidationError("Kraus operator {} has shape {} expected {}".format(i, k.shape, shape))
        s = sum(k.conj().T @ k for k in ks)
        deviation = float(np.max(np.abs(s - np.eye(shape[1]))))
        if deviation > tol:
            raise ValidationError("channel is not trace preserving: max |sum K^dagger K - I| = {:.3e}".format(
                deviation))
        for k in ks:
            k.setflags(write=False)
        self._kraus = tuple(ks)

    @classmethod
    def from_isometry(cls, V, d_out):
        """ Kraus set of the Stinespring isometry V: C^d_in -> C^k (x) C^d_out, K_j the j-th block of d_out rows """
        V = np.asarray(V, dtype=complex)
        if V.shape[0] % d_out != 0:
            raise ValidationError("isometry rows {} not a multiple of d_out={}".format(V.shape[0], d_out))
        return cls([V[j * d_out:(j + 1) * d_out, :] for j in range(V.shape[0] // d_out)])

    @property
    def kraus_ops(self):
        return self._kraus

    @property
    def d_in(self):
        return self._kraus[0].shape[1]

    @property
    def d_out(self):
        return self._kraus[0].shape[0]

    def apply(self, rho):
        return apply_channel(self, rho)

    __call__ = apply

    def compose(self, other):
        """ self after other """
        if other.d_out != self.d_in:
            raise ValidationError("dimension mismatch: composing d_in={} after d_out={}".format(
                self.d_in, other.d_out))
        return QuantumChannel([a @ b for a in self._kraus for b in other.kraus_ops])

    def on_subsystem(self, dims, index):
        dims = [int(d) for d in dims]
        if dims[index] != self.d_in:
            raise ValidationError("channel d_in={} does not fit subsystem {} of dims {}".format(
                self.d_in, index, dims))
        return QuantumChannel([embed_operator(k, dims, index) for k in self._kraus])

    def __repr__(self):
        return "QuantumChannel(d_in={}, d_out={}, kraus={})".format(self.d_in, self.d_out, len(self._kraus))


class POVM:

    def __init__(self, elements, tol=TP_TOL):
        ops = [as_operator(m) for m in elements]
        if len(ops) == 0:
            raise ValidationError("POVM needs at least one element")
        d = ops[0].dim
        for i, m in enumerate(ops):
            if m.dim != d:
                raise ValidationError("POVM element {} has dim {} expected {}".format(i, m.dim, d))
            try:
                psd_spectrum(m)
            except ValidationError:
                raise ValidationError("POVM element {} is not positive semi-definite".format(i))
        deviation = float(np.max(np.abs(sum(m.entries for m in ops) - np.eye(d))))
        if deviation > tol:
            raise ValidationError("POVM elements do not sum to identity: max deviation {:.3e}".format(deviation))
        self._elements = tuple(ops)

    @property
    def elements(self):
        return self._elements

    @property
    def outcomes(self):
        return len(self._elements)

    @property
    def dim(self):
        return self._elements[0].dim


def apply_channel(channel, rho):
    rho_op = as_operator(rho)
    if rho_op.dim != channel.d_in:
        raise ValidationError("dimension mismatch: channel d_in={} state dim={}".format(channel.d_in, rho_op.dim))
    a = rho_op.entries
    out = sum(k @ a @ k.conj().T for k in channel.kraus_ops)
    if isinstance(rho, DensityOperator):
        return DensityOperator(out, check=False)
    return HermitianOperator(out, check=False)


#============================================================
# constructors

def maximally_mixed(dim):
    return DensityOperator(np.eye(dim) / dim, check=False)


def basis_state(dim, index):
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return DensityOperator(np.outer(v, v), check=False)


def plus_state():
    return DensityOperator(np.full((2, 2), 0.5), check=False)


def maximally_entangled(dim):
    v = np.eye(dim, dtype=complex).reshape(-1) / np.sqrt(dim)
    return MultipartiteState(DensityOperator(np.outer(v, v.conj()), check=False), [dim, dim])


def computational_povm(dim):
    return POVM([basis_state(dim, i) for i in range(dim)])


def fourier_povm(dim):
    """ projectors on the discrete Fourier basis; the X basis when dim is 2 """
    w = np.exp(2j * np.pi / dim)
    F = np.array([[w ** (j * k) for k in range(dim)] for j in range(dim)]) / np.sqrt(dim)
    return POVM([HermitianOperator.projector(F[:, k]) for k in range(dim)])


def identity_channel(dim):
    return QuantumChannel([np.eye(dim)])


def depolarizing_channel(dim, p):
    if not 0 <= p <= 1:
        raise ValidationError("depolarizing probability out of range: p={}".format(p))
    kraus = [np.sqrt(1 - p) * np.eye(dim)]
    for i, j in itertools.product(range(dim), repeat=2):
        E = np.zeros((dim, dim))
        E[i, j] = np.sqrt(p / dim)
        kraus.append(E)
    return QuantumChannel(kraus)


def partial_trace_channel(dims, traced):
    dims = [int(d) for d in dims]
    traced = subsystem_indices(traced, len(dims))
    kraus = []
    for ks in itertools.product(*[range(dims[i]) for i in traced]):
        pick = dict(zip(traced, ks))
        K = np.ones((1, 1), dtype=complex)
        for i, d in enumerate(dims):
            if i in pick:
                K = np.kron(K, np.eye(d)[pick[i]].reshape(1, d))
            else:
                K = np.kron(K, np.eye(d))
        kraus.append(K)
    return QuantumChannel(kraus)


def pinching_channel(sigma):
    return QuantumChannel([B @ B.conj().T for B in eigenprojectors(sigma)])


#============================================================
# purification and measurement

def purify(rho):
    """ |phi> = sum_i sqrt(lambda_i) |i>_R |v_i>_B, returned on R (x) B """
    rho = as_density(rho)
    require_normalized(rho)
    lam, V, keep = psd_spectrum(rho)
    d = rho.dim
    psi = np.zeros(d * d, dtype=complex)
    for i in np.flatnonzero(keep):
        psi += np.sqrt(lam[i]) * np.kron(np.eye(d)[i], V[:, i])
    psi /= np.linalg.norm(psi)
    return MultipartiteState(DensityOperator(np.outer(psi, psi.conj()), check=False), [d, d])


def measure(state, povm, measured=0, keep=None):
    """
    measure subsystem `measured` with the POVM, keep the quantum subsystems in
    `keep` (default: all the others) and trace out the rest.  The result has
    the outcome register X first and block x = tr_rest[M_x rho].
    """
    state = as_state(state)
    n = len(state.dims)
    measured = subsystem_indices(measured, n)[0]
    if state.dims[measured] != povm.dim:
        raise ValidationError("dimension mismatch: POVM dim={} subsystem {} dim={}".format(
            povm.dim, measured, state.dims[measured]))
    if keep is None:
        keep = [i for i in range(n) if i != measured]
    keep = sorted(subsystem_indices(keep, n))
    if measured in keep:
        raise ValidationError("measured subsystem {} cannot be kept".format(measured))
    traced = [i for i in range(n) if i not in keep]
    blocks = []
    for M in povm.elements:
        R = embed_operator(matrix_power_on_support(M, 0.5).entries, state.dims, measured)
        blocks.append(partial_trace(state.op.conjugate_by(R), state.dims, traced))
    dims = [povm.outcomes] + [state.dims[i] for i in keep]
    return MultipartiteState(DensityOperator(direct_sum(*blocks), check=False), dims, classical=[0])


def classical_quantum_assemble(weights, blocks, dims=None):
    """ block diagonal state sum_y p_y |y><y| (x) rho^y with the classical register first """
    p = np.asarray(weights, dtype=float).reshape(-1)
    if len(p) != len(blocks) or len(p) == 0:
        raise ValidationError("need one weight per block: {} weights, {} blocks".format(len(p), len(blocks)))
    if np.any(p < 0) or abs(p.sum() - 1.0) > NORMALIZED_TOL:
        raise ValidationError("weights are not a probability distribution: {}".format(p.tolist()))
    ops = [as_density(b) for b in blocks]
    for y, b in enumerate(ops):
        if b.dim != ops[0].dim:
            raise ValidationError("block {} has dim {} expected {}".format(y, b.dim, ops[0].dim))
        require_normalized(b, what="block {}".format(y))
    dims = list(dims) if dims is not None else [ops[0].dim]
    op = direct_sum(*[float(py) * b for py, b in zip(p, ops)])
    return MultipartiteState(DensityOperator(op, check=False), [len(p)] + dims, classical=[0])


#============================================================
# samplers

def _ginibre(rng, rows, cols):
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_isometry(rows, cols, seed):
    if rows < cols:
        raise ValidationError("isometry needs rows >= cols: rows={} cols={}".format(rows, cols))
    rng = as_generator(seed)
    Q, R = np.linalg.qr(_ginibre(rng, rows, cols))
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_unitary(dim, seed):
    return random_isometry(dim, dim, seed)


def random_density(dim, rank=None, seed=0):
    rank = dim if rank is None else int(rank)
    if dim < 1 or not 1 <= rank <= dim:
        raise ValidationError("invalid random density shape: dim={} rank={}".format(dim, rank))
    G = _ginibre(as_generator(seed), dim, rank)
    A = G @ G.conj().T
    return DensityOperator(A / np.real(np.trace(A)), check=False)


def random_pure(dims, seed=0):
    dims = [int(d) for d in dims]
    if any(d < 1 for d in dims):
        raise ValidationError("invalid dims: {}".format(dims))
    D = int(np.prod(dims))
    psi = _ginibre(as_generator(seed), D, 1).reshape(-1)
    psi /= np.linalg.norm(psi)
    return MultipartiteState(DensityOperator(np.outer(psi, psi.conj()), check=False), dims)


def random_channel(d_in, d_out, kraus_count=None, seed=0):
    kraus_count = d_in * d_out if kraus_count is None else int(kraus_count)
    if d_in < 1 or d_out < 1 or kraus_count < 1 or d_out * kraus_count < d_in:
        raise ValidationError("invalid random channel shape: d_in={} d_out={} kraus_count={}".format(
            d_in, d_out, kraus_count))
    return QuantumChannel.from_isometry(random_isometry(d_out * kraus_count, d_in, seed), d_out)


def random_povm(dim, outcomes, seed=0):
    ch = random_channel(dim, dim, outcomes, seed)
    return POVM([k.conj().T @ k for k in ch.kraus_ops])
