#!/usr/bin/env python3
#
# This file is part of sandwich.
#
# sw_bloch.py : exhaustive search over the Bloch ball of a qubit conditioning
#               system.  Used as an independent oracle for the conditional
#               entropy optimizers.
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
For rho on A (x) B with B a qubit, the oracle minimizes

    r -> D~a(rho || id_A (x) (id + r.sigma)/2)

over the Bloch ball: a grid of radii x directions (Fibonacci sphere) evaluated
in one batch, then a Nelder-Mead refinement from the best grid point.  Qubit
matrix powers have a closed form, eigenvalues (1 +/- |r|)/2 with projectors
(id +/- n.sigma)/2, so no per point eigensolver is needed on B.
"""

import logging
import math

import numpy as np

from scipy.optimize import minimize
from scipy.special import logsumexp

from sandwich.sw_linalg import DEFAULT_ZERO, support
from sandwich.sw_states import PAULI_X, PAULI_Y, PAULI_Z
from sandwich.sw_util import LN2, ValidationError

logger = logging.getLogger(__name__)

RADII = 40
DIRECTIONS = 400
OVERLAP_TOL = 1e-9

PAULIS = np.array([PAULI_X, PAULI_Y, PAULI_Z])


def fibonacci_directions(n):
    """ n nearly uniform unit vectors """
    i = np.arange(n) + 0.5
    z = 1.0 - 2.0 * i / n
    phi = math.pi * (3.0 - math.sqrt(5.0)) * i
    s = np.sqrt(1.0 - z * z)
    return np.stack([s * np.cos(phi), s * np.sin(phi), z], axis=1)


def bloch_grid(radii=RADII, directions=DIRECTIONS):
    r = np.linspace(1.0 / radii, 1.0, radii)
    d = fibonacci_directions(directions)
    return np.vstack([np.zeros((1, 3)), (r[:, None, None] * d[None, :, :]).reshape(-1, 3)])


def bloch_state(r):
    r = np.asarray(r, dtype=float)
    return (np.eye(2) + np.einsum('k,kij->ij', r, PAULIS)) / 2


def _clip(r):
    n = np.linalg.norm(r)
    return r / n if n > 1.0 else r


class BlochOracle:
    """ batch evaluation of D~a(rho || id (x) sigma(r)) for a qubit B """

    def __init__(self, rho, dA, alpha, zero=DEFAULT_ZERO):
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (2 * dA, 2 * dA):
            raise ValidationError("Bloch oracle needs a qubit conditioning system: shape={} dA={}".format(
                rho.shape, dA))
        self.rho = rho
        self.dA = dA
        self.alpha = float(alpha)
        self.zero = zero
        self.support = support(rho, zero).projector.entries
        self.evaluations = 0

    def _projectors(self, vectors):
        t = np.linalg.norm(vectors, axis=1)
        n = np.where(t[:, None] > 0, vectors / np.where(t > 0, t, 1.0)[:, None], np.array([0.0, 0.0, 1.0]))
        ns = np.einsum('nk,kij->nij', n, PAULIS)
        plus = (np.eye(2) + ns) / 2
        minus = (np.eye(2) - ns) / 2
        return (1 + t) / 2, (1 - t) / 2, plus, minus

    def _lift(self, ops):
        """ id_A (x) op for a batch of qubit operators """
        N = ops.shape[0]
        return np.einsum('ab,nij->naibj', np.eye(self.dA), ops).reshape(N, 2 * self.dA, 2 * self.dA)

    def divergences(self, vectors):
        a = self.alpha
        vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
        self.evaluations += vectors.shape[0]
        lp, lm, plus, minus = self._projectors(vectors)
        cut = np.array([self.zero.cutoff(x) for x in lp])
        live_m = lm > cut
        g = (1.0 - a) / (2.0 * a)
        Sg = lp[:, None, None] ** g * plus + np.where(live_m, np.where(live_m, lm, 1.0) ** g, 0.0)[:, None, None] * minus
        G = self._lift(Sg)
        Z = G @ self.rho @ G
        lam = np.clip(np.linalg.eigvalsh((Z + np.conj(np.swapaxes(Z, 1, 2))) / 2), 0.0, None)
        keep = lam > np.array([self.zero.cutoff(x) for x in lam[:, -1]])[:, None]
        logs = np.where(keep, a * np.log(np.where(keep, lam, 1.0)), -np.inf)
        ltr = logsumexp(logs, axis=1)
        with np.errstate(invalid='ignore'):
            values = ltr / ((a - 1.0) * LN2)

        # support rules: orthogonal states, and for a > 1 a pure sigma missing part of rho
        P = self.support
        support_sigma = self._lift(np.where(live_m[:, None, None], plus + minus, plus))
        overlap = np.real(np.einsum('ij,nji->n', P, support_sigma))
        values = np.where(overlap <= OVERLAP_TOL, np.inf, values)
        if a > 1:
            outside = np.real(np.einsum('ij,nji->n', self.rho, self._lift(minus)))
            values = np.where(~live_m & (outside > OVERLAP_TOL), np.inf, values)
        values = np.where(np.isfinite(ltr), values, np.inf)
        return values

    def value(self, r):
        return float(self.divergences(_clip(np.asarray(r, dtype=float))[None, :])[0])

    def search(self, radii=RADII, directions=DIRECTIONS):
        grid = bloch_grid(radii, directions)
        values = self.divergences(grid)
        best = int(np.argmin(values))
        logger.debug("bloch grid best value=%.10g at r=%s over %d points" % (values[best], grid[best], len(grid)))
        return float(values[best]), grid[best]

    def refine(self, r0):
        simplex = np.vstack([r0, r0 + np.diag([0.02, 0.02, 0.02])])
        res = minimize(self.value, r0, method='Nelder-Mead',
                       options={'initial_simplex': simplex, 'xatol': 1e-10, 'fatol': 1e-13, 'maxiter': 6000})
        r = _clip(res.x)
        return self.value(r), r

    def best(self, radii=RADII, directions=DIRECTIONS):
        """ smallest divergence over the ball and the Bloch vector reaching it """
        v0, r0 = self.search(radii, directions)
        v1, r1 = self.refine(r0)
        if v1 <= v0:
            return v1, r1
        return v0, r0
