#!/usr/bin/env python3
#
# This file is part of sandwich.
#
# sw_codec.py : JSON encoding of matrices, states and channels.
#
#   matrix  : {"dim": d, "entries": [[[re, im], ...], ...]}   row major
#             (rectangular Kraus operators use "dim": [rows, cols])
#   state   : matrix keys plus "dims": [dA, dB, ...] and optional "classical": [indices]
#   channel : {"kraus": [matrix, ...]}
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

import json
import logging
import numbers

import numpy as np

from sandwich.sw_linalg import HermitianOperator
from sandwich.sw_states import DensityOperator, MultipartiteState, POVM, QuantumChannel
from sandwich.sw_util import ValidationError

logger = logging.getLogger(__name__)


def matrixToJSON(A):
    a = A.entries if isinstance(A, HermitianOperator) else np.asarray(A, dtype=complex)
    rows, cols = a.shape
    return {
        'dim': rows if rows == cols else [rows, cols],
        'entries': [[[float(z.real), float(z.imag)] for z in row] for row in a]
    }


def _entry(value, i, j):
    if not (isinstance(value, (list, tuple)) and len(value) == 2 and
            all(isinstance(v, numbers.Real) and not isinstance(v, bool) for v in value)):
        raise ValidationError("entry ({},{}) is not a [re, im] pair of numbers: {}".format(i, j, value))
    return complex(value[0], value[1])


def matrixFromJSON(obj):
    """ complex ndarray from the matrix format, with entry level diagnostics """
    if not isinstance(obj, dict) or 'entries' not in obj or 'dim' not in obj:
        raise ValidationError("matrix needs 'dim' and 'entries' keys")
    dim = obj['dim']
    if isinstance(dim, numbers.Integral) and not isinstance(dim, bool):
        rows, cols = dim, dim
    elif isinstance(dim, (list, tuple)) and len(dim) == 2:
        rows, cols = int(dim[0]), int(dim[1])
    else:
        raise ValidationError("invalid matrix dim: {}".format(dim))
    entries = obj['entries']
    if not isinstance(entries, list) or len(entries) != rows:
        raise ValidationError("matrix has {} rows expected {}".format(
            len(entries) if isinstance(entries, list) else 'no', rows))
    a = np.zeros((rows, cols), dtype=complex)
    for i, row in enumerate(entries):
        if not isinstance(row, list) or len(row) != cols:
            raise ValidationError("matrix row {} has {} entries expected {}".format(
                i, len(row) if isinstance(row, list) else 'no', cols))
        for j, value in enumerate(row):
            a[i, j] = _entry(value, i, j)
    return a


def stateToJSON(state):
    if isinstance(state, MultipartiteState):
        obj = matrixToJSON(state.op)
        obj['dims'] = list(state.dims)
        if state.classical:
            obj['classical'] = list(state.classical)
        return obj
    obj = matrixToJSON(state)
    obj['dims'] = [obj['dim']]
    return obj


def stateFromJSON(obj, dims=None):
    """ MultipartiteState; dims given on the command line override the file """
    a = matrixFromJSON(obj)
    op = DensityOperator(a)
    dims = dims if dims is not None else obj.get('dims', [op.dim])
    return MultipartiteState(op, dims, obj.get('classical', []))


def operatorFromJSON(obj):
    return HermitianOperator(matrixFromJSON(obj))


def channelToJSON(channel):
    return {'kraus': [matrixToJSON(k) for k in channel.kraus_ops]}


def channelFromJSON(obj):
    if not isinstance(obj, dict) or not isinstance(obj.get('kraus'), list):
        raise ValidationError("channel needs a 'kraus' list")
    return QuantumChannel([matrixFromJSON(k) for k in obj['kraus']])


def povmFromJSON(obj):
    if not isinstance(obj, dict) or not isinstance(obj.get('elements'), list):
        raise ValidationError("POVM needs an 'elements' list")
    return POVM([operatorFromJSON(m) for m in obj['elements']])


def povmToJSON(povm):
    return {'elements': [matrixToJSON(m) for m in povm.elements]}


def load(path):
    logger.debug("loading %s" % path)
    with open(path, 'r') as fp:
        try:
            return json.load(fp)
        except ValueError as ex:
            raise ValidationError("malformed JSON in {}: {}".format(path, ex))


def save(path, obj):
    logger.debug("saving %s" % path)
    with open(path, 'w') as fp:
        fp.write(json.dumps(obj, sort_keys=True) + '\n')
