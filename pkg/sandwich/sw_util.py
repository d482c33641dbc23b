#!/usr/bin/env python3
#
# This file is part of sandwich.
#
# sw_util.py : small helpers shared by every sandwich module: exceptions,
#              seeded random streams, extended real arithmetic, formatting.
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

import math
import time

import humanize
import numpy as np

LN2 = math.log(2.0)


class ValidationError(ValueError):
    """input rejected before any computation"""
    pass


class ComputationError(ArithmeticError):
    """numerical failure during a computation"""
    pass


def nowflt():
    return time.time()


def elapsed(start):
    """ human readable time since start, for log lines """
    return humanize.naturaldelta(nowflt() - start)


def isNone(S):
    if S is None:
        return True
    s = str(S).lower()
    if s == 'false' or s == 'none' or s == 'off' or s == '0':
        return True
    return False


#============================================================
# random streams
#
# every sampler takes either an integer seed or a numpy Generator.
# trial t of a run seeded with s draws from the stream s ^ t, so
# trials can be replayed one at a time, in any order, on any worker.

def rng_stream(seed, trial=0):
    if seed is None or int(seed) < 0:
        raise ValidationError("invalid seed: seed={}".format(seed))
    return np.random.Generator(np.random.PCG64(int(seed) ^ int(trial)))


def refine_stream(seed, trial=0, branch=0):
    """ stream for local search around trial t; spawn keys keep it apart from every rng_stream """
    if seed is None or int(seed) < 0:
        raise ValidationError("invalid seed: seed={}".format(seed))
    sequence = np.random.SeedSequence(int(seed), spawn_key=(1, int(trial), int(branch)))
    return np.random.Generator(np.random.PCG64(sequence))


def as_generator(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return rng_stream(seed)


#============================================================
# extended reals

def to_base(value, base=2):
    """ convert a log-valued quantity computed in bits to another base.
        base is 2 or 'e'.
    """
    if base in (2, '2'):
        return value
    if base in ('e', math.e):
        return value * LN2
    raise ValidationError("invalid log base: base={}".format(base))


def slack(lhs, rhs):
    """ signed violation of the inequality lhs <= rhs, with +inf/-inf handled
        the way the order of the extended reals asks: inf <= inf holds.
    """
    if lhs == rhs:
        return 0.0
    if math.isinf(lhs) or math.isinf(rhs):
        return math.inf if lhs > rhs else -math.inf
    return lhs - rhs


def format_value(value, precision=6):
    if math.isnan(value):
        return 'nan'
    if math.isinf(value):
        return 'inf' if value > 0 else '-inf'
    return "%.*f" % (precision, value)
