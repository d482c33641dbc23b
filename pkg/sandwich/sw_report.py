#!/usr/bin/env python3
#
# This file is part of sandwich.
#
# sw_report.py : machine readable records of property suite runs and of data
#                processing counterexamples.
#
#   report  : {"property_id", "trials", "seed", "worst_violation", "tolerance",
#              "verdict", "params", "counterexamples": [record, ...]}
#   record  : {"alpha", "rho", "sigma", "channel", "violation"}
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
import math

from dataclasses import dataclass, field

from sandwich.sw_codec import channelFromJSON, channelToJSON, matrixFromJSON, matrixToJSON
from sandwich.sw_states import DensityOperator
from sandwich.sw_util import ValidationError

logger = logging.getLogger(__name__)

RECORD_THRESHOLD = 1e-6

PASS = 'pass'
FAIL = 'fail'


def _finite_or_text(x):
    """ json has no infinity: +/-inf are written as strings """
    if math.isinf(x):
        return 'inf' if x > 0 else '-inf'
    return x


@dataclass
class CounterexampleRecord:
    """ rho, sigma and channel with D~(E(rho)||E(sigma)) - D~(rho||sigma) > 0 """
    alpha: float
    rho: DensityOperator
    sigma: DensityOperator
    channel: object
    violation: float

    def __post_init__(self):
        if not self.violation > RECORD_THRESHOLD:
            raise ValidationError("counterexample violation {:.3e} not above {:.0e}".format(
                self.violation, RECORD_THRESHOLD))

    def to_json(self):
        return {
            'alpha': self.alpha,
            'rho': matrixToJSON(self.rho),
            'sigma': matrixToJSON(self.sigma),
            'channel': channelToJSON(self.channel),
            'violation': self.violation
        }

    @classmethod
    def from_json(cls, obj):
        try:
            return cls(float(obj['alpha']), DensityOperator(matrixFromJSON(obj['rho'])),
                       DensityOperator(matrixFromJSON(obj['sigma'])), channelFromJSON(obj['channel']),
                       float(obj['violation']))
        except KeyError as ex:
            raise ValidationError("counterexample record misses key {}".format(ex))


@dataclass
class PropertyReport:
    property_id: str
    trials: int
    seed: int
    worst_violation: float
    tolerance: float
    params: dict = field(default_factory=dict)
    counterexamples: list = field(default_factory=list)

    @property
    def verdict(self):
        return PASS if self.worst_violation <= self.tolerance else FAIL

    @property
    def passed(self):
        return self.verdict == PASS

    def to_json(self):
        return {
            'property_id': self.property_id,
            'trials': self.trials,
            'seed': self.seed,
            'worst_violation': _finite_or_text(self.worst_violation),
            'tolerance': self.tolerance,
            'verdict': self.verdict,
            'params': self.params,
            'counterexamples': [c.to_json() for c in self.counterexamples]
        }

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict) or 'property_id' not in obj:
            raise ValidationError("report needs a 'property_id'")
        try:
            report = cls(obj['property_id'], int(obj['trials']), int(obj['seed']),
                         float(obj['worst_violation']), float(obj['tolerance']),
                         obj.get('params', {}),
                         [CounterexampleRecord.from_json(c) for c in obj.get('counterexamples', [])])
        except KeyError as ex:
            raise ValidationError("report {} misses key {}".format(obj['property_id'], ex))
        if 'verdict' in obj and obj['verdict'] != report.verdict:
            logger.warning("report %s: stored verdict %s disagrees with worst_violation %s" %
                           (report.property_id, obj['verdict'], report.worst_violation))
        return report

    def summary(self, precision=6):
        return "%s: %s worst_violation=%.*g tolerance=%g trials=%d seed=%d" % (
            self.property_id, self.verdict, precision, self.worst_violation, self.tolerance, self.trials, self.seed)


def reports_from_json(obj):
    """ a single report or a list of them (the output of `suite --all`) """
    if isinstance(obj, list):
        return [PropertyReport.from_json(o) for o in obj]
    return [PropertyReport.from_json(obj)]
