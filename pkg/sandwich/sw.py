#!/usr/bin/env python3
#
# This file is part of sandwich.
#
# sw.py : command line front end.  Loads states, channels and measurements
#         from JSON, dispatches one computation and prints its values.
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
   exit status: 0 success, 1 rejected input (flags, files, JSON, invalid
   operators), 2 computation failure.  A property suite or a recheck that
   does not pass also exits with 2.

   infinite values are not errors: they print as "inf (reason)".
"""

import argparse
import json
import logging
import sys

from sandwich import __version__
from sandwich.sw_codec import load, operatorFromJSON, povmFromJSON, save, stateFromJSON, stateToJSON
from sandwich.sw_conditional import Method, conditional_max_entropy, conditional_min_entropy, \
    conditional_renyi, conditional_vn_entropy, duality_check, petz_conditional_renyi, uncertainty_check
from sandwich.sw_config import sw_config
from sandwich.sw_divergence import auxiliary_divergence, collision_divergence, limit_checks, \
    max_relative_entropy, min_entropy, petz_divergence, relative_entropy, relative_min_entropy, renyi_entropy, \
    sandwiched_divergence, von_neumann_entropy
from sandwich.sw_divergence import fidelity as fidelity_of
from sandwich.sw_harness import convexity_probe, mine_counterexamples, mining_report, recheck, run_all, run_suite
from sandwich.sw_report import reports_from_json
from sandwich.sw_states import computational_povm, fourier_povm, require_normalized
from sandwich.sw_suites import SUITES
from sandwich.sw_util import ComputationError, ValidationError, format_value, to_base

logger = logging.getLogger(__name__)

RECHECK_TOL = 1e-9

COMMANDS = ['divergence', 'entropy', 'conditional', 'duality', 'limits', 'suite', 'mine', 'uncertainty',
            'recheck', 'probe', 'config']

DIVERGENCES = {
    'sandwiched': lambda rho, sigma, a, zero: sandwiched_divergence(rho, sigma, a, zero),
    'petz': lambda rho, sigma, a, zero: petz_divergence(rho, sigma, a, zero),
    'relative': lambda rho, sigma, a, zero: relative_entropy(rho, sigma, zero),
    'max': lambda rho, sigma, a, zero: max_relative_entropy(rho, sigma, zero),
    'min': lambda rho, sigma, a, zero: relative_min_entropy(rho, sigma, zero),
    'collision': lambda rho, sigma, a, zero: collision_divergence(rho, sigma, zero),
}
ORDERED = ('sandwiched', 'petz', 'auxiliary')

ENTROPIES = ['renyi', 'min', 'von-neumann', 'conditional-min', 'conditional-max', 'conditional-vn']


class sw_argparser(argparse.ArgumentParser):
    """ argparse reports bad flags through ValidationError, so they exit with 1 """

    def error(self, message):
        raise ValidationError("%s: %s" % (self.prog, message))


def dims_arg(text):
    try:
        dims = [int(d) for d in text.split(',')]
    except ValueError:
        raise argparse.ArgumentTypeError("dims must be comma separated integers: {}".format(text))
    if not dims or any(d < 1 for d in dims):
        raise argparse.ArgumentTypeError("dims must be positive: {}".format(text))
    return dims


def subsystems_arg(text):
    return [int(s) if s.isdigit() else s for s in text.split(',')]


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', default=None, help='configuration file read after default.conf')
    common.add_argument('--loglevel', default=None, help='debug, info, warning, error, critical or none')
    common.add_argument('--logpath', default=None, help='log to this file (rotated) instead of the console')
    common.add_argument('--precision', type=int, default=None, help='decimal digits printed (default 6)')
    common.add_argument('--log-base', dest='log_base', choices=['2', 'e'], default=None,
                        help='logarithm base of printed values (default 2)')
    common.add_argument('--zero-abs', dest='zero_abs', type=float, default=None,
                        help='eigenvalues at or below this are zero (default 1e-12)')
    common.add_argument('--zero-rel', dest='zero_rel', type=float, default=None,
                        help='eigenvalues at or below this times the largest are zero (default 1e-10)')
    common.add_argument('--workers', type=int, default=None, help='parallel workers, 0 for one per core')
    common.add_argument('--output', default=None, help='write the JSON result to this file')

    parser = sw_argparser(prog='sw', description='sandwiched Renyi divergences and conditional entropies',
                          formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    sub = parser.add_subparsers(dest='command', parser_class=sw_argparser)

    p = sub.add_parser('divergence', parents=[common], help='divergence between two operators')
    p.add_argument('--variant', choices=sorted(DIVERGENCES) + ['auxiliary', 'fidelity'], default='sandwiched')
    p.add_argument('--alpha', type=float, default=None)
    p.add_argument('--rho', required=True)
    p.add_argument('--sigma', required=True)
    p.add_argument('--tau', default=None, help='third operator of the auxiliary quantity')

    p = sub.add_parser('entropy', parents=[common], help='entropies of one state')
    p.add_argument('--variant', choices=ENTROPIES, default='renyi')
    p.add_argument('--alpha', type=float, default=None)
    p.add_argument('--state', required=True)
    p.add_argument('--dims', type=dims_arg, default=None)
    p.add_argument('--conditioning', type=subsystems_arg, default=None)
    p.add_argument('--tolerance', type=float, default=None)

    p = sub.add_parser('conditional', parents=[common], help='conditional Renyi entropy H(A|B)')
    p.add_argument('--alpha', type=float, required=True)
    p.add_argument('--state', required=True)
    p.add_argument('--dims', type=dims_arg, default=None)
    p.add_argument('--conditioning', type=subsystems_arg, default=None,
                   help='conditioning subsystems, indices or letters (default the last)')
    p.add_argument('--method', choices=[m.value for m in Method], default=None)
    p.add_argument('--family', choices=['sandwiched', 'petz'], default='sandwiched')
    p.add_argument('--tolerance', type=float, default=None)

    p = sub.add_parser('duality', parents=[common], help='H(A|B) against -H(A|C) on a pure state')
    p.add_argument('--alpha', type=float, required=True)
    p.add_argument('--state', required=True)
    p.add_argument('--dims', type=dims_arg, default=None)
    p.add_argument('--method', choices=[m.value for m in Method], default=None)
    p.add_argument('--tolerance', type=float, default=None)

    p = sub.add_parser('limits', parents=[common], help='orders near 1 and 200 against D and D_max')
    p.add_argument('--rho', required=True)
    p.add_argument('--sigma', required=True)

    p = sub.add_parser('suite', parents=[common], help='run property suites')
    p.add_argument('suite_id', nargs='?', choices=sorted(SUITES), default=None)
    p.add_argument('--all', action='store_true', help='run every registered suite')
    p.add_argument('--trials', type=int, default=None)
    p.add_argument('--dims', type=dims_arg, default=None)
    p.add_argument('--seed', type=int, default=None)

    p = sub.add_parser('mine', parents=[common], help='search data processing counterexamples below 1/2')
    p.add_argument('--alpha', type=float, required=True)
    p.add_argument('--trials', type=int, default=None)
    p.add_argument('--dim', type=int, default=2)
    p.add_argument('--seed', type=int, default=None)

    p = sub.add_parser('uncertainty', parents=[common], help='entropic uncertainty relation')
    p.add_argument('--alpha', type=float, required=True)
    p.add_argument('--state', required=True)
    p.add_argument('--dims', type=dims_arg, default=None)
    p.add_argument('--M', dest='M', default=None, help='POVM on A (default computational basis)')
    p.add_argument('--N', dest='N', default=None, help='POVM on A (default Fourier basis)')
    p.add_argument('--method', choices=[m.value for m in Method], default=None)
    p.add_argument('--tolerance', type=float, default=None)

    p = sub.add_parser('recheck', parents=[common], help='re-verify counterexamples stored in a report')
    p.add_argument('--report', required=True)

    p = sub.add_parser('probe', parents=[common], help='joint convexity probe')
    p.add_argument('--alpha', type=float, required=True)
    p.add_argument('--family', choices=['sandwiched', 'petz'], default='sandwiched')
    p.add_argument('--trials', type=int, default=None)
    p.add_argument('--dim', type=int, default=2)
    p.add_argument('--seed', type=int, default=None)

    sub.add_parser('config', parents=[common], help='print the effective configuration')
    return parser


class sw_command:
    """ one invocation: the parsed flags and the configuration they were merged into """

    def __init__(self, args, cfg):
        self.args = args
        self.cfg = cfg
        self.zero = cfg.zero
        self.base = cfg.base
        self.precision = cfg.get_int('precision')

    def show(self, value):
        return format_value(to_base(value, self.base), self.precision)

    def emit(self, name, value):
        print("%s %s" % (name, self.show(value)) if name else self.show(value))

    def write(self, obj):
        if self.args.output:
            save(self.args.output, obj)

    def state(self, path=None):
        return stateFromJSON(load(path or self.args.state), self.args.dims)

    def alpha(self, required=True):
        if self.args.alpha is None and required:
            raise ValidationError("--alpha is required for {}".format(self.args.command))
        return self.args.alpha

    def tolerance(self):
        if getattr(self.args, 'tolerance', None) is not None:
            return self.args.tolerance
        return self.cfg.get_float('tolerance')

    def method(self):
        if getattr(self.args, 'method', None) is not None:
            return Method(self.args.method)
        return Method(self.cfg.check_method())

    def seed(self):
        return self.args.seed if self.args.seed is not None else self.cfg.get_int('seed')

    def trials(self, default):
        if self.args.trials is not None:
            return self.args.trials
        return self.cfg.get_int('trials') or default

    #============================================================

    def divergence(self):
        a = self.args
        rho = stateFromJSON(load(a.rho)).op
        sigma = operatorFromJSON(load(a.sigma))
        if a.variant == 'fidelity':
            print(format_value(fidelity_of(rho, sigma, self.zero), self.precision))
            return 0
        if a.variant in ORDERED:
            alpha = self.alpha()
            if a.variant == 'auxiliary':
                if a.tau is None:
                    raise ValidationError("--tau is required for the auxiliary quantity")
                value = auxiliary_divergence(rho, sigma, operatorFromJSON(load(a.tau)), alpha, self.zero)
            else:
                value = DIVERGENCES[a.variant](rho, sigma, alpha, self.zero)
        else:
            value = DIVERGENCES[a.variant](rho, sigma, None, self.zero)
        print(value.format(self.precision, self.base))
        return 0

    def entropy(self):
        a = self.args
        state = self.state()
        if a.variant == 'renyi':
            value = renyi_entropy(state.op, self.alpha(), self.zero)
        elif a.variant == 'min':
            value = min_entropy(state.op, self.zero)
        elif a.variant == 'von-neumann':
            value = von_neumann_entropy(state.op, self.zero)
        elif a.variant == 'conditional-min':
            value = conditional_min_entropy(state, self.tolerance(), a.conditioning, self.zero)
        elif a.variant == 'conditional-max':
            value = conditional_max_entropy(state, self.tolerance(), a.conditioning, self.zero)
        else:
            value = conditional_vn_entropy(state, a.conditioning, self.zero)
        self.emit(None, value)
        return 0

    def conditional(self):
        a = self.args
        state = self.state()
        require_normalized(state.op)
        if a.family == 'petz':
            self.emit(None, petz_conditional_renyi(state, a.alpha, a.conditioning, self.zero))
            return 0
        result = conditional_renyi(state, a.alpha, self.method(), self.tolerance(), a.conditioning, self.zero,
                                   self.cfg.get_int('max_iterations'))
        self.emit(None, result.value)
        logger.info("method=%s iterations=%d residual=%.3g" % (result.method.value, result.iterations,
                                                             result.residual))
        self.write(stateToJSON(result.optimizer_state))
        return 0

    def duality(self):
        d = duality_check(self.state(), self.args.alpha, self.tolerance(), self.method(), self.zero)
        self.emit('H(A|B)', d.h_ab)
        self.emit('-H(A|C)', d.minus_h_ac)
        self.emit('gap', d.gap)
        return 0

    def limits(self):
        rho = stateFromJSON(load(self.args.rho)).op
        sigma = operatorFromJSON(load(self.args.sigma))
        r = limit_checks(rho, sigma, self.zero)
        for name in ('relative_entropy', 'below', 'above', 'max_relative_entropy', 'large_order', 'gap_one',
                     'gap_max'):
            self.emit(name, getattr(r, name))
        print("passed %s" % r.passed)
        return 0 if r.passed else 2

    def suite(self):
        a = self.args
        workers = self.cfg.get_int('workers')
        if a.all:
            reports = run_all(self.seed(), a.trials or self.cfg.get_int('trials') or None, workers)
        elif a.suite_id:
            reports = [run_suite(a.suite_id, a.trials or self.cfg.get_int('trials') or None, a.dims,
                                 self.seed(), workers)]
        else:
            raise ValidationError("suite needs a suite id or --all (one of {})".format(', '.join(sorted(SUITES))))
        for r in reports:
            print(r.summary(self.precision))
        if a.output:
            save(a.output, [r.to_json() for r in reports] if a.all else reports[0].to_json())
        return 0 if all(r.passed for r in reports) else 2

    def mine(self):
        trials = self.trials(100000)
        records = mine_counterexamples(self.args.alpha, trials, self.seed(), self.args.dim,
                                       self.cfg.get_int('workers'))
        if records:
            print("%d counterexamples, largest violation %s" % (len(records), self.show(records[0].violation)))
        else:
            print("none found in budget")
        self.write(mining_report(self.args.alpha, records, trials, self.seed()).to_json())
        return 0

    def uncertainty(self):
        a = self.args
        state = self.state()
        dA = state.dims[0]
        M = povmFromJSON(load(a.M)) if a.M else computational_povm(dA)
        N = povmFromJSON(load(a.N)) if a.N else fourier_povm(dA)
        u = uncertainty_check(state, M, N, a.alpha, self.tolerance(), self.method(), self.zero)
        self.emit('lhs', u.lhs)
        print("c_printed %s" % format_value(u.c_printed, self.precision))
        print("c_squared %s" % format_value(u.c_squared, self.precision))
        self.emit('bound_printed', u.bound_printed)
        self.emit('bound_squared', u.bound_squared)
        self.emit('margin', u.margin)
        return 0

    def recheck(self):
        status = 0
        for report in reports_from_json(load(self.args.report)):
            for i, record in enumerate(report.counterexamples):
                value = recheck(record)
                ok = abs(value - record.violation) <= RECHECK_TOL * max(1.0, abs(record.violation))
                print("%s[%d] stored %s recomputed %s %s" % (report.property_id, i,
                                                              format_value(record.violation, self.precision),
                                                              format_value(value, self.precision),
                                                              'ok' if ok else 'MISMATCH'))
                if not ok:
                    logger.error("counterexample %d of %s does not reproduce" % (i, report.property_id))
                    status = 2
        return status

    def probe(self):
        report = convexity_probe(self.args.alpha, self.trials(500), self.seed(), self.args.family, self.args.dim)
        print(report.summary(self.precision))
        print("convexity_violation %.3g" % report.params['convexity_violation'])
        print("concavity_violation %.3g" % report.params['concavity_violation'])
        self.write(report.to_json())
        return 0

    def config(self):
        self.cfg.dump()
        return 0


def configure(args):
    cfg = sw_config()
    cfg.read_default()
    if args.config:
        cfg.parse_file(args.config)
    cfg.override({k: getattr(args, k, None) for k in ('loglevel', 'logpath', 'precision', 'log_base',
                                                       'zero_abs', 'zero_rel', 'workers')})
    return cfg


def main(argv=None):
    """ parse flags, merge configuration, run one command and return the exit status
    """
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            print('USAGE: sw (%s) ...' % '|'.join(COMMANDS))
            return 1
        cfg = configure(args)
        cfg.setlog(args.command)
        if cfg.get_int('precision') < 0:
            raise ValidationError("option precision must be non negative: {}".format(cfg.precision))
        command = sw_command(args, cfg)
        return getattr(command, args.command)()
    except (ValidationError, OSError, json.JSONDecodeError) as ex:
        logger.error("%s" % ex)
        logger.debug('Exception details:', exc_info=True)
        return 1
    except ComputationError as ex:
        logger.error("computation failed: %s" % ex)
        logger.debug('Exception details:', exc_info=True)
        return 2
    except Exception as ex:
        logger.error("unexpected failure: %s" % ex)
        logger.debug('Exception details:', exc_info=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
