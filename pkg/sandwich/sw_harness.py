#!/usr/bin/env python3
#
# This file is part of sandwich.
#
# sw_harness.py : runs the property suites, mines data processing
#                 counterexamples below order 1/2, probes joint convexity,
#                 and rechecks stored counterexamples.
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
Trial t of a run seeded with s draws everything from rng_stream(s, t), so the
worst violation does not depend on the number of workers or on the order in
which the trials complete.
"""

import logging
import math

from concurrent.futures import ProcessPoolExecutor

import humanize
import numpy as np
import psutil
import scipy.linalg

from sandwich.sw_divergence import petz_divergence, sandwiched_divergence
from sandwich.sw_linalg import matrix_power_on_support
from sandwich.sw_report import RECORD_THRESHOLD, CounterexampleRecord, PropertyReport
from sandwich.sw_states import DensityOperator, QuantumChannel, apply_channel
from sandwich.sw_suites import SUITES, get_suite
from sandwich.sw_util import ComputationError, ValidationError, elapsed, nowflt, refine_stream, rng_stream, \
    slack

logger = logging.getLogger(__name__)

MINING_CANDIDATES = 10
REFINE_STEPS = 60
REFINE_SCALE = 0.1
PROBE_WEIGHTS = (0.25, 0.5, 0.75)
PROBE_REFINED = 3


def resolve_workers(workers):
    """ 0 means one worker per physical core """
    workers = int(workers)
    if workers < 0:
        raise ValidationError("invalid worker count: {}".format(workers))
    if workers == 0:
        workers = psutil.cpu_count(logical=False) or 1
    return workers


def _check_seed(seed):
    rng_stream(seed)
    return int(seed)


def _suite_trials(suite_id, dims, seed, indices):
    suite = get_suite(suite_id)
    return [(t, _one_trial(suite, dims, seed, t)) for t in indices]


def _one_trial(suite, dims, seed, t):
    try:
        return float(suite.trial(rng_stream(seed, t), dims))
    except (ComputationError, ValidationError, np.linalg.LinAlgError) as ex:
        logger.error("suite %s trial %d failed: %s" % (suite.registered_as(), t, ex))
        logger.debug('Exception details:', exc_info=True)
        return math.inf


def _chunks(n, workers):
    size = max(1, int(math.ceil(n / float(workers))))
    return [range(i, min(n, i + size)) for i in range(0, n, size)]


def run_suite(suite_id, trials=None, dims=None, seed=0, workers=1, evaluator=None):
    suite = get_suite(suite_id, evaluator)
    dims = suite.check_dims(dims) if dims else suite.dims
    trials = int(trials) if trials else suite.trials
    seed = _check_seed(seed)
    workers = resolve_workers(workers)
    if trials < 1:
        raise ValidationError("suite {} needs at least one trial: {}".format(suite_id, trials))

    start = nowflt()
    if workers > 1 and suite.overridden:
        logger.warning("suite %s: evaluator override runs in this process only" % suite_id)
        workers = 1
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_suite_trials, suite_id, dims, seed, c) for c in _chunks(trials, workers)]
            results = [r for f in futures for r in f.result()]
    else:
        results = []
        for t in range(trials):
            results.append((t, _one_trial(suite, dims, seed, t)))
            logger.debug("suite %s trial %d violation %.6g" % (suite_id, t, results[-1][1]))

    worst_trial, worst = max(results, key=lambda r: (r[1], -r[0]))
    report = PropertyReport(suite_id, trials, seed, worst, suite.tolerance,
                            {'dims': list(dims), 'alphas': list(suite.alphas), 'worst_trial': worst_trial,
                             'workers': workers})
    logger.info("%s in %s over %s trials" % (report.summary(), elapsed(start), humanize.intcomma(trials)))
    return report


def run_all(seed=0, trials=None, workers=1):
    return [run_suite(s, trials, None, seed, workers) for s in sorted(SUITES)]


#============================================================
# data processing counterexamples below order 1/2

def _ginibre(rng, rows, cols):
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def _candidate(rng, d):
    """ Ginibre factors of rho and sigma and a Stinespring isometry """
    G = _ginibre(rng, d, int(rng.integers(1, d + 1)))
    H = _ginibre(rng, d, int(rng.integers(1, d + 1)))
    if rng.uniform() < 0.5:
        # measurement in a random basis
        U = np.linalg.qr(_ginibre(rng, d, d))[0]
        V = np.vstack([np.outer(np.eye(d)[j], U[:, j].conj()) for j in range(d)])
    else:
        V = _ginibre(rng, d * int(rng.integers(1, d * d + 1)), d)
    return G, H, V


def _build(candidate, d):
    G, H, V = candidate
    rho = G @ G.conj().T
    sigma = H @ H.conj().T
    V = scipy.linalg.polar(V)[0]
    return (DensityOperator(rho / np.real(np.trace(rho)), check=False),
            DensityOperator(sigma / np.real(np.trace(sigma)), check=False),
            QuantumChannel.from_isometry(V, d))


def dp_violation(rho, sigma, channel, alpha):
    """ D~(E(rho)||E(sigma)) - D~(rho||sigma) """
    before = sandwiched_divergence(rho, sigma, alpha).value
    after = sandwiched_divergence(apply_channel(channel, rho), apply_channel(channel, sigma), alpha).value
    if math.isinf(before) and math.isinf(after):
        return 0.0
    return slack(after, before)


def _mining_chunk(alpha, d, seed, indices):
    out = []
    for t in indices:
        try:
            out.append((dp_violation(*_build(_candidate(rng_stream(seed, t), d), d), alpha), t))
        except (ComputationError, ValidationError) as ex:
            logger.debug("mining trial %d skipped: %s" % (t, ex))
    return out


def _perturb(rng, factors, scale):
    return tuple(X + scale * np.sqrt(np.mean(np.abs(X) ** 2)) * _ginibre(rng, *X.shape) for X in factors)


def _hill_climb(candidate, score, rng, steps=REFINE_STEPS):
    """ Gaussian perturbations of every factor, the scale halving after ten misses in a row """
    best = candidate
    best_value = score(best)
    scale = REFINE_SCALE
    misses = 0
    for _ in range(steps):
        trial = _perturb(rng, best, scale)
        try:
            value = score(trial)
        except (ComputationError, ValidationError, np.linalg.LinAlgError):
            value = -math.inf
        if value > best_value:
            best, best_value = trial, value
            misses = 0
        else:
            misses += 1
            if misses >= 10:
                scale /= 2
                misses = 0
    return best, best_value


def _refine(candidate, d, alpha, rng):
    return _hill_climb(candidate, lambda c: dp_violation(*_build(c, d), alpha), rng)


def mine_counterexamples(alpha, max_trials=100000, seed=0, dim=2, workers=1):
    """
    random qubit (or qutrit) pairs and channels, then local refinement around
    the largest violations found.  Returns the records sorted by violation;
    an empty list means none was found within the budget.
    """
    a = float(alpha)
    if not 0 < a < 0.5:
        raise ValidationError("counterexample mining needs alpha in (0,1/2): alpha={}".format(alpha))
    d = int(dim)
    if d not in (2, 3):
        raise ValidationError("counterexample mining samples qubits or qutrits: dim={}".format(dim))
    seed = _check_seed(seed)
    workers = resolve_workers(workers)
    start = nowflt()

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_mining_chunk, a, d, seed, c) for c in _chunks(max_trials, workers)]
            scores = [s for f in futures for s in f.result()]
    else:
        scores = _mining_chunk(a, d, seed, range(max_trials))

    scores.sort(key=lambda s: (-s[0], s[1]))
    records = []
    for value, t in scores[:MINING_CANDIDATES]:
        candidate, refined = _refine(_candidate(rng_stream(seed, t), d), d, a, refine_stream(seed, t))
        logger.debug("mining candidate trial=%d violation=%.6g refined=%.6g" % (t, value, refined))
        if refined > RECORD_THRESHOLD:
            rho, sigma, channel = _build(candidate, d)
            records.append(CounterexampleRecord(a, rho, sigma, channel, refined))
    records.sort(key=lambda r: -r.violation)
    if records:
        logger.info("found %d counterexamples at alpha=%s, largest violation %.6g, in %s over %s trials" %
                    (len(records), a, records[0].violation, elapsed(start), humanize.intcomma(max_trials)))
    else:
        logger.info("none found in budget at alpha=%s (%s trials, %s)" %
                    (a, humanize.intcomma(max_trials), elapsed(start)))
    return records


def mining_report(alpha, records, max_trials, seed):
    worst = records[0].violation if records else -math.inf
    return PropertyReport('DP-counterexamples', int(max_trials), int(seed), worst, RECORD_THRESHOLD,
                          {'alpha': float(alpha)}, list(records))


def recheck(record):
    """ the violation recomputed from the stored matrices """
    return dp_violation(record.rho, record.sigma, record.channel, record.alpha)


#============================================================
# joint convexity probe
#
# a candidate is four factors (R1, R2, S1, S2) of rho_i = R_i R_i^dag / tr and
# sigma_i = S_i S_i^dag / tr.  Half the trials draw Ginibre factors.  The other
# half draw a pair sigma_1,2 = X +/- tH around an ill-conditioned X, where
# failures of operator convexity of t^p live, and a pure rho along the top (or
# bottom) eigenvector of f(mean) - f(sigma_1)/2 - f(sigma_2)/2.

BOUNDARY_EIGENVALUE = (5e-3, 3e-2)
BOUNDARY_STEP = (0.05, 0.3)


def _factor_state(F):
    A = F @ F.conj().T
    return DensityOperator(A / np.real(np.trace(A)), check=False)


def _boundary_pair(rng, d):
    s = math.exp(rng.uniform(*np.log(BOUNDARY_EIGENVALUE)))
    U = np.linalg.qr(_ginibre(rng, d, d))[0]
    X = (U * np.array([1.0 - (d - 1) * s] + [s] * (d - 1))) @ U.conj().T
    H = _ginibre(rng, d, d)
    H = H + H.conj().T
    H = H - np.trace(H) / d * np.eye(d)
    H = H / np.linalg.norm(H, 2)
    t = rng.uniform(*BOUNDARY_STEP) * s
    return X + t * H, X - t * H


def _trial_candidates(rng, d, power):
    """ factor tuples drawn for one trial """
    if rng.uniform() < 0.5:
        R1, S1, S2 = (_ginibre(rng, d, d) for _ in range(3))
        # half of these keep rho fixed and only move sigma
        R2 = R1 if rng.uniform() < 0.5 else _ginibre(rng, d, d)
        return [(R1, R2, S1, S2)]
    s1, s2 = _boundary_pair(rng, d)
    f1, f2, fm = (matrix_power_on_support(s, power).entries for s in (s1, s2, (s1 + s2) / 2))
    w, V = np.linalg.eigh(fm - (f1 + f2) / 2)
    S1, S2 = (matrix_power_on_support(s, 0.5).entries for s in (s1, s2))
    return [(V[:, [k]], V[:, [k]], S1, S2) for k in (-1, 0)]


def _mixture_gaps(candidate, Q):
    """ Q(mixture) minus the mixture of Q, relative to the latter, for every probe weight """
    r1, r2, s1, s2 = (_factor_state(F) for F in candidate)
    q1, q2 = Q(r1, s1), Q(r2, s2)
    gaps = []
    for lam in PROBE_WEIGHTS:
        rho = DensityOperator(lam * r1.entries + (1 - lam) * r2.entries, check=False)
        sigma = DensityOperator(lam * s1.entries + (1 - lam) * s2.entries, check=False)
        rhs = lam * q1 + (1 - lam) * q2
        gap = (Q(rho, sigma) - rhs) / max(1.0, abs(rhs))
        gaps.append(gap if math.isfinite(gap) else math.nan)
    return np.array(gaps)


def _worst_gap(gaps, sign):
    live = gaps[np.isfinite(gaps)]
    return float(np.max(sign * live)) if live.size else -math.inf


def convexity_probe(alpha, trials=500, seed=0, family='sandwiched', dim=2):
    """
    search for violations of joint convexity and of joint concavity of
    Q = 2^((a-1)D), then hill climb from the best few candidates in each
    direction.  Gaps are relative to the right hand side once it exceeds one.
    The report's worst violation is taken in the direction the family is
    expected to satisfy: convexity for a > 1, concavity below.  Both maxima
    are kept in params.
    """
    if family == 'sandwiched':
        divergence = sandwiched_divergence
    elif family == 'petz':
        divergence = petz_divergence
    else:
        raise ValidationError("unknown divergence family: {}".format(family))
    a = float(alpha)
    seed = _check_seed(seed)
    d = int(dim)
    # for pure rho, Q is a function of <v|sigma^power|v>
    power = 1.0 - a if family == 'petz' else (1.0 - a) / a

    def Q(rho, sigma):
        return 2.0 ** ((a - 1.0) * divergence(rho, sigma, a).value)

    directions = {'convexity': lambda c: _worst_gap(_mixture_gaps(c, Q), 1.0),
                  'concavity': lambda c: _worst_gap(_mixture_gaps(c, Q), -1.0)}
    scored = {name: [] for name in directions}
    for t in range(int(trials)):
        for candidate in _trial_candidates(rng_stream(seed, t), d, power):
            try:
                gaps = _mixture_gaps(candidate, Q)
            except (ComputationError, ValidationError, np.linalg.LinAlgError) as ex:
                logger.debug("convexity probe trial %d skipped: %s" % (t, ex))
                continue
            scored['convexity'].append((_worst_gap(gaps, 1.0), t, candidate))
            scored['concavity'].append((_worst_gap(gaps, -1.0), t, candidate))

    worst = {}
    for branch, (name, score) in enumerate(sorted(directions.items())):
        ranked = sorted(scored[name], key=lambda s: (-s[0], s[1]))[:PROBE_REFINED]
        best = ranked[0][0] if ranked else -math.inf
        for value, t, candidate in ranked:
            refined = _hill_climb(candidate, score, refine_stream(seed, t, branch))[1]
            logger.debug("convexity probe %s trial=%d gap=%.6g refined=%.6g" % (name, t, value, refined))
            best = max(best, refined)
        worst[name] = best

    convex, concave = worst['convexity'], worst['concavity']
    logger.info("convexity probe %s alpha=%s: convexity violation %.3g, concavity violation %.3g" %
                (family, a, convex, concave))
    return PropertyReport('convexity-probe-' + family, int(trials), seed, convex if a > 1 else concave, 1e-9,
                          {'alpha': a, 'dims': [d], 'convexity_violation': convex, 'concavity_violation': concave})
