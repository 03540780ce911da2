#!/usr/bin/python3
# -*- mode: python; coding: utf-8 -*-

"""Calibration of a scenario's year effect to a target risk level."""

import dataclasses
import logging
import typing as t

from hindcast import adequacy
from hindcast import common
from hindcast import scenario


_logger = logging.getLogger(__name__)


class Error(common.ContractError):
    '''Base for errors in the module.'''


class CalibrationError(Error):
    '''Target risk cannot be reached.'''


class TargetError(common.InputError):
    '''Invalid calibration target.'''


METRICS = ('lole', 'lolh')

INITIAL_STEP_MW = 1000.0
BOUND_MW = 1e7
TOLERANCE = 1e-4
PHI_TOLERANCE_MW = 1e-6
MAX_ITERATIONS = 100


@dataclasses.dataclass(frozen=True)
class Calibration:
    scenario_id: str
    metric: str
    target: float
    phi: float
    achieved: float
    iterations: int
    step: float = 0.0


def calibrate(
        target: float,
        scen: scenario.Scenario,
        context: adequacy.RiskContext,
        metric: str = 'lole',
        shifts: t.Sequence[scenario.ShiftSpec] = (scenario.ShiftSpec(),),
        tol: float = TOLERANCE,
        max_iterations: int = MAX_ITERATIONS,
) -> Calibration:
    '''Finds phi_p so that the winter-mean risk metric equals `target`.

    The metric is nondecreasing in phi_p.  The bracket grows from phi = 0 by
    doubling steps, then bisection narrows it until the metric is within
    `tol` of the target.

    Without smearing the capacity distribution is a lattice and the metric a
    step function of phi_p.  When the bracket closes to `PHI_TOLERANCE_MW`
    around a step that jumps over the target, the side nearer the target is
    returned and `step` records the size of the jump.
    '''

    if metric not in METRICS:
        raise TargetError(f'Unknown calibration metric {metric!r}, expected one of {METRICS}')
    if not target > 0:
        raise TargetError(f'Calibration target {target} must be > 0')
    if metric == 'lolh' and not context.hourly:
        raise TargetError('LOLH calibration needs hourly demand')

    def excess(phi: float) -> float:
        return context.mean_metric(scen.with_phi(phi), metric, shifts) - target

    iterations = 0

    def done(phi: float, g: float, step: float = 0.0) -> Calibration:
        achieved = g + target
        _logger.info('Scenario %s: phi %.3f MW gives mean %s %.6f (target %g) after %d iterations',
                     scen.id, phi, metric, achieved, target, iterations)
        return Calibration(scen.id, metric, target, phi, achieved, iterations, step)

    g0 = excess(0.0)
    if abs(g0) <= tol:
        return done(0.0, g0)

    direction = 1.0 if g0 < 0 else -1.0
    lo, g_lo = 0.0, g0
    step = INITIAL_STEP_MW
    while True:
        hi = direction * min(abs(lo) + step, BOUND_MW)
        g_hi = excess(hi)
        iterations += 1
        if abs(g_hi) <= tol:
            return done(hi, g_hi)
        if (g_hi > 0) == (direction > 0):
            break
        if abs(hi) >= BOUND_MW:
            low, high = sorted([g0 + target, g_hi + target])
            raise CalibrationError(f'Scenario {scen.id}: target {metric} {target} unreachable; achieved range '
                                   f'[{low:.6g}, {high:.6g}] for phi within {BOUND_MW:g} MW')
        lo, g_lo = hi, g_hi
        step *= 2.0

    # Invariant: excess(a) < 0 < excess(b).
    a, b = (lo, hi) if direction > 0 else (hi, lo)
    g_a, g_b = (g_lo, g_hi) if direction > 0 else (g_hi, g_lo)
    while iterations < max_iterations:
        mid = 0.5 * (a + b)
        g_mid = excess(mid)
        iterations += 1
        if abs(g_mid) <= tol:
            return done(mid, g_mid)
        if g_mid < 0:
            a, g_a = mid, g_mid
        else:
            b, g_b = mid, g_mid
        if b - a <= PHI_TOLERANCE_MW:
            break

    if b - a <= PHI_TOLERANCE_MW:
        jump = g_b - g_a
        _logger.info('Scenario %s: mean %s steps from %.6g to %.6g at phi %.6f MW, across target %g',
                     scen.id, metric, g_a + target, g_b + target, a, target)
        if abs(g_a) <= abs(g_b):
            return done(a, g_a, jump)
        return done(b, g_b, jump)

    best = a if abs(g_a) <= abs(g_b) else b
    raise CalibrationError(f'Scenario {scen.id}: target {metric} {target} not met within {tol:g} after '
                           f'{iterations} iterations; achieved range [{g_a + target:.6g}, {g_b + target:.6g}] '
                           f'around phi {best:.3f} MW')


def calibrate_year_effect(
        target_lole: float,
        scen: scenario.Scenario,
        context: adequacy.RiskContext,
) -> float:
    '''Year effect in MW giving the target winter-mean LOLE at the historic alignments.'''
    return calibrate(target_lole, scen, context).phi
