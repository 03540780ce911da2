#!/usr/bin/python3
# -*- mode: python; coding: utf-8 -*-

"""Explanatory weather variables and scenario wind power."""

import dataclasses
import datetime
import logging
import typing as t

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from hindcast import common
from hindcast import series

if t.TYPE_CHECKING:
    from hindcast import scenario


_logger = logging.getLogger(__name__)


class Error(common.InputError):
    '''Base for errors in the module.'''


class TooShortError(Error):
    '''Not enough hours to run the effective temperature recursion.'''


class AlignmentError(Error):
    '''Series are not on the same hourly grid.'''


OBSERVED_HOURS = 4
MIN_TE_HOURS = 2 * series.HOURS_PER_DAY


@dataclasses.dataclass(frozen=True, eq=False)
class EffectiveTempSeries:
    start: datetime.datetime
    hourly_te: np.ndarray
    daily_te_at_peak: np.ndarray


def observed_temperature(ta: np.ndarray) -> np.ndarray:
    '''Mean of the last four hours; the first hours average what is available.'''
    ta = np.asarray(ta, dtype=np.float64)
    to = np.empty_like(ta)
    head = min(OBSERVED_HOURS - 1, len(ta))
    to[:head] = np.cumsum(ta[:head]) / np.arange(1, head + 1)
    if len(ta) >= OBSERVED_HOURS:
        to[OBSERVED_HOURS - 1:] = sliding_window_view(ta, OBSERVED_HOURS).mean(axis=1)
    return to


def effective_temperature(ta: series.HourlySeries) -> EffectiveTempSeries:
    '''TE_h = (TE_{h-24} + TO_h) / 2, started from TE_h = TO_h on the first day.'''
    if len(ta) < MIN_TE_HOURS:
        raise TooShortError(f'Effective temperature needs at least {MIN_TE_HOURS} hours, got {len(ta)}')
    to = observed_temperature(ta.values)
    te = to.copy()
    day = series.HOURS_PER_DAY
    for h in range(day, len(te), day):
        chunk = te[h:h + day]
        chunk[:] = 0.5 * (te[h - day:h - day + len(chunk)] + to[h:h + day])
    te.setflags(write=False)
    first = (series.PEAK_HOUR - ta.start.hour) % day
    return EffectiveTempSeries(ta.start, te, te[first::day])


@dataclasses.dataclass(frozen=True, eq=False)
class WindPowerSeries:
    '''Hourly wind generation in MW for one scenario.'''

    start: datetime.datetime
    values: np.ndarray
    scenario_id: str

    def __len__(self) -> int:
        return len(self.values)

    def at_peak(self) -> np.ndarray:
        first = (series.PEAK_HOUR - self.start.hour) % series.HOURS_PER_DAY
        return self.values[first::series.HOURS_PER_DAY]

    def by_day(self) -> np.ndarray:
        if self.start.hour or len(self) % series.HOURS_PER_DAY:
            raise AlignmentError(f'Wind series starting {self.start} does not span whole days')
        return self.values.reshape(-1, series.HOURS_PER_DAY)

    def window(self, start: datetime.datetime, hours: int, label: t.Optional[datetime.datetime] = None) -> 'WindPowerSeries':
        '''Hours [start, start + hours), relabelled to begin at `label` when given.'''
        i, rest = divmod(start - self.start, series.HOUR)
        if rest or i < 0 or i + hours > len(self):
            raise AlignmentError(f'Wind window {start} +{hours}h outside {self.start} +{len(self)}h')
        return WindPowerSeries(label or start, self.values[i:i + hours], self.scenario_id)


def wind_power(
        cf_onshore: series.HourlySeries,
        cf_offshore: series.HourlySeries,
        scenario: 'scenario.Scenario',
) -> WindPowerSeries:
    if not cf_onshore.same_grid(cf_offshore):
        raise AlignmentError(
            f'Onshore ({cf_onshore.start}, {len(cf_onshore)}h) and offshore '
            f'({cf_offshore.start}, {len(cf_offshore)}h) capacity factors are misaligned')
    values = cf_onshore.values * scenario.cap_onshore + cf_offshore.values * scenario.cap_offshore
    values.setflags(write=False)
    return WindPowerSeries(cf_onshore.start, values, scenario.id)
