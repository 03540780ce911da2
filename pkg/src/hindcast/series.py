#!/usr/bin/python3
# -*- mode: python; coding: utf-8 -*-

"""Hourly time series on a fixed UTC grid."""

import dataclasses
import datetime
import functools
import logging
import typing as t

import numpy as np
import pandas as pd

from hindcast import common


_logger = logging.getLogger(__name__)


class Error(common.InputError):
    '''Base for errors in the module.'''


class ValidationError(Error):
    '''Series violates its invariants.'''


HOURS_PER_DAY = 24
PEAK_HOUR = 18
HOUR = datetime.timedelta(hours=1)

UNIT_DEGC = 'degC'
UNIT_MS = 'm/s'
UNIT_MW = 'MW'
UNIT_CF = 'cf'
UNITS = (UNIT_DEGC, UNIT_MS, UNIT_MW, UNIT_CF)


def _frozen(values: t.Any) -> np.ndarray:
    a = np.array(values, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclasses.dataclass(frozen=True, eq=False)
class HourlySeries:
    '''Contiguous hourly samples starting at `start` (naive UTC).'''

    start: datetime.datetime
    values: np.ndarray
    unit: str

    def __post_init__(self) -> None:
        object.__setattr__(self, 'values', _frozen(self.values))
        if self.unit not in UNITS:
            raise ValidationError(f'Unknown unit {self.unit!r}')
        if self.values.ndim != 1:
            raise ValidationError('Hourly series must be one-dimensional')
        if len(self.values) < HOURS_PER_DAY:
            raise ValidationError(f'Series too short: {len(self.values)} hours, need at least {HOURS_PER_DAY}')
        if self.start.minute or self.start.second or self.start.microsecond:
            raise ValidationError(f'Series start {self.start} is not on the hour')
        bad = np.flatnonzero(~np.isfinite(self.values))
        if bad.size:
            raise ValidationError(f'Non-finite {self.unit} value at {self.timestamp(int(bad[0]))}')
        if self.unit == UNIT_CF:
            out = np.flatnonzero((self.values < 0.0) | (self.values > 1.0))
            if out.size:
                i = int(out[0])
                raise ValidationError(f'Capacity factor {self.values[i]!r} outside [0, 1] at {self.timestamp(i)}')

    def __len__(self) -> int:
        return len(self.values)

    @property
    def end(self) -> datetime.datetime:
        '''Exclusive end: the hour after the last sample.'''
        return self.start + len(self) * HOUR

    def timestamp(self, i: int) -> datetime.datetime:
        return self.start + i * HOUR

    @functools.cached_property
    def index(self) -> pd.DatetimeIndex:
        return pd.date_range(self.start, periods=len(self), freq='h')

    def offset_of(self, ts: datetime.datetime) -> int:
        delta = ts - self.start
        hours, rest = divmod(delta, HOUR)
        if rest:
            raise ValidationError(f'{ts} is not on the hourly grid of {self.start}')
        return int(hours)

    def covers(self, start: datetime.datetime, hours: int) -> bool:
        i = self.offset_of(start)
        return i >= 0 and i + hours <= len(self)

    def window(self, start: datetime.datetime, hours: int) -> 'HourlySeries':
        i = self.offset_of(start)
        if i < 0 or i + hours > len(self):
            raise ValidationError(f'Window {start} +{hours}h outside series {self.start}..{self.end}')
        return HourlySeries(start, self.values[i:i + hours], self.unit)

    def at_hour(self, hour: int = PEAK_HOUR) -> np.ndarray:
        '''One value per calendar day: the sample at `hour` o'clock.'''
        first = (hour - self.start.hour) % HOURS_PER_DAY
        return self.values[first::HOURS_PER_DAY]

    def by_day(self) -> np.ndarray:
        '''Samples reshaped to (days, 24); the series must span whole days.'''
        if self.start.hour or len(self) % HOURS_PER_DAY:
            raise ValidationError(f'Series {self.start}..{self.end} does not span whole days')
        return self.values.reshape(-1, HOURS_PER_DAY)

    def same_grid(self, other: 'HourlySeries') -> bool:
        return self.start == other.start and len(self) == len(other)
