#!/usr/bin/python3
# -*- mode: python; coding: utf-8 -*-

"""Winter datasets: calendar covariates, CSV loading and writing."""

import dataclasses
import datetime
import functools
import logging
import pathlib
import typing as t

import numpy as np
import pandas as pd

from hindcast import common
from hindcast import series
from hindcast import weather


_logger = logging.getLogger(__name__)


class Error(common.InputError):
    '''Base for errors in the module.'''


class MissingFileError(Error):
    '''Input file does not exist.'''

    def __init__(self, path: t.Union[str, pathlib.Path]):
        super().__init__(f'No such file: {str(path)!r}')
        self.path = path


class ParseError(Error):
    '''Malformed CSV content.'''


class GapError(Error):
    '''Hourly series has missing hours.'''


class AlignmentError(Error):
    '''Date ranges of inputs do not line up.'''


class CalendarError(Error):
    '''Invalid calendar parameters.'''


class MissingHourlyDemandError(Error):
    '''Operation needs the hourly demand series.'''


class PaddingError(common.ContractError):
    '''Weather shift reaches beyond the padded weather window.'''


DEMAND_COLUMNS = ['timestamp', 'demand_mw']
WEATHER_COLUMNS = ['timestamp', 'temp_c', 'wind_ms', 'cf_onshore', 'cf_offshore']

TIMESTAMP_FORMAT = '%Y-%m-%dT%H:%M:%SZ'

# Weather is carried from 1 Oct to 30 Apr so that shifts of a month either way stay inside the data.
WEATHER_PAD_BEFORE = datetime.timedelta(days=31)
WEATHER_PAD_AFTER = datetime.timedelta(days=30)


def winter_start(winter_id: int) -> datetime.date:
    return datetime.date(winter_id, 11, 1)


def winter_end(winter_id: int) -> datetime.date:
    '''Last day of the winter, inclusive.'''
    return datetime.date(winter_id + 1, 3, 31)


def winter_days(winter_id: int) -> int:
    return (winter_end(winter_id) - winter_start(winter_id)).days + 1


def weather_window(winter_id: int) -> t.Tuple[datetime.datetime, datetime.datetime]:
    '''Padded weather window as [first hour, last hour].'''
    start = _midnight(winter_start(winter_id) - WEATHER_PAD_BEFORE)
    end = _midnight(winter_end(winter_id) + WEATHER_PAD_AFTER) + datetime.timedelta(hours=23)
    return start, end


def _midnight(d: datetime.date) -> datetime.datetime:
    return datetime.datetime(d.year, d.month, d.day)


def wrap_dow(m: t.Any) -> t.Any:
    '''Reduces day-of-week indices into 1..7 (1 is Monday).'''
    return (np.asarray(m) - 1) % 7 + 1


@dataclasses.dataclass(frozen=True, eq=False)
class WinterCalendar:
    winter_id: int
    dates: t.Tuple[datetime.date, ...]
    dow: np.ndarray
    dsn: np.ndarray

    def __len__(self) -> int:
        return len(self.dates)

    @property
    def start(self) -> datetime.datetime:
        return _midnight(self.dates[0])

    def index_of(self, d: datetime.date) -> int:
        i = (d - self.dates[0]).days
        if not 0 <= i < len(self):
            raise CalendarError(f'{d} outside winter {self.winter_id}')
        return i


def make_calendar(winter_id: int, dow_of_nov1: int) -> WinterCalendar:
    if not 1 <= dow_of_nov1 <= 7:
        raise CalendarError(f'Day of week of 1 November must be in 1..7, got {dow_of_nov1}')
    n = winter_days(winter_id)
    first = winter_start(winter_id)
    dates = tuple(first + datetime.timedelta(days=i) for i in range(n))
    dsn = np.arange(n)
    dow = wrap_dow(dow_of_nov1 + dsn)
    dsn.setflags(write=False)
    dow.setflags(write=False)
    return WinterCalendar(winter_id, dates, dow, dsn)


def calendar_for(winter_id: int) -> WinterCalendar:
    '''Calendar with the real weekdays of the winter.'''
    return make_calendar(winter_id, winter_start(winter_id).isoweekday())


@dataclasses.dataclass(frozen=True, eq=False)
class WinterDataset:
    '''One winter of daily records plus the padded hourly weather behind them.'''

    calendar: WinterCalendar
    temperature: series.HourlySeries
    wind_speed: series.HourlySeries
    cf_onshore: series.HourlySeries
    cf_offshore: series.HourlySeries
    observed_peak_demand: np.ndarray
    hourly_demand: t.Optional[series.HourlySeries] = None

    def __post_init__(self) -> None:
        peaks = np.array(self.observed_peak_demand, dtype=np.float64)
        peaks.setflags(write=False)
        object.__setattr__(self, 'observed_peak_demand', peaks)

        w = self.temperature
        for s in (self.wind_speed, self.cf_onshore, self.cf_offshore):
            if not s.same_grid(w):
                raise AlignmentError(f'Weather series misaligned: {s.unit} starts {s.start} ({len(s)}h), '
                                     f'temperature starts {w.start} ({len(w)}h)')
        if w.start.hour or len(w) % series.HOURS_PER_DAY:
            raise AlignmentError(f'Weather {w.start}..{w.end} does not span whole days')
        n = len(self.calendar)
        if not w.covers(self.calendar.start, n * series.HOURS_PER_DAY):
            raise AlignmentError(f'Weather {w.start}..{w.end} does not cover winter {self.calendar.winter_id}')
        if len(peaks) != n:
            raise AlignmentError(f'{len(peaks)} daily peaks for a {n}-day calendar')
        if np.any(~np.isfinite(peaks)) or np.any(peaks <= 0):
            raise series.ValidationError('Observed peak demand must be finite and positive')
        if self.hourly_demand is not None:
            hd = self.hourly_demand
            if hd.start != self.calendar.start or len(hd) != n * series.HOURS_PER_DAY:
                raise AlignmentError(f'Hourly demand {hd.start}..{hd.end} does not match winter '
                                     f'{self.calendar.winter_id}')

    @property
    def winter_id(self) -> int:
        return self.calendar.winter_id

    def __len__(self) -> int:
        return len(self.calendar)

    @functools.cached_property
    def pad_before(self) -> int:
        '''Whole days of weather before 1 November.'''
        return (self.calendar.start - self.temperature.start).days

    @functools.cached_property
    def pad_after(self) -> int:
        return len(self.temperature) // series.HOURS_PER_DAY - self.pad_before - len(self)

    @functools.cached_property
    def te(self) -> weather.EffectiveTempSeries:
        return weather.effective_temperature(self.temperature)

    @functools.cached_property
    def te_padded(self) -> np.ndarray:
        '''Daily 18:00 effective temperature over the whole padded window.'''
        return self.te.daily_te_at_peak

    @functools.cached_property
    def ws_padded(self) -> np.ndarray:
        return self.wind_speed.at_hour(series.PEAK_HOUR)

    @property
    def te_at_peak(self) -> np.ndarray:
        return self.te_shifted(0)

    @property
    def ws_at_peak(self) -> np.ndarray:
        return self.ws_shifted(0)

    def check_shift(self, tau: int) -> None:
        if -tau > self.pad_before or tau > self.pad_after:
            need = f'{-tau} days before 1 Nov' if tau < 0 else f'{tau} days after 31 Mar'
            raise PaddingError(f'Weather shift {tau} needs {need}; winter {self.winter_id} has '
                               f'{self.pad_before} before and {self.pad_after} after')

    def te_shifted(self, tau: int) -> np.ndarray:
        '''TE at 18:00 of day t + tau for each date t of the winter.'''
        self.check_shift(tau)
        i = self.pad_before + tau
        return self.te_padded[i:i + len(self)]

    def ws_shifted(self, tau: int) -> np.ndarray:
        self.check_shift(tau)
        i = self.pad_before + tau
        return self.ws_padded[i:i + len(self)]

    def profile_offsets(self) -> np.ndarray:
        '''Hourly demand minus the day's peak, shape (days, 24); never positive.'''
        if self.hourly_demand is None:
            raise MissingHourlyDemandError(f'Winter {self.winter_id} has no hourly demand')
        return self.hourly_demand.by_day() - self.observed_peak_demand[:, None]


def _read_csv(path: t.Union[str, pathlib.Path], columns: t.List[str]) -> t.Tuple[pd.DatetimeIndex, t.Dict[str, np.ndarray]]:
    path = pathlib.Path(path)
    if not path.is_file():
        raise MissingFileError(path)
    try:
        df = pd.read_csv(path, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError:
        raise ParseError(f'{path}: empty file')
    except pd.errors.ParserError as e:
        raise ParseError(f'{path}: malformed CSV: {e}')
    except UnicodeDecodeError as e:
        raise ParseError(f'{path}: not UTF-8 text: {e}')
    if list(df.columns) != columns:
        raise ParseError(f'{path}: header {",".join(df.columns)!r}, expected {",".join(columns)!r}')
    if df.empty:
        raise ParseError(f'{path}: no data rows')

    stamps = pd.to_datetime(df['timestamp'], utc=True, errors='coerce', format='ISO8601')
    bad = np.flatnonzero(stamps.isna().to_numpy())
    if bad.size:
        row = int(bad[0])
        raise ParseError(f'{path}: row {row + 2}, column timestamp: {df["timestamp"].iloc[row]!r} is not a timestamp')
    index = pd.DatetimeIndex(stamps).tz_convert(None)

    values = {}
    for col in columns[1:]:
        raw = df[col].to_numpy()
        try:
            values[col] = np.array([float(v) for v in raw])
        except ValueError:
            for row, v in enumerate(raw):
                try:
                    float(v)
                except ValueError:
                    raise ParseError(f'{path}: row {row + 2}, column {col}: {v!r} is not a number')
        bad = np.flatnonzero(~np.isfinite(values[col]))
        if bad.size:
            row = int(bad[0])
            raise ParseError(f'{path}: row {row + 2}, column {col}: {raw[row]!r} is not finite')

    order = np.argsort(index.to_numpy(), kind='stable')
    index = index[order]
    values = {k: v[order] for k, v in values.items()}
    dup = index.duplicated()
    if dup.any():
        raise ParseError(f'{path}: duplicate timestamp {index[dup][0].isoformat()}')
    expected = pd.date_range(index[0], index[-1], freq='h')
    missing = expected.difference(index)
    if len(missing):
        raise GapError(f'{path}: missing hour {missing[0].strftime(TIMESTAMP_FORMAT)}')
    if len(index) != len(expected):
        raise ParseError(f'{path}: timestamps are not on the hourly grid')
    return index, values


def load_winter(
        demand_file: t.Union[str, pathlib.Path],
        weather_file: t.Union[str, pathlib.Path],
        winter_id: int,
) -> WinterDataset:
    '''Loads one winter from the demand and weather CSV files.'''

    calendar = calendar_for(winter_id)
    n = len(calendar)
    first = calendar.start
    last = first + datetime.timedelta(hours=n * series.HOURS_PER_DAY - 1)

    d_index, d_values = _read_csv(demand_file, DEMAND_COLUMNS)
    if d_index[0] != first or d_index[-1] != last:
        raise AlignmentError(f'{demand_file}: covers {d_index[0]}..{d_index[-1]}, '
                             f'winter {winter_id} needs {first}..{last}')

    w_index, w_values = _read_csv(weather_file, WEATHER_COLUMNS)
    w_first, w_last = w_index[0].to_pydatetime(), w_index[-1].to_pydatetime()
    if w_first > first or w_last < last:
        raise AlignmentError(f'{weather_file}: covers {w_first}..{w_last}, '
                             f'winter {winter_id} needs at least {first}..{last}')
    if w_first.hour != 0 or w_last.hour != 23:
        raise AlignmentError(f'{weather_file}: weather must span whole days, got {w_first}..{w_last}')

    hourly_demand = series.HourlySeries(first, d_values['demand_mw'], series.UNIT_MW)
    data = WinterDataset(
        calendar=calendar,
        temperature=series.HourlySeries(w_first, w_values['temp_c'], series.UNIT_DEGC),
        wind_speed=series.HourlySeries(w_first, w_values['wind_ms'], series.UNIT_MS),
        cf_onshore=series.HourlySeries(w_first, w_values['cf_onshore'], series.UNIT_CF),
        cf_offshore=series.HourlySeries(w_first, w_values['cf_offshore'], series.UNIT_CF),
        observed_peak_demand=hourly_demand.by_day().max(axis=1),
        hourly_demand=hourly_demand,
    )
    _logger.debug('Loaded winter %d: %d days, weather padding %d/%d days',
                  winter_id, n, data.pad_before, data.pad_after)
    return data


def _fmt(values: np.ndarray) -> t.List[str]:
    return [repr(float(v)) for v in values]


def _stamps(s: series.HourlySeries) -> t.List[str]:
    return [ts.strftime(TIMESTAMP_FORMAT) for ts in s.index]


def write_winter(
        data: WinterDataset,
        demand_file: t.Union[str, pathlib.Path],
        weather_file: t.Union[str, pathlib.Path],
) -> None:
    if data.hourly_demand is None:
        raise MissingHourlyDemandError(f'Winter {data.winter_id} has no hourly demand to write')
    demand = pd.DataFrame({
        'timestamp': _stamps(data.hourly_demand),
        'demand_mw': _fmt(data.hourly_demand.values),
    })
    demand.to_csv(demand_file, index=False, lineterminator='\n')
    weather_df = pd.DataFrame({
        'timestamp': _stamps(data.temperature),
        'temp_c': _fmt(data.temperature.values),
        'wind_ms': _fmt(data.wind_speed.values),
        'cf_onshore': _fmt(data.cf_onshore.values),
        'cf_offshore': _fmt(data.cf_offshore.values),
    })
    weather_df.to_csv(weather_file, index=False, lineterminator='\n')


WINTER_FIELD = '{winter}'


def load_winters(
        demand_template: str,
        weather_template: str,
        winter_ids: t.Iterable[int],
) -> t.List[WinterDataset]:
    '''Loads every winter; file names come from templates with a `{winter}` field.'''
    for name, template in (('demand', demand_template), ('weather', weather_template)):
        if WINTER_FIELD not in template:
            raise Error(f'{name} path {template!r} must contain {WINTER_FIELD}')
    winters = [
        load_winter(demand_template.replace(WINTER_FIELD, str(w)), weather_template.replace(WINTER_FIELD, str(w)), w)
        for w in winter_ids
    ]
    if not winters:
        raise Error('No winters to load')
    _logger.info('Loaded %d winters %d..%d', len(winters), winters[0].winter_id, winters[-1].winter_id)
    return winters
