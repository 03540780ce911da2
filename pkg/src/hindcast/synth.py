#!/usr/bin/python3
# -*- mode: python; coding: utf-8 -*-

"""Synthetic winters with planted structure, generated from known coefficients."""

import dataclasses
import datetime
import json
import logging
import pathlib
import typing as t

import numpy as np
import scipy.signal

from hindcast import adequacy
from hindcast import common
from hindcast import demand
from hindcast import ingest
from hindcast import series
from hindcast import weather


_logger = logging.getLogger(__name__)


class Error(common.InputError):
    '''Base for errors in the module.'''


class SynthError(Error):
    '''Invalid synthetic data specification.'''


PAPER_COEFFICIENTS = demand.CoefficientSet(
    alpha=46415.16,
    lambda1=-562.47,
    beta1=39.39,
    beta2=-0.31,
    gamma1=125.96,
    omega=(-3301.58, 1664.20, 1720.86, 1576.71, 1436.08, -3616.42),
    phi={
        2009: 6712.74, 2010: 6904.77, 2011: 5798.39, 2012: 5325.14, 2013: 4601.24,
        2014: 4662.72, 2015: 3530.06, 2016: 2647.77, 2017: 1839.40, 2018: 707.50,
    },
    reference_dow=7,
    reference_winter=2019,
)

# Winter weekday load relative to the daily peak, hours 0..23 (IEEE RTS); 100 at 17:00 and 18:00.
WINTER_WEEKDAY_PROFILE = np.array([
    67, 63, 60, 59, 59, 60,
    74, 86, 95, 96, 96, 95,
    95, 95, 93, 94, 99, 100,
    100, 96, 91, 83, 73, 63,
]) / 100.0

COLDEST_DSN = 75
WARMEST_HOUR = 15
TEMP_AR_HOURLY = 0.98
WIND_AR_HOURLY = 0.95
CUT_IN_MS = 3.0
RATED_MS = 12.0
OFFSHORE_WIND_FACTOR = 1.25


@dataclasses.dataclass(frozen=True)
class ColdSpell:
    start: datetime.date
    days: int
    delta_c: float

    def __post_init__(self) -> None:
        if self.days < 1:
            raise SynthError(f'Cold spell length {self.days} must be >= 1 day')

    @property
    def end(self) -> datetime.date:
        '''Last day, inclusive.'''
        return self.start + datetime.timedelta(days=self.days - 1)

    def to_dict(self) -> t.Dict[str, t.Any]:
        return {'start': self.start.isoformat(), 'days': self.days, 'delta_c': self.delta_c}

    @classmethod
    def from_dict(cls, d: t.Mapping[str, t.Any]) -> 'ColdSpell':
        return cls(datetime.date.fromisoformat(d['start']), int(d['days']), float(d['delta_c']))


def parse_cold_spell(s: str) -> ColdSpell:
    '''Parses `YYYY-MM-DD:DAYS:DELTA_C`.'''
    parts = s.split(':')
    try:
        if len(parts) != 3:
            raise ValueError(s)
        return ColdSpell(datetime.date.fromisoformat(parts[0]), int(parts[1]), float(parts[2]))
    except ValueError:
        raise SynthError(f'Invalid cold spell {s!r}, expected YYYY-MM-DD:DAYS:DELTA_C')


def _month_day(s: str) -> t.Tuple[int, int]:
    month, _, day = s.partition('-')
    datetime.date(2000, int(month), int(day))
    return int(month), int(day)


@dataclasses.dataclass(frozen=True)
class ChristmasDip:
    '''Demand suppression added to the residuals of every winter between two month-days.'''

    start: t.Tuple[int, int]
    end: t.Tuple[int, int]
    suppression_mw: float

    def __post_init__(self) -> None:
        if self.suppression_mw < 0:
            raise SynthError(f'Suppression {self.suppression_mw} MW must be >= 0')

    def dates(self, winter_id: int) -> t.Tuple[datetime.date, datetime.date]:
        def in_winter(md: t.Tuple[int, int]) -> datetime.date:
            year = winter_id if md[0] >= 11 else winter_id + 1
            return datetime.date(year, *md)
        first, last = in_winter(self.start), in_winter(self.end)
        if last < first:
            raise SynthError(f'Christmas dip {self.start} .. {self.end} is empty')
        return first, last

    def mask(self, calendar: ingest.WinterCalendar) -> np.ndarray:
        first, last = self.dates(calendar.winter_id)
        return np.array([first <= d <= last for d in calendar.dates])

    def to_dict(self) -> t.Dict[str, t.Any]:
        return {
            'start': '%02d-%02d' % self.start,
            'end': '%02d-%02d' % self.end,
            'suppression_mw': self.suppression_mw,
        }

    @classmethod
    def from_dict(cls, d: t.Mapping[str, t.Any]) -> 'ChristmasDip':
        return cls(_month_day(d['start']), _month_day(d['end']), float(d['suppression_mw']))


def parse_christmas_dip(s: str) -> ChristmasDip:
    '''Parses `MM-DD:MM-DD:SUPPRESSION_MW`.'''
    parts = s.split(':')
    try:
        if len(parts) != 3:
            raise ValueError(s)
        return ChristmasDip(_month_day(parts[0]), _month_day(parts[1]), float(parts[2]))
    except ValueError:
        raise SynthError(f'Invalid Christmas dip {s!r}, expected MM-DD:MM-DD:SUPPRESSION_MW')


@dataclasses.dataclass(frozen=True)
class UnitGroup:
    count: int
    capacity_mw: float
    availability: float

    def units(self, prefix: str) -> t.List[adequacy.GeneratingUnit]:
        return [adequacy.GeneratingUnit(f'{prefix}-{i + 1}', self.capacity_mw, self.availability)
                for i in range(self.count)]


# A GB-like thermal fleet of about 52 GW.
DEFAULT_FLEET: t.Tuple[UnitGroup, ...] = (
    UnitGroup(10, 1200, 0.85),
    UnitGroup(30, 600, 0.90),
    UnitGroup(20, 450, 0.90),
    UnitGroup(24, 250, 0.92),
    UnitGroup(40, 100, 0.95),
    UnitGroup(60, 50, 0.97),
)


@dataclasses.dataclass(frozen=True)
class SynthSpec:
    true_coefficients: demand.CoefficientSet = PAPER_COEFFICIENTS
    residual_sd: float = 640.0
    cold_spell: t.Optional[ColdSpell] = None
    christmas_dip: t.Optional[ChristmasDip] = None
    rng_seed: int = 0
    first_winter: int = 2009
    base_temp_c: float = 6.0
    seasonal_amplitude_c: float = 4.0
    diurnal_amplitude_c: float = 3.0
    temp_noise_sd: float = 2.5
    wind_mean_ms: float = 6.0
    wind_noise_sd: float = 2.5
    cold_spell_wind_factor: float = 0.3
    profile_depth_mw: float = 15000.0
    fleet: t.Tuple[UnitGroup, ...] = DEFAULT_FLEET

    def __post_init__(self) -> None:
        if self.residual_sd < 0:
            raise SynthError(f'Residual SD {self.residual_sd} must be >= 0')
        if self.rng_seed < 0:
            raise SynthError(f'Seed {self.rng_seed} must be >= 0')
        for name in ('temp_noise_sd', 'wind_noise_sd', 'profile_depth_mw', 'wind_mean_ms'):
            if getattr(self, name) < 0:
                raise SynthError(f'{name} must be >= 0')
        if not 0 <= self.cold_spell_wind_factor <= 1:
            raise SynthError(f'Cold spell wind factor {self.cold_spell_wind_factor} outside [0, 1]')

    def winter_ids(self, n_winters: int) -> t.List[int]:
        return list(range(self.first_winter, self.first_winter + n_winters))

    def units(self) -> t.List[adequacy.GeneratingUnit]:
        return [u for i, g in enumerate(self.fleet) for u in g.units(f'G{i + 1}')]

    def to_dict(self) -> t.Dict[str, t.Any]:
        d = {f.name: getattr(self, f.name) for f in dataclasses.fields(self)}
        d['true_coefficients'] = self.true_coefficients.to_dict()
        d['cold_spell'] = self.cold_spell and self.cold_spell.to_dict()
        d['christmas_dip'] = self.christmas_dip and self.christmas_dip.to_dict()
        d['fleet'] = [dataclasses.asdict(g) for g in self.fleet]
        return d

    @classmethod
    def from_dict(cls, d: t.Mapping[str, t.Any]) -> 'SynthSpec':
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise SynthError(f'Unknown synthetic spec keys: {sorted(unknown)}')
        kwargs = dict(d)
        try:
            if 'true_coefficients' in kwargs:
                kwargs['true_coefficients'] = demand.CoefficientSet.from_dict(kwargs['true_coefficients'])
            if kwargs.get('cold_spell') is not None:
                kwargs['cold_spell'] = ColdSpell.from_dict(kwargs['cold_spell'])
            if kwargs.get('christmas_dip') is not None:
                kwargs['christmas_dip'] = ChristmasDip.from_dict(kwargs['christmas_dip'])
            if 'fleet' in kwargs:
                kwargs['fleet'] = tuple(
                    UnitGroup(int(g['count']), float(g['capacity_mw']), float(g['availability']))
                    for g in kwargs['fleet']
                )
            return cls(**kwargs)
        except (KeyError, TypeError, ValueError) as e:
            raise SynthError(f'Malformed synthetic spec: {e!r}')

    def save(self, path: t.Union[str, pathlib.Path]) -> None:
        pathlib.Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + '\n')

    @classmethod
    def load(cls, path: t.Union[str, pathlib.Path]) -> 'SynthSpec':
        path = pathlib.Path(path)
        if not path.is_file():
            raise ingest.MissingFileError(path)
        try:
            return cls.from_dict(json.loads(path.read_text()))
        except json.JSONDecodeError as e:
            raise SynthError(f'{path}: {e}')


def _ar1(rng: np.random.Generator, n: int, rho: float, sd: float) -> np.ndarray:
    '''Stationary AR(1) noise with marginal SD `sd`.'''
    e = rng.standard_normal(n) * sd * np.sqrt(1.0 - rho * rho)
    e[0] /= np.sqrt(1.0 - rho * rho)
    return scipy.signal.lfilter([1.0], [1.0, -rho], e)


def capacity_factor(ws: np.ndarray) -> np.ndarray:
    '''Cubic power curve between cut-in and rated speed.'''
    return np.clip(((ws - CUT_IN_MS) / (RATED_MS - CUT_IN_MS)) ** 3, 0.0, 1.0)


def _spell_mask(spell: t.Optional[ColdSpell], first: datetime.datetime, days: int) -> np.ndarray:
    '''Hourly mask of the cold spell over `days` days from `first`.'''
    mask = np.zeros(days * series.HOURS_PER_DAY, dtype=bool)
    if spell is None:
        return mask
    i = (spell.start - first.date()).days
    lo, hi = max(i, 0), min(i + spell.days, days)
    if lo < hi:
        mask[lo * series.HOURS_PER_DAY:hi * series.HOURS_PER_DAY] = True
    return mask


def _check_cold_spell(spec: SynthSpec, winters: t.Sequence[int]) -> None:
    spell = spec.cold_spell
    if spell is None:
        return
    for w in winters:
        if ingest.winter_start(w) <= spell.start <= ingest.winter_end(w):
            if spell.end > ingest.winter_end(w):
                raise SynthError(f'Cold spell {spell.start}..{spell.end} runs past the end of winter {w}')
            return
    raise SynthError(f'Cold spell starting {spell.start} is outside the synthetic winters {winters[0]}..{winters[-1]}')


def generate_winter(spec: SynthSpec, winter_id: int) -> ingest.WinterDataset:
    rng = np.random.default_rng([spec.rng_seed, winter_id])
    calendar = ingest.calendar_for(winter_id)
    n = len(calendar)
    first, last = ingest.weather_window(winter_id)
    days = (last - first).days + 1
    hours = days * series.HOURS_PER_DAY
    pad = (calendar.start - first).days

    h = np.arange(hours)
    dsn_h = h / series.HOURS_PER_DAY - pad
    hour_of_day = h % series.HOURS_PER_DAY
    spell = _spell_mask(spec.cold_spell, first, days)

    temp = (spec.base_temp_c
            - spec.seasonal_amplitude_c * np.cos(2 * np.pi * (dsn_h - COLDEST_DSN) / 365.0)
            + spec.diurnal_amplitude_c * np.cos(2 * np.pi * (hour_of_day - WARMEST_HOUR) / series.HOURS_PER_DAY)
            + _ar1(rng, hours, TEMP_AR_HOURLY, spec.temp_noise_sd))
    if spec.cold_spell is not None:
        temp[spell] += spec.cold_spell.delta_c

    ws = np.clip(spec.wind_mean_ms + _ar1(rng, hours, WIND_AR_HOURLY, spec.wind_noise_sd), 0.0, None)
    ws[spell] *= spec.cold_spell_wind_factor

    temperature = series.HourlySeries(first, temp, series.UNIT_DEGC)
    wind_speed = series.HourlySeries(first, ws, series.UNIT_MS)
    te = weather.effective_temperature(temperature).daily_te_at_peak[pad:pad + n]
    ws_peak = wind_speed.at_hour(series.PEAK_HOUR)[pad:pad + n]

    c = spec.true_coefficients
    residuals = rng.standard_normal(n) * spec.residual_sd
    if spec.christmas_dip is not None:
        residuals = residuals - spec.christmas_dip.suppression_mw * spec.christmas_dip.mask(calendar)
    peak = demand.evaluate(c, calendar, te, ws_peak, phi=c.phi.get(winter_id, 0.0)) + residuals

    offsets = spec.profile_depth_mw * (WINTER_WEEKDAY_PROFILE - 1.0)
    hourly = (peak[:, None] + offsets[None, :]).ravel()

    _logger.debug('Generated winter %d: %d days, mean peak %.0f MW', winter_id, n, peak.mean())
    return ingest.WinterDataset(
        calendar=calendar,
        temperature=temperature,
        wind_speed=wind_speed,
        cf_onshore=series.HourlySeries(first, capacity_factor(ws), series.UNIT_CF),
        cf_offshore=series.HourlySeries(first, capacity_factor(ws * OFFSHORE_WIND_FACTOR), series.UNIT_CF),
        observed_peak_demand=peak,
        hourly_demand=series.HourlySeries(calendar.start, hourly, series.UNIT_MW),
    )


def generate_synthetic(spec: SynthSpec, n_winters: int) -> t.List[ingest.WinterDataset]:
    '''Winters from `spec.first_winter` on; each draws from its own seeded stream.'''
    if n_winters < 1:
        raise SynthError(f'Number of winters {n_winters} must be >= 1')
    winters = spec.winter_ids(n_winters)
    _check_cold_spell(spec, winters)
    return [generate_winter(spec, w) for w in winters]


def demand_path(out: pathlib.Path, winter_id: int) -> pathlib.Path:
    return out / f'demand_{winter_id}.csv'


def weather_path(out: pathlib.Path, winter_id: int) -> pathlib.Path:
    return out / f'weather_{winter_id}.csv'


FLEET_FILE = 'fleet.csv'
SPEC_FILE = 'synth_spec.json'


def write_synthetic(
        spec: SynthSpec,
        datasets: t.Sequence[ingest.WinterDataset],
        out: t.Union[str, pathlib.Path],
) -> None:
    out = pathlib.Path(out)
    out.mkdir(parents=True, exist_ok=True)
    for d in datasets:
        ingest.write_winter(d, demand_path(out, d.winter_id), weather_path(out, d.winter_id))
    adequacy.write_fleet(spec.units(), out / FLEET_FILE)
    spec.save(out / SPEC_FILE)
    _logger.info('Wrote %d synthetic winters to %s', len(datasets), out)
