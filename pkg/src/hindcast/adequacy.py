#!/usr/bin/python3
# -*- mode: python; coding: utf-8 -*-

"""Available conventional capacity and shortfall risk indices."""

import dataclasses
import logging
import math
import pathlib
import typing as t

import numpy as np
import pandas as pd
import scipy.signal
import scipy.stats

from hindcast import common
from hindcast import demand
from hindcast import ingest
from hindcast import parallel
from hindcast import scenario
from hindcast import weather


_logger = logging.getLogger(__name__)


class Error(common.InputError):
    '''Base for errors in the module.'''


class FleetError(Error):
    '''Invalid generating unit or fleet file.'''


class ModeMismatchError(common.ContractError):
    '''Capacity distribution does not match the residual mode.'''


FLEET_COLUMNS = ['unit_id', 'capacity_mw', 'availability_prob']

TRUNCATE_SIGMAS = 6.0
ROUNDING_WARN_MW = 0.25
PMF_TOLERANCE = 1e-9


@dataclasses.dataclass(frozen=True)
class GeneratingUnit:
    '''Two-state unit: full capacity with probability `availability`, else nothing.'''

    id: str
    capacity: float
    availability: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.capacity) or self.capacity <= 0:
            raise FleetError(f'Unit {self.id}: capacity {self.capacity} must be > 0')
        if not 0.0 <= self.availability <= 1.0:
            raise FleetError(f'Unit {self.id}: availability {self.availability} outside [0, 1]')


def load_fleet(path: t.Union[str, pathlib.Path]) -> t.List[GeneratingUnit]:
    path = pathlib.Path(path)
    if not path.is_file():
        raise ingest.MissingFileError(path)
    try:
        df = pd.read_csv(path, dtype={'unit_id': str})
    except pd.errors.EmptyDataError:
        raise FleetError(f'{path}: empty file')
    except pd.errors.ParserError as e:
        raise FleetError(f'{path}: malformed CSV: {e}')
    except UnicodeDecodeError as e:
        raise FleetError(f'{path}: not UTF-8 text: {e}')
    if list(df.columns) != FLEET_COLUMNS:
        raise FleetError(f'{path}: header {",".join(df.columns)!r}, expected {",".join(FLEET_COLUMNS)!r}')
    units = []
    for row, (uid, cap, avail) in enumerate(df.itertuples(index=False), start=2):
        try:
            units.append(GeneratingUnit(str(uid), float(cap), float(avail)))
        except (TypeError, ValueError):
            raise ingest.ParseError(f'{path}: row {row}: non-numeric capacity or availability')
        except FleetError as e:
            raise FleetError(f'{path}: row {row}: {e}')
    if not units:
        raise FleetError(f'{path}: empty fleet')
    ids = [u.id for u in units]
    if len(set(ids)) != len(ids):
        raise FleetError(f'{path}: duplicate unit ids')
    return units


def write_fleet(units: t.Iterable[GeneratingUnit], path: t.Union[str, pathlib.Path]) -> None:
    df = pd.DataFrame(
        [(u.id, repr(float(u.capacity)), repr(float(u.availability))) for u in units],
        columns=FLEET_COLUMNS,
    )
    df.to_csv(path, index=False, lineterminator='\n')


@dataclasses.dataclass(frozen=True, eq=False)
class CapacityDistribution:
    '''PMF over capacity levels (origin + i) * grid_step, for i over the pmf.

    `sigma` is the SD of the Gaussian term convolved in, 0 for the pure
    fleet distribution.  A smeared level carries the mass of
    [level, level + grid_step).
    '''

    grid_step: int
    pmf: np.ndarray
    origin: int = 0
    sigma: float = 0.0

    def __post_init__(self) -> None:
        pmf = np.array(self.pmf, dtype=np.float64)
        pmf.setflags(write=False)
        object.__setattr__(self, 'pmf', pmf)
        common.check(self.grid_step >= 1, f'Grid step {self.grid_step} must be a positive integer')
        common.check(pmf.ndim == 1 and len(pmf) > 0, 'PMF must be a non-empty vector')
        common.check(np.all(pmf >= 0), 'PMF entries must be >= 0')
        common.check(abs(pmf.sum() - 1.0) <= PMF_TOLERANCE, f'PMF sums to {pmf.sum()!r}, expected 1')
        common.check(self.sigma >= 0, f'Smearing SD {self.sigma} must be >= 0')

    def __len__(self) -> int:
        return len(self.pmf)

    @property
    def levels(self) -> np.ndarray:
        return (self.origin + np.arange(len(self.pmf))) * float(self.grid_step)

    @property
    def mean(self) -> float:
        return float(self.pmf @ self.levels)

    @property
    def variance(self) -> float:
        return float(self.pmf @ (self.levels - self.mean) ** 2)

    def lolp(self, net_demand: t.Any) -> t.Any:
        '''P(X < net_demand), elementwise over an array of net demands.'''
        levels = self.levels
        below = np.concatenate([[0.0], np.cumsum(self.pmf)])
        below = np.minimum(below, 1.0)
        if self.sigma == 0:
            p = below[np.searchsorted(levels, net_demand, side='left')]
        else:
            # Exact at grid levels; linear in between.
            xp = np.append(levels, levels[-1] + self.grid_step)
            p = np.interp(net_demand, xp, below, left=0.0, right=1.0)
        if np.ndim(p) == 0:
            return float(p)
        return p


def _grid_units(capacity: float, grid_step: int, unit_id: str) -> int:
    c = int(round(capacity / grid_step))
    if c == 0:
        raise FleetError(f'Unit {unit_id}: capacity {capacity} MW rounds to zero on a {grid_step} MW grid')
    if abs(c * grid_step - capacity) > ROUNDING_WARN_MW:
        _logger.warning('Unit %s: capacity %.3f MW rounded to %d MW', unit_id, capacity, c * grid_step)
    return c


def convolve_fleet(units: t.Sequence[GeneratingUnit], grid_step: int = 1) -> CapacityDistribution:
    '''Exact PMF of the total available capacity of independent two-state units.'''
    if not units:
        raise FleetError('Empty fleet')
    if grid_step < 1:
        raise FleetError(f'Grid step {grid_step} must be a positive integer')
    pmf = np.array([1.0])
    for u in units:
        c = _grid_units(u.capacity, grid_step, u.id)
        out = np.zeros(len(pmf) + c)
        out[:len(pmf)] += pmf * (1.0 - u.availability)
        out[c:] += pmf * u.availability
        pmf = out
    _logger.debug('Convolved %d units: %d levels of %d MW', len(units), len(pmf), grid_step)
    return CapacityDistribution(grid_step, pmf)


def _gaussian_kernel(sigma: float, grid_step: int) -> t.Tuple[np.ndarray, int]:
    '''Mass of [j, j + 1) * grid_step under N(0, sigma^2) for j from -J to J - 1.'''
    half = int(math.ceil(TRUNCATE_SIGMAS * sigma / grid_step))
    edges = np.arange(-half, half + 1) * float(grid_step)
    kernel = np.diff(scipy.stats.norm.cdf(edges, scale=sigma))
    return kernel / kernel.sum(), -half


def smear_gaussian(dist: CapacityDistribution, sigma: float) -> CapacityDistribution:
    '''Distribution of X + mu with mu ~ N(0, sigma^2), truncated at 6 sigma.'''
    common.check(sigma >= 0, f'Smearing SD {sigma} must be >= 0')
    if sigma == 0:
        return dist
    common.check(dist.sigma == 0, 'Distribution is already smeared')
    kernel, shift = _gaussian_kernel(sigma, dist.grid_step)
    pmf = scipy.signal.convolve(dist.pmf, kernel, method='auto')
    pmf = np.clip(pmf, 0.0, None)
    pmf /= pmf.sum()
    _logger.debug('Smeared capacity distribution with SD %.1f MW over %d levels', sigma, len(kernel))
    return CapacityDistribution(dist.grid_step, pmf, origin=dist.origin + shift, sigma=float(sigma))


def lolp_day(dist: CapacityDistribution, net_demand: float) -> float:
    '''P(X < net_demand) with strict inequality.'''
    return float(dist.lolp(float(net_demand)))


@dataclasses.dataclass(frozen=True, eq=False)
class RiskResult:
    scenario_id: str
    winter_id: int
    shift: scenario.ShiftSpec
    mode: scenario.ResidualMode
    per_day_lolp: np.ndarray
    lole: float
    per_day_lolh: t.Optional[np.ndarray] = None
    lolh: t.Optional[float] = None

    @property
    def key(self) -> t.Tuple[str, int, int, int]:
        return self.scenario_id, self.winter_id, self.shift.tau, self.shift.k

    def metric(self, name: str) -> float:
        if name == 'lole':
            return self.lole
        if name == 'lolh':
            if self.lolh is None:
                raise Error(f'No LOLH computed for {self.key}')
            return self.lolh
        raise Error(f'Unknown risk metric {name!r}')


def _check_mode(dist: CapacityDistribution, sd: scenario.ScenarioDemand, mode: scenario.ResidualMode) -> None:
    if mode is scenario.ResidualMode.EMPIRICAL:
        if dist.sigma != 0:
            raise ModeMismatchError(f'Empirical demand paired with a distribution smeared by {dist.sigma} MW')
    elif not math.isclose(dist.sigma, sd.residual_sd, rel_tol=1e-9, abs_tol=1e-9):
        raise ModeMismatchError(f'Stochastic demand with residual SD {sd.residual_sd} MW paired with a '
                                f'distribution smeared by {dist.sigma} MW')


def lole(
        dist: CapacityDistribution,
        sd: scenario.ScenarioDemand,
        wind: weather.WindPowerSeries,
        mode: scenario.ResidualMode,
) -> RiskResult:
    '''Sum over days of P(X < demand - wind) at the daily peak.'''
    _check_mode(dist, sd, mode)
    w = wind.at_peak()
    common.check(len(w) == len(sd), f'{len(w)} days of wind for {len(sd)} days of demand')
    lolp = dist.lolp(sd.demand(mode) - w)
    lolp.setflags(write=False)
    return RiskResult(sd.scenario_id, sd.winter_id, sd.shift, mode, lolp, float(lolp.sum()))


def lolh(
        dist: CapacityDistribution,
        sd: scenario.ScenarioDemand,
        data: ingest.WinterDataset,
        wind_hourly: weather.WindPowerSeries,
        mode: scenario.ResidualMode,
) -> RiskResult:
    '''Hourly shortfall expectation: each day's peak plus the historic within-day offsets.'''
    _check_mode(dist, sd, mode)
    offsets = data.profile_offsets()
    wind_by_day = wind_hourly.by_day()
    common.check(wind_by_day.shape == offsets.shape,
                 f'Hourly wind of {wind_by_day.shape[0]} days for {offsets.shape[0]} days of demand')
    daily = sd.demand(mode)
    per_hour = dist.lolp(daily[:, None] + offsets - wind_by_day)
    per_day_lolh = per_hour.sum(axis=1)
    per_day_lolh.setflags(write=False)
    daily_lolp = dist.lolp(daily - wind_hourly.at_peak())
    daily_lolp.setflags(write=False)
    return RiskResult(sd.scenario_id, sd.winter_id, sd.shift, mode, daily_lolp, float(daily_lolp.sum()),
                      per_day_lolh, float(per_day_lolh.sum()))


@dataclasses.dataclass(frozen=True, eq=False)
class RiskContext:
    '''Everything needed to evaluate one (scenario, winter, shift) cell.'''

    fit: demand.RegressionFit
    winters: t.Sequence[ingest.WinterDataset]
    dist: CapacityDistribution
    mode: scenario.ResidualMode
    hourly: bool = False

    def __post_init__(self) -> None:
        if self.hourly:
            for d in self.winters:
                if d.hourly_demand is None:
                    raise ingest.MissingHourlyDemandError(f'Winter {d.winter_id} has no hourly demand for LOLH')

    @classmethod
    def build(
            cls,
            fit: demand.RegressionFit,
            winters: t.Sequence[ingest.WinterDataset],
            units: t.Sequence[GeneratingUnit],
            mode: scenario.ResidualMode,
            grid_step: int = 1,
            hourly: bool = False,
    ) -> 'RiskContext':
        dist = convolve_fleet(units, grid_step)
        if mode is scenario.ResidualMode.STOCHASTIC:
            dist = smear_gaussian(dist, fit.residual_sd)
        return cls(fit, tuple(winters), dist, mode, hourly)

    @property
    def winter_ids(self) -> t.List[int]:
        return [d.winter_id for d in self.winters]

    def scenario_demand(
            self,
            scen: scenario.Scenario,
            index: int,
            shift: scenario.ShiftSpec,
    ) -> t.Tuple[scenario.ScenarioDemand, weather.WindPowerSeries]:
        data = self.winters[index]
        sd = scenario.map_to_scenario(self.fit, data, scen)
        sd, wind = scenario.shift_weather(sd, data, scen, shift.tau)
        return scenario.shift_dow(sd, data.calendar, shift.k), wind

    def cell(self, scen: scenario.Scenario, index: int, shift: scenario.ShiftSpec) -> RiskResult:
        data = self.winters[index]
        sd, wind = self.scenario_demand(scen, index, shift)
        if self.hourly:
            return lolh(self.dist, sd, data, wind, self.mode)
        return lole(self.dist, sd, wind, self.mode)

    def mean_metric(
            self,
            scen: scenario.Scenario,
            metric: str = 'lole',
            shifts: t.Sequence[scenario.ShiftSpec] = (scenario.ShiftSpec(),),
    ) -> float:
        '''Equal-weight mean over winters and shifts.'''
        cells = [(i, s) for i in range(len(self.winters)) for s in shifts]
        results = parallel.map_cells(lambda c: self.cell(scen, c[0], c[1]), cells)
        return float(np.mean([r.metric(metric) for r in results]))

