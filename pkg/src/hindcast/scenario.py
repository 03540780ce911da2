#!/usr/bin/python3
# -*- mode: python; coding: utf-8 -*-

"""Mapping of fitted demand onto target system scenarios, and shift transforms."""

import dataclasses
import enum
import json
import logging
import pathlib
import typing as t

import numpy as np

from hindcast import common
from hindcast import demand
from hindcast import ingest
from hindcast import series
from hindcast import weather


_logger = logging.getLogger(__name__)


class Error(common.InputError):
    '''Base for errors in the module.'''


class ScenarioError(Error):
    '''Invalid scenario definition.'''


class ShiftError(Error):
    '''Invalid shift parameters.'''


class UnresolvedYearEffectError(common.ContractError):
    '''Scenario year effect has not been calibrated or given.'''


GW = 1000.0
CALIBRATE = 'calibrate'

MAX_DOW_SHIFT = 3


class ResidualMode(enum.Enum):
    EMPIRICAL = 'empirical'
    STOCHASTIC = 'stochastic'


@dataclasses.dataclass(frozen=True)
class Scenario:
    '''Target system in MW units; `phi_p` is None until calibrated.'''

    id: str
    lambda_p: float
    gamma_p: float
    phi_p: t.Optional[float]
    cap_onshore: float
    cap_offshore: float

    def __post_init__(self) -> None:
        if not self.id:
            raise ScenarioError('Scenario id must not be empty')
        if self.cap_onshore < 0 or self.cap_offshore < 0:
            raise ScenarioError(f'Scenario {self.id}: wind capacities must be >= 0')
        if self.lambda_p > 0:
            raise ScenarioError(f'Scenario {self.id}: temperature sensitivity {self.lambda_p} must be <= 0')
        values = [self.lambda_p, self.gamma_p, self.cap_onshore, self.cap_offshore]
        if self.phi_p is not None:
            values.append(self.phi_p)
        if not np.all(np.isfinite(values)):
            raise ScenarioError(f'Scenario {self.id}: parameters must be finite')

    @property
    def cap_total(self) -> float:
        return self.cap_onshore + self.cap_offshore

    @property
    def resolved(self) -> bool:
        return self.phi_p is not None

    def with_phi(self, phi: float) -> 'Scenario':
        return dataclasses.replace(self, phi_p=float(phi))

    def year_effect(self) -> float:
        if self.phi_p is None:
            raise UnresolvedYearEffectError(f'Scenario {self.id}: year effect is not calibrated')
        return self.phi_p

    def to_dict(self) -> t.Dict[str, t.Any]:
        return {
            'id': self.id,
            'lambda_gw_per_degc': self.lambda_p / GW,
            'gamma_gw_per_ms': self.gamma_p / GW,
            'onshore_gw': self.cap_onshore / GW,
            'offshore_gw': self.cap_offshore / GW,
            'phi_mw': CALIBRATE if self.phi_p is None else self.phi_p,
        }

    @classmethod
    def from_dict(cls, d: t.Mapping[str, t.Any]) -> 'Scenario':
        try:
            phi = d.get('phi_mw', CALIBRATE)
            if phi == CALIBRATE:
                phi = None
            elif isinstance(phi, (int, float)) and not isinstance(phi, bool):
                phi = float(phi)
            else:
                raise ScenarioError(f'Scenario {d.get("id")!r}: phi_mw must be a number or {CALIBRATE!r}')
            return cls(
                id=str(d['id']),
                lambda_p=float(d['lambda_gw_per_degc']) * GW,
                gamma_p=float(d['gamma_gw_per_ms']) * GW,
                phi_p=phi,
                cap_onshore=float(d['onshore_gw']) * GW,
                cap_offshore=float(d['offshore_gw']) * GW,
            )
        except KeyError as e:
            raise ScenarioError(f'Scenario {d.get("id")!r}: missing key {e.args[0]!r}')
        except (TypeError, ValueError) as e:
            raise ScenarioError(f'Scenario {d.get("id")!r}: {e}')


def _table1(id: str, lambda_gw: float, gamma_gw: float, offshore_gw: float, onshore_gw: float) -> Scenario:
    return Scenario(id, lambda_gw * GW, gamma_gw * GW, None, onshore_gw * GW, offshore_gw * GW)


# Future GB-like systems: rising heat electrification steepens the temperature response.
TABLE1: t.Tuple[Scenario, ...] = (
    _table1('S1', -0.6, 0.125, 16, 14),
    _table1('S2', -0.6, 0.125, 40, 25),
    _table1('S3', -1.2, 0.25, 40, 25),
    _table1('S4', -2.0, 0.42, 40, 25),
)


def load_scenarios(path: t.Union[str, pathlib.Path]) -> t.List[Scenario]:
    '''Reads scenarios from a JSON list (or an object with a "scenarios" list) in GW units.'''
    path = pathlib.Path(path)
    if not path.is_file():
        raise ingest.MissingFileError(path)
    try:
        obj = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise ScenarioError(f'{path}: {e}')
    if isinstance(obj, dict):
        obj = obj.get('scenarios')
    if not isinstance(obj, list) or not obj:
        raise ScenarioError(f'{path}: expected a non-empty list of scenarios')
    scenarios = [Scenario.from_dict(d) for d in obj]
    ids = [s.id for s in scenarios]
    if len(set(ids)) != len(ids):
        raise ScenarioError(f'{path}: duplicate scenario ids in {ids}')
    return scenarios


def save_scenarios(scenarios: t.Iterable[Scenario], path: t.Union[str, pathlib.Path]) -> None:
    doc = {'scenarios': [s.to_dict() for s in scenarios]}
    pathlib.Path(path).write_text(json.dumps(doc, indent=2) + '\n')


def wrap_k(k: int) -> int:
    '''Reduces a day-of-week shift into -3..3; k and k +- 7 are the same shift.'''
    return (k + MAX_DOW_SHIFT) % 7 - MAX_DOW_SHIFT


@dataclasses.dataclass(frozen=True, order=True)
class ShiftSpec:
    tau: int = 0
    k: int = 0

    def __post_init__(self) -> None:
        if not -MAX_DOW_SHIFT <= self.k <= MAX_DOW_SHIFT:
            raise ShiftError(f'Day-of-week shift {self.k} outside -{MAX_DOW_SHIFT}..{MAX_DOW_SHIFT}')

    @property
    def identity(self) -> bool:
        return self.tau == 0 and self.k == 0


@dataclasses.dataclass(frozen=True, eq=False)
class ScenarioDemand:
    '''Daily peak demand for one scenario and winter under a (tau, k) shift.

    Both adjustments are measured against the unshifted mapping, so shifts
    compose by adding their parameters and an inverse shift restores the
    base exactly.  Residuals stay attached to their dates.
    '''

    scenario_id: str
    winter_id: int
    base_central: np.ndarray
    residuals: np.ndarray
    residual_sd: float
    omega: np.ndarray
    dow_adjust: np.ndarray
    weather_adjust: np.ndarray
    shift: ShiftSpec = ShiftSpec()

    def __len__(self) -> int:
        return len(self.base_central)

    @property
    def central(self) -> np.ndarray:
        return self.base_central + self.dow_adjust + self.weather_adjust

    @property
    def empirical(self) -> np.ndarray:
        return self.central + self.residuals

    def demand(self, mode: ResidualMode) -> np.ndarray:
        if mode is ResidualMode.EMPIRICAL:
            return self.empirical
        return self.central


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


def map_to_scenario(fit: demand.RegressionFit, data: ingest.WinterDataset, scenario: Scenario) -> ScenarioDemand:
    '''Central estimate with the scenario's weather sensitivities and year effect, plus the fit residuals.'''
    phi = scenario.year_effect()
    central = demand.evaluate(fit.coefficients, data.calendar, data.te_at_peak, data.ws_at_peak,
                              lambda_=scenario.lambda_p, gamma=scenario.gamma_p, phi=phi)
    zeros = _frozen(np.zeros(len(data)))
    return ScenarioDemand(
        scenario_id=scenario.id,
        winter_id=data.winter_id,
        base_central=_frozen(central),
        residuals=fit.residuals_for(data.calendar),
        residual_sd=fit.residual_sd,
        omega=_frozen(fit.coefficients.omega_full()),
        dow_adjust=zeros,
        weather_adjust=zeros,
    )


def empirical_demand(fit: demand.RegressionFit, data: ingest.WinterDataset, scenario: Scenario) -> np.ndarray:
    '''Historic peak demand with the historic weather and year terms swapped for the scenario's.'''
    c = fit.coefficients
    phi = scenario.year_effect()
    return (data.observed_peak_demand
            + (scenario.lambda_p - c.lambda1) * data.te_at_peak
            + (scenario.gamma_p - c.gamma1) * data.ws_at_peak
            + (phi - c.year_effect(data.winter_id)))


def shift_dow(sd: ScenarioDemand, calendar: ingest.WinterCalendar, k: int) -> ScenarioDemand:
    '''Swaps each date's day-of-week effect for that of the day k days later in the week.'''
    common.check(calendar.winter_id == sd.winter_id,
                 f'Calendar of winter {calendar.winter_id} for demand of winter {sd.winter_id}')
    common.check(len(calendar) == len(sd), f'{len(calendar)}-day calendar for {len(sd)} days of demand')
    k_total = wrap_k(sd.shift.k + k)
    m = calendar.dow
    dow_adjust = sd.omega[ingest.wrap_dow(m + k_total) - 1] - sd.omega[m - 1]
    return dataclasses.replace(sd, dow_adjust=_frozen(dow_adjust), shift=ShiftSpec(sd.shift.tau, k_total))


def calendar_wind(
        wind: weather.WindPowerSeries,
        data: ingest.WinterDataset,
        tau: int,
) -> weather.WindPowerSeries:
    '''Hourly wind of days t + tau, labelled with the winter's own dates.'''
    data.check_shift(tau)
    start = data.calendar.start
    hours = len(data) * series.HOURS_PER_DAY
    return wind.window(start + tau * series.HOURS_PER_DAY * series.HOUR, hours, label=start)


def shift_weather(
        sd: ScenarioDemand,
        data: ingest.WinterDataset,
        scenario: Scenario,
        tau: int,
) -> t.Tuple[ScenarioDemand, weather.WindPowerSeries]:
    '''Moves weather by tau days relative to the dates; DSN, DoW and residuals stay with the date.'''
    common.check(sd.scenario_id == scenario.id, f'Demand of scenario {sd.scenario_id} shifted with {scenario.id}')
    common.check(data.winter_id == sd.winter_id, f'Weather of winter {data.winter_id} for winter {sd.winter_id}')
    tau_total = sd.shift.tau + tau
    data.check_shift(tau_total)
    weather_adjust = (scenario.lambda_p * (data.te_shifted(tau_total) - data.te_at_peak)
                      + scenario.gamma_p * (data.ws_shifted(tau_total) - data.ws_at_peak))
    wind = calendar_wind(weather.wind_power(data.cf_onshore, data.cf_offshore, scenario), data, tau_total)
    shifted = dataclasses.replace(sd, weather_adjust=_frozen(weather_adjust), shift=ShiftSpec(tau_total, sd.shift.k))
    _logger.debug('Scenario %s winter %d: weather shift %+d', scenario.id, data.winter_id, tau_total)
    return shifted, wind


def shifted_dataset(
        sd: ScenarioDemand,
        data: ingest.WinterDataset,
        mode: ResidualMode = ResidualMode.EMPIRICAL,
) -> ingest.WinterDataset:
    '''Winter whose daily peaks are the scenario demand and whose weather is that of day t + tau.

    Each day keeps its historic within-day profile below the new peak.  The
    weather window moves with tau, so reloading the dataset gives the shifted
    effective temperature and wind at the winter's own dates.
    '''
    common.check(data.winter_id == sd.winter_id, f'Winter {data.winter_id} for demand of winter {sd.winter_id}')
    common.check(len(data) == len(sd), f'{len(data)}-day winter for {len(sd)} days of demand')
    peaks = sd.demand(mode)
    hourly = (peaks[:, None] + data.profile_offsets()).ravel()
    lag = sd.shift.tau * series.HOURS_PER_DAY * series.HOUR

    def moved(s: series.HourlySeries) -> series.HourlySeries:
        return dataclasses.replace(s, start=s.start - lag)

    return ingest.WinterDataset(
        calendar=data.calendar,
        temperature=moved(data.temperature),
        wind_speed=moved(data.wind_speed),
        cf_onshore=moved(data.cf_onshore),
        cf_offshore=moved(data.cf_offshore),
        observed_peak_demand=peaks,
        hourly_demand=series.HourlySeries(data.calendar.start, hourly, series.UNIT_MW),
    )


def write_shifted(
        sd: ScenarioDemand,
        data: ingest.WinterDataset,
        demand_file: t.Union[str, pathlib.Path],
        weather_file: t.Union[str, pathlib.Path],
        mode: ResidualMode = ResidualMode.EMPIRICAL,
) -> None:
    '''Writes shifted scenario demand and weather in the input CSV formats.'''
    ingest.write_winter(shifted_dataset(sd, data, mode), demand_file, weather_file)
    _logger.debug('Scenario %s winter %d shift %s: wrote %s', sd.scenario_id, sd.winter_id, sd.shift, demand_file)
