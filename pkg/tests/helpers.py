#!/usr/bin/python3
# -*- mode: python; coding: utf-8 -*-

"""Small builders shared by the tests."""

import dataclasses
import datetime
import typing as t

import numpy as np

from hindcast import demand
from hindcast import ingest
from hindcast import series


Hourly = t.Union[float, np.ndarray]


def weather_hours(winter_id: int) -> t.Tuple[datetime.datetime, int]:
    '''First hour and length of the padded weather window.'''
    first, last = ingest.weather_window(winter_id)
    return first, (last - first) // series.HOUR + 1


def date_hours(winter_id: int, day: datetime.date) -> slice:
    '''Hours of `day` within the padded weather window.'''
    first, _ = weather_hours(winter_id)
    i = (day - first.date()).days * series.HOURS_PER_DAY
    return slice(i, i + series.HOURS_PER_DAY)


def _hourly(v: Hourly, n: int) -> np.ndarray:
    a = np.asarray(v, dtype=np.float64)
    if a.ndim == 0:
        return np.full(n, float(a))
    assert len(a) == n, (len(a), n)
    return a


def make_winter(
        winter_id: int,
        temp_c: Hourly = 5.0,
        wind_ms: Hourly = 5.0,
        cf_onshore: Hourly = 0.5,
        cf_offshore: Hourly = 0.5,
        coefficients: t.Optional[demand.CoefficientSet] = None,
        peak: float = 40000.0,
        profile: t.Optional[np.ndarray] = None,
) -> ingest.WinterDataset:
    '''Winter with the given hourly weather over the padded window.

    Daily peaks come from `coefficients` when given, else are the constant
    `peak`.  Hourly demand is the peak plus `profile` (24 offsets, flat by
    default).
    '''
    first, hours = weather_hours(winter_id)
    calendar = ingest.calendar_for(winter_id)
    n = len(calendar)
    data = ingest.WinterDataset(
        calendar=calendar,
        temperature=series.HourlySeries(first, _hourly(temp_c, hours), series.UNIT_DEGC),
        wind_speed=series.HourlySeries(first, _hourly(wind_ms, hours), series.UNIT_MS),
        cf_onshore=series.HourlySeries(first, _hourly(cf_onshore, hours), series.UNIT_CF),
        cf_offshore=series.HourlySeries(first, _hourly(cf_offshore, hours), series.UNIT_CF),
        observed_peak_demand=np.full(n, peak),
    )
    peaks = data.observed_peak_demand
    if coefficients is not None:
        peaks = demand.evaluate(coefficients, calendar, data.te_at_peak, data.ws_at_peak,
                                phi=coefficients.phi.get(winter_id, 0.0))
    offsets = np.zeros(series.HOURS_PER_DAY) if profile is None else profile
    hourly = (peaks[:, None] + offsets[None, :]).ravel()
    return dataclasses.replace(
        data,
        observed_peak_demand=peaks,
        hourly_demand=series.HourlySeries(calendar.start, hourly, series.UNIT_MW),
    )


def exact_fit(
        coefficients: demand.CoefficientSet,
        winters: t.Sequence[ingest.WinterDataset],
        residual_sd: float = 0.0,
) -> demand.RegressionFit:
    '''Fit whose coefficients are given; residuals are observed minus the formula.'''
    residuals = {}
    for d in winters:
        central = demand.evaluate(coefficients, d.calendar, d.te_at_peak, d.ws_at_peak,
                                  phi=coefficients.phi.get(d.winter_id, 0.0))
        for day, r in zip(d.calendar.dates, d.observed_peak_demand - central):
            residuals[(d.winter_id, day)] = float(r)
    n = len(residuals)
    p = len(coefficients.as_vector())
    diagnostics = demand.Diagnostics(
        r2=1.0, adjusted_r2=1.0, lag1_autocorr=0.0, skewness=0.0, excess_kurtosis=0.0,
        jarque_bera=0.0, jarque_bera_pvalue=1.0, n_obs=n, n_params=p, peaks=(),
    )
    return demand.RegressionFit(
        coefficients=coefficients,
        standard_errors=coefficients,
        residuals=residuals,
        residual_sd=residual_sd,
        diagnostics=diagnostics,
    )


def coefficients(
        alpha: float = 30000.0,
        lambda1: float = -500.0,
        beta1: float = 0.0,
        beta2: float = 0.0,
        gamma1: float = 0.0,
        omega: t.Sequence[float] = (0.0,) * 6,
        reference_winter: int = 2010,
) -> demand.CoefficientSet:
    return demand.CoefficientSet(
        alpha=alpha, lambda1=lambda1, beta1=beta1, beta2=beta2, gamma1=gamma1,
        omega=tuple(omega), phi={}, reference_dow=demand.REFERENCE_DOW, reference_winter=reference_winter,
    )
