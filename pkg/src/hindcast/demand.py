#!/usr/bin/python3
# -*- mode: python; coding: utf-8 -*-

"""Linear regression model for winter daily peak demand.

The model explains the daily peak of day t in winter i, with weather taken at 18:00, as

    alpha + lambda1 * TE + beta1 * DSN + beta2 * DSN^2 + omega[DOW] + gamma1 * WS + phi[i] + residual

with one reference day of week and one reference winter that carry no
coefficient of their own.  Christmas is not a covariate: its demand
suppression stays in the residuals.
"""

import dataclasses
import datetime
import json
import logging
import pathlib
import typing as t

import numpy as np
import scipy.linalg
import scipy.stats

from hindcast import common
from hindcast import ingest


_logger = logging.getLogger(__name__)


class Error(common.ContractError):
    '''Base for errors in the module.'''


class DesignError(common.InputError):
    '''Data cannot form a valid design matrix.'''


class SingularityError(Error):
    '''Design matrix is rank deficient.'''


class UnknownWinterError(common.InputError):
    '''Winter has no year effect in the fit.'''


REFERENCE_DOW = 7
DOW_NAMES = {1: 'mon', 2: 'tue', 3: 'wed', 4: 'thu', 5: 'fri', 6: 'sat', 7: 'sun'}
BASE_COLUMNS = ['intercept', 'te', 'dsn', 'dsn2', 'ws']


def dow_column(m: int) -> str:
    return f'dow_{m}'


def year_column(winter_id: int) -> str:
    return f'year_{winter_id}'


@dataclasses.dataclass(frozen=True)
class CoefficientSet:
    '''Regression coefficients in MW units.

    `omega` lists the six non-reference days of week in ascending order of
    their index (1 is Monday); `phi` maps every non-reference winter to its
    year effect.
    '''

    alpha: float
    lambda1: float
    beta1: float
    beta2: float
    gamma1: float
    omega: t.Tuple[float, ...]
    phi: t.Mapping[int, float]
    reference_dow: int = REFERENCE_DOW
    reference_winter: t.Optional[int] = None

    def __post_init__(self) -> None:
        common.check(len(self.omega) == 6, f'Expected 6 day-of-week effects, got {len(self.omega)}')
        common.check(1 <= self.reference_dow <= 7, f'Reference day {self.reference_dow} outside 1..7')
        common.check(self.reference_winter not in self.phi,
                     f'Reference winter {self.reference_winter} must not carry a year effect')
        scalars = [self.alpha, self.lambda1, self.beta1, self.beta2, self.gamma1, *self.omega, *self.phi.values()]
        common.check(np.all(np.isfinite(scalars)), 'Coefficients must be finite')

    @property
    def dow_indices(self) -> t.List[int]:
        return [m for m in range(1, 8) if m != self.reference_dow]

    def omega_full(self) -> np.ndarray:
        '''Effects for all seven days indexed by m - 1; the reference day is 0.'''
        full = np.zeros(7)
        for m, w in zip(self.dow_indices, self.omega):
            full[m - 1] = w
        return full

    def year_effect(self, winter_id: int) -> float:
        if winter_id in self.phi:
            return self.phi[winter_id]
        if winter_id == self.reference_winter:
            return 0.0
        raise UnknownWinterError(f'Winter {winter_id} has no year effect in the fit')

    def columns(self) -> t.List[str]:
        return (BASE_COLUMNS
                + [dow_column(m) for m in self.dow_indices]
                + [year_column(w) for w in sorted(self.phi)])

    def as_vector(self) -> np.ndarray:
        return np.array([self.alpha, self.lambda1, self.beta1, self.beta2, self.gamma1,
                         *self.omega, *(self.phi[w] for w in sorted(self.phi))])

    @classmethod
    def from_vector(
            cls,
            vec: np.ndarray,
            reference_dow: int,
            winters: t.Sequence[int],
            reference_winter: t.Optional[int],
    ) -> 'CoefficientSet':
        years = [w for w in winters if w != reference_winter]
        return cls(
            alpha=float(vec[0]), lambda1=float(vec[1]), beta1=float(vec[2]), beta2=float(vec[3]),
            gamma1=float(vec[4]),
            omega=tuple(float(v) for v in vec[5:11]),
            phi={w: float(v) for w, v in zip(years, vec[11:])},
            reference_dow=reference_dow,
            reference_winter=reference_winter,
        )

    def to_dict(self) -> t.Dict[str, t.Any]:
        return {
            'alpha': self.alpha,
            'lambda1': self.lambda1,
            'beta1': self.beta1,
            'beta2': self.beta2,
            'gamma1': self.gamma1,
            'omega': {str(m): w for m, w in zip(self.dow_indices, self.omega)},
            'phi': {str(w): v for w, v in sorted(self.phi.items())},
            'reference_dow': self.reference_dow,
            'reference_winter': self.reference_winter,
        }

    @classmethod
    def from_dict(cls, d: t.Mapping[str, t.Any]) -> 'CoefficientSet':
        reference_dow = int(d.get('reference_dow', REFERENCE_DOW))
        omega = {int(m): float(w) for m, w in d['omega'].items()}
        expected = [m for m in range(1, 8) if m != reference_dow]
        if sorted(omega) != expected:
            raise DesignError(f'Day-of-week effects {sorted(omega)} do not match reference day {reference_dow}')
        ref_winter = d.get('reference_winter')
        return cls(
            alpha=float(d['alpha']), lambda1=float(d['lambda1']), beta1=float(d['beta1']),
            beta2=float(d['beta2']), gamma1=float(d['gamma1']),
            omega=tuple(omega[m] for m in expected),
            phi={int(w): float(v) for w, v in d.get('phi', {}).items()},
            reference_dow=reference_dow,
            reference_winter=None if ref_winter is None else int(ref_winter),
        )


def evaluate(
        coefficients: CoefficientSet,
        calendar: ingest.WinterCalendar,
        te: np.ndarray,
        ws: np.ndarray,
        *,
        lambda_: t.Optional[float] = None,
        gamma: t.Optional[float] = None,
        phi: t.Optional[float] = None,
) -> np.ndarray:
    '''Regression formula without residual, optionally with substituted weather and year terms.'''
    lam = coefficients.lambda1 if lambda_ is None else lambda_
    gam = coefficients.gamma1 if gamma is None else gamma
    year = coefficients.year_effect(calendar.winter_id) if phi is None else phi
    dsn = calendar.dsn.astype(np.float64)
    omega = coefficients.omega_full()[calendar.dow - 1]
    return (coefficients.alpha + lam * te + coefficients.beta1 * dsn + coefficients.beta2 * dsn * dsn
            + omega + gam * ws + year)


@dataclasses.dataclass(frozen=True, eq=False)
class DesignMatrix:
    matrix: np.ndarray
    response: np.ndarray
    row_index: t.List[t.Tuple[int, datetime.date]]
    columns: t.List[str]
    winters: t.List[int]
    reference_dow: int
    reference_winter: t.Optional[int]


def build_design_matrix(
        data: t.Sequence[ingest.WinterDataset],
        reference_dow: int = REFERENCE_DOW,
        reference_winter: t.Optional[int] = None,
        year_effects: bool = True,
) -> DesignMatrix:
    '''Stacks winters into rows of intercept, TE, DSN, DSN^2, WS, DoW and year indicators.'''

    winters = [d.winter_id for d in data]
    if len(set(winters)) != len(winters):
        raise DesignError(f'Duplicate winters in {winters}')
    if not 1 <= reference_dow <= 7:
        raise DesignError(f'Reference day {reference_dow} outside 1..7')
    if year_effects:
        if len(winters) < 2:
            raise DesignError('Year effects need at least two winters')
        if reference_winter is None:
            reference_winter = max(winters)
        if reference_winter not in winters:
            raise DesignError(f'Reference winter {reference_winter} not among {winters}')
    else:
        if len(winters) != 1:
            raise DesignError('Pooling several winters without year effects is not supported')
        reference_winter = winters[0]

    dows = [m for m in range(1, 8) if m != reference_dow]
    years = [w for w in winters if w != reference_winter] if year_effects else []
    columns = BASE_COLUMNS + [dow_column(m) for m in dows] + [year_column(w) for w in years]

    blocks = []
    responses = []
    row_index: t.List[t.Tuple[int, datetime.date]] = []
    for d in data:
        cal = d.calendar
        n = len(cal)
        dsn = cal.dsn.astype(np.float64)
        block = np.zeros((n, len(columns)))
        block[:, 0] = 1.0
        block[:, 1] = d.te_at_peak
        block[:, 2] = dsn
        block[:, 3] = dsn * dsn
        block[:, 4] = d.ws_at_peak
        for j, m in enumerate(dows):
            block[:, 5 + j] = cal.dow == m
        if d.winter_id in years:
            block[:, 11 + years.index(d.winter_id)] = 1.0
        if not np.all(np.isfinite(block)):
            raise DesignError(f'Non-finite covariate in winter {d.winter_id}')
        blocks.append(block)
        responses.append(d.observed_peak_demand)
        row_index.extend((d.winter_id, day) for day in cal.dates)

    return DesignMatrix(
        matrix=np.vstack(blocks),
        response=np.concatenate(responses),
        row_index=row_index,
        columns=columns,
        winters=winters,
        reference_dow=reference_dow,
        reference_winter=reference_winter,
    )


@dataclasses.dataclass(frozen=True)
class WinterPeak:
    winter_id: int
    date: datetime.date
    observed: float
    fitted: float


@dataclasses.dataclass(frozen=True)
class Diagnostics:
    r2: float
    adjusted_r2: float
    lag1_autocorr: float
    skewness: float
    excess_kurtosis: float
    jarque_bera: float
    jarque_bera_pvalue: float
    n_obs: int
    n_params: int
    peaks: t.Tuple[WinterPeak, ...]


@dataclasses.dataclass(frozen=True, eq=False)
class RegressionFit:
    '''Estimated model with per-day residuals.

    Standard errors are the classical homoskedastic ones; residuals are
    positively autocorrelated day to day, so they understate uncertainty.
    '''

    coefficients: CoefficientSet
    standard_errors: CoefficientSet
    residuals: t.Mapping[t.Tuple[int, datetime.date], float]
    residual_sd: float
    diagnostics: Diagnostics

    @property
    def adjusted_r2(self) -> float:
        return self.diagnostics.adjusted_r2

    @property
    def lag1_autocorr(self) -> float:
        return self.diagnostics.lag1_autocorr

    def residuals_for(self, calendar: ingest.WinterCalendar) -> np.ndarray:
        try:
            r = np.array([self.residuals[(calendar.winter_id, d)] for d in calendar.dates])
        except KeyError as e:
            raise UnknownWinterError(f'No residual for {e.args[0]} in the fit')
        r.setflags(write=False)
        return r

    def to_json(self) -> t.Dict[str, t.Any]:
        d = self.diagnostics
        return {
            'columns': self.coefficients.columns(),
            'coefficients': self.coefficients.to_dict(),
            'standard_errors': self.standard_errors.to_dict(),
            'residual_sd': self.residual_sd,
            'diagnostics': {
                'r2': d.r2,
                'adjusted_r2': d.adjusted_r2,
                'lag1_autocorr': d.lag1_autocorr,
                'skewness': d.skewness,
                'excess_kurtosis': d.excess_kurtosis,
                'jarque_bera': d.jarque_bera,
                'jarque_bera_pvalue': d.jarque_bera_pvalue,
                'n_obs': d.n_obs,
                'n_params': d.n_params,
                'peaks': [
                    {'winter': p.winter_id, 'date': p.date.isoformat(), 'observed': p.observed, 'fitted': p.fitted}
                    for p in d.peaks
                ],
            },
            'residuals': [
                {'winter': w, 'date': day.isoformat(), 'residual': r}
                for (w, day), r in sorted(self.residuals.items())
            ],
        }

    @classmethod
    def from_json(cls, obj: t.Mapping[str, t.Any]) -> 'RegressionFit':
        try:
            d = obj['diagnostics']
            diagnostics = Diagnostics(
                r2=d['r2'], adjusted_r2=d['adjusted_r2'], lag1_autocorr=d['lag1_autocorr'],
                skewness=d['skewness'], excess_kurtosis=d['excess_kurtosis'],
                jarque_bera=d['jarque_bera'], jarque_bera_pvalue=d['jarque_bera_pvalue'],
                n_obs=d['n_obs'], n_params=d['n_params'],
                peaks=tuple(
                    WinterPeak(p['winter'], datetime.date.fromisoformat(p['date']), p['observed'], p['fitted'])
                    for p in d['peaks']
                ),
            )
            residuals = {
                (int(r['winter']), datetime.date.fromisoformat(r['date'])): float(r['residual'])
                for r in obj['residuals']
            }
            return cls(
                coefficients=CoefficientSet.from_dict(obj['coefficients']),
                standard_errors=CoefficientSet.from_dict(obj['standard_errors']),
                residuals=residuals,
                residual_sd=float(obj['residual_sd']),
                diagnostics=diagnostics,
            )
        except (KeyError, TypeError, ValueError) as e:
            raise DesignError(f'Malformed fit document: {e!r}')

    def save(self, path: t.Union[str, pathlib.Path]) -> None:
        pathlib.Path(path).write_text(json.dumps(self.to_json(), indent=2, sort_keys=True) + '\n')

    @classmethod
    def load(cls, path: t.Union[str, pathlib.Path]) -> 'RegressionFit':
        path = pathlib.Path(path)
        if not path.is_file():
            raise ingest.MissingFileError(path)
        try:
            obj = json.loads(path.read_text())
        except json.JSONDecodeError as e:
            raise DesignError(f'{path}: {e}')
        return cls.from_json(obj)


def _collinear_pair(matrix: np.ndarray, columns: t.Sequence[str]) -> t.Optional[t.Tuple[str, str]]:
    norms = np.linalg.norm(matrix, axis=0)
    for j, nj in enumerate(norms):
        if nj == 0:
            return columns[j], columns[j]
    unit = matrix / norms
    gram = unit.T @ unit
    np.fill_diagonal(gram, 0.0)
    i, j = np.unravel_index(np.argmax(np.abs(gram)), gram.shape)
    if abs(gram[i, j]) > 1.0 - 1e-10:
        return columns[min(i, j)], columns[max(i, j)]
    return None


def _lag1_autocorr(resid: np.ndarray, row_index: t.Sequence[t.Tuple[int, datetime.date]]) -> float:
    '''Pooled lag-1 correlation of residuals on consecutive days of the same winter.'''
    winters = np.array([w for w, _ in row_index])
    same = winters[1:] == winters[:-1]
    denom = float(resid @ resid)
    if denom == 0:
        return 0.0
    return float(np.sum(resid[1:][same] * resid[:-1][same]) / denom)


def fit_ols(design: DesignMatrix) -> RegressionFit:
    '''Least squares via a QR decomposition of the design matrix.'''

    x = design.matrix
    y = design.response
    n, p = x.shape
    if n <= p:
        raise DesignError(f'{n} rows for {p} columns; need more rows than columns')

    _, r_piv, _ = scipy.linalg.qr(x, mode='economic', pivoting=True)
    diag = np.abs(np.diag(r_piv))
    tol = max(n, p) * np.finfo(np.float64).eps * diag[0]
    rank = int(np.sum(diag > tol))
    if rank < p:
        pair = _collinear_pair(x, design.columns)
        if pair:
            raise SingularityError(f'Design matrix is singular: columns {pair[0]!r} and {pair[1]!r} are collinear')
        raise SingularityError(f'Design matrix has rank {rank} < {p} columns')

    q, r = np.linalg.qr(x)
    coef = scipy.linalg.solve_triangular(r, q.T @ y)
    fitted = x @ coef
    resid = y - fitted

    rss = float(resid @ resid)
    dof = n - p
    r_inv = scipy.linalg.solve_triangular(r, np.eye(p))
    cov = rss / dof * (r_inv @ r_inv.T)
    se = np.sqrt(np.diag(cov))

    tss = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - rss / tss if tss > 0 else 1.0
    adjusted_r2 = 1.0 - (1.0 - r2) * (n - 1) / dof

    if np.std(resid) > 0:
        skewness = float(scipy.stats.skew(resid))
        kurt = float(scipy.stats.kurtosis(resid))
        jb = scipy.stats.jarque_bera(resid)
        jb_stat, jb_p = float(jb.statistic), float(jb.pvalue)
    else:
        skewness = kurt = jb_stat = 0.0
        jb_p = 1.0

    winters_arr = np.array([w for w, _ in design.row_index])
    peaks = []
    for w in design.winters:
        rows = np.flatnonzero(winters_arr == w)
        top = int(rows[np.argmax(y[rows])])
        peaks.append(WinterPeak(w, design.row_index[top][1], float(y[top]), float(fitted[top])))

    coefficients = CoefficientSet.from_vector(coef, design.reference_dow, design.winters, design.reference_winter)
    standard_errors = CoefficientSet.from_vector(se, design.reference_dow, design.winters, design.reference_winter)
    diagnostics = Diagnostics(
        r2=r2,
        adjusted_r2=adjusted_r2,
        lag1_autocorr=_lag1_autocorr(resid, design.row_index),
        skewness=skewness,
        excess_kurtosis=kurt,
        jarque_bera=jb_stat,
        jarque_bera_pvalue=jb_p,
        n_obs=n,
        n_params=p,
        peaks=tuple(peaks),
    )
    fit = RegressionFit(
        coefficients=coefficients,
        standard_errors=standard_errors,
        residuals={key: float(e) for key, e in zip(design.row_index, resid)},
        residual_sd=float(np.std(resid, ddof=1)),
        diagnostics=diagnostics,
    )
    _logger.info('Fitted %d parameters on %d days: adjusted R2 %.4f, residual SD %.1f MW',
                 p, n, adjusted_r2, fit.residual_sd)
    return fit


def central_estimate(fit: RegressionFit, data: ingest.WinterDataset) -> np.ndarray:
    '''Regression formula evaluated without residual for each date of the winter.'''
    return evaluate(fit.coefficients, data.calendar, data.te_at_peak, data.ws_at_peak)
