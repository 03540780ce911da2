#!/usr/bin/python3
# -*- mode: python; coding: utf-8 -*-

"""Fit the daily peak demand regression."""

import logging
import typing as t

import click

from hindcast import demand
from hindcast import ingest
from hindcast.cmd import root


_logger = logging.getLogger(__name__)


def _winter_ids(winters: t.Tuple[int, int]) -> range:
    return range(winters[0], winters[1] + 1)


def report(fit: demand.RegressionFit) -> t.List[str]:
    '''Coefficient table with standard errors, then diagnostics.'''
    c, se = fit.coefficients, fit.standard_errors
    names = c.columns()
    width = max(len(n) for n in names)
    lines = [f'{"coefficient":<{width}} {"estimate":>12} {"std.err":>10}']
    for name, v, e in zip(names, c.as_vector(), se.as_vector()):
        lines.append(f'{name:<{width}} {v:>12.2f} {e:>10.2f}')
    d = fit.diagnostics
    lines += [
        f'observations {d.n_obs}, parameters {d.n_params}, reference day {c.reference_dow}, '
        f'reference winter {c.reference_winter}',
        f'residual SD {fit.residual_sd:.2f} MW, R2 {d.r2:.4f}, adjusted R2 {d.adjusted_r2:.4f}',
        f'lag-1 residual autocorrelation {d.lag1_autocorr:.3f} (standard errors are understated when positive)',
        f'residual skewness {d.skewness:.3f}, excess kurtosis {d.excess_kurtosis:.3f}, '
        f'Jarque-Bera {d.jarque_bera:.2f} (p = {d.jarque_bera_pvalue:.3g})',
    ]
    for p in d.peaks:
        lines.append(f'winter {p.winter_id} peak {p.date.isoformat()}: observed {p.observed:.0f} MW, '
                     f'fitted {p.fitted:.0f} MW')
    return lines


def load_and_fit(demand_template: str, weather_template: str, winters: t.Tuple[int, int]) -> t.Tuple[
        t.List[ingest.WinterDataset], demand.RegressionFit]:
    data = ingest.load_winters(demand_template, weather_template, _winter_ids(winters))
    return data, demand.fit_ols(demand.build_design_matrix(data))


@root.group.command('fit')
@root.data_options
@click.option('--out', type=click.Path(dir_okay=False), help='Write the fit as JSON.')
def fit_cmd(demand_template: str, weather_template: str, winters: t.Tuple[int, int], out: t.Optional[str]):
    '''Fit daily peak demand to weather, calendar and year effects.'''

    _, fit = load_and_fit(demand_template, weather_template, winters)
    for line in report(fit):
        click.echo(line)
    if out:
        fit.save(out)
        _logger.info('Wrote fit to %s', out)
