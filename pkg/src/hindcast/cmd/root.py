#!/usr/bin/python3
# -*- mode: python; coding: utf-8 -*-

import typing as t

import logging

import click

from hindcast import common
from hindcast import config
from hindcast import parallel
from hindcast import schema


_logger = logging.getLogger(__name__)


F = t.TypeVar("F", bound=t.Callable[..., t.Any])


_log_levels = {
    'critical': logging.CRITICAL,
    'fatal': logging.CRITICAL,
    'error': logging.ERROR,
    'warning': logging.WARNING,
    'warn': logging.WARNING,
    'info': logging.INFO,
    'debug': logging.DEBUG,
}

_log_datefmt = '%Y-%m-%d %H:%M:%S'

_log_formats = {
    'tiny': '%(message)s',
    'short': '%(asctime)s %(message)s',
    'long': '%(asctime)s %(levelname)s %(name)s@%(lineno)d: %(message)s',
}

_context_settings = {
    'help_option_names': ['-h', '--help'],
}


class PipelineFailure(click.ClickException):
    '''Module error reported as a single `error:` line.'''

    def __init__(self, e: Exception) -> None:
        super().__init__(f'{type(e).__name__}: {e}')
        self.exit_code = 2 if isinstance(e, OSError) else common.exit_code(e)

    def show(self, file: t.Optional[t.IO[t.Any]] = None) -> None:
        click.echo(f'error: {self.format_message()}', file=file, err=True)


class _Group(click.Group):
    def invoke(self, ctx: click.Context) -> t.Any:
        try:
            return super().invoke(ctx)
        except (common.InputError, common.ContractError, OSError) as e:
            _logger.debug('Command failed', exc_info=True)
            raise PipelineFailure(e)


class _SchemaParam(click.ParamType):
    '''Click parameter parsed by a config value type; parsed defaults pass through.'''

    def __init__(self, name: str, t: schema.ValueType[t.Any], parsed: type) -> None:
        self.name = name
        self.t = t
        self.parsed = parsed

    def convert(self, value: t.Any, param: t.Optional[click.Parameter], ctx: t.Optional[click.Context]) -> t.Any:
        if isinstance(value, self.parsed):
            return value
        try:
            return self.t.from_raw(value)
        except common.InputError as e:
            self.fail(str(e), param, ctx)


RANGE = _SchemaParam('A..B', schema.RangeType, tuple)
WINDOWS = _SchemaParam('WINDOWS', schema.WindowsType, list)


def data_options(f: F) -> F:
    f = click.option('--winters', type=RANGE, required=True,
                     help='Winters to load, e.g. 2009..2019; winter Y runs from November Y to March Y+1.')(f)
    f = click.option('--weather', 'weather_template', required=True,
                     help='Weather CSV path with a {winter} field.')(f)
    f = click.option('--demand', 'demand_template', required=True,
                     help='Demand CSV path with a {winter} field.')(f)
    return f


@click.group(cls=_Group, context_settings=_context_settings)
@click.option('--config', 'config_file', type=click.Path(dir_okay=False),
              help='JSON run configuration; command-line flags override it.')
@click.option('--log-level', type=click.Choice(list(_log_levels.keys()), case_sensitive=False), default='info')
@click.option('--log-format', type=click.Choice(list(_log_formats.keys()), case_sensitive=False), default='short')
@parallel.options
@click.pass_context
def group(ctx: click.Context, config_file: t.Optional[str], log_level: str, log_format: str, **kwargs):
    '''Weather-year hindcasts of winter peak shortfall risk.'''

    logging.basicConfig(
        level=_log_levels[log_level],
        datefmt=_log_datefmt,
        format=_log_formats[log_format],
    )

    cfg = config.Root(config_file)
    ctx.default_map = cfg.command_defaults()
    if cfg.jobs.value is not None and ctx.get_parameter_source('jobs') is click.core.ParameterSource.DEFAULT:
        if cfg.jobs.value < 1:
            raise config.ConfigError(f'jobs {cfg.jobs.value} must be >= 1')
        ctx.params['jobs'] = cfg.jobs.value
    ctx.obj = cfg

    parallel.process_options(ctx)
