#!/usr/bin/python3
# -*- mode: python; coding: utf-8 -*-

import concurrent.futures
import logging
import typing as t

import click


_logger = logging.getLogger(__name__)


class _globals(object):
    jobs = 1


TCell = t.TypeVar('TCell')
TResult = t.TypeVar('TResult')


def options(f: t.Callable[..., t.Any]) -> t.Callable[..., t.Any]:
    f = click.option('-j', '--jobs', type=click.IntRange(min=1), default=_globals.jobs, show_default=True,
                     help='Worker threads for sweep cells.')(f)
    return f


def process_options(ctx: click.Context) -> None:
    _globals.jobs = ctx.params['jobs']


def jobs() -> int:
    return _globals.jobs


def set_jobs(n: int) -> None:
    if n < 1:
        raise ValueError(f'Worker count {n} must be >= 1')
    _globals.jobs = n


def map_cells(fn: t.Callable[[TCell], TResult], cells: t.Sequence[TCell]) -> t.List[TResult]:
    '''Applies `fn` to every cell; results come back in input order whatever the worker count.'''
    n = min(jobs(), len(cells))
    if n <= 1:
        return [fn(c) for c in cells]
    _logger.debug('Evaluating %d cells on %d threads', len(cells), n)
    with concurrent.futures.ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, cells))
