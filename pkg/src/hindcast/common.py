#!/usr/bin/python3
# -*- mode: python; coding: utf-8 -*-

import typing as t


class InputError(Exception):
    '''Bad or missing input data.'''


class ContractError(Exception):
    '''Numerical failure or violated contract between components.'''


def check(condition: t.Any, msg: str = '', error: t.Type[Exception] = ContractError) -> None:
    if condition:
        return
    raise error(msg)


def exit_code(e: BaseException) -> int:
    '''Process exit status for an error raised by the pipeline.'''
    if isinstance(e, InputError):
        return 2
    if isinstance(e, ContractError):
        return 3
    return 1


def parse_range(s: str) -> t.Tuple[int, int]:
    '''Parses inclusive integer range `A..B`; a single integer means `A..A`.'''
    first, sep, last = s.strip().partition('..')
    try:
        lo = int(first)
        hi = int(last) if sep else lo
    except ValueError:
        raise InputError(f'Invalid range {s!r}, expected A..B')
    if hi < lo:
        raise InputError(f'Empty range {s!r}')
    return lo, hi
