#!/usr/bin/python3
# -*- mode: python; coding: utf-8 -*-

"""Shift sweeps over (winter, tau, k) cells and window averages of their risk."""

import dataclasses
import enum
import itertools
import json
import logging
import pathlib
import typing as t

import numpy as np
import pandas as pd

from hindcast import adequacy
from hindcast import common
from hindcast import parallel
from hindcast import scenario


_logger = logging.getLogger(__name__)


class Error(common.InputError):
    '''Base for errors in the module.'''


class WindowError(Error):
    '''Window reaches beyond the shifts covered by the sweep.'''


class SweepKind(enum.Enum):
    DOW = 'dow'
    WEATHER = 'weather'
    GRID = 'grid'


Window = t.Tuple[int, int]

# Growing maximum weather shifts, from half a week to three weeks either way.
FIG6_WINDOWS: t.Tuple[Window, ...] = ((-3, 3), (-7, 6), (-10, 10), (-14, 13), (-21, 20))

RESULT_COLUMNS = ['scenario', 'winter', 'tau', 'k', 'mode', 'lole', 'lolh']
SUMMARY_COLUMNS = ['scenario', 'metric', 'window', 'winter', 'value']
FLOAT_FORMAT = '.10g'

DOW_SHIFTS = range(-scenario.MAX_DOW_SHIFT, scenario.MAX_DOW_SHIFT + 1)


def sweep_shifts(kind: SweepKind, tau_range: Window = (0, 0)) -> t.List[scenario.ShiftSpec]:
    lo, hi = tau_range
    if kind is SweepKind.DOW:
        return [scenario.ShiftSpec(0, k) for k in DOW_SHIFTS]
    if kind is SweepKind.WEATHER:
        return [scenario.ShiftSpec(tau, 0) for tau in range(lo, hi + 1)]
    return [scenario.ShiftSpec(tau, k) for tau, k in itertools.product(range(lo, hi + 1), DOW_SHIFTS)]


def shift_sweep(
        scen: scenario.Scenario,
        context: adequacy.RiskContext,
        kind: SweepKind,
        tau_range: Window = (0, 0),
) -> t.List[adequacy.RiskResult]:
    '''One risk result per winter and shift, in canonical (winter, tau, k) order.

    Demand is not renormalised per shift: every cell uses the same year effect.
    '''
    shifts = sweep_shifts(kind, tau_range)
    for d in context.winters:
        for tau in {s.tau for s in shifts}:
            d.check_shift(tau)
    cells = [(i, s) for i in range(len(context.winters)) for s in shifts]
    _logger.info('Scenario %s: %s sweep over %d cells', scen.id, kind.value, len(cells))
    results = parallel.map_cells(lambda c: context.cell(scen, c[0], c[1]), cells)
    return sorted(results, key=lambda r: r.key)


def _mean(values: t.Iterable[float]) -> float:
    return float(np.mean(list(values)))


@dataclasses.dataclass(frozen=True)
class WindowSummary:
    '''Window means of one scenario's sweep; winters weigh equally in every mean.'''

    scenario_id: str
    metric: str
    winters: t.Tuple[int, ...]
    hindcast: t.Mapping[int, float]
    dow_average: t.Optional[t.Mapping[int, float]]
    windows: t.Tuple[Window, ...]
    per_winter: t.Mapping[Window, t.Mapping[int, float]]

    @property
    def hindcast_mean(self) -> float:
        return _mean(self.hindcast.values())

    @property
    def dow_average_mean(self) -> t.Optional[float]:
        if self.dow_average is None:
            return None
        return _mean(self.dow_average.values())

    def all_winter(self, window: Window) -> float:
        return _mean(self.per_winter[window].values())

    @property
    def stability(self) -> t.Optional[float]:
        '''Largest relative change of the all-winter mean between consecutive windows.'''
        if len(self.windows) < 2:
            return None
        means = [self.all_winter(w) for w in self.windows]
        changes = [abs(b - a) / abs(a) if a else float('inf') if b else 0.0 for a, b in zip(means, means[1:])]
        return max(changes)


def window_average(
        results: t.Sequence[adequacy.RiskResult],
        windows: t.Sequence[Window],
        metric: str = 'lole',
) -> WindowSummary:
    '''Equiprobable-shift means of a sweep over each window of weather shifts.'''

    scenario_ids = {r.scenario_id for r in results}
    if len(scenario_ids) != 1:
        raise Error(f'Window averages need results of exactly one scenario, got {sorted(scenario_ids)}')
    table = {(r.winter_id, r.shift.tau, r.shift.k): r.metric(metric) for r in results}
    winters = tuple(sorted({r.winter_id for r in results}))

    def value(w: int, tau: int, k: int, what: str) -> float:
        try:
            return table[(w, tau, k)]
        except KeyError:
            raise WindowError(f'{what}: sweep has no result for winter {w}, tau {tau}, k {k}')

    hindcast = {w: value(w, 0, 0, 'hindcast') for w in winters}
    dow_average: t.Optional[t.Dict[int, float]] = None
    if all((w, 0, k) in table for w in winters for k in DOW_SHIFTS):
        dow_average = {w: _mean(table[(w, 0, k)] for k in DOW_SHIFTS) for w in winters}

    per_winter = {}
    for lo, hi in windows:
        if hi < lo:
            raise WindowError(f'Empty window ({lo}, {hi})')
        what = f'window ({lo}, {hi})'
        per_winter[(lo, hi)] = {w: _mean(value(w, tau, 0, what) for tau in range(lo, hi + 1)) for w in winters}

    return WindowSummary(
        scenario_id=scenario_ids.pop(),
        metric=metric,
        winters=winters,
        hindcast=hindcast,
        dow_average=dow_average,
        windows=tuple((lo, hi) for lo, hi in windows),
        per_winter=per_winter,
    )


def _fmt(v: t.Optional[float]) -> str:
    return '' if v is None else format(v, FLOAT_FORMAT)


def results_frame(results: t.Iterable[adequacy.RiskResult]) -> pd.DataFrame:
    rows = [
        (r.scenario_id, r.winter_id, r.shift.tau, r.shift.k, r.mode.value, _fmt(r.lole), _fmt(r.lolh))
        for r in sorted(results, key=lambda r: r.key)
    ]
    return pd.DataFrame(rows, columns=RESULT_COLUMNS)


def write_results_csv(results: t.Iterable[adequacy.RiskResult], path: t.Union[str, pathlib.Path]) -> None:
    results_frame(results).to_csv(path, index=False, lineterminator='\n')


def write_results_json(
        results: t.Iterable[adequacy.RiskResult],
        path: t.Union[str, pathlib.Path],
        calibrations: t.Sequence[t.Any] = (),
) -> None:
    doc = {
        'calibrations': [dataclasses.asdict(c) for c in calibrations],
        'results': [
            {
                'scenario': r.scenario_id,
                'winter': r.winter_id,
                'tau': r.shift.tau,
                'k': r.shift.k,
                'mode': r.mode.value,
                'lole': r.lole,
                'lolh': r.lolh,
                'per_day_lolp': r.per_day_lolp.tolist(),
                'per_day_lolh': None if r.per_day_lolh is None else r.per_day_lolh.tolist(),
            }
            for r in sorted(results, key=lambda r: r.key)
        ],
    }
    pathlib.Path(path).write_text(json.dumps(doc, indent=1) + '\n')


def export_stem(scenario_id: str, winter_id: int, shift: scenario.ShiftSpec) -> str:
    return f'{scenario_id}_{winter_id}_tau{shift.tau:+d}_k{shift.k:+d}'


def export_cells(
        scen: scenario.Scenario,
        context: adequacy.RiskContext,
        results: t.Iterable[adequacy.RiskResult],
        out_dir: t.Union[str, pathlib.Path],
) -> int:
    '''Writes the demand and weather behind each of the scenario's cells in the input CSV formats.'''
    out_dir = pathlib.Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    index = {w: i for i, w in enumerate(context.winter_ids)}
    count = 0
    for r in results:
        common.check(r.scenario_id == scen.id, f'Result of scenario {r.scenario_id} exported with {scen.id}')
        i = index[r.winter_id]
        sd, _ = context.scenario_demand(scen, i, r.shift)
        stem = export_stem(r.scenario_id, r.winter_id, r.shift)
        scenario.write_shifted(sd, context.winters[i], out_dir / f'demand_{stem}.csv',
                               out_dir / f'weather_{stem}.csv', context.mode)
        count += 1
    _logger.info('Scenario %s: exported %d cells to %s', scen.id, count, out_dir)
    return count


def window_label(window: Window) -> str:
    return f'{window[0]}..{window[1]}'


def summary_rows(summary: WindowSummary) -> t.List[t.Tuple[str, str, str, str, str]]:
    s = summary
    rows = []

    def add(label: str, per_winter: t.Mapping[int, float], mean: float) -> None:
        for w in s.winters:
            rows.append((s.scenario_id, s.metric, label, str(w), _fmt(per_winter[w])))
        rows.append((s.scenario_id, s.metric, label, 'all', _fmt(mean)))

    add('hindcast', s.hindcast, s.hindcast_mean)
    if s.dow_average is not None:
        add('dow', s.dow_average, t.cast(float, s.dow_average_mean))
    for window in s.windows:
        add(window_label(window), s.per_winter[window], s.all_winter(window))
    if s.stability is not None:
        rows.append((s.scenario_id, s.metric, 'stability', 'all', _fmt(s.stability)))
    return rows


def write_summary_csv(summaries: t.Iterable[WindowSummary], path: t.Union[str, pathlib.Path]) -> None:
    rows = [row for s in summaries for row in summary_rows(s)]
    pd.DataFrame(rows, columns=SUMMARY_COLUMNS).to_csv(path, index=False, lineterminator='\n')
