#!/usr/bin/python3
# -*- mode: python; coding: utf-8 -*-

"""Calibrate scenarios and compute LOLE/LOLH across weather years and shifts."""

import logging
import pathlib
import typing as t

import click

from hindcast import adequacy
from hindcast import calibrate
from hindcast import common
from hindcast import demand
from hindcast import ingest
from hindcast import scenario
from hindcast import sweep
from hindcast.cmd import fit as fit_cmd
from hindcast.cmd import root


_logger = logging.getLogger(__name__)


class Error(common.InputError):
    '''Base for errors in the module.'''


EXPORT_SCENARIOS = 'scenarios.json'


def select_scenarios(scenarios_file: t.Optional[str], ids: t.Sequence[str]) -> t.List[scenario.Scenario]:
    available = scenario.load_scenarios(scenarios_file) if scenarios_file else list(scenario.TABLE1)
    if not ids:
        return available
    by_id = {s.id: s for s in available}
    missing = [i for i in ids if i not in by_id]
    if missing:
        raise Error(f'Unknown scenarios {missing}; available {sorted(by_id)}')
    return [by_id[i] for i in ids]


def _summary_lines(s: sweep.WindowSummary) -> t.List[str]:
    lines = [f'{s.scenario_id} hindcast mean {s.metric} {s.hindcast_mean:.6g}']
    if s.dow_average_mean is not None:
        lines.append(f'{s.scenario_id} day-of-week average {s.metric} {s.dow_average_mean:.6g}')
    for w in s.windows:
        lines.append(f'{s.scenario_id} window {w[0]:+d}..{w[1]:+d} mean {s.metric} {s.all_winter(w):.6g}')
    if s.stability is not None:
        lines.append(f'{s.scenario_id} largest change between windows {s.stability:.3%}')
    return lines


@root.group.command('risk')
@root.data_options
@click.option('--fit', 'fit_file', type=click.Path(dir_okay=False),
              help='Fit JSON from the fit command; the data is fitted afresh otherwise.')
@click.option('--fleet', type=click.Path(dir_okay=False), required=True, help='Fleet CSV.')
@click.option('--scenarios', type=click.Path(dir_okay=False), help='Scenario JSON; the built-in S1..S4 otherwise.')
@click.option('--scenario', 'scenario_ids', multiple=True, help='Scenario id to run; repeatable. All by default.')
@click.option('--mode', type=click.Choice([m.value for m in scenario.ResidualMode]), default='empirical',
              show_default=True, help='Keep fitted residuals or replace them by Gaussian noise.')
@click.option('--sweep', 'sweep_kind', type=click.Choice([k.value for k in sweep.SweepKind]), default='weather',
              show_default=True)
@click.option('--tau', type=root.RANGE, default='0..0', show_default=True, help='Weather shifts in days.')
@click.option('--windows', type=root.WINDOWS, help='Shift windows to average: fig6 or A:B,C:D.')
@click.option('--target-lole', type=click.FloatRange(min=0, min_open=True), help='Calibrate to mean LOLE.')
@click.option('--target-lolh', type=click.FloatRange(min=0, min_open=True), help='Calibrate to mean LOLH.')
@click.option('--calibrate-shifted/--calibrate-historic', default=False,
              help='Average the calibration metric over the sweep shifts instead of the historic alignment.')
@click.option('--grid-step', type=click.IntRange(min=1), default=1, show_default=True, help='Capacity grid in MW.')
@click.option('--hourly/--no-hourly', default=False, help='Also compute LOLH from the hourly demand profile.')
@click.option('--out', type=click.Path(dir_okay=False), help='Result CSV; standard output otherwise.')
@click.option('--json', 'json_out', type=click.Path(dir_okay=False), help='Result JSON with per-day LOLP.')
@click.option('--summary', type=click.Path(dir_okay=False), help='Window summary CSV.')
@click.option('--export', 'export_dir', type=click.Path(file_okay=False),
              help='Directory for the scenario demand and shifted weather of every cell, as input CSV files.')
def risk_cmd(
        demand_template: str,
        weather_template: str,
        winters: t.Tuple[int, int],
        fit_file: t.Optional[str],
        fleet: str,
        scenarios: t.Optional[str],
        scenario_ids: t.Tuple[str, ...],
        mode: str,
        sweep_kind: str,
        tau: t.Tuple[int, int],
        windows: t.Optional[t.List[t.Tuple[int, int]]],
        target_lole: t.Optional[float],
        target_lolh: t.Optional[float],
        calibrate_shifted: bool,
        grid_step: int,
        hourly: bool,
        out: t.Optional[str],
        json_out: t.Optional[str],
        summary: t.Optional[str],
        export_dir: t.Optional[str],
):
    '''Calibrate year effects, sweep shifts and report LOLE per winter.'''

    if target_lole is not None and target_lolh is not None:
        raise Error('Give at most one of --target-lole and --target-lolh')
    kind = sweep.SweepKind(sweep_kind)
    residual_mode = scenario.ResidualMode(mode)
    hourly = hourly or target_lolh is not None

    if fit_file:
        data = ingest.load_winters(demand_template, weather_template, fit_cmd._winter_ids(winters))
        fit = demand.RegressionFit.load(fit_file)
    else:
        data, fit = fit_cmd.load_and_fit(demand_template, weather_template, winters)

    context = adequacy.RiskContext.build(fit, data, adequacy.load_fleet(fleet), residual_mode, grid_step, hourly)
    shifts = sweep.sweep_shifts(kind, tau)
    metric, target = ('lolh', target_lolh) if target_lolh is not None else ('lole', target_lole)

    results: t.List[adequacy.RiskResult] = []
    calibrations = []
    summaries = []
    resolved = []
    for scen in select_scenarios(scenarios, scenario_ids):
        if target is not None:
            cal = calibrate.calibrate(target, scen, context, metric,
                                      shifts=shifts if calibrate_shifted else (scenario.ShiftSpec(),))
            calibrations.append(cal)
            step = f', metric steps by {cal.step:.4g} here' if cal.step else ''
            click.echo(f'calibration: scenario {scen.id} phi {cal.phi:.3f} MW mean {metric} '
                       f'{cal.achieved:.4f} (target {target:g}{step})', err=True)
            scen = scen.with_phi(cal.phi)
        elif not scen.resolved:
            raise Error(f'Scenario {scen.id} has no year effect; give phi_mw or a calibration target')
        resolved.append(scen)
        cells = sweep.shift_sweep(scen, context, kind, tau)
        results.extend(cells)
        if export_dir:
            sweep.export_cells(scen, context, cells, export_dir)
        if windows:
            s = sweep.window_average(cells, windows, metric)
            summaries.append(s)
            for line in _summary_lines(s):
                click.echo(line, err=True)

    frame = sweep.results_frame(results)
    if out:
        frame.to_csv(out, index=False, lineterminator='\n')
        _logger.info('Wrote %d results to %s', len(frame), out)
    else:
        click.echo(frame.to_csv(index=False, lineterminator='\n'), nl=False)
    if json_out:
        sweep.write_results_json(results, json_out, calibrations)
    if summary:
        sweep.write_summary_csv(summaries, summary)
    if export_dir:
        scenario.save_scenarios(resolved, pathlib.Path(export_dir) / EXPORT_SCENARIOS)
