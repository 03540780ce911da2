#!/usr/bin/python3
# -*- mode: python; coding: utf-8 -*-

"""Generate synthetic winters with known coefficients."""

import dataclasses
import logging
import pathlib
import typing as t

import click

from hindcast import synth
from hindcast.cmd import root


_logger = logging.getLogger(__name__)


def make_spec(
        spec: t.Optional[str],
        seed: t.Optional[int],
        first_winter: t.Optional[int],
        cold_spell: t.Optional[str],
        christmas_dip: t.Optional[str],
) -> synth.SynthSpec:
    '''Spec file or defaults, with command-line overrides applied.'''
    s = synth.SynthSpec.load(spec) if spec else synth.SynthSpec()
    overrides: t.Dict[str, t.Any] = {}
    if seed is not None:
        overrides['rng_seed'] = seed
    if first_winter is not None:
        overrides['first_winter'] = first_winter
    if cold_spell:
        overrides['cold_spell'] = synth.parse_cold_spell(cold_spell)
    if christmas_dip:
        overrides['christmas_dip'] = synth.parse_christmas_dip(christmas_dip)
    return dataclasses.replace(s, **overrides)


@root.group.command('synth')
@click.option('--spec', type=click.Path(dir_okay=False), help='Synthetic spec JSON; built-in defaults otherwise.')
@click.option('--seed', type=click.IntRange(min=0), help='Override the spec seed.')
@click.option('--winters', type=click.IntRange(min=1), default=11, show_default=True, help='Number of winters.')
@click.option('--first-winter', type=int, help='Override the first winter.')
@click.option('--cold-spell', help='Temperature anomaly YYYY-MM-DD:DAYS:DELTA_C.')
@click.option('--christmas-dip', help='Holiday suppression MM-DD:MM-DD:MW, every winter.')
@click.option('--out', type=click.Path(file_okay=False), required=True, help='Output directory.')
def synth_cmd(
        spec: t.Optional[str],
        seed: t.Optional[int],
        winters: int,
        first_winter: t.Optional[int],
        cold_spell: t.Optional[str],
        christmas_dip: t.Optional[str],
        out: str,
):
    '''Write demand, weather, fleet and spec files for synthetic winters.'''

    s = make_spec(spec, seed, first_winter, cold_spell, christmas_dip)
    datasets = synth.generate_synthetic(s, winters)
    synth.write_synthetic(s, datasets, pathlib.Path(out))
    ids = s.winter_ids(winters)
    click.echo(f'wrote winters {ids[0]}..{ids[-1]} to {out}')
