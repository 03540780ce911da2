#!/usr/bin/python3
# -*- mode: python; coding: utf-8 -*-

"""JSON run configuration."""

from typing import Any, List, Dict, Optional, Generator, Tuple, Union

import collections
import json
import logging
import pathlib

from hindcast import common
from hindcast import ingest
from hindcast import schema


_logger = logging.getLogger(__name__)


class Error(common.InputError):
    '''Base for errors in the module.'''


class ConfigError(Error):
    '''Malformed configuration file.'''


SEPARATOR = schema.SEPARATOR


class DataCfg(schema.SectionCfg):
    '''Input files.  Demand and weather paths are templates with a `{winter}` field.'''

    demand = schema.MaybeValue(schema.StrType, ['demand'])
    weather = schema.MaybeValue(schema.StrType, ['weather'])
    fleet = schema.MaybeValue(schema.StrType, ['fleet'])
    scenarios = schema.MaybeValue(schema.StrType, ['scenarios'])
    fit = schema.MaybeValue(schema.StrType, ['fit'])
    winters = schema.MaybeValue(schema.RangeType, ['winters'])


class RiskCfg(schema.SectionCfg):
    mode = schema.MaybeValue(schema.StrType, ['mode'])
    sweep = schema.MaybeValue(schema.StrType, ['sweep'])
    tau = schema.MaybeValue(schema.RangeType, ['tau'])
    windows = schema.MaybeValue(schema.WindowsType, ['windows'])
    target_lole = schema.MaybeValue(schema.FloatType, ['target-lole'])
    target_lolh = schema.MaybeValue(schema.FloatType, ['target-lolh'])
    grid_step = schema.MaybeValue(schema.IntType, ['grid-step'])
    scenario = schema.ListValue(schema.StrType, ['scenario'])
    hourly = schema.MaybeValue(schema.BoolType, ['hourly'])
    calibrate_shifted = schema.MaybeValue(schema.BoolType, ['calibrate-shifted'])
    json_out = schema.MaybeValue(schema.StrType, ['json'])
    summary = schema.MaybeValue(schema.StrType, ['summary'])
    export = schema.MaybeValue(schema.StrType, ['export'])


class SynthCfg(schema.SectionCfg):
    spec = schema.MaybeValue(schema.StrType, ['spec'])
    seed = schema.MaybeValue(schema.IntType, ['seed'])
    winters = schema.MaybeValue(schema.IntType, ['winters'])
    first_winter = schema.MaybeValue(schema.IntType, ['first-winter'])
    cold_spell = schema.MaybeValue(schema.StrType, ['cold-spell'])
    christmas_dip = schema.MaybeValue(schema.StrType, ['christmas-dip'])


class Root(schema.Root):
    KEYS = ['data', 'risk', 'synth', 'out', 'jobs']

    def __init__(self, path: Optional[Union[str, pathlib.Path]] = None) -> None:
        schema.Root.__init__(self, JsonConfigHolder(path))
        unknown = set(self.keys) - set(self.KEYS)
        if unknown:
            raise ConfigError(f'{path}: unknown sections {sorted(unknown)}')

    data = schema.Section(DataCfg, ['data'])
    risk = schema.Section(RiskCfg, ['risk'])
    synth = schema.Section(SynthCfg, ['synth'])
    out = schema.MaybeValue(schema.StrType, ['out'])
    jobs = schema.MaybeValue(schema.IntType, ['jobs'])

    def command_defaults(self) -> Dict[str, Dict[str, Any]]:
        '''Values present in the file, keyed by command and option parameter name.'''
        d, r, s = self.data, self.risk, self.synth
        shared = {
            'demand_template': d.demand.value,
            'weather_template': d.weather.value,
            'winters': d.winters.value,
            'out': self.out.value,
        }
        risk = dict(shared)
        risk.update({
            'fit_file': d.fit.value,
            'fleet': d.fleet.value,
            'scenarios': d.scenarios.value,
            'mode': r.mode.value,
            'sweep_kind': r.sweep.value,
            'tau': r.tau.value,
            'windows': r.windows.value,
            'target_lole': r.target_lole.value,
            'target_lolh': r.target_lolh.value,
            'grid_step': r.grid_step.value,
            'scenario_ids': tuple(r.scenario.value) or None,
            'hourly': r.hourly.value,
            'calibrate_shifted': r.calibrate_shifted.value,
            'json_out': r.json_out.value,
            'summary': r.summary.value,
            'export_dir': r.export.value,
        })
        synth = {
            'spec': s.spec.value,
            'seed': s.seed.value,
            'winters': s.winters.value,
            'first_winter': s.first_winter.value,
            'cold_spell': s.cold_spell.value,
            'christmas_dip': s.christmas_dip.value,
            'out': self.out.value,
        }

        def present(m: Dict[str, Any]) -> Dict[str, Any]:
            return {k: v for k, v in m.items() if v is not None}

        return {'fit': present(shared), 'risk': present(risk), 'synth': present(synth)}


class JsonConfigHolder:
    '''Flattens a JSON document into dotted keys; scalars become one-element lists.'''

    def __init__(self, path: Optional[Union[str, pathlib.Path]]) -> None:
        self.path = None if path is None else pathlib.Path(path)
        self._config: Optional[Dict[str, List[Any]]] = None

    @property
    def config(self) -> Dict[str, List[Any]]:
        if self._config is not None:
            return self._config
        self._config = collections.defaultdict(list)
        if self.path is not None:
            for name, value in self._gen_config(self._load(), []):
                self._config[name].extend(value)
            _logger.debug('Loaded %d config keys from %s', len(self._config), self.path)
        return self._config

    def _load(self) -> Any:
        assert self.path is not None
        if not self.path.is_file():
            raise ingest.MissingFileError(self.path)
        try:
            doc = json.loads(self.path.read_text())
        except json.JSONDecodeError as e:
            raise ConfigError(f'{self.path}: {e}')
        if not isinstance(doc, dict):
            raise ConfigError(f'{self.path}: top level must be an object')
        return doc

    @classmethod
    def _gen_config(cls, doc: Dict[str, Any], prefix: List[str]) -> Generator[Tuple[str, List[Any]], None, None]:
        for key, value in doc.items():
            path = prefix + [key]
            if isinstance(value, dict):
                yield from cls._gen_config(value, path)
            elif isinstance(value, list):
                yield SEPARATOR.join(path), value
            else:
                yield SEPARATOR.join(path), [value]
