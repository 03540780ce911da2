#!/usr/bin/python3
# -*- mode: python; coding: utf-8 -*-

import dataclasses
import datetime
import json
import logging
import pathlib
import tempfile
import unittest

import numpy as np

from hindcast import common
from hindcast import demand
from hindcast import ingest
from hindcast import scenario
from hindcast import series
from hindcast import synth

import helpers


_logger = logging.getLogger(__name__)


S1, S2, S3, S4 = scenario.TABLE1


def rotated(calendar, k):
    return ingest.WinterCalendar(calendar.winter_id, calendar.dates, ingest.wrap_dow(calendar.dow + k), calendar.dsn)


class TestScenario(unittest.TestCase):
    def test_table(self):
        self.assertEqual(['S1', 'S2', 'S3', 'S4'], [s.id for s in scenario.TABLE1])
        self.assertEqual(-2000.0, S4.lambda_p)
        self.assertAlmostEqual(420.0, S4.gamma_p)
        self.assertEqual((25000.0, 40000.0), (S2.cap_onshore, S2.cap_offshore))
        self.assertEqual((14000.0, 16000.0), (S1.cap_onshore, S1.cap_offshore))
        self.assertFalse(S1.resolved)

    def test_invariants(self):
        with self.assertRaises(scenario.ScenarioError):
            scenario.Scenario('x', -1.0, 0.0, 0.0, -1.0, 0.0)
        with self.assertRaises(scenario.ScenarioError):
            scenario.Scenario('x', 10.0, 0.0, 0.0, 0.0, 0.0)
        with self.assertRaises(scenario.ScenarioError):
            scenario.Scenario('', -1.0, 0.0, 0.0, 0.0, 0.0)

    def test_unresolved(self):
        with self.assertRaises(scenario.UnresolvedYearEffectError):
            S1.year_effect()
        self.assertEqual(1234.5, S1.with_phi(1234.5).year_effect())

    def test_load_save(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = pathlib.Path(tmp) / 'scenarios.json'
            scenario.save_scenarios([S1, S3.with_phi(-250.0)], path)
            loaded = scenario.load_scenarios(path)
        self.assertEqual('S1', loaded[0].id)
        self.assertIsNone(loaded[0].phi_p)
        self.assertEqual(-250.0, loaded[1].phi_p)
        self.assertAlmostEqual(S3.lambda_p, loaded[1].lambda_p)
        self.assertAlmostEqual(S3.cap_offshore, loaded[1].cap_offshore)

    def test_load_list_and_errors(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = pathlib.Path(tmp) / 'scenarios.json'
            doc = [{'id': 'A', 'lambda_gw_per_degc': -1, 'gamma_gw_per_ms': 0.1, 'onshore_gw': 1,
                    'offshore_gw': 2, 'phi_mw': 500}]
            path.write_text(json.dumps(doc))
            self.assertEqual(500.0, scenario.load_scenarios(path)[0].phi_p)

            path.write_text(json.dumps(doc + doc))
            with self.assertRaisesRegex(scenario.ScenarioError, 'duplicate'):
                scenario.load_scenarios(path)

            path.write_text(json.dumps([dict(doc[0], phi_mw='soon')]))
            with self.assertRaises(scenario.ScenarioError):
                scenario.load_scenarios(path)

            path.write_text(json.dumps([{'id': 'B'}]))
            with self.assertRaisesRegex(scenario.ScenarioError, 'missing key'):
                scenario.load_scenarios(path)

    def test_bundled_file(self):
        path = pathlib.Path(__file__).parent.parent / 'data' / 'scenarios.json'
        loaded = scenario.load_scenarios(path)
        self.assertEqual([s.id for s in scenario.TABLE1], [s.id for s in loaded])
        for bundled, builtin in zip(loaded, scenario.TABLE1):
            self.assertIsNone(bundled.phi_p)
            for name in ('lambda_p', 'gamma_p', 'cap_onshore', 'cap_offshore'):
                self.assertAlmostEqual(getattr(builtin, name), getattr(bundled, name), msg=name)

    def test_shift_spec(self):
        self.assertTrue(scenario.ShiftSpec().identity)
        with self.assertRaises(scenario.ShiftError):
            scenario.ShiftSpec(0, 4)
        self.assertEqual([-3, -2, -1, 0, 1, 2, 3, -3], [scenario.wrap_k(k) for k in range(-3, 5)])
        self.assertEqual(3, scenario.wrap_k(-4))


class MappingTestCase(unittest.TestCase):
    '''One synthetic winter with noise, fitted exactly by its generating coefficients.'''

    @classmethod
    def setUpClass(cls):
        cls.coefs = dataclasses.replace(synth.PAPER_COEFFICIENTS, phi={2009: 6712.74}, reference_winter=2010)
        spec = synth.SynthSpec(true_coefficients=cls.coefs, residual_sd=800.0, rng_seed=3)
        cls.data = synth.generate_synthetic(spec, 1)[0]
        cls.fit = helpers.exact_fit(cls.coefs, [cls.data], residual_sd=800.0)
        cls.scen = S3.with_phi(1500.0)
        cls.sd = scenario.map_to_scenario(cls.fit, cls.data, cls.scen)


class TestMapToScenario(MappingTestCase):
    def test_historic_scenario_reproduces_demand(self):
        c = self.coefs
        historic = scenario.Scenario('H', c.lambda1, c.gamma1, c.phi[2009], 0.0, 0.0)
        sd = scenario.map_to_scenario(self.fit, self.data, historic)
        np.testing.assert_allclose(self.data.observed_peak_demand, sd.empirical, rtol=1e-12)
        np.testing.assert_allclose(self.data.observed_peak_demand,
                                   scenario.empirical_demand(self.fit, self.data, historic), rtol=1e-12)

    def test_direct_formula(self):
        c = self.coefs
        s = self.scen
        dsn = self.data.calendar.dsn.astype(float)
        oracle = (c.alpha + s.lambda_p * self.data.te_at_peak + c.beta1 * dsn + c.beta2 * dsn ** 2
                  + c.omega_full()[self.data.calendar.dow - 1] + s.gamma_p * self.data.ws_at_peak + s.phi_p)
        np.testing.assert_allclose(oracle, self.sd.central, rtol=1e-9)
        np.testing.assert_allclose(scenario.empirical_demand(self.fit, self.data, s), self.sd.empirical, rtol=1e-9)

    def test_sensitivity_difference(self):
        data = helpers.make_winter(2010, temp_c=-2.0)
        coefs = helpers.coefficients()
        fit = helpers.exact_fit(coefs, [data])
        steep = scenario.Scenario('steep', -2000.0, 125.0, 0.0, 0.0, 0.0)
        mild = scenario.Scenario('mild', -600.0, 125.0, 0.0, 0.0, 0.0)
        diff = (scenario.map_to_scenario(fit, data, steep).empirical
                - scenario.map_to_scenario(fit, data, mild).empirical)
        np.testing.assert_allclose(2800.0, diff, rtol=1e-12)

    def test_unresolved(self):
        with self.assertRaises(scenario.UnresolvedYearEffectError):
            scenario.map_to_scenario(self.fit, self.data, S3)

    def test_residuals_attached(self):
        np.testing.assert_array_equal(self.fit.residuals_for(self.data.calendar), self.sd.residuals)
        np.testing.assert_allclose(self.sd.residuals, self.sd.empirical - self.sd.central, atol=1e-8)
        self.assertEqual(800.0, self.sd.residual_sd)

    def test_modes(self):
        np.testing.assert_array_equal(self.sd.central, self.sd.demand(scenario.ResidualMode.STOCHASTIC))
        np.testing.assert_array_equal(self.sd.empirical, self.sd.demand(scenario.ResidualMode.EMPIRICAL))

    def test_export_round_trip(self):
        sd, _ = scenario.shift_weather(self.sd, self.data, self.scen, -5)
        sd = scenario.shift_dow(sd, self.data.calendar, 2)
        with tempfile.TemporaryDirectory() as tmp:
            demand_file = pathlib.Path(tmp) / 'demand.csv'
            weather_file = pathlib.Path(tmp) / 'weather.csv'
            scenario.write_shifted(sd, self.data, demand_file, weather_file)
            self.assertEqual('timestamp,demand_mw', demand_file.read_text().splitlines()[0])
            loaded = ingest.load_winter(demand_file, weather_file, self.data.winter_id)
        np.testing.assert_array_equal(sd.empirical, loaded.observed_peak_demand)
        np.testing.assert_allclose(self.data.profile_offsets(), loaded.profile_offsets(), atol=1e-6)
        np.testing.assert_array_equal(self.data.te_shifted(-5), loaded.te_at_peak)
        np.testing.assert_array_equal(self.data.ws_shifted(-5), loaded.ws_at_peak)
        self.assertEqual(self.data.pad_before - 5, loaded.pad_before)

    def test_export_stochastic(self):
        exported = scenario.shifted_dataset(self.sd, self.data, scenario.ResidualMode.STOCHASTIC)
        np.testing.assert_array_equal(self.sd.central, exported.observed_peak_demand)
        self.assertEqual(self.data.temperature.start, exported.temperature.start)


class TestShiftDow(MappingTestCase):
    def test_identity(self):
        out = scenario.shift_dow(self.sd, self.data.calendar, 0)
        np.testing.assert_array_equal(self.sd.central, out.central)
        np.testing.assert_array_equal(self.sd.empirical, out.empirical)

    def test_inverse(self):
        for k in range(-3, 4):
            back = scenario.shift_dow(scenario.shift_dow(self.sd, self.data.calendar, k), self.data.calendar, -k)
            np.testing.assert_array_equal(self.sd.central, back.central)
            self.assertTrue(back.shift.identity)

    def test_design_row_oracle(self):
        cal = self.data.calendar
        for k in range(-3, 4):
            out = scenario.shift_dow(self.sd, cal, k)
            oracle = demand.evaluate(self.coefs, rotated(cal, k), self.data.te_at_peak, self.data.ws_at_peak,
                                     lambda_=self.scen.lambda_p, gamma=self.scen.gamma_p, phi=self.scen.phi_p)
            np.testing.assert_allclose(oracle, out.central, rtol=1e-9)

    def test_periodic(self):
        cal = self.data.calendar
        for k in range(-3, 4):
            a = scenario.shift_dow(self.sd, cal, k)
            b = scenario.shift_dow(self.sd, cal, k - 7)
            c = scenario.shift_dow(self.sd, cal, k + 7)
            np.testing.assert_array_equal(a.empirical, b.empirical)
            np.testing.assert_array_equal(a.empirical, c.empirical)

    def test_composition(self):
        cal = self.data.calendar
        for k1 in range(-3, 4):
            for k2 in range(-3, 4):
                two = scenario.shift_dow(scenario.shift_dow(self.sd, cal, k1), cal, k2)
                one = scenario.shift_dow(self.sd, cal, scenario.wrap_k(k1 + k2))
                np.testing.assert_array_equal(one.central, two.central)

    def test_wrong_calendar(self):
        with self.assertRaises(common.ContractError):
            scenario.shift_dow(self.sd, ingest.calendar_for(2011), 1)


class TestShiftWeather(MappingTestCase):
    def test_identity(self):
        sd, wind = scenario.shift_weather(self.sd, self.data, self.scen, 0)
        np.testing.assert_array_equal(self.sd.central, sd.central)
        full = scenario.weather.wind_power(self.data.cf_onshore, self.data.cf_offshore, self.scen)
        expected = full.window(self.data.calendar.start, len(self.data) * series.HOURS_PER_DAY)
        np.testing.assert_array_equal(expected.values, wind.values)
        self.assertEqual(self.data.calendar.start, wind.start)

    def test_inverse(self):
        for tau in (-21, -1, 5, 20):
            there, _ = scenario.shift_weather(self.sd, self.data, self.scen, tau)
            back, wind = scenario.shift_weather(there, self.data, self.scen, -tau)
            np.testing.assert_array_equal(self.sd.central, back.central)
            self.assertTrue(back.shift.identity)

    def test_direct_formula(self):
        for tau in (-14, 3):
            sd, wind = scenario.shift_weather(self.sd, self.data, self.scen, tau)
            oracle = demand.evaluate(self.coefs, self.data.calendar, self.data.te_shifted(tau),
                                     self.data.ws_shifted(tau), lambda_=self.scen.lambda_p,
                                     gamma=self.scen.gamma_p, phi=self.scen.phi_p)
            np.testing.assert_allclose(oracle, sd.central, rtol=1e-9)
            full = scenario.weather.wind_power(self.data.cf_onshore, self.data.cf_offshore, self.scen)
            np.testing.assert_array_equal(full.at_peak()[self.data.pad_before + tau:][:len(sd)], wind.at_peak())

    def test_padding(self):
        with self.assertRaises(ingest.PaddingError):
            scenario.shift_weather(self.sd, self.data, self.scen, -32)
        there, _ = scenario.shift_weather(self.sd, self.data, self.scen, 20)
        with self.assertRaises(ingest.PaddingError):
            scenario.shift_weather(there, self.data, self.scen, 11)

    def test_residual_attachment(self):
        rng = np.random.default_rng(23)
        cal = self.data.calendar
        original = self.fit.residuals_for(cal)
        for _ in range(1000):
            tau = int(rng.integers(-30, 31))
            k = int(rng.integers(-10, 11))
            sd, _ = scenario.shift_weather(self.sd, self.data, self.scen, tau)
            sd = scenario.shift_dow(sd, cal, k)
            self.assertEqual((tau, scenario.wrap_k(k)), (sd.shift.tau, sd.shift.k))
            np.testing.assert_array_equal(original, sd.residuals)
            np.testing.assert_allclose(original, sd.empirical - sd.central, atol=1e-8)
            back, _ = scenario.shift_weather(sd, self.data, self.scen, -tau)
            back = scenario.shift_dow(back, cal, -k)
            self.assertTrue(back.shift.identity)
            np.testing.assert_array_equal(self.sd.empirical, back.empirical)

    def test_cold_spell_moves_out_of_dip(self):
        spec = synth.SynthSpec(
            true_coefficients=self.coefs,
            residual_sd=0.0,
            cold_spell=synth.ColdSpell(datetime.date(2009, 12, 24), 5, -15.0),
            christmas_dip=synth.ChristmasDip((12, 20), (1, 3), 10000.0),
        )
        data = synth.generate_synthetic(spec, 1)[0]
        fit = helpers.exact_fit(self.coefs, [data])
        sd = scenario.map_to_scenario(fit, data, self.scen)
        shifted, _ = scenario.shift_weather(sd, data, self.scen, -14)

        dip = spec.christmas_dip.mask(data.calendar)
        te = data.te_shifted(-14)
        coldest = np.argsort(te)[:3]
        self.assertFalse(np.any(dip[coldest]))
        self.assertTrue(np.all(dip[np.argsort(data.te_at_peak)[:3]]))

        oracle = demand.evaluate(self.coefs, data.calendar, te, data.ws_shifted(-14),
                                 lambda_=self.scen.lambda_p, gamma=self.scen.gamma_p, phi=self.scen.phi_p)
        np.testing.assert_allclose(oracle - 10000.0 * dip, shifted.empirical, rtol=1e-9)


if __name__ == '__main__':
    logging.basicConfig(level=logging.DEBUG)
    unittest.main()
