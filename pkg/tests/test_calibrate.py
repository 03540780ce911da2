#!/usr/bin/python3
# -*- mode: python; coding: utf-8 -*-

import logging
import unittest

from hindcast import adequacy
from hindcast import calibrate
from hindcast import demand
from hindcast import scenario
from hindcast import synth

import helpers


_logger = logging.getLogger(__name__)


S2 = scenario.TABLE1[1]


class CalibrationTestCase(unittest.TestCase):
    '''Three noisy synthetic winters, smeared by the fitted residual SD.'''

    @classmethod
    def setUpClass(cls):
        spec = synth.SynthSpec()
        winters = synth.generate_synthetic(spec, 3)
        fit = demand.fit_ols(demand.build_design_matrix(winters))
        cls.units = spec.units()
        cls.winters = winters
        cls.fit = fit
        cls.context = adequacy.RiskContext.build(fit, winters, cls.units, scenario.ResidualMode.STOCHASTIC)


class TestCalibrate(CalibrationTestCase):
    def test_targets(self):
        for target in (0.01, 0.1, 1.0):
            with self.subTest(target=target):
                cal = calibrate.calibrate(target, S2, self.context)
                self.assertEqual('S2', cal.scenario_id)
                self.assertEqual('lole', cal.metric)
                self.assertLess(cal.iterations, calibrate.MAX_ITERATIONS)
                achieved = self.context.mean_metric(S2.with_phi(cal.phi))
                self.assertAlmostEqual(target, achieved, delta=calibrate.TOLERANCE)
                self.assertAlmostEqual(achieved, cal.achieved, places=12)

    def test_monotone_in_target(self):
        low = calibrate.calibrate(0.05, S2, self.context).phi
        high = calibrate.calibrate(0.5, S2, self.context).phi
        self.assertLess(low, high)

    def test_already_on_target(self):
        at_zero = self.context.mean_metric(S2.with_phi(0.0))
        self.assertGreater(at_zero, 0.0)
        cal = calibrate.calibrate(at_zero, S2, self.context)
        self.assertEqual(0.0, cal.phi)
        self.assertEqual(0, cal.iterations)

    def test_unreachable(self):
        with self.assertRaises(calibrate.CalibrationError):
            calibrate.calibrate(200.0, S2, self.context)

    def test_shifted_alignments(self):
        shifts = [scenario.ShiftSpec(0, k) for k in range(-3, 4)]
        cal = calibrate.calibrate(0.5, S2, self.context, shifts=shifts)
        achieved = self.context.mean_metric(S2.with_phi(cal.phi), 'lole', shifts)
        self.assertAlmostEqual(0.5, achieved, delta=calibrate.TOLERANCE)

    def test_year_effect_shortcut(self):
        phi = calibrate.calibrate_year_effect(0.3, S2, self.context)
        self.assertEqual(calibrate.calibrate(0.3, S2, self.context).phi, phi)

    def test_bad_targets(self):
        for target in (0.0, -1.0):
            with self.assertRaises(calibrate.TargetError):
                calibrate.calibrate(target, S2, self.context)
        with self.assertRaises(calibrate.TargetError):
            calibrate.calibrate(1.0, S2, self.context, metric='eue')
        with self.assertRaisesRegex(calibrate.TargetError, 'hourly'):
            calibrate.calibrate(1.0, S2, self.context, metric='lolh')


class TestCalibrateLolh(CalibrationTestCase):
    def test_lolh_target(self):
        context = adequacy.RiskContext.build(self.fit, self.winters, self.units, scenario.ResidualMode.STOCHASTIC,
                                             hourly=True)
        cal = calibrate.calibrate(2.0, S2, context, metric='lolh')
        self.assertEqual('lolh', cal.metric)
        achieved = context.mean_metric(S2.with_phi(cal.phi), 'lolh')
        self.assertAlmostEqual(2.0, achieved, delta=calibrate.TOLERANCE)


class TestCalibrateEmpirical(CalibrationTestCase):
    '''Unsmeared capacity lattice: the metric moves in steps as phi changes.'''

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.empirical = adequacy.RiskContext.build(cls.fit, cls.winters, cls.units, scenario.ResidualMode.EMPIRICAL)

    def test_all_scenarios(self):
        for scen in scenario.TABLE1:
            for target in (0.01, 0.1, 1.0):
                with self.subTest(scenario=scen.id, target=target):
                    cal = calibrate.calibrate(target, scen, self.empirical)
                    self.assertLess(cal.iterations, calibrate.MAX_ITERATIONS)
                    achieved = self.empirical.mean_metric(scen.with_phi(cal.phi))
                    self.assertAlmostEqual(achieved, cal.achieved, places=12)
                    self.assertGreaterEqual(cal.step, 0.0)
                    bound = max(calibrate.TOLERANCE, cal.step / 2)
                    self.assertLessEqual(abs(achieved - target), bound + 1e-12)

    def test_smeared_has_no_step(self):
        cal = calibrate.calibrate(0.1, S2, self.context)
        self.assertEqual(0.0, cal.step)


class TestCalibrateSingleUnit(unittest.TestCase):
    def test_step_across_target(self):
        coefs = helpers.coefficients(alpha=30000.0, lambda1=-500.0, reference_winter=2012)
        winter = helpers.make_winter(2012, temp_c=5.0, wind_ms=5.0, coefficients=coefs)
        fit = helpers.exact_fit(coefs, [winter])
        units = [adequacy.GeneratingUnit('U1', 30000.0, 0.9)]
        context = adequacy.RiskContext.build(fit, [winter], units, scenario.ResidualMode.EMPIRICAL)
        scen = scenario.Scenario('L', -500.0, 0.0, None, 0.0, 0.0)

        # LOLE is 0 up to phi = -27500 MW and 0.1 per day above it.
        cal = calibrate.calibrate(5.0, scen, context)
        self.assertAlmostEqual(-27500.0, cal.phi, delta=1e-5)
        self.assertEqual(0.0, cal.achieved)
        self.assertAlmostEqual(0.1 * len(winter), cal.step, places=9)

        cal = calibrate.calibrate(0.1 * len(winter) - 1.0, scen, context)
        self.assertAlmostEqual(-27500.0, cal.phi, delta=1e-5)
        self.assertAlmostEqual(0.1 * len(winter), cal.achieved, places=9)


if __name__ == '__main__':
    logging.basicConfig(level=logging.DEBUG)
    unittest.main()
