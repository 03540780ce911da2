#!/usr/bin/python3
# -*- mode: python; coding: utf-8 -*-

import datetime
import logging
import pathlib
import tempfile
import unittest

import numpy as np

from hindcast import common
from hindcast import ingest
from hindcast import synth

import helpers


_logger = logging.getLogger(__name__)


class TestCalendar(unittest.TestCase):
    def test_make_calendar(self):
        c = ingest.make_calendar(2010, 2)
        self.assertEqual(151, len(c))
        self.assertEqual([0, 1, 2, 3], list(c.dsn[:4]))
        self.assertEqual([2, 3, 4, 5, 6, 7, 1, 2], list(c.dow[:8]))
        self.assertEqual(30, c.dsn[c.index_of(datetime.date(2010, 12, 1))])

    def test_invariants(self):
        for winter in (2010, 2011):
            c = ingest.calendar_for(winter)
            np.testing.assert_array_equal(c.dow[1:], c.dow[:-1] % 7 + 1)
            np.testing.assert_array_equal(c.dsn[1:], c.dsn[:-1] + 1)
            self.assertTrue(all(b > a for a, b in zip(c.dates, c.dates[1:])))

    def test_leap_winter(self):
        c = ingest.calendar_for(2011)
        self.assertEqual(152, len(c))
        self.assertIn(datetime.date(2012, 2, 29), c.dates)

    def test_real_weekdays(self):
        c = ingest.calendar_for(2010)
        self.assertEqual(1, c.dow[0])
        for d, m in zip(c.dates, c.dow):
            self.assertEqual(d.isoweekday(), m)

    def test_bad_dow(self):
        for m in (0, 8):
            with self.subTest(m=m), self.assertRaises(ingest.CalendarError):
                ingest.make_calendar(2010, m)

    def test_wrap_dow(self):
        self.assertEqual([7, 1, 2, 7], list(ingest.wrap_dow(np.array([0, 8, 9, -7]))))


class FilesTestCase(unittest.TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.dir = pathlib.Path(self._tmp.name)
        self.demand_file = self.dir / 'demand_2010.csv'
        self.weather_file = self.dir / 'weather_2010.csv'

    def tearDown(self):
        self._tmp.cleanup()

    def write(self, data):
        ingest.write_winter(data, self.demand_file, self.weather_file)

    def edit(self, path, fn):
        lines = path.read_text().splitlines(keepends=True)
        path.write_text(''.join(fn(lines)))


class TestLoadWinter(FilesTestCase):
    def test_round_trip(self):
        spec = synth.SynthSpec(first_winter=2010)
        data = synth.generate_synthetic(spec, 1)[0]
        self.write(data)
        loaded = ingest.load_winter(self.demand_file, self.weather_file, 2010)
        self.assertEqual(151, len(loaded))
        self.assertEqual(data.calendar.dates, loaded.calendar.dates)
        for name in ('temperature', 'wind_speed', 'cf_onshore', 'cf_offshore', 'hourly_demand'):
            a, b = getattr(data, name), getattr(loaded, name)
            self.assertEqual(a.start, b.start, name)
            np.testing.assert_array_equal(a.values, b.values, name)
        np.testing.assert_array_equal(data.observed_peak_demand, loaded.observed_peak_demand)
        np.testing.assert_array_equal(data.te_at_peak, loaded.te_at_peak)

    def test_peak_is_daily_max(self):
        profile = np.linspace(-3000.0, 0.0, 24)
        self.write(helpers.make_winter(2010, peak=30000.0, profile=profile))
        loaded = ingest.load_winter(self.demand_file, self.weather_file, 2010)
        np.testing.assert_array_equal(30000.0, loaded.observed_peak_demand)
        self.assertTrue(np.all(loaded.profile_offsets() <= 0))

    def test_gap(self):
        self.write(helpers.make_winter(2010))
        self.edit(self.weather_file, lambda lines: [s for s in lines if not s.startswith('2010-12-25T13:00:00Z')])
        with self.assertRaisesRegex(ingest.GapError, '2010-12-25T13:00:00Z'):
            ingest.load_winter(self.demand_file, self.weather_file, 2010)

    def test_capacity_factor_out_of_range(self):
        self.write(helpers.make_winter(2010))

        def bad_cf(lines):
            fields = lines[100].rstrip('\n').split(',')
            fields[3] = '1.3'
            lines[100] = ','.join(fields) + '\n'
            return lines

        self.edit(self.weather_file, bad_cf)
        with self.assertRaisesRegex(common.InputError, '1.3'):
            ingest.load_winter(self.demand_file, self.weather_file, 2010)

    def test_non_numeric(self):
        self.write(helpers.make_winter(2010))

        def bad_temp(lines):
            fields = lines[10].split(',')
            fields[1] = 'warm'
            lines[10] = ','.join(fields)
            return lines

        self.edit(self.weather_file, bad_temp)
        with self.assertRaisesRegex(ingest.ParseError, 'row 11, column temp_c'):
            ingest.load_winter(self.demand_file, self.weather_file, 2010)

    def test_bad_header(self):
        self.write(helpers.make_winter(2010))
        self.edit(self.demand_file, lambda lines: ['time,mw\n'] + lines[1:])
        with self.assertRaises(ingest.ParseError):
            ingest.load_winter(self.demand_file, self.weather_file, 2010)

    def test_demand_short(self):
        self.write(helpers.make_winter(2010))
        self.edit(self.demand_file, lambda lines: lines[:-24])
        with self.assertRaises(ingest.AlignmentError):
            ingest.load_winter(self.demand_file, self.weather_file, 2010)

    def test_weather_short(self):
        self.write(helpers.make_winter(2010))
        # Keep the header and drop October and most of November.
        self.edit(self.weather_file, lambda lines: lines[:1] + lines[1 + 24 * 40:])
        with self.assertRaises(ingest.AlignmentError):
            ingest.load_winter(self.demand_file, self.weather_file, 2010)

    def test_missing_file(self):
        with self.assertRaisesRegex(ingest.MissingFileError, 'demand_2010.csv'):
            ingest.load_winter(self.demand_file, self.weather_file, 2010)

    def test_empty_file(self):
        self.write(helpers.make_winter(2010))
        self.demand_file.write_text('')
        with self.assertRaises(ingest.ParseError):
            ingest.load_winter(self.demand_file, self.weather_file, 2010)

    def test_ragged_row(self):
        self.write(helpers.make_winter(2010))
        self.edit(self.demand_file, lambda lines: lines[:5] + [lines[5].rstrip('\n') + ',7,8\n'] + lines[6:])
        with self.assertRaisesRegex(ingest.ParseError, 'demand_2010.csv: malformed CSV'):
            ingest.load_winter(self.demand_file, self.weather_file, 2010)

    def test_not_utf8(self):
        self.write(helpers.make_winter(2010))
        raw = self.weather_file.read_bytes()
        first_row = raw.index(b'\n') + 1
        self.weather_file.write_bytes(raw[:first_row] + b'\xff' + raw[first_row:])
        with self.assertRaisesRegex(ingest.ParseError, 'weather_2010.csv: not UTF-8'):
            ingest.load_winter(self.demand_file, self.weather_file, 2010)


class TestLoadWinters(FilesTestCase):
    def test_templates(self):
        for w in (2010, 2011):
            d = helpers.make_winter(w)
            ingest.write_winter(d, self.dir / f'demand_{w}.csv', self.dir / f'weather_{w}.csv')
        winters = ingest.load_winters(str(self.dir / 'demand_{winter}.csv'), str(self.dir / 'weather_{winter}.csv'),
                                      [2010, 2011])
        self.assertEqual([2010, 2011], [d.winter_id for d in winters])

    def test_template_without_field(self):
        with self.assertRaises(ingest.Error):
            ingest.load_winters('demand.csv', 'weather_{winter}.csv', [2010])


class TestWinterDataset(unittest.TestCase):
    def test_padding(self):
        d = helpers.make_winter(2010)
        self.assertEqual(31, d.pad_before)
        self.assertEqual(30, d.pad_after)
        d.check_shift(-31)
        d.check_shift(30)
        with self.assertRaisesRegex(ingest.PaddingError, '32 days before'):
            d.check_shift(-32)
        with self.assertRaises(ingest.PaddingError):
            d.te_shifted(31)

    def test_shifted_weather(self):
        wind = np.arange(helpers.weather_hours(2010)[1], dtype=np.float64)
        d = helpers.make_winter(2010, wind_ms=wind)
        np.testing.assert_array_equal(d.ws_shifted(0)[1:], d.ws_shifted(1)[:-1])
        self.assertEqual(wind[31 * 24 + 18], d.ws_at_peak[0])

    def test_misaligned_weather(self):
        d = helpers.make_winter(2010)
        with self.assertRaises(ingest.AlignmentError):
            ingest.WinterDataset(
                calendar=d.calendar,
                temperature=d.temperature,
                wind_speed=d.wind_speed.window(d.wind_speed.start, len(d.wind_speed) - 24),
                cf_onshore=d.cf_onshore,
                cf_offshore=d.cf_offshore,
                observed_peak_demand=d.observed_peak_demand,
            )

    def test_no_hourly_demand(self):
        d = helpers.make_winter(2010)
        bare = ingest.WinterDataset(d.calendar, d.temperature, d.wind_speed, d.cf_onshore, d.cf_offshore,
                                    d.observed_peak_demand)
        with self.assertRaises(ingest.MissingHourlyDemandError):
            bare.profile_offsets()


if __name__ == '__main__':
    logging.basicConfig(level=logging.DEBUG)
    unittest.main()
