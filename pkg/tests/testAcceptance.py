#!/usr/bin/python
# Full-size reproduction runs. These take minutes, so they only run when
# RISCFMIMO_SLOW_TESTS is set, e.g.
#   RISCFMIMO_SLOW_TESTS=1 python -m unittest tests.testAcceptance

import unittest
import tests.test_utils as test_utils
from riscfmimo.experiments import SweepSpec, ap_replacement_sweep, compare_outage, validation_sweep
from riscfmimo.presets import preset_mapping
from riscfmimo.scenario import build_scenario


skip_unless_slow = unittest.skipUnless(test_utils.slow_tests_enabled(),
                                       'set {} to run'.format(test_utils.SLOW_TESTS_ENV_VAR))

PLOTTED_CLOSED_FORM = {50: 1.17794, 100: 1.81765, 150: 2.25930, 200: 2.59696}
PLOTTED_MONTE_CARLO = {50: 1.19685, 100: 1.84605, 150: 2.28334, 200: 2.62278}


@skip_unless_slow
class ClosedFormValidationTest(unittest.TestCase):

    def testRatesAgainstPlottedCurves(self):
        base = build_scenario(preset_mapping('validation'))
        table = validation_sweep(SweepSpec('M', [50, 100, 150, 200], base))
        for row in table.rows:
            self.assertLess(test_utils.relative_error(row.closed_form, PLOTTED_CLOSED_FORM[row.value]), 0.03)
            self.assertLess(test_utils.relative_error(row.mc_rate, PLOTTED_MONTE_CARLO[row.value]), 0.03)
            self.assertGreaterEqual(row.mc_rate + 3.0 * row.mc_stderr, row.closed_form)


@skip_unless_slow
class CoverageTest(unittest.TestCase):

    def setUp(self):
        self.cfg = build_scenario(preset_mapping('coverage-dense'))
        self.assertGreaterEqual(self.cfg.topology_draws, 500)

    def testMinRateOutageGain(self):
        comparison = compare_outage(self.cfg, 'min-rate', threads=4)
        self.assertGreaterEqual(comparison.ratio(0.05), 1.3)

    def testThroughputOutageGain(self):
        comparison = compare_outage(self.cfg, 'throughput', threads=4)
        self.assertGreaterEqual(comparison.ratio(0.05), 1.2)


@skip_unless_slow
class ApReplacementAcceptanceTest(unittest.TestCase):

    def testSurfacesSaveAps(self):
        mapping = preset_mapping('ap-saving')
        mapping.update(user_count=45, area_side_km=2.0)
        base = build_scenario(mapping)
        sweep = SweepSpec('M', [70, 80, 100, 120, 140], base)
        report = ap_replacement_sweep(sweep, [base.replace(ris_count=80), base.replace(ris_count=200)], threads=4)

        means = [p.mean for p in report.cf_curve]
        self.assertTrue(all(b > a for a, b in zip(means, means[1:])))

        fewer, more = report.equivalences
        self.assertGreater(more.point.mean, fewer.point.mean)
        for eq in report.equivalences:
            self.assertNotEqual(eq.status, 'below-range')
            if eq.status == 'ok':
                self.assertGreater(eq.equivalent_ap_count, 70)
                self.assertEqual(len(eq.equivalent_ci), 2)


if __name__ == '__main__':
    unittest.main()
