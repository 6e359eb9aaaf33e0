#!/usr/bin/python
# Unit-tests for the command-line front end

import contextlib, csv, io, json, os, shutil, tempfile, unittest
from unittest import mock
from riscfmimo.cli import Command, build_parser, main, resolve_scenario
from riscfmimo.presets import PRESETS, preset_mapping
from riscfmimo.report import OUT_ENV_VAR
from riscfmimo.scenario import ScenarioError


SMALL_SCENARIO = {'M': 20, 'K': 5, 'S': 4, 'N': 8, 'D': 1}


class CliTestCase(unittest.TestCase):

    def setUp(self):
        self.tmp_dir = tempfile.mkdtemp()
        self.out_dir = os.path.join(self.tmp_dir, 'out')
        self.scenario_path = self.write_scenario(SMALL_SCENARIO)

    def tearDown(self):
        shutil.rmtree(self.tmp_dir)

    def write_scenario(self, mapping, name='scenario.json'):
        path = os.path.join(self.tmp_dir, name)
        with open(path, 'w') as f:
            json.dump(mapping, f)
        return path

    def run_main(self, *argv):
        """ Returns (exit status, stdout, stderr). """
        stdout, stderr = io.StringIO(), io.StringIO()
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            status = main(list(argv))
        return status, stdout.getvalue(), stderr.getvalue()

    def outputs(self, out_dir=None):
        out_dir = out_dir or self.out_dir
        return sorted(os.listdir(out_dir)) if os.path.isdir(out_dir) else []


class ResolveScenarioTest(CliTestCase):

    def testPresetUnderFileUnderOverrides(self):
        path = self.write_scenario({'K': 10, 'S': 2}, 'partial.json')
        cfg, sweep = resolve_scenario(Command('rate', config_path=path, preset='coverage-dense',
                                              overrides=['S=3'], seed=11, trials=50))
        self.assertEqual((cfg.ap_count, cfg.user_count, cfg.ris_count), (100, 10, 3))
        self.assertEqual(cfg.master_seed, 11)
        self.assertEqual(cfg.channel_draws_per_topology, 50)
        self.assertIsNone(sweep)

    def testTrialsMeanTopologiesForCdfs(self):
        cfg, _ = resolve_scenario(Command('min-rate', trials=12))
        self.assertEqual(cfg.topology_draws, 12)

    def testSweepKeepsScenarioBase(self):
        cfg, sweep = resolve_scenario(Command('ap-sweep', overrides=['K=45', 'D=2', 'M=80..140:20']))
        self.assertEqual(sweep, ('ap_count', [80, 100, 120, 140]))
        self.assertEqual(cfg.ap_count, 70)

    def testDefaultValidationSweep(self):
        cfg, sweep = resolve_scenario(Command('validate'))
        self.assertEqual(sweep, ('ap_count', [50, 100, 150, 200]))
        self.assertEqual(cfg.beta_override, 1.0)

    def testSweepNeedsSweepCommand(self):
        with self.assertRaises(ScenarioError):
            resolve_scenario(Command('rate', config_path=self.scenario_path, overrides=['M=10,20']))

    def testOneSweepOnly(self):
        with self.assertRaises(ScenarioError):
            resolve_scenario(Command('validate', overrides=['M=10,20', 'S=1,2']))

    def testPresets(self):
        mapping = preset_mapping('coverage-dense')
        mapping['K'] = 1
        self.assertEqual(PRESETS['coverage-dense']['K'], 45)
        self.assertNotIn('K', PRESETS['ap-saving'])
        for name in ('coverage-dense', 'throughput-k45', 'ap-saving'):
            self.assertEqual((PRESETS[name]['ris_fixed_loss'], PRESETS[name]['power_policy']),
                             ('cascade-once', 'fractional'))
        with self.assertRaises(ScenarioError) as ctx:
            preset_mapping('nope')
        self.assertEqual(ctx.exception.field, 'preset')

    def testOverridesAroundSubcommand(self):
        args = build_parser().parse_args(['--override', 'M=50..200', 'validate', '--override', 'K=30'])
        command = Command.from_args(args)
        self.assertEqual(command.subcommand, 'validate')
        self.assertEqual(command.overrides, ['M=50..200', 'K=30'])
        self.assertFalse(command.dump)


class RunTest(CliTestCase):

    def testRateIsReproducible(self):
        first, second = os.path.join(self.tmp_dir, 'a'), os.path.join(self.tmp_dir, 'b')
        for out_dir in (first, second):
            status, stdout, _ = self.run_main('rate', '--config', self.scenario_path, '--seed', '7',
                                              '--trials', '300', '--threads', '2', '--out', out_dir)
            self.assertEqual(status, 0)
            self.assertIn('closed form', stdout)

        self.assertEqual(self.outputs(first), self.outputs(second))
        name = self.outputs(first)[0]
        self.assertTrue(name.startswith('rate_'))
        with open(os.path.join(first, name), 'rb') as f_a, open(os.path.join(second, name), 'rb') as f_b:
            self.assertEqual(f_a.read(), f_b.read())

    def testRateCsvIsSelfDescribing(self):
        status, _, _ = self.run_main('rate', '--config', self.scenario_path, '--trials', '100', '--out',
                                     self.out_dir)
        self.assertEqual(status, 0)
        with open(os.path.join(self.out_dir, self.outputs()[0])) as f:
            lines = f.read().splitlines()

        comments = [line for line in lines if line.startswith('#')]
        for key in ('config_hash', 'master_seed', 'version', 'tau_c'):
            self.assertTrue(any(line.startswith('# {}:'.format(key)) for line in comments))
        rows = list(csv.reader(line for line in lines if not line.startswith('#')))
        self.assertEqual(rows[0], ['user_id', 'R_closed', 'R_mc', 'R_mc_stderr', 'S_k'])
        self.assertEqual(len(rows), 1 + 5)

    def testValidateJson(self):
        status, stdout, _ = self.run_main('validate', '--override', 'beta_override=1', '--override', 'M=50,100',
                                          '--trials', '200', '--format', 'json', '--out', self.out_dir)
        self.assertEqual(status, 0)
        self.assertIn('oracle', stdout)
        [name] = self.outputs()
        self.assertTrue(name.startswith('validate_') and name.endswith('.json'))
        with open(os.path.join(self.out_dir, name)) as f:
            document = json.load(f)
        self.assertEqual([row['value'] for row in document['rows']], [50, 100])
        self.assertEqual(document['metadata']['tau_c'], 40)
        self.assertIn('master_seed', document['metadata'])

    def testMinRateWritesCurves(self):
        status, stdout, _ = self.run_main('min-rate', '--config', self.scenario_path, '--trials', '6',
                                          '--out', self.out_dir)
        self.assertEqual(status, 0)
        self.assertIn('outage', stdout)
        names = self.outputs()
        self.assertEqual(len(names), 3)
        self.assertTrue(any(n.startswith('min-rate-cdf-ris_') for n in names))
        self.assertTrue(any(n.startswith('min-rate-cdf-baseline_') for n in names))

    def testThroughputJsonWithLevels(self):
        status, _, _ = self.run_main('throughput', '--config', self.scenario_path, '--trials', '4',
                                     '--levels', '0.1,0.5', '--format', 'json', '--out', self.out_dir)
        self.assertEqual(status, 0)
        [name] = self.outputs()
        with open(os.path.join(self.out_dir, name)) as f:
            document = json.load(f)
        self.assertEqual(sorted(document['ratios']), ['0.1', '0.5'])
        self.assertEqual(document['ris']['samples'], 4 * 5)

    def testApSweep(self):
        status, stdout, _ = self.run_main('ap-sweep', '--config', self.scenario_path, '--override', 'M=10,20',
                                          '--ris-counts', '0,4', '--ris-aps', '10', '--trials', '5',
                                          '--out', self.out_dir)
        self.assertEqual(status, 0)
        self.assertIn('matches M=10.0', stdout)
        [name] = self.outputs()
        with open(os.path.join(self.out_dir, name)) as f:
            rows = list(csv.reader(line for line in f if not line.startswith('#')))
        self.assertEqual(rows[0][0], 'curve')
        self.assertEqual([row[0] for row in rows[1:]], ['cf', 'cf', 'ris', 'ris'])

    def testDumpNetwork(self):
        status, stdout, _ = self.run_main('rate', '--config', self.scenario_path, '--trials', '20', '--dump',
                                          '--out', self.out_dir)
        self.assertEqual(status, 0)
        self.assertIn('power uniform', stdout)
        self.assertIn('data power 23.0 dBm', stdout)

        names = self.outputs()
        self.assertEqual(len(names), 4)
        expected_rows = {'topology': 1 + 20 + 4 + 5, 'beta': 1 + 20 * 5 + 20 * 4 + 4 * 5, 'rho': 1 + 20 * 5}
        for prefix, count in expected_rows.items():
            [name] = [n for n in names if n.startswith(prefix + '_')]
            with open(os.path.join(self.out_dir, name)) as f:
                rows = list(csv.reader(f))
            self.assertEqual(len(rows), count)

    def testOutputDirectoryFromEnvironment(self):
        env_dir = os.path.join(self.tmp_dir, 'env')
        with mock.patch.dict(os.environ, {OUT_ENV_VAR: env_dir}):
            status, _, _ = self.run_main('rate', '--config', self.scenario_path, '--trials', '50')
        self.assertEqual(status, 0)
        self.assertEqual(len(self.outputs(env_dir)), 1)


class ExitStatusTest(CliTestCase):

    def testShortPilotsNameTauC(self):
        status, _, stderr = self.run_main('min-rate', '--override', 'tau_c=30', '--trials', '5',
                                          '--out', self.out_dir)
        self.assertEqual(status, 2)
        self.assertIn('tau_c', stderr)
        self.assertEqual(self.outputs(), [])

    def testApSweepNeedsUsersAndArea(self):
        status, _, stderr = self.run_main('ap-sweep', '--trials', '5', '--out', self.out_dir)
        self.assertEqual(status, 2)
        self.assertIn('error:', stderr)

    def testRateNeedsAScenario(self):
        status, _, stderr = self.run_main('rate', '--out', self.out_dir)
        self.assertEqual(status, 2)
        self.assertIn('required key missing', stderr)

    def testUnknownOverrideKey(self):
        status, _, stderr = self.run_main('rate', '--config', self.scenario_path, '--override', 'Q=3',
                                          '--out', self.out_dir)
        self.assertEqual(status, 2)
        self.assertIn('Q', stderr)

    def testBadLevels(self):
        status, _, _ = self.run_main('min-rate', '--config', self.scenario_path, '--levels', '0,1.5')
        self.assertEqual(status, 2)

    def testBrokenScenarioFile(self):
        path = os.path.join(self.tmp_dir, 'broken.json')
        with open(path, 'w') as f:
            f.write('{"M": 20,')
        status, _, _ = self.run_main('rate', '--config', path, '--out', self.out_dir)
        self.assertEqual(status, 2)

    def testRuntimeFailure(self):
        with mock.patch('riscfmimo.cli.rate_report', side_effect=RuntimeError('boom')):
            status, _, _ = self.run_main('rate', '--config', self.scenario_path, '--out', self.out_dir)
        self.assertEqual(status, 1)


if __name__ == '__main__':
    unittest.main()
