### tests/test_unit_cli.py
## Defines unit tests for methods in ./pyfiles/cli.py

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

## Imports
# Third-party modules
import argparse
import json
import math
import numpy as np
import tempfile
import pandas as pd

from pathlib import Path
from unittest import TestCase
from unittest.mock import patch

# Internal modules
from pyfiles.cli import (
    SEED_ENV,
    main,
    parse_beta,
    read_config_file,
    resolve_config
)


class TestArgumentsUnit(TestCase):
    """
    Unit tests for flag parsing, config files and validation.

    This test suite covers:

        - The `inf` Dyson index
        - `key=value` config files and their precedence
        - The seed environment variable
        - Exit status 2 on usage errors
    """

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()


    def tearDown(self):
        self.directory.cleanup()


    ## Test Dyson index flags
    def test_parse_beta(self):
        """
        Test numeric and infinite Dyson indices.

        Asserts
        ------------
            `inf` parses to infinity; zero, negative and non-numeric values are rejected.
        """
        self.assertEqual(parse_beta('2'), 2.0)
        self.assertTrue(math.isinf(parse_beta('inf')))
        for value in ('0', '-1', 'two', 'nan'):
            with self.subTest(value=value):
                with self.assertRaises(argparse.ArgumentTypeError):
                    parse_beta(value)


    ## Test config files
    def test_read_config_file(self):
        """
        Test a config file with comments, dashes and an output key.

        Asserts
        ------------
            Keys are normalised and `out` maps to `out_path`.
            A line without `=` raises ValueError.
        """
        ## Arrange
        good = Path(self.directory.name) / 'run.conf'
        good.write_text('# sizes\nn = 500\n--num-eigs=3\n\nout=traj.csv  # file\n', encoding='UTF-8')
        bad = Path(self.directory.name) / 'bad.conf'
        bad.write_text('n 500\n', encoding='UTF-8')

        ## Act
        values = read_config_file(good)

        ## Assert
        self.assertEqual(values, {'n': '500', 'num_eigs': '3', 'out_path': 'traj.csv'})
        with self.assertRaises(ValueError):
            read_config_file(bad)


    ## Test precedence of flags over the file
    def test_flags_override_config(self):
        """
        Test that flags win over file values and file values over defaults.

        Asserts
        ------------
            n and β come from the file, num_eigs from the flag, dt from the default.
        """
        ## Arrange
        conf = Path(self.directory.name) / 'run.conf'
        conf.write_text('n=500\nbeta=inf\nnum_eigs=3\n', encoding='UTF-8')

        ## Act
        cfg, _ = resolve_config(['trajectory', '--config', str(conf), '--num-eigs', '2'])

        ## Assert
        self.assertEqual(cfg.n, 500)
        self.assertTrue(math.isinf(cfg.beta))
        self.assertEqual(cfg.num_eigs, 2)
        self.assertEqual(cfg.dt, 0.01)


    ## Test the seed variable
    def test_seed_from_environment(self):
        """
        Test the default seed read from the environment.

        Asserts
        ------------
            The environment seed is used unless --seed is given.
        """
        with patch.dict(os.environ, {SEED_ENV: '17'}):
            cfg, _ = resolve_config(['derivative-dist', '--n', '50', '--reps', '20'])
            explicit, _ = resolve_config(['derivative-dist', '--n', '50', '--reps', '20', '--seed', '3'])
        self.assertEqual(cfg.seed, 17)
        self.assertEqual(explicit.seed, 3)


    ## Test usage errors
    def test_usage_errors(self):
        """
        Test invalid command lines.

        Asserts
        ------------
            Each exits with status 2: a missing --n, too few replicas, an infinite β for the
            derivative law, an SAO domain shorter than the boundary grid, an unknown subcommand
            and a missing config file.
        """
        invalid = [
            ['trajectory'],
            ['derivative-dist', '--n', '50', '--reps', '5'],
            ['derivative-dist', '--n', '50', '--beta', 'inf'],
            ['sao', '--L', '1.0', '--t-max', '2.0'],
            ['eigenvalues'],
            ['trajectory', '--config', str(Path(self.directory.name) / 'missing.conf')],
        ]
        for argv in invalid:
            with self.subTest(argv=' '.join(argv)):
                with self.assertRaises(SystemExit) as raised:
                    main(argv)
                self.assertEqual(raised.exception.code, 2)


    ## Test the SAO right end
    def test_sao_right_end(self):
        """
        Test how `sao` picks and checks L.

        Asserts
        ------------
            Without --L the right end clears t_max plus the third Airy zero and the wall margin.
            An explicit short --L is kept and logs a warning.
            Other subcommands default to 8.
        """
        ## Act
        derived, _ = resolve_config(['sao', '--num-eigs', '3', '--t-max', '2.0'])
        with self.assertLogs('airy_minor', level='WARNING') as logs:
            explicit, _ = resolve_config(['sao', '--num-eigs', '5', '--t-max', '0.5', '--L', '8'])
        other, _ = resolve_config(['stationarity', '--model', 'sao', '--reps', '20'])

        ## Assert
        self.assertAlmostEqual(derived.L, 2.0 + 5.520560 + 4.0, places=5)
        self.assertEqual(explicit.L, 8.0)
        self.assertTrue(any('right wall' in line for line in logs.output))
        self.assertEqual(other.L, 8.0)


class TestSubcommandsUnit(TestCase):
    """
    Unit tests running each subcommand end to end at small sizes.
    """

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.root = Path(self.directory.name)


    def tearDown(self):
        self.directory.cleanup()


    ## Test the trajectory subcommand
    def test_trajectory(self):
        """
        Test `trajectory` with CSV output.

        Asserts
        ------------
            Exit code 0; the CSV echoes the config and seed and has one row per (t, i).
            A JSON summary sits next to it.
        """
        ## Arrange
        out = self.root / 'traj.csv'

        ## Act
        code = main(['trajectory', '--n', '64', '--num-eigs', '2', '--t-max', '0.5', '--dt', '0.25', '--seed', '5', '--out', str(out)])

        ## Assert
        self.assertEqual(code, 0)
        text = out.read_text(encoding='UTF-8')
        self.assertIn('# n=64', text)
        self.assertIn('# seed.master_seed=5', text)
        self.assertEqual(len(pd.read_csv(out, comment='#')), 3 * 2)
        summary = json.loads((self.root / 'traj.summary.json').read_text(encoding='UTF-8'))
        self.assertEqual(summary['seed']['master_seed'], 5)


    ## Test JSON output
    def test_trajectory_json(self):
        """
        Test `trajectory --format json`.

        Asserts
        ------------
            The document holds config, seed and rows.
        """
        out = self.root / 'traj.json'
        self.assertEqual(main(['trajectory', '--n', '64', '--num-eigs', '1', '--t-max', '0.25', '--dt', '0.25', '--format', 'json', '--out', str(out)]), 0)
        document = json.loads(out.read_text(encoding='UTF-8'))
        self.assertEqual(set(document), {'config', 'seed', 'rows'})
        self.assertEqual(len(document['rows']), 2)


    ## Test the derivative-dist subcommand
    def test_derivative_dist(self):
        """
        Test `derivative-dist` on a small matrix.

        Asserts
        ------------
            The exit code is 0 or 1 by the KS outcome; the summary has one KS report per column.
        """
        ## Act
        code = main(['derivative-dist', '--n', '30', '--num-eigs', '2', '--reps', '20', '--out', str(self.root / 'deriv.csv')])

        ## Assert
        self.assertIn(code, (0, 1))
        summary = json.loads((self.root / 'deriv.summary.json').read_text(encoding='UTF-8'))
        self.assertEqual(len(summary['ks_reports']), 2)
        expected = 0 if all(r['passed'] for r in summary['ks_reports']) else 1
        self.assertEqual(code, expected)
        self.assertEqual(list(pd.read_csv(self.root / 'deriv.csv', comment='#').columns), ['deriv_1', 'deriv_2'])


    ## Test the sao subcommand
    def test_sao(self):
        """
        Test `sao` on the noiseless operator.

        Asserts
        ------------
            Exit code 0; the table has one row per boundary position, the path file and the summary exist.
        """
        ## Arrange
        out = self.root / 'sao.csv'

        ## Act
        code = main(['sao', '--beta', 'inf', '--h', '0.01', '--L', '4', '--t-max', '0.1', '--dt', '0.05', '--window', '2', '--num-eigs', '1', '--out', str(out)])

        ## Assert
        self.assertEqual(code, 0)
        table = pd.read_csv(out, comment='#')
        self.assertEqual(list(table['t']), [0.0, 0.05, 0.1])
        self.assertTrue((self.root / 'sao.path.csv').exists())
        self.assertTrue((self.root / 'sao.summary.json').exists())


    ## Test the noiseless slopes with the default right end
    def test_sao_default_right_end(self):
        """
        Test `sao --beta inf` with five eigenvalues and no --L.

        Asserts
        ------------
            The right end is moved past the fifth turning point and echoed in the header.
            Every slope_sq entry is 1 within 2·10⁻².
        """
        ## Arrange
        out = self.root / 'sao5.csv'

        ## Act
        code = main(['sao', '--beta', 'inf', '--h', '0.01', '--t-max', '0.1', '--dt', '0.05', '--num-eigs', '5', '--out', str(out)])

        ## Assert
        self.assertEqual(code, 0)
        header = dict(
            line[2:].strip().split('=', 1)
            for line in out.read_text(encoding='UTF-8').splitlines() if line.startswith('# ')
        )
        self.assertGreater(float(header['L']), 0.1 + 7.944 + 4.0 - 1e-3)
        table = pd.read_csv(out, comment='#')
        self.assertEqual(sorted(table['j'].unique()), [1, 2, 3, 4, 5])
        np.testing.assert_allclose(table['slope_sq'], 1.0, atol=2e-2)


    ## Test the stationarity subcommand
    def test_stationarity_sao(self):
        """
        Test `stationarity --model sao` without noise.

        Asserts
        ------------
            The shifted samples coincide, so the run exits 0 with one passing report.
        """
        ## Act
        code = main(['stationarity', '--model', 'sao', '--beta', 'inf', '--h', '0.01', '--L', '4', '--reps', '20', '--out', str(self.root / 'stat.csv')])

        ## Assert
        self.assertEqual(code, 0)
        summary = json.loads((self.root / 'stat.summary.json').read_text(encoding='UTF-8'))
        self.assertTrue(summary['ks_reports'][0]['passed'])


    ## Test the verify subcommand
    def test_verify(self):
        """
        Test `verify --criteria 1`.

        Asserts
        ------------
            Exit code 0 and a JSON report listing criterion 1.
        """
        ## Arrange
        out = self.root / 'verify.json'

        ## Act
        code = main(['verify', '--quick', '--criteria', '1', '--out', str(out)])

        ## Assert
        self.assertEqual(code, 0)
        payload = json.loads(out.read_text(encoding='UTF-8'))
        self.assertEqual([c['number'] for c in payload['criteria']], [1])
        self.assertTrue(payload['passed'])
