### tests/test_unit_minor_process.py
## Defines unit tests for methods in ./pyfiles/minor_process.py and ./pyfiles/replicas.py

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

## Imports
# Third-party modules
import json
import math
import tempfile
import numpy as np
import pandas as pd

from pathlib import Path
from unittest import TestCase

# Internal modules
from pyfiles.hermite_ensemble import BetaEnsembleSpec
from pyfiles.randvar import RngStream, sample_gaussian
from pyfiles.replicas import map_ordered, run_replicas
from pyfiles.stats import moments
from pyfiles.minor_process import (
    TRAJECTORY_COLUMNS,
    TrajectorySummary,
    compute_trajectory,
    derivative_by_finite_difference,
    drift_slope,
    eigvec_linearity_profile,
    finite_difference_samples,
    reversibility_asymmetry,
    spectral_weight_samples,
    stationarity_samples,
    trajectory_replicas,
    trajectory_table,
    write_summary_json,
    write_trajectory_csv
)


class TestReplicasUnit(TestCase):
    """
    Unit tests for `map_ordered` and `run_replicas`.
    """

    ## Test ordering and thread independence
    def test_results_do_not_depend_on_threads(self):
        """
        Test that results come back in replica order for any thread count.

        Asserts
        ------------
            One and four threads give identical lists of per-replica draws.
            `map_ordered` keeps input order.
        """
        ## Arrange
        stream = RngStream(master_seed=31)

        ## Act
        serial = run_replicas(lambda s: float(sample_gaussian(s)), stream, reps=40, threads=1)
        threaded = run_replicas(lambda s: float(sample_gaussian(s)), stream, reps=40, threads=4)
        squares = map_ordered(lambda x: x * x, list(range(10)), threads=3)

        ## Assert
        self.assertEqual(serial, threaded)
        self.assertEqual(len(set(serial)), 40)
        self.assertEqual(squares, [x * x for x in range(10)])


    ## Test invalid arguments
    def test_invalid_arguments(self):
        """
        Test empty runs.

        Asserts
        ------------
            ValueError is raised for reps = 0, no items and threads = 0.
        """
        stream = RngStream(master_seed=31)
        with self.assertRaises(ValueError):
            run_replicas(lambda s: 0, stream, reps=0)
        with self.assertRaises(ValueError):
            map_ordered(lambda x: x, [])
        with self.assertRaises(ValueError):
            map_ordered(lambda x: x, [1], threads=0)


class TestTrajectoryUnit(TestCase):
    """
    Unit tests for `compute_trajectory` and the quantities read off a trajectory.

    This test suite covers:

        - Grid layout and minor sharing
        - Monotonicity of the coupled eigenvalues
        - Spectral weights and derivative estimates
        - Validation of the time grid
    """

    ## Test the frames of one trajectory
    def test_compute_trajectory(self):
        """
        Test a trajectory of n = 216 (n^{1/3} = 6) over t ∈ [0, 1] with dt = 0.05.

        Verifications
        ------------
            Grid points t = 0, 0.05, …, 1 map to minors ⌊6t⌋.

        Asserts
        ------------
            21 frames; recentred values are scaled values minus t.
            Every path is nondecreasing and frames on the same minor share their values.
            Derivative estimates are n times spectral weights in (0, 1).
        """
        ## Arrange
        spec = BetaEnsembleSpec(n=216, beta=2.0)

        ## Act
        traj = compute_trajectory(spec, RngStream(master_seed=32), num_eigs=3, t_max=1.0, dt=0.05)

        ## Assert
        self.assertEqual(len(traj.frames), 21)
        np.testing.assert_allclose(traj.times(), 0.05 * np.arange(21))
        self.assertEqual([f.minor_index for f in traj.frames][:5], [0, 0, 0, 0, 1])
        for i in range(3):
            with self.subTest(i=i):
                path = traj.eigenvalue_path(i)
                self.assertTrue(np.all(np.diff(path) >= -1e-8))
                np.testing.assert_allclose(traj.eigenvalue_path(i, recentered=True), path - traj.times())
        np.testing.assert_array_equal(traj.frames[0].scaled_eigs, traj.frames[3].scaled_eigs)
        for frame in traj.frames:
            self.assertTrue(np.all((frame.spectral_weights > 0) & (frame.spectral_weights < 1)))
            np.testing.assert_allclose(frame.derivative_est, 216 * frame.spectral_weights)
            self.assertTrue(np.all(np.diff(frame.scaled_eigs) > 0))


    ## Test reproducibility
    def test_trajectory_reproducible(self):
        """
        Test that the seed determines the trajectory.

        Asserts
        ------------
            Equal seeds give equal paths; the seed record is kept.
            At β = ∞ different seeds give the same path.
        """
        ## Arrange
        spec = BetaEnsembleSpec(n=125, beta=4.0)
        noiseless = BetaEnsembleSpec(n=125, beta=math.inf)

        ## Act
        first = compute_trajectory(spec, RngStream(master_seed=33), 2, 1.0, 0.1)
        second = compute_trajectory(spec, RngStream(master_seed=33), 2, 1.0, 0.1)
        a = compute_trajectory(noiseless, RngStream(master_seed=1), 2, 1.0, 0.1)
        b = compute_trajectory(noiseless, RngStream(master_seed=2), 2, 1.0, 0.1)

        ## Assert
        np.testing.assert_array_equal(first.eigenvalue_path(1), second.eigenvalue_path(1))
        self.assertEqual(first.seed['master_seed'], 33)
        np.testing.assert_array_equal(a.eigenvalue_path(0), b.eigenvalue_path(0))


    ## Test the grid validation
    def test_grid_exhausts_matrix(self):
        """
        Test a grid that runs past the last minor.

        Asserts
        ------------
            ValueError is raised when ⌊t_max·n^{1/3}⌋ + num_eigs exceeds n − 2.
        """
        with self.assertRaises(ValueError):
            compute_trajectory(BetaEnsembleSpec(n=27, beta=2.0), RngStream(master_seed=0), 3, 10.0, 0.5)


    ## Test difference quotients
    def test_finite_difference(self):
        """
        Test difference quotients along one trajectory.

        Asserts
        ------------
            There is one quotient per minor change, all nonnegative.
            A trajectory on a single minor raises ValueError.
        """
        ## Arrange
        spec = BetaEnsembleSpec(n=216, beta=2.0)
        traj = compute_trajectory(spec, RngStream(master_seed=34), 1, 1.0, 0.05, with_weights=False)
        still = compute_trajectory(spec, RngStream(master_seed=34), 1, 0.1, 0.05, with_weights=False)

        ## Act
        quotients = derivative_by_finite_difference(traj, 0)

        ## Assert
        self.assertEqual(quotients.size, 6)
        self.assertTrue(np.all(quotients >= -1e-6))
        with self.assertRaises(ValueError):
            derivative_by_finite_difference(still, 0)


    ## Test the pooled drift
    def test_drift_slope(self):
        """
        Test the pooled least-squares slope of Λ_1(t) − t.

        Asserts
        ------------
            The slope agrees with `numpy.polyfit` on the pooled data.
        """
        ## Arrange
        spec = BetaEnsembleSpec(n=125, beta=2.0)
        trajectories = trajectory_replicas(spec, RngStream(master_seed=35), 1, 1.0, 0.1, reps=4)

        ## Act
        slope = drift_slope(trajectories)

        ## Assert
        t = np.concatenate([traj.times() for traj in trajectories])
        y = np.concatenate([traj.eigenvalue_path(0, recentered=True) for traj in trajectories])
        self.assertAlmostEqual(slope, float(np.polyfit(t, y, 1)[0]), places=10)
        self.assertEqual(trajectories[0].frames[0].spectral_weights.size, 0)


class TestReplicaSamplesUnit(TestCase):
    """
    Unit tests for the Monte Carlo sample builders.
    """

    ## Test spectral weights
    def test_spectral_weight_samples(self):
        """
        Test n·q_i over replicas of a small matrix.

        Verifications
        ------------
            q is Dirichlet(β/2, …), so E[n·q_1] = 1 exactly for every n.

        Asserts
        ------------
            The array is reps × num_eigs, positive, with mean n·q_1 near 1.
            One and three threads give identical arrays.
        """
        ## Arrange
        spec = BetaEnsembleSpec(n=50, beta=2.0)

        ## Act
        serial = spectral_weight_samples(spec, RngStream(master_seed=36), num_eigs=2, reps=400)
        threaded = spectral_weight_samples(spec, RngStream(master_seed=36), num_eigs=2, reps=400, threads=3)

        ## Assert
        self.assertEqual(serial.shape, (400, 2))
        self.assertTrue(np.all(serial > 0))
        self.assertAlmostEqual(float(serial[:, 0].mean()), 1.0, delta=0.2)
        np.testing.assert_array_equal(serial, threaded)


    ## Test difference quotient samples
    def test_finite_difference_samples(self):
        """
        Test one-step quotients at a fixed minor.

        Asserts
        ------------
            The array is reps × num_eigs and nonnegative up to rounding.
            A minor index past the matrix raises ValueError.
        """
        ## Arrange
        spec = BetaEnsembleSpec(n=64, beta=1.0)

        ## Act
        samples = finite_difference_samples(spec, RngStream(master_seed=37), num_eigs=2, reps=30, minor_index=3)

        ## Assert
        self.assertEqual(samples.shape, (30, 2))
        self.assertTrue(np.all(samples >= -1e-6))
        with self.assertRaises(ValueError):
            finite_difference_samples(spec, RngStream(master_seed=37), num_eigs=2, reps=30, minor_index=62)


    ## Test stationarity samples
    def test_stationarity_samples(self):
        """
        Test the replica-aligned pair Λ_1(0), Λ_1(t*) − t*.

        Asserts
        ------------
            Both samples have one entry per replica; at β = ∞ every entry is identical.
        """
        ## Act
        start, later = stationarity_samples(BetaEnsembleSpec(n=125, beta=2.0), RngStream(master_seed=38), 0.6, reps=25)
        fixed, _ = stationarity_samples(BetaEnsembleSpec(n=125, beta=math.inf), RngStream(master_seed=38), 0.6, reps=20)

        ## Assert
        self.assertEqual((start.size, later.size), (25, 25))
        self.assertTrue(np.all(fixed == fixed[0]))


    ## Test eigenvector linearity profiles
    def test_linearity_profile(self):
        """
        Test the ramp deviation of the lowest edge eigenvector.

        Asserts
        ------------
            Positions are j/n^{1/3} for j up to ⌊x0·n^{1/3}⌋.
            The deviation at j = 1 is zero and the scaled values are finite.
        """
        ## Act
        profile = eigvec_linearity_profile(BetaEnsembleSpec(n=1000, beta=2.0), RngStream(master_seed=39), 0, 0.5)

        ## Assert
        np.testing.assert_allclose(profile.x, np.arange(1, 6) / 10.0)
        self.assertEqual(profile.deviation[0], 0.0)
        self.assertTrue(np.all(np.isfinite(profile.scaled)))


    ## Test the skewness report
    def test_reversibility_asymmetry(self):
        """
        Test skewness of exponential samples, the β = 2 derivative law.

        Asserts
        ------------
            The skewness is near 2 with a positive interval.
            Fewer than 1000 samples raise ValueError.
        """
        ## Arrange
        samples = np.random.default_rng(40).exponential(1.0, size=20000)

        ## Act
        report = reversibility_asymmetry(samples, RngStream(master_seed=40), n_resamples=300)

        ## Assert
        self.assertAlmostEqual(report.skewness, 2.0, delta=0.3)
        self.assertTrue(report.positive)
        self.assertLessEqual(report.ci_low, report.skewness)
        with self.assertRaises(ValueError):
            reversibility_asymmetry(samples[:100])


class TestTrajectoryOutputUnit(TestCase):
    """
    Unit tests for the trajectory table, CSV and JSON writers.
    """

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.traj = compute_trajectory(BetaEnsembleSpec(n=125, beta=2.0), RngStream(master_seed=41), 2, 0.4, 0.2)


    def tearDown(self):
        self.directory.cleanup()


    ## Test the CSV file
    def test_write_trajectory_csv(self):
        """
        Test the `#` header and the rows of the trajectory CSV.

        Asserts
        ------------
            The header echoes the config and the seed.
            The table reads back with the expected columns and 1-based eig_index.
        """
        ## Arrange
        path = Path(self.directory.name) / 'traj.csv'

        ## Act
        write_trajectory_csv(self.traj, path, {'beta': 2.0, 'n': 125})

        ## Assert
        lines = path.read_text(encoding='UTF-8').splitlines()
        self.assertIn('# beta=2.0', lines)
        self.assertIn('# seed.master_seed=41', lines)
        table = pd.read_csv(path, comment='#')
        self.assertEqual(list(table.columns), TRAJECTORY_COLUMNS)
        self.assertEqual(len(table), 3 * 2)
        self.assertEqual(sorted(table['eig_index'].unique()), [1, 2])
        np.testing.assert_allclose(table['recentered'], table['scaled_eig'] - table['t'], atol=1e-10)


    ## Test the table without weights
    def test_table_without_weights(self):
        """
        Test that skipped weights leave deriv_est empty.

        Asserts
        ------------
            Every deriv_est is NaN.
        """
        traj = compute_trajectory(BetaEnsembleSpec(n=125, beta=2.0), RngStream(master_seed=41), 1, 0.4, 0.2, with_weights=False)
        self.assertTrue(trajectory_table(traj)['deriv_est'].isna().all())


    ## Test the JSON summary
    def test_write_summary_json(self):
        """
        Test the summary document.

        Asserts
        ------------
            The file holds spec, seed, moments, ks_reports and config.
        """
        ## Arrange
        path = Path(self.directory.name) / 'summary.json'
        summary = TrajectorySummary(
            spec=self.traj.spec.model_dump(),
            seed=self.traj.seed,
            moments={'lambda_1': moments(self.traj.eigenvalue_path(0))},
            ks_reports=[],
            config={'n': 125}
        )

        ## Act
        write_summary_json(path, summary)

        ## Assert
        document = json.loads(path.read_text(encoding='UTF-8'))
        self.assertEqual(set(document), {'spec', 'seed', 'moments', 'ks_reports', 'config'})
        self.assertEqual(document['moments']['lambda_1']['n'], 3)


    ## Test that undefined moments are written as null
    def test_summary_json_nan_is_null(self):
        """
        Test a summary whose moments include NaN.

        Asserts
        ------------
            Two samples leave the skewness undefined; the file is strict JSON with null in its place.
        """
        ## Arrange
        path = Path(self.directory.name) / 'tiny.summary.json'
        summary = TrajectorySummary(
            spec=self.traj.spec.model_dump(),
            seed=self.traj.seed,
            moments={'lambda_1': moments([0.5, 1.5])},
            ks_reports=[],
            config={'bound': math.inf}
        )

        ## Act
        write_summary_json(path, summary)
        text = path.read_text(encoding='UTF-8')

        ## Assert
        self.assertNotIn('NaN', text)
        self.assertNotIn('Infinity', text)
        document = json.loads(text, parse_constant=lambda token: self.fail(f'non-standard constant {token}'))
        self.assertIsNone(document['moments']['lambda_1']['skewness'])
        self.assertIsNone(document['moments']['lambda_1']['skewness_se'])
        self.assertIsNone(document['config']['bound'])
        self.assertEqual(document['moments']['lambda_1']['mean'], 1.0)
