### tests/test_unit_hermite_ensemble.py
## Defines unit tests for methods in ./pyfiles/hermite_ensemble.py

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

## Imports
# Third-party modules
import math
import numpy as np

from unittest import TestCase
from scipy.special import ai_zeros

# Internal modules
from pyfiles.hermite_ensemble import (
    BetaEnsembleSpec,
    EnsembleDraw,
    direct_minor_matrix,
    edge_minor_matrix,
    sample_hermite,
    scaled_edge_eigenvalues
)
from pyfiles.randvar import RngStream


class TestBetaEnsembleSpecUnit(TestCase):
    """
    Unit tests for `BetaEnsembleSpec`.
    """

    ## Test validation
    def test_invalid_spec(self):
        """
        Test rejected sizes and Dyson indices.

        Asserts
        ------------
            ValueError is raised for n < 2 and for β ≤ 0.
        """
        for kwargs in ({'n': 1, 'beta': 2.0}, {'n': 10, 'beta': 0.0}, {'n': 10, 'beta': -1.0}):
            with self.subTest(**kwargs):
                with self.assertRaises(ValueError):
                    BetaEnsembleSpec(**kwargs)


    ## Test minor indices
    def test_minor_at(self):
        """
        Test k = ⌊t·n^{1/3}⌋ when t·n^{1/3} is an integer up to rounding.

        Verifications
        ------------
            1000^{1/3} evaluates slightly below 10 in floating point.

        Asserts
        ------------
            Boundary positions 0, 0.3, 1 and 2 map to minors 0, 3, 10 and 20.
            The scales are n^{1/3} and n^{1/6}.
        """
        ## Arrange
        spec = BetaEnsembleSpec(n=1000, beta=2.0)

        ## Act and assert
        for t, k in ((0.0, 0), (0.3, 3), (1.0, 10), (2.0, 20)):
            with self.subTest(t=t):
                self.assertEqual(spec.minor_at(t), k)
        self.assertAlmostEqual(spec.time_scale, 10.0, places=12)
        self.assertAlmostEqual(spec.edge_scale, math.sqrt(10.0), places=12)


class TestSampleHermiteUnit(TestCase):
    """
    Unit tests for `sample_hermite` and the matrices built from a draw.

    This test suite covers:

        - The noiseless β = ∞ matrix
        - Entry laws at finite β
        - Reproducibility from a seed
        - Minor construction and validation
    """

    ## Test the noiseless matrix
    def test_noiseless_draw(self):
        """
        Test the draw at β = ∞.

        Asserts
        ------------
            The diagonal is zero and the off-diagonal is √(n−1), …, √1.
        """
        ## Act
        draw = sample_hermite(BetaEnsembleSpec(n=6, beta=math.inf), RngStream(master_seed=1))

        ## Assert
        np.testing.assert_array_equal(draw.diag_raw, np.zeros(6))
        np.testing.assert_allclose(draw.offdiag_raw, np.sqrt([5, 4, 3, 2, 1]))


    ## Test entry laws
    def test_entry_laws(self):
        """
        Test the entry laws at β = 2 for n = 4000.

        Verifications
        ------------
            Diagonal entries are N(0, 2/β).
            Squared off-diagonal entries χ²_{jβ}/β have mean j.

        Asserts
        ------------
            The diagonal mean is 0 and its variance 1 within sampling error.
            The sum of squared off-diagonals is within 1 % of Σ j.
            Every off-diagonal entry is positive.
        """
        ## Arrange
        spec = BetaEnsembleSpec(n=4000, beta=2.0)

        ## Act
        draw = sample_hermite(spec, RngStream(master_seed=2))

        ## Assert
        self.assertAlmostEqual(float(draw.diag_raw.mean()), 0.0, delta=0.1)
        self.assertAlmostEqual(float(draw.diag_raw.var()), 1.0, delta=0.1)
        expected = np.arange(3999, 0, -1).sum()
        self.assertAlmostEqual(float((draw.offdiag_raw ** 2).sum()) / expected, 1.0, delta=0.01)
        self.assertTrue(np.all(draw.offdiag_raw > 0))


    ## Test reproducibility
    def test_reproducible(self):
        """
        Test that a seed determines the draw.

        Asserts
        ------------
            Equal seeds give identical draws; a different stream index gives a different draw.
            The seed record is attached to the draw.
        """
        ## Arrange
        spec = BetaEnsembleSpec(n=50, beta=1.0)

        ## Act
        first = sample_hermite(spec, RngStream(master_seed=3))
        second = sample_hermite(spec, RngStream(master_seed=3))
        other = sample_hermite(spec, RngStream(master_seed=3, stream_index=1))

        ## Assert
        np.testing.assert_array_equal(first.diag_raw, second.diag_raw)
        np.testing.assert_array_equal(first.offdiag_raw, second.offdiag_raw)
        self.assertFalse(np.array_equal(first.diag_raw, other.diag_raw))
        self.assertEqual(first.seed['master_seed'], 3)


    ## Test invalid draws
    def test_invalid_draw(self):
        """
        Test that malformed draws are rejected.

        Asserts
        ------------
            ValueError is raised for a wrong diagonal length and for a nonpositive χ entry.
        """
        spec = BetaEnsembleSpec(n=3, beta=2.0)
        invalid = [
            ({'diag_raw': [0.0, 0.0], 'offdiag_raw': [1.0, 1.0]}, 'short diagonal'),
            ({'diag_raw': [0.0, 0.0, 0.0], 'offdiag_raw': [1.0, 0.0]}, 'zero chi'),
        ]
        for kwargs, description in invalid:
            with self.subTest(case=description):
                with self.assertRaises(ValueError):
                    EnsembleDraw(spec=spec, **kwargs)


    ## Test edge minors
    def test_edge_minor_matrix(self):
        """
        Test 2√n·I − A with its first k rows and columns removed.

        Asserts
        ------------
            The minor has size n−k, the centred diagonal and the negated off-diagonal.
            k = n−1 is rejected.
        """
        ## Arrange
        spec = BetaEnsembleSpec(n=20, beta=4.0)
        draw = sample_hermite(spec, RngStream(master_seed=4))

        ## Act
        minor = edge_minor_matrix(draw, 5)

        ## Assert
        self.assertEqual(minor.size, 15)
        np.testing.assert_allclose(minor.diag, 2 * math.sqrt(20) - draw.diag_raw[5:])
        np.testing.assert_allclose(minor.offdiag, -draw.offdiag_raw[5:])
        with self.assertRaises(ValueError):
            edge_minor_matrix(draw, 19)


    ## Test scaled eigenvalues
    def test_scaled_edge_eigenvalues(self):
        """
        Test n^{1/6}-scaled edge eigenvalues.

        Verifications
        ------------
            At β = ∞ and n = 4000 the lowest scaled eigenvalues are near the negated Airy zeros.

        Asserts
        ------------
            Small draws agree with a dense solver.
            The noiseless values are within 0.1 of −a_1, −a_2, −a_3.
        """
        ## Arrange
        draw = sample_hermite(BetaEnsembleSpec(n=40, beta=2.0), RngStream(master_seed=5))
        dense = np.linalg.eigvalsh(edge_minor_matrix(draw, 3).to_dense())[:4] * 40 ** (1 / 6)
        noiseless = sample_hermite(BetaEnsembleSpec(n=4000, beta=math.inf), RngStream(master_seed=5))

        ## Act
        found = scaled_edge_eigenvalues(draw, 3, 4, tol=1e-12)
        edge = scaled_edge_eigenvalues(noiseless, 0, 3)

        ## Assert
        np.testing.assert_allclose(found, dense, atol=1e-9)
        np.testing.assert_allclose(edge, -ai_zeros(3)[0], atol=0.1)


    ## Test directly sampled minors
    def test_direct_minor_matrix(self):
        """
        Test the matrix built from a fresh ensemble of size n−k.

        Asserts
        ------------
            At β = ∞ it coincides with the k-th edge minor of the full draw.
        """
        ## Arrange
        spec = BetaEnsembleSpec(n=30, beta=math.inf)
        stream = RngStream(master_seed=6)

        ## Act
        direct = direct_minor_matrix(spec, 7, stream)
        minor = edge_minor_matrix(sample_hermite(spec, stream), 7)

        ## Assert
        np.testing.assert_allclose(direct.diag, minor.diag)
        np.testing.assert_allclose(direct.offdiag, minor.offdiag)
