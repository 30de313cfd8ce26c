### tests/test_integration_minor_process.py
## Defines integration tests running the statistical matrix-model criteria of ./pyfiles/verification.py at full scale

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

## Imports
# Third-party modules
import pytest
import unittest

# Internal modules
from pyfiles.verification import (
    VerifyScale,
    run_criterion
)

## Integration runs take minutes each; they only run when this variable is 1
INTEGRATION_ENV = 'AIRY_INTEGRATION'


class TestMinorProcessIntegration(unittest.TestCase):
    """
    Integration tests for the matrix-model acceptance criteria.

    These tests draw tens of thousands of β-Hermite matrices and check:

    - Spectral-weight moments
    - The Gamma derivative law for β = 1, 2, 4
    - Stationarity of Λ_1(t) − t
    - Non-reversibility through the skewness of the derivative
    - Near-linearity of edge eigenvectors

    All tests require AIRY_INTEGRATION=1 and benefit from several cores.
    """

    ## Class resources
    @classmethod
    def setUpClass(cls):
        """
        Set up the full acceptance scale and the worker count once for all tests.

        Variables
        ------------
            scale: VerifyScale
                Full-size criteria.
            threads: int
                One worker per core.
        """
        cls.scale = VerifyScale()
        cls.threads = os.cpu_count() or 1


    ## Set up for each test
    # Skip unless integration runs are switched on
    def setUp(self):
        """
        Set up test fixtures before each test method.

        Raises
        ------------
            unittest.SkipTest
                When AIRY_INTEGRATION is not 1.
        """
        if os.environ.get(INTEGRATION_ENV) != '1':
            self.skipTest(f"Set {INTEGRATION_ENV}=1 to run integration tests.")


    def assertCriterion(self, number: int):
        result = run_criterion(number, seed=0, scale=self.scale, threads=self.threads)
        for report in result.reports:
            with self.subTest(report=report.name):
                self.assertTrue(report.passed, f"{report.name}: {report.statistic} ≥ {report.critical_value}")


    ## Test spectral-weight moments
    @pytest.mark.order(1)
    def test_weight_moments(self):
        """
        Test the mean and variance of q_1 at β = 2, n = 200, 10⁴ replicas.

        Asserts
        ------------
            Both lie within three standard errors of 1/n and the Dirichlet variance.
        """
        self.assertCriterion(3)


    ## Test the derivative law
    @pytest.mark.order(2)
    def test_derivative_law(self):
        """
        Test n·q_i against Γ(β/2, 2/β) at n = 2000.

        Asserts
        ------------
            KS passes in a majority of seeds for i = 1, 2, 3 and β = 1, 2, 4.
            Mean within 5% of 1 and variance within 10% of 2/β.
        """
        self.assertCriterion(4)


    ## Test stationarity
    @pytest.mark.order(3)
    def test_stationarity(self):
        """
        Test Λ_1(0) against Λ_1(1) − 1 at n = 10⁵ and the drift of Λ_1(t) − t.

        Asserts
        ------------
            KS passes in a majority of seeds; the pooled drift slope is below 0.1.
        """
        self.assertCriterion(5)


    ## Test non-reversibility
    @pytest.mark.order(4)
    def test_asymmetry(self):
        """
        Test the skewness of n·q_1 − 1 at β = 2.

        Asserts
        ------------
            The 99% bootstrap interval is positive and the skewness within 20% of 2.
        """
        self.assertCriterion(6)


    ## Test eigenvector near-linearity
    @pytest.mark.order(5)
    def test_linearity(self):
        """
        Test n^{1/6}·|v_j − j·v_1|/x² at n = 10⁵ and 2·10⁵.

        Asserts
        ------------
            At most 5% of replicas exceed the pilot constant; the 95th percentile is stable in n.
        """
        self.assertCriterion(10)
