### tests/test_integration_sao.py
## Defines integration tests running the stochastic Airy operator criteria and the quick suite at full scale

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

## Imports
# Third-party modules
import json
import pytest
import tempfile
import unittest

from pathlib import Path

# Internal modules
from pyfiles.cli import main
from pyfiles.verification import (
    QUICK_CRITERIA,
    VerifyScale,
    run_criterion
)

## Integration runs take minutes each; they only run when this variable is 1
INTEGRATION_ENV = 'AIRY_INTEGRATION'


class TestSaoIntegration(unittest.TestCase):
    """
    Integration tests for the operator-side acceptance criteria.

    They solve the discretised operator at fine meshes and check:

    - The noiseless limit against the Airy zeros
    - The pathwise derivative formula on Brownian paths
    - The spliced variational bound
    - The `verify --quick` command end to end

    All tests require AIRY_INTEGRATION=1.
    """

    ## Class resources
    @classmethod
    def setUpClass(cls):
        cls.scale = VerifyScale()
        cls.threads = os.cpu_count() or 1


    ## Set up for each test
    def setUp(self):
        """
        Skip unless integration runs are switched on.
        """
        if os.environ.get(INTEGRATION_ENV) != '1':
            self.skipTest(f"Set {INTEGRATION_ENV}=1 to run integration tests.")


    def assertCriterion(self, number: int):
        result = run_criterion(number, seed=0, scale=self.scale, threads=self.threads)
        for report in result.reports:
            with self.subTest(report=report.name):
                self.assertTrue(report.passed, f"{report.name}: {report.statistic} ≥ {report.critical_value}")


    ## Test the noiseless limit
    @pytest.mark.order(1)
    def test_airy_limit(self):
        """
        Test the noiseless operator at h = 5·10⁻⁴.

        Asserts
        ------------
            Λ_1 within 10⁻³ of −a_1, the shift identity to 10⁻⁶ and squared slopes to 10⁻³.
        """
        self.assertCriterion(7)


    ## Test the pathwise derivative
    @pytest.mark.order(2)
    def test_pathwise_derivative(self):
        """
        Test (Λ_1(t+δ) − Λ_1(t))/δ against f′(t)² over 100 paths at h = 2·10⁻⁴, δ = 0.01.

        Asserts
        ------------
            The median relative error is below 0.15 and drops when h and δ are halved.
        """
        self.assertCriterion(8)


    ## Test the variational bound
    @pytest.mark.order(3)
    def test_variational(self):
        """
        Test random splices over 100 paths.

        Asserts
        ------------
            No spliced trial function beats Λ_1(t).
        """
        self.assertCriterion(9)


    ## Test the quick suite through the command line
    @pytest.mark.order(4)
    def test_verify_quick(self):
        """
        Test `verify --quick` end to end.

        Asserts
        ------------
            Exit code 0 and a report listing every quick criterion as passed.
        """
        with tempfile.TemporaryDirectory() as directory:
            out = Path(directory) / 'verify.json'
            code = main(['verify', '--quick', '--threads', str(self.threads), '--out', str(out)])
            payload = json.loads(out.read_text(encoding='UTF-8'))

        self.assertEqual(code, 0)
        self.assertEqual([c['number'] for c in payload['criteria']], list(QUICK_CRITERIA))
        self.assertTrue(all(c['passed'] for c in payload['criteria']))
