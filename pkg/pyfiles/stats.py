### stats
## Distributional checks: incomplete gamma/beta CDFs, Kolmogorov–Smirnov tests,
## moments with standard errors and bootstrap intervals. Every check ends in a `TestReport`.

## Imports
# Third-party modules
import math
import numpy as np

from scipy import special
from scipy.stats import (
    bootstrap,
    kstest,
    ks_2samp,
    kstwobign,
    kurtosis,
    skew
)
from pydantic import (
    BaseModel,
    Field,
    model_validator
)

from typing import (
    Any,
    Callable,
    Dict,
    Sequence,
    Tuple
)

# Internal modules
from validators import airy_types
from pyfiles.logger import logger
from pyfiles.randvar import (
    GammaParams,
    RngStream
)


## Constants
# Default significance level of every KS test
DEFAULT_LEVEL: float = 0.01
# Fewest samples a KS test accepts
MIN_KS_SAMPLES: int = 20


class TestReport(BaseModel):
    """
    Outcome of one named check: passed exactly when statistic < critical_value.

    Attributes
    ------------
        name: str
            What was checked.
        statistic: float
            The test statistic.
        critical_value: float
            The threshold it must stay below.
        n_samples: int
            Number of samples behind the statistic.
        passed: bool
            statistic < critical_value.
        metadata: Dict[str, Any]
            Anything else worth keeping (level, seeds, estimates).
    """
    __test__ = False

    name: str
    statistic: float
    critical_value: float
    n_samples: int
    passed: bool
    metadata: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode='after')
    def validate_passed(self) -> 'TestReport':
        if self.passed != bool(self.statistic < self.critical_value):
            error_message = f"Report `{self.name}`: passed={self.passed} disagrees with {self.statistic} < {self.critical_value}."
            logger.error(f'❌ {error_message}')
            raise ValueError(error_message)
        return self

    @classmethod
    def build(
        cls,
        name: str,
        statistic: float,
        critical_value: float,
        n_samples: int,
        **metadata: Any
    ) -> 'TestReport':
        """
        A report whose `passed` flag is derived from the statistic.
        """
        statistic = float(statistic)
        critical_value = float(critical_value)
        report = cls(
            name=name,
            statistic=statistic,
            critical_value=critical_value,
            n_samples=int(n_samples),
            passed=bool(statistic < critical_value),
            metadata=metadata
        )
        icon = '✅' if report.passed else '❌'
        logger.info(f'{icon} {name}: statistic {statistic:.6g} vs critical {critical_value:.6g} (n={n_samples})')
        return report


class Moments(BaseModel):
    """
    Sample moments with their asymptotic standard errors.
    """
    n: int
    mean: float
    variance: float
    skewness: float
    mean_se: float
    variance_se: float
    skewness_se: float


## Special functions

def reg_incomplete_gamma(a: float, x: float) -> float:
    """
    The regularised lower incomplete gamma function P(a, x), the Gamma(a, 1) CDF at x.
    """
    airy_types.IncompleteGammaParams(a=a, x=x)
    return float(np.clip(special.gammainc(a, x), 0.0, 1.0))


def reg_incomplete_beta(a: float, b: float, x: float) -> float:
    """
    The regularised incomplete beta function I_x(a, b), the Beta(a, b) CDF at x.
    """
    airy_types.IncompleteBetaParams(a=a, b=b, x=x)
    return float(np.clip(special.betainc(a, b, x), 0.0, 1.0))


def gamma_cdf(shape: float, scale: float) -> Callable[[np.ndarray], np.ndarray]:
    """
    The CDF of Gamma(shape, scale) as a vectorised callable, for `ks_one_sample`.
    """
    GammaParams(shape=shape, scale=scale)

    def cdf(x: np.ndarray) -> np.ndarray:
        return np.clip(special.gammainc(shape, np.maximum(np.asarray(x, dtype=np.float64), 0.0) / scale), 0.0, 1.0)
    return cdf


def beta_cdf(a: float, b: float) -> Callable[[np.ndarray], np.ndarray]:
    """
    The CDF of Beta(a, b) as a vectorised callable.
    """
    airy_types.IncompleteBetaParams(a=a, b=b, x=0.0)

    def cdf(x: np.ndarray) -> np.ndarray:
        return np.clip(special.betainc(a, b, np.clip(np.asarray(x, dtype=np.float64), 0.0, 1.0)), 0.0, 1.0)
    return cdf


## Kolmogorov–Smirnov

def ks_critical_value(n_effective: float, level: float = DEFAULT_LEVEL) -> float:
    """
    Asymptotic Kolmogorov critical value c(level)/√n (about 1.63/√n at 1%).
    """
    airy_types.LevelParams(level=level)
    return float(kstwobign.isf(level) / math.sqrt(n_effective))


def ks_one_sample(
    samples: Sequence[float] | np.ndarray,
    cdf: Callable[[np.ndarray], np.ndarray],
    level: float = DEFAULT_LEVEL,
    name: str = "ks_one_sample"
) -> TestReport:
    """
    One-sample KS test of `samples` against a continuous CDF.

    Args
    ------------
        samples: array-like
            At least 20 samples.
        cdf: Callable
            Vectorised CDF.
        level: float
            Significance level.
        name: str
            Report name.

    Returns
    ------------
        TestReport:
            Sup-distance against the asymptotic critical value.
    """
    data = np.asarray(samples, dtype=np.float64)
    airy_types.SampleCountParams(n_samples=data.size, minimum=MIN_KS_SAMPLES)
    statistic = kstest(data, cdf).statistic
    return TestReport.build(
        name,
        statistic,
        ks_critical_value(data.size, level),
        data.size,
        level=level
    )


def ks_two_sample(
    a_samples: Sequence[float] | np.ndarray,
    b_samples: Sequence[float] | np.ndarray,
    level: float = DEFAULT_LEVEL,
    name: str = "ks_two_sample"
) -> TestReport:
    """
    Two-sample KS test; the critical value uses the effective size nm/(n+m).

    Returns
    ------------
        TestReport:
            Sup-distance between the empirical CDFs against the asymptotic critical value.
    """
    a = np.asarray(a_samples, dtype=np.float64)
    b = np.asarray(b_samples, dtype=np.float64)
    airy_types.SampleCountParams(n_samples=min(a.size, b.size), minimum=MIN_KS_SAMPLES)
    statistic = ks_2samp(a, b).statistic
    effective = a.size * b.size / (a.size + b.size)
    return TestReport.build(
        name,
        statistic,
        ks_critical_value(effective, level),
        a.size + b.size,
        level=level,
        n_a=int(a.size),
        n_b=int(b.size)
    )


## Moments

def moments(samples: Sequence[float] | np.ndarray) -> Moments:
    """
    Mean, unbiased variance and bias-corrected skewness, with standard errors.

    The variance error uses the sample excess kurtosis; the skewness error is the normal-theory
    formula sqrt(6n(n−1)/((n−2)(n+1)(n+3))). Skewness is 0 for constant samples and NaN below 3 samples.
    """
    data = np.asarray(samples, dtype=np.float64)
    airy_types.SampleCountParams(n_samples=data.size, minimum=2)
    n = data.size
    mean = float(data.mean())
    variance = float(data.var(ddof=1))

    if variance == 0:
        skewness, excess = 0.0, 0.0
    elif n < 3:
        skewness, excess = math.nan, 0.0
    else:
        skewness = float(skew(data, bias=False))
        excess = float(kurtosis(data, bias=False)) if n > 3 else 0.0

    skewness_se = math.sqrt(6 * n * (n - 1) / ((n - 2) * (n + 1) * (n + 3))) if n > 2 else math.nan
    return Moments(
        n=n,
        mean=mean,
        variance=variance,
        skewness=skewness,
        mean_se=math.sqrt(variance / n),
        variance_se=variance * math.sqrt(max(2 / (n - 1) + excess / n, 0.0)),
        skewness_se=skewness_se
    )


def bootstrap_interval(
    samples: Sequence[float] | np.ndarray,
    statistic: Callable[[np.ndarray], float],
    stream: RngStream,
    confidence: float = 0.99,
    n_resamples: int = 2000
) -> Tuple[float, float]:
    """
    A percentile bootstrap interval of `statistic`, resampling with the given stream.
    """
    data = np.asarray(samples, dtype=np.float64)
    result = bootstrap(
        (data,),
        statistic,
        confidence_level=confidence,
        n_resamples=n_resamples,
        method='percentile',
        vectorized=False,
        random_state=stream.generator
    )
    return float(result.confidence_interval.low), float(result.confidence_interval.high)


def standard_error_check(
    name: str,
    estimate: float,
    target: float,
    standard_error: float,
    n_samples: int,
    n_sigma: float = 3.0
) -> TestReport:
    """
    |estimate − target| measured in standard errors, passing below `n_sigma`.
    """
    distance = abs(estimate - target) / standard_error if standard_error > 0 else (0.0 if estimate == target else math.inf)
    return TestReport.build(
        name,
        distance,
        n_sigma,
        n_samples,
        estimate=float(estimate),
        target=float(target),
        standard_error=float(standard_error)
    )


def majority_pass(
    name: str,
    reports: Sequence[TestReport],
    required: int
) -> TestReport:
    """
    Aggregate repeated-seed reports: passes when at least `required` of them passed.

    The statistic is the number of failures, compared against len(reports) − required + 1.
    """
    failures = sum(not r.passed for r in reports)
    return TestReport.build(
        name,
        failures,
        len(reports) - required + 1,
        sum(r.n_samples for r in reports),
        runs=[r.model_dump() for r in reports]
    )
