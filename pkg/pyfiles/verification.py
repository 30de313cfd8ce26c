### verification
## The acceptance suite run by `cli verify`: eleven criteria, each ending in one or more `TestReport`s.
## Exact criteria hold for every seed; statistical ones are repeated over seeds and majority-voted.

## Imports
# Third-party modules
import json
import math
import time
import numpy as np

from pathlib import Path
from pydantic import (
    BaseModel,
    Field
)
from scipy.special import ai_zeros

from typing import (
    Any,
    Callable,
    Dict,
    List,
    Optional,
    Tuple
)

# Internal modules
from pyfiles.logger import logger
from pyfiles.randvar import (
    GammaParams,
    RngStream,
    sample_brownian_grid,
    zero_grid
)
from pyfiles.replicas import run_replicas
from pyfiles.tridiag_eigen import (
    TridiagSym,
    interlacing_violation,
    lowest_eigenvalues
)
from pyfiles.hermite_ensemble import (
    BetaEnsembleSpec,
    edge_minor_matrix,
    sample_hermite
)
from pyfiles.minor_process import (
    drift_slope,
    eigvec_linearity_profile,
    json_ready,
    reversibility_asymmetry,
    spectral_weight_samples,
    stationarity_samples,
    trajectory_replicas
)
from pyfiles.sao_discrete import (
    derivative_check,
    richardson,
    solve_domain,
    spliced_rayleigh_bound
)
from pyfiles.stats import (
    TestReport,
    gamma_cdf,
    ks_one_sample,
    ks_two_sample,
    majority_pass,
    moments,
    standard_error_check
)


## Constants
# Criteria run by `verify --quick`
QUICK_CRITERIA: Tuple[int, ...] = (1, 2, 7, 9, 11)
# Margin applied to the pilot 95th percentile of the eigenvector profile
PILOT_MARGIN: float = 1.5
# Slack of the spliced Rayleigh bound
SPLICE_TOL: float = 1e-7


class VerifyScale(BaseModel):
    """
    Sizes of every criterion. The defaults are the full acceptance scale; `quick()` shrinks
    the exact criteria so the quick subset finishes in under a minute.
    """
    solver_instances: int = 1000
    solver_max_m: int = 8
    interlacing_n: int = 2000
    interlacing_draws: int = 100
    interlacing_t_max: float = 2.0
    weight_n: int = 200
    weight_reps: int = 10_000
    derivative_n: int = 2000
    derivative_reps: int = 5000
    seeds: int = 3
    stationarity_n: int = 100_000
    stationarity_reps: int = 1000
    drift_n: int = 6000
    drift_reps: int = 200
    asymmetry_n: int = 2000
    asymmetry_reps: int = 10_000
    airy_mesh: float = 5e-4
    pathwise_paths: int = 100
    pathwise_mesh: float = 2e-4
    pathwise_delta: float = 0.01
    splice_paths: int = 100
    splice_mesh: float = 1e-3
    profile_n: int = 100_000
    profile_reps: int = 500
    profile_pilot_reps: int = 100
    profile_x0: float = 0.5
    replay_n: int = 100
    replay_reps: int = 200

    @classmethod
    def quick(cls) -> 'VerifyScale':
        return cls(
            solver_instances=200,
            interlacing_n=300,
            interlacing_draws=10,
            airy_mesh=1e-3,
            splice_paths=20
        )


class CriterionResult(BaseModel):
    """
    Reports of one acceptance criterion.
    """
    number: int
    title: str
    exact: bool
    seconds: float
    reports: List[TestReport]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)


class VerificationReport(BaseModel):
    """
    Every criterion run, with the seed and scale behind them.
    """
    seed: int
    threads: int
    quick: bool
    scale: VerifyScale
    criteria: List[CriterionResult] = Field(default_factory=list)
    config: Dict[str, Any] = Field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.criteria)

    def failures(self) -> List[str]:
        return [
            f'{c.number}. {c.title}: {r.name}'
            for c in self.criteria
            for r in c.reports
            if not r.passed
        ]


## Exact linear algebra

def criterion_solver(stream: RngStream, scale: VerifyScale, threads: int) -> List[TestReport]:
    """
    Lowest eigenvalues of small random tridiagonals against a dense solve, and the
    discrete Laplacian against 2 − 2cos(jπ/(m+1)).
    """
    rng = stream.generator
    errors = {'stebz': 0.0, 'sturm': 0.0}
    for _ in range(scale.solver_instances):
        m = int(rng.integers(1, scale.solver_max_m + 1))
        T = TridiagSym(diag=rng.standard_normal(m) * 3, offdiag=rng.standard_normal(m - 1))
        k = int(rng.integers(1, m + 1))
        dense = np.linalg.eigvalsh(T.to_dense())[:k]
        for method in errors:
            found = lowest_eigenvalues(T, k, tol=1e-12, method=method)
            errors[method] = max(errors[method], float(np.max(np.abs(found - dense))))

    reports = [
        TestReport.build(f'random_tridiag_{method}', error, 1e-10, scale.solver_instances)
        for method, error in errors.items()
    ]
    for m in (10, 100):
        T = TridiagSym(diag=np.full(m, 2.0), offdiag=np.full(m - 1, -1.0))
        exact = 2 - 2 * np.cos(np.arange(1, m + 1) * np.pi / (m + 1))
        error = float(np.max(np.abs(lowest_eigenvalues(T, m, tol=1e-12) - exact)))
        reports.append(TestReport.build(f'laplacian_m{m}', error, 1e-10, m))
    return reports


def criterion_interlacing(stream: RngStream, scale: VerifyScale, threads: int) -> List[TestReport]:
    """
    Consecutive edge minors of β-Hermite draws interlace, up to twice the solver tolerance.
    The statistic is the largest violation in units of that tolerance.
    """
    reports = []
    for index, beta in enumerate((1.0, 2.0, 4.0)):
        spec = BetaEnsembleSpec(n=scale.interlacing_n, beta=beta)
        last = spec.minor_at(scale.interlacing_t_max)

        def worst(child: RngStream) -> float:
            draw = sample_hermite(spec, child)
            ratios = []
            for k in range(last + 1):
                minor = edge_minor_matrix(draw, k)
                tol = minor.default_tol()
                ratios.append(interlacing_violation(minor, 5, tol) / tol)
            return max(ratios)

        worst_ratios = run_replicas(
            worst, stream.replica(index), scale.interlacing_draws, threads,
            description=f"Interlacing β={beta}"
        )
        reports.append(TestReport.build(
            f'interlacing_beta{beta:g}',
            max(worst_ratios),
            2.0,
            scale.interlacing_draws,
            minors_per_draw=last + 1
        ))
    return reports


## Spectral weights and the derivative law

def spectral_weight_variance(n: int, beta: float) -> float:
    """
    Var q_1 of a Dirichlet(β/2, …, β/2) vector of length n.
    """
    return 2 * (n - 1) / (n**2 * (beta * n + 2))


def criterion_weight_moments(stream: RngStream, scale: VerifyScale, threads: int) -> List[TestReport]:
    """
    Mean and variance of q_1 at β = 2 within three standard errors of 1/n and the Dirichlet variance.
    """
    n, beta = scale.weight_n, 2.0
    samples = spectral_weight_samples(BetaEnsembleSpec(n=n, beta=beta), stream, 1, scale.weight_reps, threads)
    stats = moments(samples[:, 0] / n)
    return [
        standard_error_check('weight_mean', stats.mean, 1 / n, stats.mean_se, stats.n),
        standard_error_check('weight_variance', stats.variance, spectral_weight_variance(n, beta), stats.variance_se, stats.n)
    ]


def criterion_derivative_law(stream: RngStream, scale: VerifyScale, threads: int) -> List[TestReport]:
    """
    n·q_i against Γ(β/2, 2/β) for i = 1, 2, 3: KS in a majority of seeds, plus mean and variance
    of the first seed's samples.
    """
    reports = []
    required = scale.seeds // 2 + 1
    for index, beta in enumerate((1.0, 2.0, 4.0)):
        law = GammaParams.derivative_law(beta)
        spec = BetaEnsembleSpec(n=scale.derivative_n, beta=beta)
        runs = [
            spectral_weight_samples(spec, stream.replica(index).replica(s), 3, scale.derivative_reps, threads)
            for s in range(scale.seeds)
        ]
        for i in range(3):
            per_seed = [
                ks_one_sample(samples[:, i], gamma_cdf(law.shape, law.scale), name=f'derivative_ks_beta{beta:g}_i{i + 1}_seed{s}')
                for s, samples in enumerate(runs)
            ]
            reports.append(majority_pass(f'derivative_ks_beta{beta:g}_i{i + 1}', per_seed, required))

        stats = moments(runs[0].ravel())
        target_variance = 2 / beta
        reports.append(TestReport.build(f'derivative_mean_beta{beta:g}', abs(stats.mean - 1), 0.05, stats.n, mean=stats.mean))
        reports.append(TestReport.build(
            f'derivative_variance_beta{beta:g}',
            abs(stats.variance - target_variance) / target_variance,
            0.10,
            stats.n,
            variance=stats.variance
        ))
    return reports


## Stationarity and non-reversibility

def criterion_stationarity(stream: RngStream, scale: VerifyScale, threads: int) -> List[TestReport]:
    """
    Λ_1(0) against Λ_1(1) − 1 in a majority of seeds, and zero drift of Λ_1(t) − t over [0, 2].
    """
    spec = BetaEnsembleSpec(n=scale.stationarity_n, beta=2.0)
    per_seed = []
    for s in range(scale.seeds):
        start, later = stationarity_samples(spec, stream.replica(s), 1.0, scale.stationarity_reps, threads)
        per_seed.append(ks_two_sample(start, later, name=f'stationarity_ks_seed{s}'))
    reports = [majority_pass('stationarity_ks', per_seed, scale.seeds // 2 + 1)]

    trajectories = trajectory_replicas(
        BetaEnsembleSpec(n=scale.drift_n, beta=2.0),
        stream.replica(scale.seeds),
        num_eigs=1,
        t_max=2.0,
        dt=0.01,
        reps=scale.drift_reps,
        threads=threads
    )
    slope = drift_slope(trajectories, 0)
    reports.append(TestReport.build('drift_slope', abs(slope), 0.1, scale.drift_reps, slope=slope))
    return reports


def criterion_asymmetry(stream: RngStream, scale: VerifyScale, threads: int) -> List[TestReport]:
    """
    Skewness of n·q_1 − 1 at β = 2: positive with 99% bootstrap confidence and within 20% of 2.
    """
    spec = BetaEnsembleSpec(n=scale.asymmetry_n, beta=2.0)
    samples = spectral_weight_samples(spec, stream.replica(0), 1, scale.asymmetry_reps, threads)[:, 0]
    report = reversibility_asymmetry(samples, stream.replica(1), confidence=0.99)
    target = 2 / math.sqrt(spec.beta / 2)
    return [
        TestReport.build('skewness_positive', -report.ci_low, 0.0, report.n_samples, ci_low=report.ci_low, ci_high=report.ci_high),
        TestReport.build('skewness_value', abs(report.skewness - target) / target, 0.2, report.n_samples, skewness=report.skewness)
    ]


## Stochastic Airy operator

def criterion_airy_limit(stream: RngStream, scale: VerifyScale, threads: int) -> List[TestReport]:
    """
    Noiseless operator: first Airy zero, the shift identity and unit squared slopes.
    """
    h = scale.airy_mesh
    first_zero = float(-ai_zeros(1)[0][0])
    grid = zero_grid(h / 4, int(round(8.0 / (h / 4))))

    def lowest(mesh_factor: int) -> float:
        return float(solve_domain(grid.coarsen(mesh_factor), 0, 1, 8.0, math.inf).eigs[0])

    value, half, quarter = lowest(4), lowest(2), lowest(1)
    oracle = richardson(half, quarter, order=2)
    reports = [
        TestReport.build('airy_first_zero', abs(value - oracle), 1e-3, 1, value=value, oracle=oracle),
        TestReport.build('airy_oracle', abs(oracle - first_zero), 1e-3, 1, oracle=oracle, reference=first_zero)
    ]

    # a right end far beyond the third turning point keeps the wall out of the slopes
    length = 12.0
    wide = zero_grid(h, int(round((length + 1.0) / h)))
    base = solve_domain(wide, 0, 3, length, math.inf)
    shift_error = 0.0
    for t in (0.25, 0.5, 1.0):
        t_index = int(round(t / h))
        shifted = solve_domain(wide, t_index, 3, t_index * h + length, math.inf)
        shift_error = max(shift_error, float(np.max(np.abs(shifted.eigs - base.eigs - t_index * h))))
    reports.append(TestReport.build('airy_shift_identity', shift_error, 1e-6, 3))
    reports.append(TestReport.build(
        'airy_slope_squared',
        float(np.max(np.abs(base.boundary_slopes**2 - 1))),
        1e-3,
        3,
        slopes=base.boundary_slopes.tolist()
    ))
    return reports


def criterion_pathwise_derivative(stream: RngStream, scale: VerifyScale, threads: int) -> List[TestReport]:
    """
    Median relative error between (Λ_1(t+δ) − Λ_1(t))/δ and f′(t)² at β = 2, and its decrease
    when h and δ are halved together.
    """
    h = scale.pathwise_mesh
    window = int(round(scale.pathwise_delta / h))
    right_end = 8.0

    def both(child: RngStream) -> Tuple[float, float]:
        path = sample_brownian_grid(child, h, int(round(right_end / h)))
        fine = derivative_check(path, 0, 1, window, right_end, 2.0)[0].rel_err
        coarse = derivative_check(path.coarsen(2), 0, 1, window, right_end, 2.0)[0].rel_err
        return fine, coarse

    errors = run_replicas(both, stream, scale.pathwise_paths, threads, description="Pathwise derivative")
    fine = float(np.median([e[0] for e in errors]))
    coarse = float(np.median([e[1] for e in errors]))
    return [
        TestReport.build('pathwise_median_rel_err', fine, 0.15, scale.pathwise_paths),
        TestReport.build('pathwise_halving', fine, coarse, scale.pathwise_paths, coarse_median=coarse)
    ]


def criterion_variational(stream: RngStream, scale: VerifyScale, threads: int) -> List[TestReport]:
    """
    Spliced trial functions never beat Λ_1(t): zero violations of rq ≥ Λ_1(t) − tol.
    """
    h = scale.splice_mesh
    right_end = 8.0
    cells = int(round(right_end / h))

    def margin(child: RngStream) -> float:
        path = sample_brownian_grid(child, h, cells)
        rng = child.generator
        s_index = int(rng.integers(0, int(2.0 / h)))
        t_index = s_index + int(rng.integers(1, 51))
        epsilon = float(rng.uniform(0.5, 20.0))
        splice_index = min(t_index + max(1, int(round(epsilon * (t_index - s_index)))), cells - 3)
        report = spliced_rayleigh_bound(path, s_index, t_index, splice_index, 0, right_end, 2.0)
        return report.lambda_t - report.rq_value

    margins = run_replicas(margin, stream, scale.splice_paths, threads, description="Spliced Rayleigh bound")
    violations = sum(m >= SPLICE_TOL for m in margins)
    return [TestReport.build('splice_bound', max(margins), SPLICE_TOL, scale.splice_paths, violations=violations)]


## Eigenvector shape

def _profile_maxima(n: int, stream: RngStream, reps: int, x0: float, threads: int) -> np.ndarray:
    spec = BetaEnsembleSpec(n=n, beta=2.0)
    return np.array(run_replicas(
        lambda child: float(np.max(eigvec_linearity_profile(spec, child, 0, x0).scaled)),
        stream,
        reps,
        threads,
        description=f"Eigenvector profiles n={n}"
    ))


def criterion_linearity(stream: RngStream, scale: VerifyScale, threads: int) -> List[TestReport]:
    """
    The scaled deviation n^{1/6}·|v_j − j·v_1|/x² stays below a pilot constant in 95% of replicas,
    and its 95th percentile is stable when n doubles.
    """
    n, x0 = scale.profile_n, scale.profile_x0
    pilot = _profile_maxima(n, stream.replica(0), scale.profile_pilot_reps, x0, threads)
    constant = PILOT_MARGIN * float(np.percentile(pilot, 95))

    maxima = _profile_maxima(n, stream.replica(1), scale.profile_reps, x0, threads)
    doubled = _profile_maxima(2 * n, stream.replica(2), scale.profile_reps, x0, threads)
    exceeding = float(np.mean(maxima > constant))
    ratio = float(np.percentile(doubled, 95) / np.percentile(maxima, 95))
    return [
        TestReport.build('linearity_bound', exceeding, 0.05, scale.profile_reps, constant=constant),
        TestReport.build('linearity_scaling', abs(math.log2(ratio)), 1.0, 2 * scale.profile_reps, ratio=ratio)
    ]


## Reproducibility

def criterion_replay(stream: RngStream, scale: VerifyScale, threads: int) -> List[TestReport]:
    """
    A statistical criterion rerun on one thread and on several gives identical statistics.
    The statistic counts the mismatches.
    """
    small = scale.model_copy(update={
        'weight_n': scale.replay_n,
        'weight_reps': scale.replay_reps,
        'interlacing_n': scale.replay_n,
        'interlacing_draws': 4
    })
    mismatches = 0
    for criterion in (criterion_weight_moments, criterion_interlacing):
        single = criterion(stream, small, 1)
        multi = criterion(stream, small, max(threads, 2))
        mismatches += sum(a.statistic != b.statistic for a, b in zip(single, multi))
    return [TestReport.build('thread_independence', mismatches, 1, 2)]


## Registry

CRITERIA: Dict[int, Tuple[str, bool, Callable[[RngStream, VerifyScale, int], List[TestReport]]]] = {
    1: ("Eigensolver exactness", True, criterion_solver),
    2: ("Interlacing of minors", True, criterion_interlacing),
    3: ("Spectral-weight moments", False, criterion_weight_moments),
    4: ("Derivative law", False, criterion_derivative_law),
    5: ("Stationarity", False, criterion_stationarity),
    6: ("Non-reversibility", False, criterion_asymmetry),
    7: ("Noiseless operator limit", True, criterion_airy_limit),
    8: ("Pathwise derivative formula", False, criterion_pathwise_derivative),
    9: ("Variational bound", True, criterion_variational),
    10: ("Eigenvector near-linearity", False, criterion_linearity),
    11: ("Reproducibility", True, criterion_replay),
}


def run_criterion(number: int, seed: int, scale: VerifyScale, threads: int = 1) -> CriterionResult:
    """
    Run one criterion on the stream (seed, number).
    """
    if number not in CRITERIA:
        error_message = f"There is no acceptance criterion `{number}`; valid numbers are 1 to {len(CRITERIA)}."
        logger.error(f'❌ {error_message}')
        raise ValueError(error_message)
    title, exact, criterion = CRITERIA[number]
    logger.info(f'⚙️ Criterion {number}: {title}')
    start = time.perf_counter()
    reports = criterion(RngStream(master_seed=seed, stream_index=number), scale, threads)
    result = CriterionResult(
        number=number,
        title=title,
        exact=exact,
        seconds=time.perf_counter() - start,
        reports=reports
    )
    icon = '✅' if result.passed else '❌'
    logger.info(f'{icon} Criterion {number} finished in {result.seconds:.1f} s')
    return result


def run_verification(
    seed: int = 0,
    threads: int = 1,
    quick: bool = False,
    numbers: Optional[List[int]] = None,
    config: Optional[Dict[str, Any]] = None
) -> VerificationReport:
    """
    Run the acceptance criteria and collect their reports.

    Args
    ------------
        seed: int
            Master seed; criterion i draws from stream (seed, i).
        threads: int
            Worker threads; no statistic depends on it.
        quick: bool
            Run the exact subset at reduced scale.
        numbers: List[int], Optional
            Criteria to run, overriding `quick`'s selection.
        config: Dict[str, Any], Optional
            Run configuration echoed into the report.

    Returns
    ------------
        VerificationReport:
            All criterion results.
    """
    scale = VerifyScale.quick() if quick else VerifyScale()
    selected = numbers if numbers is not None else list(QUICK_CRITERIA if quick else CRITERIA)
    report = VerificationReport(seed=seed, threads=threads, quick=quick, scale=scale, config=config or {})
    for number in selected:
        report.criteria.append(run_criterion(number, seed, scale, threads))

    if report.passed:
        logger.info(f'✅ All {len(report.criteria)} criteria passed')
    else:
        for failure in report.failures():
            logger.error(f'❌ Failed: {failure}')
    return report


def write_verification_json(report: VerificationReport, path: str | Path) -> Path:
    """
    Write the report, one entry per criterion with its TestReports.
    """
    path = Path(path)
    payload = report.model_dump(mode='json')
    payload['passed'] = report.passed
    for entry, criterion in zip(payload['criteria'], report.criteria):
        entry['passed'] = criterion.passed
    path.write_text(json.dumps(json_ready(payload), indent=2, allow_nan=False) + '\n', encoding='UTF-8')
    logger.info(f'📝 Verification report written to `{path}`')
    return path
