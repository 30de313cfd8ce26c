### minor_process
## Trajectories t ↦ n^{1/6}·λ_i(n, ⌊t·n^{1/3}⌋) of the edge minors of one β-Hermite draw,
## their derivative estimates, and the Monte Carlo samples behind the derivative law,
## stationarity and non-reversibility checks.
#
# The derivative estimator of record is n·q_i, q_i the squared first entry of the i-th
# eigenvector of the current minor. Difference quotients between consecutive minors are the cross-check.

## Imports
# Third-party modules
import json
import math
import numpy as np
import pandas as pd

from pathlib import Path
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    field_validator
)

from typing import (
    Any,
    Dict,
    List,
    Optional,
    Sequence,
    Tuple
)

# Internal modules
from validators import airy_types
from pyfiles.logger import logger
from pyfiles.randvar import RngStream
from pyfiles.replicas import run_replicas
from pyfiles.hermite_ensemble import (
    BetaEnsembleSpec,
    EnsembleDraw,
    sample_hermite,
    edge_minor_matrix
)
from pyfiles.tridiag_eigen import (
    lowest_eigenvalues,
    lowest_pairs
)
from pyfiles.stats import (
    Moments,
    TestReport,
    bootstrap_interval,
    moments
)


## Constants
# Column order of the trajectory CSV
TRAJECTORY_COLUMNS: List[str] = ['t', 'eig_index', 'scaled_eig', 'recentered', 'deriv_est']
# Fewest samples the skewness estimate accepts
MIN_ASYMMETRY_SAMPLES: int = 1000


def _read_only(v: Any) -> np.ndarray:
    v = np.array(v, dtype=np.float64)
    v.flags.writeable = False
    return v


class TrajectoryFrame(BaseModel):
    """
    The tracked eigenvalues at one boundary position t.

    Attributes
    ------------
        t: float
            Boundary position.
        minor_index: int
            Rows/columns removed, ⌊t·n^{1/3}⌋.
        scaled_eigs: np.ndarray
            n^{1/6}·λ_i of the minor, increasing.
        recentered: np.ndarray
            scaled_eigs − t.
        spectral_weights: np.ndarray
            q_i, squared first entries of the minor's eigenvectors (empty when not computed).
        derivative_est: np.ndarray
            n·q_i.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    t: float
    minor_index: int
    scaled_eigs: np.ndarray
    recentered: np.ndarray
    spectral_weights: np.ndarray
    derivative_est: np.ndarray

    @field_validator('scaled_eigs', 'recentered', 'spectral_weights', 'derivative_est', mode='before')
    @classmethod
    def validate_array(cls, v: np.ndarray) -> np.ndarray:
        return _read_only(v)


class Trajectory(BaseModel):
    """
    All frames of one draw, ordered in t.

    Every frame comes from the same EnsembleDraw, so the eigenvalues at different t are coupled.

    Attributes
    ------------
        spec: BetaEnsembleSpec
            Size and Dyson index.
        seed: Dict[str, Any]
            Seed record of the draw.
        dt: float
            Grid step.
        t_max: float
            Last grid position.
        frames: List[TrajectoryFrame]
            Frames at t = 0, dt, 2dt, ….
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    spec: BetaEnsembleSpec
    seed: Dict[str, Any]
    dt: float
    t_max: float
    frames: List[TrajectoryFrame]

    def times(self) -> np.ndarray:
        return np.array([f.t for f in self.frames])

    def eigenvalue_path(self, i: int, recentered: bool = False) -> np.ndarray:
        """
        Λ_i along the grid (0-based i), optionally minus t.
        """
        return np.array([(f.recentered if recentered else f.scaled_eigs)[i] for f in self.frames])


class LinearityProfile(BaseModel):
    """
    How far an edge eigenvector is from the linear ramp j·v_1.

    Attributes
    ------------
        x: np.ndarray
            Positions j/n^{1/3}, j = 1, …, ⌊x0·n^{1/3}⌋.
        deviation: np.ndarray
            |v_j − j·v_1|.
        scaled: np.ndarray
            n^{1/6}·deviation/x².
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    x: np.ndarray
    deviation: np.ndarray
    scaled: np.ndarray


class AsymmetryReport(BaseModel):
    """
    Skewness of the centred derivative samples, with a bootstrap interval.
    A nonzero skewness means the forward and time-reversed processes differ in law.
    """
    skewness: float
    ci_low: float
    ci_high: float
    confidence: float
    n_samples: int

    @property
    def positive(self) -> bool:
        return self.ci_low > 0


class TrajectorySummary(BaseModel):
    """
    JSON summary written next to a trajectory or a sample file.
    """
    spec: Dict[str, Any]
    seed: Dict[str, Any]
    moments: Dict[str, Moments]
    ks_reports: List[TestReport]
    config: Dict[str, Any] = Field(default_factory=dict)


## Trajectories

def compute_trajectory(
    spec: BetaEnsembleSpec,
    stream: RngStream,
    num_eigs: int,
    t_max: float,
    dt: float,
    tol: Optional[float] = None,
    with_weights: bool = True
) -> Trajectory:
    """
    One draw, then the frame of the ⌊t·n^{1/3}⌋-minor at every grid point t = 0, dt, …, t_max.

    Each distinct minor is solved once; grid points sharing a minor share its frame values.
    Along the trajectory Λ_i never decreases (interlacing of successive minors); a decrease
    beyond the solver tolerance raises.

    For example, the data of a six-thousand-point picture of the five lowest eigenvalues:
    ```python
    spec = BetaEnsembleSpec(n=6000, beta=2.0)
    traj = compute_trajectory(spec, RngStream(master_seed=7), num_eigs=5, t_max=2.0, dt=0.01)
    ```

    Args
    ------------
        spec: BetaEnsembleSpec
            Size and Dyson index.
        stream: RngStream
            Stream for the draw.
        num_eigs: int
            Eigenvalues tracked.
        t_max: float
            Last boundary position.
        dt: float
            Grid step.
        tol: float, Optional
            Bracket width of the unscaled eigenvalues.
        with_weights: bool
            Also compute eigenvectors, spectral weights and n·q_i.

    Returns
    ------------
        Trajectory:
            The coupled frames.

    Raises
    ------------
        ValueError:
            If the grid exhausts the matrix.
        RuntimeError:
            If a tracked eigenvalue decreases between minors.
    """
    airy_types.TrajectoryParams(n=spec.n, num_eigs=num_eigs, t_max=t_max, dt=dt)
    try:
        draw = sample_hermite(spec, stream)
        times = dt * np.arange(int(math.floor(t_max / dt + 1e-9)) + 1)

        solved: Dict[int, Tuple[np.ndarray, np.ndarray]] = {}
        frames: List[TrajectoryFrame] = []
        for t in times:
            k = spec.minor_at(float(t))
            if k not in solved:
                solved[k] = _solve_minor(draw, k, num_eigs, tol, with_weights)
            scaled, weights = solved[k]
            frames.append(TrajectoryFrame(
                t=float(t),
                minor_index=k,
                scaled_eigs=scaled,
                recentered=scaled - t,
                spectral_weights=weights,
                derivative_est=spec.n * weights
            ))

        _assert_monotone(solved, spec, tol)
        logger.debug(f'Trajectory n={spec.n}: {len(frames)} frames over {len(solved)} minors')
        return Trajectory(
            spec=spec,
            seed=draw.seed,
            dt=dt,
            t_max=t_max,
            frames=frames
        )
    except Exception as e:
        logger.error(f'❌ Problem computing trajectory: {str(e)}')
        raise


def _solve_minor(
    draw: EnsembleDraw,
    k: int,
    num_eigs: int,
    tol: Optional[float],
    with_weights: bool
) -> Tuple[np.ndarray, np.ndarray]:
    minor = edge_minor_matrix(draw, k)
    if not with_weights:
        return draw.spec.edge_scale * lowest_eigenvalues(minor, num_eigs, tol), np.empty(0)
    pairs = lowest_pairs(minor, num_eigs, tol)
    scaled = draw.spec.edge_scale * np.array([p.eigenvalue for p in pairs])
    weights = np.array([p.first_entry ** 2 for p in pairs])
    return scaled, weights


def _assert_monotone(
    solved: Dict[int, Tuple[np.ndarray, np.ndarray]],
    spec: BetaEnsembleSpec,
    tol: Optional[float]
) -> None:
    # removing a leading row of 2√n·I − A can only raise each of the lowest eigenvalues
    minors = sorted(solved)
    slack = 2 * spec.edge_scale * (tol if tol is not None else 1e-10 * 4 * math.sqrt(spec.n))
    for k1, k2 in zip(minors, minors[1:]):
        drop = float(np.max(solved[k1][0] - solved[k2][0]))
        if drop > slack:
            error_message = f"Eigenvalues decreased by {drop:.3e} from minor {k1} to minor {k2}."
            logger.error(f'❌ {error_message}')
            raise RuntimeError(error_message)


def derivative_by_finite_difference(
    traj: Trajectory,
    i: int
) -> np.ndarray:
    """
    Difference quotients (Λ_i(t+Δ) − Λ_i(t))/Δ between consecutive distinct minors of a trajectory.

    Δ is (k₂ − k₁)/n^{1/3}, which is n^{-1/3} when dt is below the minor spacing.

    Args
    ------------
        traj: Trajectory
            A trajectory covering at least two distinct minors.
        i: int
            0-based eigenvalue index.

    Returns
    ------------
        np.ndarray:
            One quotient per minor change.
    """
    distinct: Dict[int, float] = {}
    for frame in traj.frames:
        distinct.setdefault(frame.minor_index, float(frame.scaled_eigs[i]))
    minors = sorted(distinct)
    if len(minors) < 2:
        error_message = "Finite differences need a trajectory spanning at least two distinct minors."
        logger.error(f'❌ {error_message}')
        raise ValueError(error_message)
    ks = np.array(minors, dtype=np.float64)
    values = np.array([distinct[k] for k in minors])
    return np.diff(values) / (np.diff(ks) / traj.spec.time_scale)


def drift_slope(
    trajectories: Sequence[Trajectory],
    i: int = 0
) -> float:
    """
    Least-squares slope of Λ_i(t) − t against t, pooled over trajectories.
    Zero drift is what stationarity of the recentred process predicts.
    """
    t = np.concatenate([traj.times() for traj in trajectories])
    y = np.concatenate([traj.eigenvalue_path(i, recentered=True) for traj in trajectories])
    slope, _ = np.polyfit(t, y, 1)
    return float(slope)


## Replica samples

def spectral_weight_samples(
    spec: BetaEnsembleSpec,
    stream: RngStream,
    num_eigs: int,
    reps: int,
    threads: int = 1,
    tol: Optional[float] = None
) -> np.ndarray:
    """
    n·q_i for the `num_eigs` lowest eigenvectors of the full edge matrix, one row per replica.

    In the large-n limit the columns are independent Γ(β/2, 2/β).

    Returns
    ------------
        np.ndarray:
            reps × num_eigs samples.
    """
    airy_types.ReplicaParams(n=spec.n, num_eigs=num_eigs, reps=reps)

    def one(child: RngStream) -> np.ndarray:
        draw = sample_hermite(spec, child)
        pairs = lowest_pairs(edge_minor_matrix(draw, 0), num_eigs, tol)
        return spec.n * np.array([p.first_entry ** 2 for p in pairs])

    rows = run_replicas(one, stream, reps, threads, description=f"Spectral weights n={spec.n} β={spec.beta}")
    return np.vstack(rows)


def finite_difference_samples(
    spec: BetaEnsembleSpec,
    stream: RngStream,
    num_eigs: int,
    reps: int,
    minor_index: int = 0,
    threads: int = 1,
    tol: Optional[float] = None
) -> np.ndarray:
    """
    Quotients n^{1/2}·(λ_i(k+1) − λ_i(k)) at a fixed minor k, one row per replica.

    This is the difference quotient of the scaled process over one minor spacing n^{-1/3}.
    """
    airy_types.ReplicaParams(n=spec.n, num_eigs=num_eigs, reps=reps)
    airy_types.MinorParams(n=spec.n, k=minor_index + 1, num_eigs=num_eigs)

    def one(child: RngStream) -> np.ndarray:
        draw = sample_hermite(spec, child)
        before = lowest_eigenvalues(edge_minor_matrix(draw, minor_index), num_eigs, tol)
        after = lowest_eigenvalues(edge_minor_matrix(draw, minor_index + 1), num_eigs, tol)
        return spec.edge_scale * spec.time_scale * (after - before)

    rows = run_replicas(one, stream, reps, threads, description=f"Difference quotients n={spec.n} β={spec.beta}")
    return np.vstack(rows)


def stationarity_samples(
    spec: BetaEnsembleSpec,
    stream: RngStream,
    t_star: float,
    reps: int,
    threads: int = 1,
    tol: Optional[float] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Λ_1(0) and Λ_1(t*) − t* over independent draws.

    Returns
    ------------
        Tuple[np.ndarray, np.ndarray]:
            The two samples, replica-aligned.
    """
    airy_types.TrajectoryParams(n=spec.n, num_eigs=1, t_max=t_star, dt=max(t_star, 1.0))
    k_star = spec.minor_at(t_star)

    def one(child: RngStream) -> Tuple[float, float]:
        draw = sample_hermite(spec, child)
        start = spec.edge_scale * lowest_eigenvalues(edge_minor_matrix(draw, 0), 1, tol)[0]
        later = spec.edge_scale * lowest_eigenvalues(edge_minor_matrix(draw, k_star), 1, tol)[0]
        return float(start), float(later - t_star)

    pairs = run_replicas(one, stream, reps, threads, description=f"Stationarity n={spec.n} t*={t_star}")
    return np.array([p[0] for p in pairs]), np.array([p[1] for p in pairs])


def trajectory_replicas(
    spec: BetaEnsembleSpec,
    stream: RngStream,
    num_eigs: int,
    t_max: float,
    dt: float,
    reps: int,
    threads: int = 1,
    with_weights: bool = False
) -> List[Trajectory]:
    """
    `reps` independent trajectories, one per replica stream.
    """
    return run_replicas(
        lambda child: compute_trajectory(spec, child, num_eigs, t_max, dt, with_weights=with_weights),
        stream,
        reps,
        threads,
        description=f"Trajectories n={spec.n} β={spec.beta}"
    )


## Eigenvector shape near the boundary

def eigvec_linearity_profile(
    spec: BetaEnsembleSpec,
    stream: RngStream,
    i: int,
    x0: float,
    tol: Optional[float] = None
) -> LinearityProfile:
    """
    |v_j − j·v_1| for j = ⌊x·n^{1/3}⌋ with x up to x0, v the i-th lowest eigenvector (0-based)
    of a fresh full edge matrix, entries indexed from 1.

    Near the boundary an edge eigenvector is close to the ramp through its first entry;
    n^{1/6}·deviation/x² stays of order one.
    """
    airy_types.LinearityProfileParams(n=spec.n, i=i, x0=x0)
    draw = sample_hermite(spec, stream)
    pairs = lowest_pairs(edge_minor_matrix(draw, 0), i + 1, tol)
    v = pairs[i].eigenvector

    last = spec.minor_at(x0)
    j = np.arange(1, last + 1)
    deviation = np.abs(v[j - 1] - j * v[0])
    x = j / spec.time_scale
    return LinearityProfile(
        x=_read_only(x),
        deviation=_read_only(deviation),
        scaled=_read_only(spec.edge_scale * deviation / x ** 2)
    )


## Non-reversibility

def reversibility_asymmetry(
    samples: Sequence[float] | np.ndarray,
    stream: Optional[RngStream] = None,
    confidence: float = 0.99,
    n_resamples: int = 2000
) -> AsymmetryReport:
    """
    Sample skewness of (quotient − 1), with a bootstrap interval.

    A forward derivative distributed as Γ(β/2, 2/β) − 1 has skewness 2/√(β/2); the reversed
    process would have the opposite sign, so a strictly positive interval rules out reversibility.

    Args
    ------------
        samples: array-like
            At least 1000 forward derivative samples.
        stream: RngStream, Optional
            Stream for the bootstrap resampling; defaults to seed 0.
        confidence: float
            Bootstrap confidence.
        n_resamples: int
            Bootstrap resamples.

    Returns
    ------------
        AsymmetryReport:
            Skewness and its interval.
    """
    data = np.asarray(samples, dtype=np.float64).ravel()
    airy_types.SampleCountParams(n_samples=data.size, minimum=MIN_ASYMMETRY_SAMPLES)
    centred = data - 1.0
    stream = stream if stream is not None else RngStream(master_seed=0)

    skewness = moments(centred).skewness
    low, high = bootstrap_interval(
        centred,
        lambda x: moments(x).skewness,
        stream,
        confidence=confidence,
        n_resamples=n_resamples
    )
    logger.info(f'📝 Skewness of centred derivatives: {skewness:.4f} [{low:.4f}, {high:.4f}]')
    return AsymmetryReport(
        skewness=skewness,
        ci_low=low,
        ci_high=high,
        confidence=confidence,
        n_samples=data.size
    )


## Output

def _comment_header(config: Dict[str, Any]) -> str:
    return ''.join(f'# {key}={value}\n' for key, value in config.items())


def trajectory_table(traj: Trajectory) -> pd.DataFrame:
    """
    One row per (frame, eigenvalue) with 1-based eig_index; deriv_est is NaN when weights were skipped.
    """
    rows = []
    for frame in traj.frames:
        for i, value in enumerate(frame.scaled_eigs):
            deriv = frame.derivative_est[i] if frame.derivative_est.size else math.nan
            rows.append((frame.t, i + 1, value, frame.recentered[i], deriv))
    return pd.DataFrame(rows, columns=TRAJECTORY_COLUMNS)


def write_trajectory_csv(
    traj: Trajectory,
    path: str | Path,
    config: Optional[Dict[str, Any]] = None
) -> Path:
    """
    Write `t,eig_index,scaled_eig,recentered,deriv_est` after a `#` block echoing config and seed.
    """
    path = Path(path)
    header = _comment_header({**(config or {}), **{f'seed.{k}': v for k, v in traj.seed.items()}})
    with open(path, 'w', encoding='UTF-8', newline='') as handle:
        handle.write(header)
        trajectory_table(traj).to_csv(handle, index=False, lineterminator='\n', float_format='%.12g')
    logger.info(f'📝 Trajectory written to `{path}`')
    return path


def json_ready(value: Any) -> Any:
    """
    `value` with every non-finite float (NaN skewness of tiny samples, infinite bounds) replaced by None,
    so the dump is strict JSON.
    """
    if isinstance(value, dict):
        return {key: json_ready(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_ready(item) for item in value]
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def write_summary_json(
    path: str | Path,
    summary: TrajectorySummary
) -> Path:
    """
    Write a `{spec, seed, moments, ks_reports, config}` summary.
    """
    path = Path(path)
    path.write_text(json.dumps(json_ready(summary.model_dump(mode='json')), indent=2, allow_nan=False) + '\n', encoding='UTF-8')
    logger.info(f'📝 Summary written to `{path}`')
    return path
