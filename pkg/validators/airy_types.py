### airy_types
## Argument validation for the operations in `pyfiles`.
## Every public operation builds one of these models before computing anything.

## Imports
# Third-party modules
import math

from scipy.special import ai_zeros

from pydantic import (
    BaseModel,
    field_validator,
    model_validator
)

from typing import (
    Literal,
    Optional
)

# Internal modules
from pyfiles.logger import logger


def _reject(error_message: str) -> None:
    """
    Log a validation failure and raise it.

    Args
    ------------
        error_message: str
            What was wrong with the arguments.

    Raises
    ------------
        ValueError:
            Always.
    """
    logger.error(f'❌ {error_message}')
    raise ValueError(error_message)


def _positive(name: str, v: float) -> float:
    if not (v > 0) or math.isnan(v):
        _reject(f"The `{name}` argument should be positive, instead got `{v}`.")
    return v


def _finite(name: str, v: float) -> float:
    if not math.isfinite(v):
        _reject(f"The `{name}` argument should be finite, instead got `{v}`.")
    return v


def _nonnegative_int(name: str, v: int) -> int:
    if v < 0:
        _reject(f"The `{name}` argument should be a nonnegative integer, instead got `{v}`.")
    return v


## randvar

class StreamParams(BaseModel):
    """
    Parameters identifying a random stream.

    Attributes
    ------------
        master_seed: int
            64-bit master seed.
        stream_index: int
            Replica id.
    """
    master_seed: int
    stream_index: int

    @field_validator('master_seed')
    @classmethod
    def validate_master_seed(cls, v: int) -> int:
        if not 0 <= v < 2**64:
            _reject(f"The `master_seed` argument should fit in 64 unsigned bits, instead got `{v}`.")
        return v

    @field_validator('stream_index')
    @classmethod
    def validate_stream_index(cls, v: int) -> int:
        return _nonnegative_int('stream_index', v)


class GaussianParams(BaseModel):
    """
    Parameters for `randvar.sample_gaussian`.

    Attributes
    ------------
        mean: float
            Mean of the normal law.
        variance: float
            Variance of the normal law, positive.
    """
    mean: float
    variance: float

    @field_validator('mean')
    @classmethod
    def validate_mean(cls, v: float) -> float:
        return _finite('mean', v)

    @field_validator('variance')
    @classmethod
    def validate_variance(cls, v: float) -> float:
        return _finite('variance', _positive('variance', v))


class ChiParams(BaseModel):
    """
    Parameters for `randvar.sample_chi`; `dof` may be any positive real.
    """
    dof: float

    @field_validator('dof')
    @classmethod
    def validate_dof(cls, v: float) -> float:
        return _finite('dof', _positive('dof', v))


class DirichletParams(BaseModel):
    """
    Parameters for `randvar.sample_dirichlet`.

    Attributes
    ------------
        n: int
            Number of coordinates, at least 1.
        alpha: float
            Common concentration parameter.
    """
    n: int
    alpha: float

    @field_validator('n')
    @classmethod
    def validate_n(cls, v: int) -> int:
        if v < 1:
            _reject(f"The `n` argument should be at least 1, instead got `{v}`.")
        return v

    @field_validator('alpha')
    @classmethod
    def validate_alpha(cls, v: float) -> float:
        return _finite('alpha', _positive('alpha', v))


class BrownianGridParams(BaseModel):
    """
    Parameters for `randvar.sample_brownian_grid`.
    """
    mesh: float
    num_cells: int
    origin: float = 0.0

    @field_validator('mesh')
    @classmethod
    def validate_mesh(cls, v: float) -> float:
        return _finite('mesh', _positive('mesh', v))

    @field_validator('num_cells')
    @classmethod
    def validate_num_cells(cls, v: int) -> int:
        if v < 2:
            _reject(f"The `num_cells` argument should be at least 2, instead got `{v}`.")
        return v

    @field_validator('origin')
    @classmethod
    def validate_origin(cls, v: float) -> float:
        return _finite('origin', v)


## tridiag_eigen

class LowestEigenvaluesParams(BaseModel):
    """
    Parameters for `tridiag_eigen.lowest_eigenvalues`.

    Attributes
    ------------
        m: int
            Matrix dimension.
        k: int
            Number of eigenvalues requested, 1 ≤ k ≤ m.
        tol: float
            Bracket width.
        method: str
            `stebz` or `sturm`.
    """
    m: int
    k: int
    tol: float
    method: Literal['stebz', 'sturm']

    @field_validator('tol')
    @classmethod
    def validate_tol(cls, v: float) -> float:
        return _positive('tol', v)

    @model_validator(mode='after')
    def validate_k(self) -> 'LowestEigenvaluesParams':
        if not 1 <= self.k <= self.m:
            _reject(f"The `k` argument should lie in [1, {self.m}], instead got `{self.k}`.")
        return self


class EigenvectorParams(BaseModel):
    """
    Parameters for `tridiag_eigen.eigenvector_for`.
    """
    lam: float
    tol: float

    @field_validator('lam')
    @classmethod
    def validate_lam(cls, v: float) -> float:
        return _finite('lambda', v)

    @field_validator('tol')
    @classmethod
    def validate_tol(cls, v: float) -> float:
        return _positive('tol', v)


## hermite_ensemble

class BetaParams(BaseModel):
    """
    A Dyson index: positive, `inf` allowed for the noiseless limit.
    """
    beta: float

    @field_validator('beta')
    @classmethod
    def validate_beta(cls, v: float) -> float:
        return _positive('beta', v)


class MinorParams(BaseModel):
    """
    Parameters for `hermite_ensemble.edge_minor_matrix` and `scaled_edge_eigenvalues`.

    Attributes
    ------------
        n: int
            Matrix size of the draw.
        k: int
            Number of leading rows/columns removed, at most n−2.
        num_eigs: int
            Number of eigenvalues requested from the minor.
    """
    n: int
    k: int
    num_eigs: int = 1

    @model_validator(mode='after')
    def validate_minor(self) -> 'MinorParams':
        _nonnegative_int('k', self.k)
        if self.k > self.n - 2:
            _reject(f"The minor index `k` should be at most n−2 = {self.n - 2}, instead got `{self.k}`.")
        if not 1 <= self.num_eigs <= self.n - self.k:
            _reject(f"The `num_eigs` argument should lie in [1, {self.n - self.k}], instead got `{self.num_eigs}`.")
        return self


## minor_process

class TrajectoryParams(BaseModel):
    """
    Parameters for `minor_process.compute_trajectory`.
    """
    n: int
    num_eigs: int
    t_max: float
    dt: float

    @field_validator('dt')
    @classmethod
    def validate_dt(cls, v: float) -> float:
        return _finite('dt', _positive('dt', v))

    @field_validator('t_max')
    @classmethod
    def validate_t_max(cls, v: float) -> float:
        if v < 0:
            _reject(f"The `t_max` argument should be nonnegative, instead got `{v}`.")
        return _finite('t_max', v)

    @model_validator(mode='after')
    def validate_grid(self) -> 'TrajectoryParams':
        if self.num_eigs < 1:
            _reject(f"The `num_eigs` argument should be at least 1, instead got `{self.num_eigs}`.")
        last_minor = math.floor(self.t_max * self.n ** (1 / 3) + 1e-9)
        if last_minor + self.num_eigs > self.n - 2:
            _reject(
                f"The time grid exhausts the matrix: minor {last_minor} plus {self.num_eigs} "
                f"eigenvalues exceeds n−2 = {self.n - 2}."
            )
        return self


class ReplicaParams(BaseModel):
    """
    Parameters shared by the replica loops of `minor_process`.
    """
    n: int
    num_eigs: int
    reps: int

    @model_validator(mode='after')
    def validate_replicas(self) -> 'ReplicaParams':
        if not 1 <= self.num_eigs <= self.n:
            _reject(f"The `num_eigs` argument should lie in [1, {self.n}], instead got `{self.num_eigs}`.")
        if self.reps < 1:
            _reject(f"The `reps` argument should be at least 1, instead got `{self.reps}`.")
        return self


class LinearityProfileParams(BaseModel):
    """
    Parameters for `minor_process.eigvec_linearity_profile`.
    """
    n: int
    i: int
    x0: float

    @model_validator(mode='after')
    def validate_profile(self) -> 'LinearityProfileParams':
        _positive('x0', self.x0)
        if not 0 <= self.i < self.n:
            _reject(f"The eigenvector index `i` should lie in [0, {self.n - 1}], instead got `{self.i}`.")
        if math.floor(self.x0 * self.n ** (1 / 3)) > self.n:
            _reject(f"The profile end `x0` = {self.x0} reaches past the matrix of size {self.n}.")
        return self


class SampleCountParams(BaseModel):
    """
    A lower bound on the number of samples an estimator needs.
    """
    n_samples: int
    minimum: int

    @model_validator(mode='after')
    def validate_count(self) -> 'SampleCountParams':
        if self.n_samples < self.minimum:
            _reject(f"At least {self.minimum} samples are needed, instead got {self.n_samples}.")
        return self


## sao_discrete

class SaoDomainParams(BaseModel):
    """
    Parameters for `sao_discrete.assemble_sao_matrix`.

    Attributes
    ------------
        t_index: int
            Left boundary, in whole cells from the path origin.
        num_cells: int
            Cells between the left boundary and the right end.
        path_cells: int
            Cells available in the Brownian path.
    """
    t_index: int
    num_cells: int
    path_cells: int

    @model_validator(mode='after')
    def validate_domain(self) -> 'SaoDomainParams':
        _nonnegative_int('t_index', self.t_index)
        if self.num_cells < 3:
            _reject(f"The domain should span at least 3 cells, instead got {self.num_cells}.")
        if self.t_index + self.num_cells > self.path_cells:
            _reject(
                f"The domain exceeds the path: it needs {self.t_index + self.num_cells} cells, "
                f"the path has {self.path_cells}."
            )
        return self


class SpliceParams(BaseModel):
    """
    Parameters for `sao_discrete.spliced_rayleigh_bound`; all positions in grid cells.
    """
    s_index: int
    t_index: int
    splice_index: int
    end_index: int

    @model_validator(mode='after')
    def validate_splice(self) -> 'SpliceParams':
        _nonnegative_int('s_index', self.s_index)
        if not self.s_index <= self.t_index <= self.splice_index:
            _reject(
                f"The splice needs s ≤ t ≤ a, instead got s={self.s_index}, "
                f"t={self.t_index}, a={self.splice_index}."
            )
        if self.splice_index >= self.end_index - 1:
            _reject(f"The splice point {self.splice_index} lies outside the domain ending at {self.end_index}.")
        return self


## stats

class IncompleteGammaParams(BaseModel):
    """
    Parameters for `stats.reg_incomplete_gamma`.
    """
    a: float
    x: float

    @field_validator('a')
    @classmethod
    def validate_a(cls, v: float) -> float:
        return _positive('a', v)

    @field_validator('x')
    @classmethod
    def validate_x(cls, v: float) -> float:
        if not v >= 0:
            _reject(f"The `x` argument should be nonnegative, instead got `{v}`.")
        return v


class IncompleteBetaParams(BaseModel):
    """
    Parameters for `stats.reg_incomplete_beta`.
    """
    a: float
    b: float
    x: float

    @field_validator('a', 'b')
    @classmethod
    def validate_shape(cls, v: float) -> float:
        return _positive('shape', v)

    @field_validator('x')
    @classmethod
    def validate_x(cls, v: float) -> float:
        if not 0 <= v <= 1:
            _reject(f"The `x` argument should lie in [0, 1], instead got `{v}`.")
        return v


class LevelParams(BaseModel):
    """
    A significance level strictly between 0 and 1.
    """
    level: float

    @field_validator('level')
    @classmethod
    def validate_level(cls, v: float) -> float:
        if not 0 < v < 1:
            _reject(f"The `level` argument should lie in (0, 1), instead got `{v}`.")
        return v


## cli

# SAO right end used when nothing longer is needed
DEFAULT_RIGHT_END: float = 8.0
# Distance kept between the highest tracked turning point and the right wall
SAO_WALL_MARGIN: float = 4.0


def sao_right_end_margin(num_eigs: int) -> float:
    """
    |a_k| + SAO_WALL_MARGIN for the k-th Airy zero, the room the k lowest noiseless
    eigenfunctions need to the right of the boundary.
    """
    return float(-ai_zeros(num_eigs)[0][-1]) + SAO_WALL_MARGIN


Subcommand = Literal['trajectory', 'derivative-dist', 'sao', 'stationarity', 'verify']


class RunConfig(BaseModel):
    """
    Resolved configuration of one CLI run, echoed at the top of every output file.

    Attributes
    ------------
        subcommand: str
            Which experiment to run.
        beta: float
            Dyson index; `inf` disables the noise.
        n: int | None
            Matrix size (matrix experiments).
        num_eigs: int
            Number of lowest eigenvalues tracked.
        t_max, dt: float
            Boundary-position grid.
        t_star: float
            Shift compared against t = 0 (stationarity only).
        h: float
            SAO mesh.
        L: float
            SAO right end.
        window: int
            Cells in the SAO difference quotient.
        reps: int
            Monte Carlo replicas.
        seed: int
            Master seed.
        threads: int
            Worker threads; results never depend on it.
        out_path: str | None
            Output file; the JSON summary sits next to it.
        format: str
            `csv` or `json`.
        model: str
            `matrix` or `sao` (stationarity only).
        quick: bool
            Exact subset only (verify only).
    """
    subcommand: Subcommand
    beta: float = 2.0
    n: Optional[int] = None
    num_eigs: int = 5
    t_max: float = 2.0
    dt: float = 0.01
    t_star: float = 1.0
    h: float = 5e-4
    L: Optional[float] = None
    window: int = 20
    reps: int = 100
    seed: int = 0
    threads: int = 1
    out_path: Optional[str] = None
    format: Literal['csv', 'json'] = 'csv'
    model: Literal['matrix', 'sao'] = 'matrix'
    quick: bool = False

    @field_validator('beta', 'h', 'dt')
    @classmethod
    def validate_positive(cls, v: float) -> float:
        return _positive('config value', v)

    @field_validator('L')
    @classmethod
    def validate_right_end(cls, v: Optional[float]) -> Optional[float]:
        return None if v is None else _positive('config value', v)

    @field_validator('num_eigs', 'reps', 'threads', 'window')
    @classmethod
    def validate_counts(cls, v: int) -> int:
        if v < 1:
            _reject(f"Counts in the run configuration should be at least 1, instead got `{v}`.")
        return v

    @field_validator('seed')
    @classmethod
    def validate_seed(cls, v: int) -> int:
        if not 0 <= v < 2**64:
            _reject(f"The `seed` should fit in 64 unsigned bits, instead got `{v}`.")
        return v

    @model_validator(mode='after')
    def validate_subcommand(self) -> 'RunConfig':
        needs_n = self.subcommand in ('trajectory', 'derivative-dist') or (
            self.subcommand == 'stationarity' and self.model == 'matrix'
        )
        if needs_n and self.n is None:
            _reject(f"The `{self.subcommand}` subcommand requires --n.")
        if self.n is not None and self.n < 2:
            _reject(f"The matrix size `n` should be at least 2, instead got `{self.n}`.")
        if self.subcommand == 'trajectory':
            TrajectoryParams(n=self.n, num_eigs=self.num_eigs, t_max=self.t_max, dt=self.dt)
        if self.subcommand == 'derivative-dist':
            ReplicaParams(n=self.n, num_eigs=self.num_eigs, reps=self.reps)
            if math.isinf(self.beta):
                _reject("The derivative law needs a finite `beta`.")
        if self.subcommand in ('derivative-dist', 'stationarity') and self.reps < 20:
            _reject(f"The `{self.subcommand}` subcommand needs at least 20 replicas, instead got `{self.reps}`.")
        if self.subcommand == 'stationarity':
            if self.t_star < 0:
                _reject(f"The shift `t_star` should be nonnegative, instead got `{self.t_star}`.")
            if self.model == 'matrix':
                TrajectoryParams(n=self.n, num_eigs=1, t_max=self.t_star, dt=self.dt)
        if self.subcommand == 'sao':
            clear = self.t_max + sao_right_end_margin(self.num_eigs)
            if self.L is None:
                self.L = max(DEFAULT_RIGHT_END, clear)
            elif self.L < clear:
                logger.warning(
                    f"⚠️ With L={self.L} the top {self.num_eigs} noiseless eigenfunctions reach the right wall "
                    f"before t_max={self.t_max}; slopes of the upper ones are biased. L ≥ {clear:.3g} clears them."
                )
        if self.L is None:
            self.L = DEFAULT_RIGHT_END
        if self.subcommand == 'sao' and self.L <= self.t_max + (self.window + 3) * self.h:
            _reject(f"The SAO right end L={self.L} should lie beyond t_max + window·h = {self.t_max + self.window * self.h}.")
        if self.subcommand == 'stationarity' and self.model == 'sao' and self.L <= 3 * self.h:
            _reject(f"The SAO domain length L={self.L} is shorter than three cells.")
        return self
