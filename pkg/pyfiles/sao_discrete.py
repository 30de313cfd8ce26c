### sao_discrete
## Finite differences for −d²/dx² + x + (2/√β)·b′ on [t, L] with Dirichlet ends.
## Every left boundary t is a whole number of cells from the path origin, and all
## domains read the same BrownianGrid, so solves at different t are coupled.
#
# Interior point x_j = t + j·h, j = 1, …, M−1, is global grid point g = t_index + j and
# carries the white-noise cell average increments[g−1]/h.

## Imports
# Third-party modules
import math
import numpy as np
import pandas as pd

from pathlib import Path
from pydantic import (
    BaseModel,
    ConfigDict,
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
from pyfiles.randvar import (
    BrownianGrid,
    RngStream,
    sample_brownian_grid
)
from pyfiles.replicas import map_ordered
from pyfiles.stats import (
    TestReport,
    ks_two_sample
)
from pyfiles.tridiag_eigen import (
    TridiagSym,
    lowest_pairs,
    rayleigh_quotient
)


## Constants
# Default cell width
DEFAULT_MESH: float = 5e-4
# Default right end of every domain
DEFAULT_RIGHT_END: float = 8.0
# Default difference-quotient width, in cells
DEFAULT_WINDOW: int = 20
# Absolute eigenvalue tolerance; the matrix norm is about 4/h², so relative defaults are too coarse
DEFAULT_SAO_TOL: float = 1e-9
# Decimals kept before comparing stationarity samples
DEFAULT_DECIMALS: int = 8
# Column order of the SAO CSV
SAO_COLUMNS: List[str] = ['t', 'j', 'lambda', 'slope', 'slope_sq', 'fd_quotient', 'rel_err']


def _read_only(v: Any) -> np.ndarray:
    v = np.array(v, dtype=np.float64)
    v.flags.writeable = False
    return v


class SaoDomainSolve(BaseModel):
    """
    The lowest eigenpairs of the discretised operator on [t, L].

    Attributes
    ------------
        t_index: int
            Left boundary in cells from the path origin.
        t: float
            Left boundary position.
        right_end: float
            L.
        mesh: float
            h.
        beta: float
            Dyson index of the noise.
        eigs: np.ndarray
            k lowest Λ_j(t), increasing.
        boundary_slopes: np.ndarray
            f′_{j,t}(t), positive.
        eigenfunctions: np.ndarray
            k × (M−1) values φ_j at the interior points, h·Σφ² = 1.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    t_index: int
    t: float
    right_end: float
    mesh: float
    beta: float
    eigs: np.ndarray
    boundary_slopes: np.ndarray
    eigenfunctions: np.ndarray

    @field_validator('eigs', 'boundary_slopes', 'eigenfunctions', mode='before')
    @classmethod
    def validate_array(cls, v: np.ndarray) -> np.ndarray:
        return _read_only(v)

    @property
    def offsets(self) -> np.ndarray:
        """
        x − t at the interior points.
        """
        return self.mesh * np.arange(1, self.eigenfunctions.shape[1] + 1)


class DerivativeCheck(BaseModel):
    """
    Difference quotient of Λ_j against the squared boundary slope, for one j.
    """
    j: int
    fd_quotient: float
    slope_squared: float
    rel_err: float


class SpliceReport(BaseModel):
    """
    Rayleigh quotient of a spliced trial function on [t, L].

    Attributes
    ------------
        rq_value: float
            Rayleigh quotient of ψ under the t-domain matrix.
        lambda_t: float
            Λ_j(t).
        lambda_s: float
            Λ_j(s).
        slope_s: float
            f′_{j,s}(s).
        epsilon: float
            (a − t)/(t − s); infinite when s = t.
        reference_bound: float
            Λ_j(s) + slope_s²·(t − s)·(1 + ε)/ε.
    """
    rq_value: float
    lambda_t: float
    lambda_s: float
    slope_s: float
    epsilon: float
    reference_bound: float


class HalvingStudy(BaseModel):
    """
    Λ_1 on one path at successively halved meshes.
    """
    meshes: List[float]
    values: List[float]

    @property
    def differences(self) -> np.ndarray:
        return np.diff(np.asarray(self.values))

    @property
    def ratios(self) -> np.ndarray:
        d = self.differences
        return d[1:] / d[:-1]

    @property
    def ratio(self) -> float:
        return float(self.ratios[-1])


class HalvingEnsemble(BaseModel):
    """
    Halving studies of independent paths at the same meshes.

    Per-path ratios are ratios of two noisy differences and scatter widely; the ensemble
    ratio divides mean absolute differences instead.
    """
    studies: List[HalvingStudy]

    @property
    def meshes(self) -> List[float]:
        return self.studies[0].meshes

    @property
    def mean_abs_differences(self) -> np.ndarray:
        return np.mean([np.abs(study.differences) for study in self.studies], axis=0)

    @property
    def ratio(self) -> float:
        d = self.mean_abs_differences
        return float(d[-1] / d[-2])


## Discretisation

def _noise_scale(beta: float) -> float:
    return 0.0 if math.isinf(beta) else 2 / math.sqrt(beta)


def _end_index(path: BrownianGrid, right_end: float) -> int:
    return int(round((right_end - path.origin) / path.mesh))


def assemble_sao_matrix(
    path: BrownianGrid,
    t_index: int,
    right_end: float = DEFAULT_RIGHT_END,
    beta: float = 2.0,
    recentre: bool = False
) -> TridiagSym:
    """
    The matrix of −d²/dx² + x + (2/√β)·b′ on [t, L], t = origin + t_index·h, Dirichlet at both ends.

    Diagonal 2/h² + x_j + (2/√β)·ΔB/h, off-diagonal −1/h². Shifting t_index only drops leading
    rows, so the matrix at t + h is the first principal minor of the matrix at t.

    Args
    ------------
        path: BrownianGrid
            Shared increments.
        t_index: int
            Left boundary in cells.
        right_end: float
            L, snapped to the nearest grid point.
        beta: float
            Dyson index; `inf` drops the noise.
        recentre: bool
            Use the potential x − t, i.e. the matrix minus t·I.

    Returns
    ------------
        TridiagSym:
            The (M−1) × (M−1) matrix.

    Raises
    ------------
        ValueError:
            If the domain is too short or reaches past the path.
    """
    airy_types.BetaParams(beta=beta)
    end = _end_index(path, right_end)
    airy_types.SaoDomainParams(t_index=t_index, num_cells=end - t_index, path_cells=path.num_cells)

    h = path.mesh
    g = np.arange(t_index + 1, end)
    x = (g - t_index) * h if recentre else path.origin + g * h
    diag = 2 / h**2 + x + _noise_scale(beta) * path.increments[g - 1] / h
    offdiag = np.full(g.size - 1, -1 / h**2)
    return TridiagSym(diag=diag, offdiag=offdiag)


def solve_domain(
    path: BrownianGrid,
    t_index: int,
    k: int = 1,
    right_end: float = DEFAULT_RIGHT_END,
    beta: float = 2.0,
    tol: float = DEFAULT_SAO_TOL,
    three_point: bool = False
) -> SaoDomainSolve:
    """
    The k lowest eigenpairs on [t, L], eigenfunctions normalised so that h·Σφ² = 1.

    The boundary slope is φ(t + h)/h, or the one-sided (4φ(t+h) − φ(t+2h))/(2h) with
    `three_point`; eigenfunction signs make it positive.

    For example, the first Airy zero:
    ```python
    solve = solve_domain(zero_grid(5e-4, 16000), 0, k=1, right_end=8.0, beta=math.inf)
    solve.eigs[0]  # ≈ 2.33811
    ```

    Args
    ------------
        path: BrownianGrid
            Shared increments.
        t_index: int
            Left boundary in cells.
        k: int
            Number of eigenpairs.
        right_end: float
            L.
        beta: float
            Dyson index.
        tol: float
            Absolute eigenvalue tolerance.
        three_point: bool
            Second-order slope extraction.

    Returns
    ------------
        SaoDomainSolve:
            Eigenvalues, slopes and eigenfunctions.
    """
    try:
        # solved with the potential x − t, then shifted by t
        matrix = assemble_sao_matrix(path, t_index, right_end, beta, recentre=True)
        if k > matrix.size // 2:
            error_message = f"Asked for {k} eigenpairs of a {matrix.size}-point discretisation; refine the mesh."
            logger.error(f'❌ {error_message}')
            raise ValueError(error_message)

        h = path.mesh
        pairs = lowest_pairs(matrix, k, tol)
        phis = np.vstack([p.eigenvector for p in pairs]) / math.sqrt(h)
        phis *= np.where(phis[:, :1] < 0, -1.0, 1.0)
        if three_point:
            slopes = (4 * phis[:, 0] - phis[:, 1]) / (2 * h)
        else:
            slopes = phis[:, 0] / h

        t = path.origin + t_index * h
        logger.debug(f'SAO solve t_index={t_index}: Λ_1={pairs[0].eigenvalue + t:.8f}')
        return SaoDomainSolve(
            t_index=t_index,
            t=t,
            right_end=path.origin + _end_index(path, right_end) * h,
            mesh=h,
            beta=beta,
            eigs=t + np.array([p.eigenvalue for p in pairs]),
            boundary_slopes=slopes,
            eigenfunctions=phis
        )
    except Exception as e:
        logger.error(f'❌ Problem solving SAO domain at t_index={t_index}: {str(e)}')
        raise


def near_linearity_constant(
    solve: SaoDomainSolve,
    j: int = 0,
    x_max: float = 0.2
) -> float:
    """
    max |φ_j(x) − (x−t)·slope_j| / (x−t)² over 0 < x − t ≤ x_max (0-based j).
    """
    offsets = solve.offsets
    mask = offsets <= x_max + 1e-12
    if not np.any(mask):
        error_message = f"No grid point within x_max={x_max} of the boundary at mesh {solve.mesh}."
        logger.error(f'❌ {error_message}')
        raise ValueError(error_message)
    d = offsets[mask]
    deviation = np.abs(solve.eigenfunctions[j, mask] - d * solve.boundary_slopes[j])
    return float(np.max(deviation / d**2))


## Derivative formula

def derivative_check(
    path: BrownianGrid,
    t_index: int,
    k: int = 1,
    window: int = DEFAULT_WINDOW,
    right_end: float = DEFAULT_RIGHT_END,
    beta: float = 2.0,
    tol: float = DEFAULT_SAO_TOL,
    three_point: bool = False
) -> List[DerivativeCheck]:
    """
    (Λ_j(t+δ) − Λ_j(t))/δ against f′_{j,t}(t)², δ = window·h, both from the same path.

    Returns
    ------------
        List[DerivativeCheck]:
            One entry per j = 1, …, k (1-based in the entries).
    """
    if window < 1:
        error_message = f"The difference window should be at least one cell, instead got `{window}`."
        logger.error(f'❌ {error_message}')
        raise ValueError(error_message)
    here = solve_domain(path, t_index, k, right_end, beta, tol, three_point)
    there = solve_domain(path, t_index + window, k, right_end, beta, tol, three_point)
    return _derivative_rows(here, there, window)


def _derivative_rows(
    here: SaoDomainSolve,
    there: SaoDomainSolve,
    window: int
) -> List[DerivativeCheck]:
    delta = window * here.mesh
    quotients = (there.eigs - here.eigs) / delta
    squares = here.boundary_slopes**2
    return [
        DerivativeCheck(
            j=j + 1,
            fd_quotient=float(quotients[j]),
            slope_squared=float(squares[j]),
            rel_err=float(abs(quotients[j] - squares[j]) / squares[j])
        )
        for j in range(len(quotients))
    ]


def sao_table(
    path: BrownianGrid,
    t_indices: Sequence[int],
    k: int = 1,
    window: int = DEFAULT_WINDOW,
    right_end: float = DEFAULT_RIGHT_END,
    beta: float = 2.0,
    tol: float = DEFAULT_SAO_TOL,
    three_point: bool = False,
    threads: int = 1
) -> pd.DataFrame:
    """
    Rows `t,j,lambda,slope,slope_sq,fd_quotient,rel_err` for every t in `t_indices`, ordered by (t, j).

    Each domain is solved once, including the shifted ones the quotients need.
    """
    starts = sorted(set(int(i) for i in t_indices))
    needed = sorted(set(starts) | {i + window for i in starts})
    solves = dict(zip(needed, map_ordered(
        lambda i: solve_domain(path, i, k, right_end, beta, tol, three_point),
        needed,
        threads,
        description="SAO domains"
    )))

    rows = []
    for i in starts:
        here = solves[i]
        for check in _derivative_rows(here, solves[i + window], window):
            j = check.j - 1
            rows.append((
                here.t, check.j, here.eigs[j], here.boundary_slopes[j],
                check.slope_squared, check.fd_quotient, check.rel_err
            ))
    return pd.DataFrame(rows, columns=SAO_COLUMNS)


## Variational bound

def spliced_rayleigh_bound(
    path: BrownianGrid,
    s_index: int,
    t_index: int,
    splice_index: int,
    j: int = 0,
    right_end: float = DEFAULT_RIGHT_END,
    beta: float = 2.0,
    tol: float = DEFAULT_SAO_TOL
) -> SpliceReport:
    """
    Rayleigh quotient on [t, L] of ψ: the ramp from 0 at t to f_{j,s}(a) on [t, a], then f_{j,s} on [a, L].

    For j = 0 the quotient can never fall below Λ_1(t), the lowest eigenvalue being the
    minimum of the quotient.

    Args
    ------------
        path: BrownianGrid
            Shared increments.
        s_index, t_index, splice_index: int
            s ≤ t ≤ a, in cells from the path origin.
        j: int
            0-based eigenfunction index.
        right_end: float
            L.
        beta: float
            Dyson index.
        tol: float
            Absolute eigenvalue tolerance.

    Returns
    ------------
        SpliceReport:
            The quotient, Λ_j(t), and the reference bound from the s-domain.
    """
    end = _end_index(path, right_end)
    airy_types.SpliceParams(s_index=s_index, t_index=t_index, splice_index=splice_index, end_index=end)

    at_s = solve_domain(path, s_index, j + 1, right_end, beta, tol)
    at_t = solve_domain(path, t_index, j + 1, right_end, beta, tol)
    f_s = at_s.eigenfunctions[j]

    # f_s[g − s_index − 1] is the value at global point g
    g = np.arange(t_index + 1, end)
    psi = f_s[g - s_index - 1].copy()
    if splice_index > t_index:
        ramp = g <= splice_index
        psi[ramp] = f_s[splice_index - s_index - 1] * (g[ramp] - t_index) / (splice_index - t_index)

    matrix = assemble_sao_matrix(path, t_index, right_end, beta)
    h = path.mesh
    gap = (t_index - s_index) * h
    epsilon = (splice_index - t_index) / (t_index - s_index) if t_index > s_index else math.inf
    slope_s = float(at_s.boundary_slopes[j])
    if gap == 0:
        reference = float(at_s.eigs[j])
    elif epsilon == 0:
        reference = math.inf
    else:
        reference = float(at_s.eigs[j] + slope_s**2 * gap * (1 + epsilon) / epsilon)

    return SpliceReport(
        rq_value=rayleigh_quotient(matrix, psi),
        lambda_t=float(at_t.eigs[j]),
        lambda_s=float(at_s.eigs[j]),
        slope_s=slope_s,
        epsilon=epsilon,
        reference_bound=reference
    )


## Path ensembles and stationarity

def sample_path_ensemble(
    stream: RngStream,
    count: int,
    mesh: float,
    num_cells: int
) -> List[BrownianGrid]:
    """
    `count` independent paths, path r drawn from `stream.replica(r)`.
    """
    if count < 1:
        error_message = f"A path ensemble needs at least one path, instead got `{count}`."
        logger.error(f'❌ {error_message}')
        raise ValueError(error_message)
    return [sample_brownian_grid(stream.replica(r), mesh, num_cells) for r in range(count)]


def stationarity_shift_check(
    paths: Sequence[BrownianGrid],
    t_star: float,
    length: float = DEFAULT_RIGHT_END,
    beta: float = 2.0,
    level: float = 0.01,
    decimals: int = DEFAULT_DECIMALS,
    tol: float = DEFAULT_SAO_TOL,
    threads: int = 1
) -> TestReport:
    """
    Two-sample KS between Λ_1 on [0, L] and Λ_1 on [t*, L + t*] minus t*, one path per sample point.

    Both domains have length L, so at β = ∞ the two matrices differ by t*·I and the samples
    agree after rounding to `decimals`.

    Args
    ------------
        paths: Sequence[BrownianGrid]
            Independent paths, each covering [0, L + t*].
        t_star: float
            Shift, snapped to a whole number of cells.
        length: float
            L.
        beta: float
            Dyson index.
        level: float
            KS significance level.
        decimals: int
            Rounding applied to both samples.
        tol: float
            Absolute eigenvalue tolerance.
        threads: int
            Worker threads.

    Returns
    ------------
        TestReport:
            The KS report with t* and β in its metadata.
    """
    if t_star < 0:
        error_message = f"The shift `t_star` should be nonnegative, instead got `{t_star}`."
        logger.error(f'❌ {error_message}')
        raise ValueError(error_message)

    def one(path: BrownianGrid) -> Tuple[float, float]:
        shift = int(round(t_star / path.mesh))
        shifted_t = shift * path.mesh
        start = solve_domain(path, 0, 1, path.origin + length, beta, tol)
        later = solve_domain(path, shift, 1, path.origin + shifted_t + length, beta, tol)
        return float(start.eigs[0] - start.t), float(later.eigs[0] - later.t)

    pairs = map_ordered(one, list(paths), threads, description=f"SAO stationarity t*={t_star}")
    before = np.round([p[0] for p in pairs], decimals)
    after = np.round([p[1] for p in pairs], decimals)
    report = ks_two_sample(before, after, level, name=f"sao_stationarity_t{t_star}")
    return report.model_copy(update={'metadata': {**report.metadata, 't_star': t_star, 'beta': beta}})


## Convergence

def richardson(coarse: float, fine: float, order: int = 2) -> float:
    """
    Extrapolate two values at meshes h and h/2 with error ∝ h^order.
    """
    return fine + (fine - coarse) / (2**order - 1)


def halving_ratio(
    path: BrownianGrid,
    right_end: float = DEFAULT_RIGHT_END,
    beta: float = 2.0,
    levels: int = 3,
    tol: float = DEFAULT_SAO_TOL
) -> HalvingStudy:
    """
    Λ_1 on [origin, L] at meshes 2^{levels−1}·h, …, 2h, h, all restrictions of the one fine path.

    Successive differences shrink by about one half when the noise sampling dominates the error.
    """
    if levels < 3:
        error_message = f"A halving ratio needs at least 3 levels, instead got `{levels}`."
        logger.error(f'❌ {error_message}')
        raise ValueError(error_message)
    grids = [path.coarsen(2 ** (levels - 1 - level)) for level in range(levels)]
    values = [float(solve_domain(grid, 0, 1, right_end, beta, tol).eigs[0]) for grid in grids]
    return HalvingStudy(meshes=[grid.mesh for grid in grids], values=values)


def halving_ratio_ensemble(
    paths: Sequence[BrownianGrid],
    right_end: float = DEFAULT_RIGHT_END,
    beta: float = 2.0,
    levels: int = 3,
    tol: float = DEFAULT_SAO_TOL,
    threads: int = 1
) -> HalvingEnsemble:
    """
    `halving_ratio` on every path; `ratio` of the result is mean |Λ_h − Λ_{h/2}| over mean |Λ_{2h} − Λ_h|.

    For example, the noisy ratio on 64 paths:
    ```python
    paths = sample_path_ensemble(RngStream(master_seed=3), 64, 1e-3, 6000)
    halving_ratio_ensemble(paths, right_end=6.0).ratio  # ≈ 0.5
    ```
    """
    if len(paths) < 1:
        error_message = "A halving ensemble needs at least one path."
        logger.error(f'❌ {error_message}')
        raise ValueError(error_message)
    studies = map_ordered(
        lambda path: halving_ratio(path, right_end, beta, levels, tol),
        list(paths),
        threads,
        description=f"Mesh halving β={beta}"
    )
    ensemble = HalvingEnsemble(studies=studies)
    logger.info(f'📝 Ensemble halving ratio over {len(studies)} paths: {ensemble.ratio:.4f}')
    return ensemble


## Output

def export_path_csv(path: BrownianGrid, file_path: str | Path) -> Path:
    """
    Write the increments under a `# mesh=`, `# origin=` header for replay.
    """
    file_path = Path(file_path)
    with open(file_path, 'w', encoding='UTF-8', newline='') as handle:
        handle.write(f'# mesh={path.mesh!r}\n# origin={path.origin!r}\n')
        pd.DataFrame({'increment': path.increments}).to_csv(
            handle, index=False, lineterminator='\n', float_format='%.17g'
        )
    logger.info(f'📝 Brownian path written to `{file_path}`')
    return file_path


def load_path_csv(file_path: str | Path) -> BrownianGrid:
    """
    Read a file written by `export_path_csv`.
    """
    file_path = Path(file_path)
    header: Dict[str, float] = {}
    with open(file_path, encoding='UTF-8') as handle:
        for line in handle:
            if not line.startswith('#'):
                break
            key, _, value = line[1:].strip().partition('=')
            header[key] = float(value)
    if 'mesh' not in header:
        error_message = f"The path file `{file_path}` has no `# mesh=` header."
        logger.error(f'❌ {error_message}')
        raise ValueError(error_message)
    increments = pd.read_csv(file_path, comment='#')['increment'].to_numpy(dtype=np.float64)
    return BrownianGrid(mesh=header['mesh'], increments=increments, origin=header.get('origin', 0.0))


def write_sao_csv(
    table: pd.DataFrame,
    file_path: str | Path,
    config: Optional[Dict[str, Any]] = None
) -> Path:
    """
    Write a `sao_table` after a `#` block echoing the run configuration.
    """
    file_path = Path(file_path)
    with open(file_path, 'w', encoding='UTF-8', newline='') as handle:
        handle.write(''.join(f'# {key}={value}\n' for key, value in (config or {}).items()))
        table.to_csv(handle, index=False, lineterminator='\n', float_format='%.12g')
    logger.info(f'📝 SAO table written to `{file_path}`')
    return file_path
