### tridiag_eigen
## The k lowest eigenpairs of a real symmetric tridiagonal matrix.
## Eigenvalues come from Sturm-sequence bisection inside Gershgorin bounds,
## eigenvectors from inverse iteration on the shifted banded system.

## Imports
# Third-party modules
import numpy as np

from numpy.linalg import LinAlgError
from scipy.linalg import (
    eigh_tridiagonal,
    solve_banded
)
from pydantic import (
    BaseModel,
    ConfigDict,
    field_validator,
    model_validator
)

from typing import (
    List,
    Literal,
    Optional,
    Sequence,
    Tuple
)

# Internal modules
from validators import airy_types
from pyfiles.logger import logger


## Constants
# Default bracket width, relative to the Gershgorin radius
DEFAULT_RELATIVE_TOL: float = 1e-10
# Inverse iteration cap
MAX_INVERSE_ITERATIONS: int = 50
# Multiple of eps·scale·√m at which an inverse-iteration residual counts as converged
RESIDUAL_ROUNDING: float = 4.0
# Eigenvalues closer than this (relative to the matrix scale) share a cluster and get re-orthogonalised
CLUSTER_GAP: float = 1e-3


class ConvergenceError(RuntimeError):
    """
    A bisection or inverse iteration that could not converge: non-finite input,
    or a shift too far from the spectrum.
    """


class TridiagSym(BaseModel):
    """
    A real symmetric tridiagonal matrix, immutable once built.

    Attributes
    ------------
        diag: np.ndarray
            The m diagonal entries.
        offdiag: np.ndarray
            The m−1 off-diagonal entries.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    diag: np.ndarray
    offdiag: np.ndarray

    @field_validator('diag', 'offdiag', mode='before')
    @classmethod
    def validate_array(cls, v: np.ndarray) -> np.ndarray:
        v = np.array(v, dtype=np.float64)
        if v.ndim != 1:
            error_message = f"Tridiagonal bands should be 1-d arrays, instead got shape {v.shape}."
            logger.error(f'❌ {error_message}')
            raise ValueError(error_message)
        v.flags.writeable = False
        return v

    @model_validator(mode='after')
    def validate_shape(self) -> 'TridiagSym':
        if self.diag.size < 1 or self.offdiag.size != self.diag.size - 1:
            error_message = (
                f"A tridiagonal matrix needs m ≥ 1 diagonal and m−1 off-diagonal entries, "
                f"instead got {self.diag.size} and {self.offdiag.size}."
            )
            logger.error(f'❌ {error_message}')
            raise ValueError(error_message)
        return self

    @property
    def size(self) -> int:
        return int(self.diag.size)

    @property
    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.diag)) and np.all(np.isfinite(self.offdiag)))

    def gershgorin_bounds(self) -> Tuple[float, float]:
        """
        An interval containing the whole spectrum.
        """
        radius = np.zeros(self.size)
        radius[:-1] += np.abs(self.offdiag)
        radius[1:] += np.abs(self.offdiag)
        return float(np.min(self.diag - radius)), float(np.max(self.diag + radius))

    def scale(self) -> float:
        """
        max(|lo|, |hi|) over the Gershgorin interval, at least 1.
        """
        lo, hi = self.gershgorin_bounds()
        return max(abs(lo), abs(hi), 1.0)

    def default_tol(self) -> float:
        lo, hi = self.gershgorin_bounds()
        return DEFAULT_RELATIVE_TOL * max(0.5 * (hi - lo), 1.0)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diag * v
        out[:-1] += self.offdiag * v[1:]
        out[1:] += self.offdiag * v[:-1]
        return out

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def principal_minor(self, k: int = 1) -> 'TridiagSym':
        """
        The matrix with its first k rows and columns removed.
        """
        if not 0 <= k < self.size:
            error_message = f"Cannot remove {k} rows from a matrix of size {self.size}."
            logger.error(f'❌ {error_message}')
            raise ValueError(error_message)
        return TridiagSym(diag=self.diag[k:], offdiag=self.offdiag[k:])


class SpectralPair(BaseModel):
    """
    One eigenvalue with its unit eigenvector.

    The sign is fixed so the first nonzero entry of the eigenvector is positive.

    Attributes
    ------------
        eigenvalue: float
            The eigenvalue, as bracketed by bisection.
        eigenvector: np.ndarray
            Unit ℓ²-norm eigenvector.
        first_entry: float
            v_1; its square is the spectral weight.
        residual: float
            ‖Tv − λv‖₂.
        near_degenerate: bool
            Set when a neighbouring eigenvalue lies within the bracket width.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    eigenvalue: float
    eigenvector: np.ndarray
    first_entry: float
    residual: float
    near_degenerate: bool = False


def _guard_pivots(q: np.ndarray, pivmin: float) -> np.ndarray:
    # tiny pivots are pushed away from zero; an exact zero counts as positive so that
    # an eigenvalue equal to x is not counted as lying below it
    tiny = np.abs(q) < pivmin
    return np.where(tiny, np.where(q < 0, -pivmin, pivmin), q)


def sturm_count(T: TridiagSym, x: float | np.ndarray) -> int | np.ndarray:
    """
    Number of eigenvalues of T strictly below x.

    This is the number of negative pivots of the LDLᵀ factorisation of T − xI.
    Several shifts may be given at once as an array.

    For example:
    ```python
    T = TridiagSym(diag=[2.0, 2.0], offdiag=[-1.0])
    sturm_count(T, 2.0)   # 1, the spectrum is {1, 3}
    ```

    Args
    ------------
        T: TridiagSym
            The matrix.
        x: float | np.ndarray
            Shift(s).

    Returns
    ------------
        int | np.ndarray:
            The count for each shift.
    """
    shifts = np.atleast_1d(np.asarray(x, dtype=np.float64))
    squared = T.offdiag ** 2
    pivmin = np.finfo(np.float64).tiny * max(1.0, float(squared.max()) if squared.size else 1.0)

    q = _guard_pivots(T.diag[0] - shifts, pivmin)
    count = (q < 0).astype(np.int64)
    for i in range(1, T.size):
        q = _guard_pivots((T.diag[i] - shifts) - squared[i - 1] / q, pivmin)
        count += q < 0

    if np.ndim(x) == 0:
        return int(count[0])
    return count


def _bisect_lowest(T: TridiagSym, k: int, tol: float) -> np.ndarray:
    # all k targets are bisected together; one Sturm sweep per halving
    lo_bound, hi_bound = T.gershgorin_bounds()
    lo = np.full(k, lo_bound - tol)
    hi = np.full(k, hi_bound + tol)
    targets = np.arange(1, k + 1)
    max_steps = int(np.ceil(np.log2(max(hi_bound - lo_bound, tol) / tol))) + 64
    for _ in range(max_steps):
        if np.max(hi - lo) <= tol:
            return 0.5 * (lo + hi)
        mid = 0.5 * (lo + hi)
        below = sturm_count(T, mid) >= targets
        hi = np.where(below, mid, hi)
        lo = np.where(below, lo, mid)
    raise ConvergenceError(f"Sturm bisection did not shrink below {tol} in {max_steps} steps.")


def lowest_eigenvalues(
    T: TridiagSym,
    k: int,
    tol: Optional[float] = None,
    method: Literal['stebz', 'sturm'] = 'stebz'
) -> np.ndarray:
    """
    The k lowest eigenvalues of T, increasing, each bracketed to width `tol`.

    `stebz` calls LAPACK's Sturm bisection; `sturm` runs the same bisection on
    `sturm_count` in numpy and is meant for small matrices and cross-checks.

    Args
    ------------
        T: TridiagSym
            The matrix.
        k: int
            Number of eigenvalues, 1 ≤ k ≤ m.
        tol: float, Optional
            Bracket width. Defaults to 1e-10 times the Gershgorin radius.
        method: str
            `stebz` or `sturm`.

    Returns
    ------------
        np.ndarray:
            k increasing eigenvalues.

    Raises
    ------------
        ValueError:
            If k is out of range.
        ConvergenceError:
            If T has non-finite entries.
    """
    tol = T.default_tol() if tol is None else tol
    airy_types.LowestEigenvaluesParams(m=T.size, k=k, tol=tol, method=method)
    if not T.is_finite:
        error_message = "The tridiagonal matrix has non-finite entries; bisection cannot bracket."
        logger.error(f'❌ {error_message}')
        raise ConvergenceError(error_message)

    if T.size == 1:
        values = np.array([T.diag[0]])
    elif method == 'stebz':
        values = eigh_tridiagonal(
            T.diag,
            T.offdiag,
            eigvals_only=True,
            select='i',
            select_range=(0, k - 1),
            lapack_driver='stebz',
            tol=tol
        )
    else:
        values = _bisect_lowest(T, k, tol)

    gaps = np.diff(values)
    if np.any(gaps < tol):
        logger.warning(f'⚠️ Near-degenerate eigenvalues: smallest gap {gaps.min():.3e} below tol {tol:.3e}')
    return np.asarray(values, dtype=np.float64)


def _start_vector(m: int) -> np.ndarray:
    # fixed by the dimension so inverse iteration is reproducible
    v = np.random.default_rng(m).standard_normal(m)
    return v / np.linalg.norm(v)


def _fix_sign(v: np.ndarray) -> np.ndarray:
    nonzero = np.flatnonzero(v)
    if nonzero.size and v[nonzero[0]] < 0:
        return -v
    return v


def eigenvector_for(
    T: TridiagSym,
    lam: float,
    tol: Optional[float] = None,
    deflate: Sequence[np.ndarray] = ()
) -> SpectralPair:
    """
    The unit eigenvector for an eigenvalue `lam` already bracketed to `tol`.

    Inverse iteration on (T − lam·I) from a start vector fixed by the dimension.
    It stops once the Rayleigh residual ‖Tv − ρ(v)v‖ reaches rounding level or stops halving,
    and returns the best iterate; `tol` only sets the default of the bracket.
    Vectors in `deflate` are projected out at every step, which keeps eigenvectors of
    clustered eigenvalues orthogonal.

    Args
    ------------
        T: TridiagSym
            The matrix.
        lam: float
            The eigenvalue.
        tol: float, Optional
            The bracket width `lam` was computed with.
        deflate: Sequence[np.ndarray]
            Unit vectors to keep the result orthogonal to.

    Returns
    ------------
        SpectralPair:
            Normalised, sign-fixed eigenpair with its residual.

    Raises
    ------------
        ConvergenceError:
            If the residual keeps improving past the iteration cap.
    """
    tol = T.default_tol() if tol is None else tol
    airy_types.EigenvectorParams(lam=lam, tol=tol)
    m = T.size
    if m == 1:
        return SpectralPair(
            eigenvalue=lam,
            eigenvector=np.ones(1),
            first_entry=1.0,
            residual=abs(T.diag[0] - lam)
        )

    scale = T.scale()
    eps = np.finfo(np.float64).eps
    # rounding floor of ‖Tv − ρ(v)v‖ for a unit v
    target = RESIDUAL_ROUNDING * eps * scale * np.sqrt(m)

    ## Banded storage of T − σI
    shift = lam
    banded = np.zeros((3, m))
    banded[0, 1:] = T.offdiag
    banded[2, :-1] = T.offdiag

    v = _start_vector(m)
    best, best_residual = v, np.inf
    for iteration in range(MAX_INVERSE_ITERATIONS):
        banded[1] = T.diag - shift
        try:
            y = solve_banded((1, 1), banded, v, check_finite=False)
        except LinAlgError:
            # exactly singular: nudge the shift off the eigenvalue
            shift = shift + 16 * eps * scale
            continue
        if not np.all(np.isfinite(y)):
            shift = shift + 16 * eps * scale
            continue
        for u in deflate:
            y = y - np.dot(u, y) * u
        norm = np.linalg.norm(y)
        if norm == 0:
            error_message = f"Inverse iteration for λ={lam:.6g} lost the iterate after {iteration + 1} steps."
            logger.error(f'❌ {error_message}')
            raise ConvergenceError(error_message)
        v = y / norm
        Tv = T.matvec(v)
        r = float(np.linalg.norm(Tv - np.dot(v, Tv) * v))
        improved = r < 0.5 * best_residual
        if r < best_residual:
            best, best_residual = v, r
        if r <= target or not improved:
            break
    else:
        error_message = (
            f"Inverse iteration for λ={lam:.6g} did not settle in {MAX_INVERSE_ITERATIONS} steps "
            f"(residual {best_residual:.3e})."
        )
        logger.error(f'❌ {error_message}')
        raise ConvergenceError(error_message)

    v = _fix_sign(best)
    residual = float(np.linalg.norm(T.matvec(v) - lam * v))
    logger.debug(f'Inverse iteration λ={lam:.10g}: {iteration + 1} steps, residual {residual:.3e}')
    return SpectralPair(
        eigenvalue=lam,
        eigenvector=v,
        first_entry=float(v[0]),
        residual=residual
    )


def lowest_pairs(
    T: TridiagSym,
    k: int,
    tol: Optional[float] = None
) -> List[SpectralPair]:
    """
    The k lowest eigenpairs of T: bisection for the eigenvalues, then inverse iteration.

    Args
    ------------
        T: TridiagSym
            The matrix.
        k: int
            Number of pairs.
        tol: float, Optional
            Bracket width.

    Returns
    ------------
        List[SpectralPair]:
            Pairs in increasing eigenvalue order.
    """
    tol = T.default_tol() if tol is None else tol
    values = lowest_eigenvalues(T, k, tol)
    cluster = CLUSTER_GAP * T.scale()

    pairs: List[SpectralPair] = []
    for i, lam in enumerate(values):
        neighbours = [p.eigenvector for p in pairs if abs(p.eigenvalue - lam) < cluster]
        pair = eigenvector_for(T, float(lam), tol, deflate=neighbours)
        degenerate = bool(
            (i > 0 and values[i] - values[i - 1] < tol)
            or (i + 1 < k and values[i + 1] - values[i] < tol)
        )
        if degenerate:
            pair = pair.model_copy(update={'near_degenerate': True})
        pairs.append(pair)
    return pairs


def rayleigh_quotient(T: TridiagSym, v: np.ndarray) -> float:
    """
    (vᵀTv)/(vᵀv), an upper bound on the lowest eigenvalue for every nonzero v.

    Raises
    ------------
        ValueError:
            For the zero vector.
    """
    v = np.asarray(v, dtype=np.float64)
    norm_sq = float(np.dot(v, v))
    if v.shape != (T.size,) or norm_sq == 0:
        error_message = f"The Rayleigh quotient needs a nonzero vector of length {T.size}."
        logger.error(f'❌ {error_message}')
        raise ValueError(error_message)
    return float(np.dot(v, T.matvec(v)) / norm_sq)


def interlacing_violation(
    T: TridiagSym,
    num_eigs: int,
    tol: Optional[float] = None
) -> float:
    """
    How far the lowest eigenvalues of T and of T without its first row/column are
    from interlacing: λ_i(T) ≤ λ_i(T') ≤ λ_{i+1}(T).

    Args
    ------------
        T: TridiagSym
            The matrix, of size at least num_eigs + 2.
        num_eigs: int
            Number of eigenvalues of T' compared.
        tol: float, Optional
            Bracket width of both solves.

    Returns
    ------------
        float:
            The largest violation, 0 when they interlace exactly.
    """
    tol = T.default_tol() if tol is None else tol
    outer = lowest_eigenvalues(T, num_eigs + 1, tol)
    inner = lowest_eigenvalues(T.principal_minor(1), num_eigs, tol)
    below = outer[:num_eigs] - inner
    above = inner - outer[1:]
    return float(max(0.0, below.max(), above.max()))
