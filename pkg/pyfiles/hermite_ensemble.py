### hermite_ensemble
## The tridiagonal β-Hermite matrix A_β, its centred edge matrix 2√n·I − A_β and the minors of that matrix.
#
# Minor indexing counts removed rows/columns: k = 0 is the full matrix, and the minor
# at boundary position t is k = ⌊t·n^{1/3}⌋.

## Imports
# Third-party modules
import math
import numpy as np

from pydantic import (
    BaseModel,
    ConfigDict,
    field_validator,
    model_validator
)

from typing import (
    Any,
    Dict,
    Optional
)

# Internal modules
from validators import airy_types
from pyfiles.logger import logger
from pyfiles.randvar import (
    RngStream,
    sample_gaussian,
    sample_chi
)
from pyfiles.tridiag_eigen import (
    TridiagSym,
    lowest_eigenvalues
)


class BetaEnsembleSpec(BaseModel):
    """
    Size and Dyson index of a β-Hermite draw.

    Attributes
    ------------
        n: int
            Matrix size, at least 2.
        beta: float
            Dyson index, positive; `inf` gives the noiseless matrix.
    """
    model_config = ConfigDict(frozen=True)

    n: int
    beta: float

    @field_validator('n')
    @classmethod
    def validate_n(cls, v: int) -> int:
        if v < 2:
            error_message = f"The matrix size `n` should be at least 2, instead got `{v}`."
            logger.error(f'❌ {error_message}')
            raise ValueError(error_message)
        return v

    @field_validator('beta')
    @classmethod
    def validate_beta(cls, v: float) -> float:
        return airy_types.BetaParams(beta=v).beta

    @property
    def time_scale(self) -> float:
        """
        n^{1/3}: minors per unit of boundary position.
        """
        return self.n ** (1 / 3)

    @property
    def edge_scale(self) -> float:
        """
        n^{1/6}: the factor applied to edge eigenvalues.
        """
        return self.n ** (1 / 6)

    def minor_at(self, t: float) -> int:
        """
        ⌊t·n^{1/3}⌋, guarded against t·n^{1/3} landing a rounding error below an integer.
        """
        return int(math.floor(t * self.time_scale + 1e-9))


class EnsembleDraw(BaseModel):
    """
    One draw of A_β.

    Attributes
    ------------
        spec: BetaEnsembleSpec
            Size and Dyson index.
        diag_raw: np.ndarray
            n entries N(0, 2)/√β.
        offdiag_raw: np.ndarray
            n−1 entries χ_{(n−1)β}/√β, …, χ_β/√β, all positive.
        seed: Dict[str, Any]
            Seed record of the stream the draw came from.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    spec: BetaEnsembleSpec
    diag_raw: np.ndarray
    offdiag_raw: np.ndarray
    seed: Dict[str, Any] = {}

    @field_validator('diag_raw', 'offdiag_raw', mode='before')
    @classmethod
    def validate_array(cls, v: np.ndarray) -> np.ndarray:
        v = np.array(v, dtype=np.float64)
        v.flags.writeable = False
        return v

    @model_validator(mode='after')
    def validate_draw(self) -> 'EnsembleDraw':
        n = self.spec.n
        if self.diag_raw.shape != (n,) or self.offdiag_raw.shape != (n - 1,):
            error_message = (
                f"A draw of size {n} needs {n} diagonal and {n - 1} off-diagonal entries, "
                f"instead got {self.diag_raw.shape} and {self.offdiag_raw.shape}."
            )
            logger.error(f'❌ {error_message}')
            raise ValueError(error_message)
        if np.any(self.offdiag_raw <= 0):
            error_message = "Off-diagonal χ entries should all be positive."
            logger.error(f'❌ {error_message}')
            raise ValueError(error_message)
        return self


def _chi_parameters(n: int, beta: float) -> np.ndarray:
    # (n−1)β, (n−2)β, …, β from top-left to bottom-right
    return beta * np.arange(n - 1, 0, -1, dtype=np.float64)


def sample_hermite(
    spec: BetaEnsembleSpec,
    stream: RngStream
) -> EnsembleDraw:
    """
    Draw A_β: diagonal N(0, 2)/√β, off-diagonal χ_{(n−1)β}/√β down to χ_β/√β, all independent.

    The diagonal is drawn first, then the off-diagonal, both from `stream`.
    At β = ∞ no randomness is used: the diagonal is 0 and the off-diagonal √(n−1), …, √1.

    For example:
    ```python
    spec = BetaEnsembleSpec(n=6000, beta=2.0)
    draw = sample_hermite(spec, RngStream(master_seed=7))
    ```

    Args
    ------------
        spec: BetaEnsembleSpec
            Size and Dyson index.
        stream: RngStream
            The stream to draw from.

    Returns
    ------------
        EnsembleDraw:
            The draw with its seed record.
    """
    n, beta = spec.n, spec.beta
    if math.isinf(beta):
        diag = np.zeros(n)
        offdiag = np.sqrt(np.arange(n - 1, 0, -1, dtype=np.float64))
    else:
        diag = sample_gaussian(stream, 0.0, 2.0, size=n) / math.sqrt(beta)
        offdiag = sample_chi(stream, _chi_parameters(n, beta)) / math.sqrt(beta)
    logger.debug(f'Sampled β-Hermite draw n={n}, β={beta}')
    return EnsembleDraw(spec=spec, diag_raw=diag, offdiag_raw=offdiag, seed=stream.record())


def edge_minor_matrix(
    draw: EnsembleDraw,
    k: int = 0
) -> TridiagSym:
    """
    2√n·I − A_β with its first k rows and columns removed, a matrix of size n−k.

    The result is centred but not yet scaled by n^{1/6}.

    Args
    ------------
        draw: EnsembleDraw
            The draw.
        k: int
            Rows/columns removed, at most n−2.

    Returns
    ------------
        TridiagSym:
            The minor.
    """
    n = draw.spec.n
    airy_types.MinorParams(n=n, k=k)
    return TridiagSym(
        diag=2 * math.sqrt(n) - draw.diag_raw[k:],
        offdiag=-draw.offdiag_raw[k:]
    )


def scaled_edge_eigenvalues(
    draw: EnsembleDraw,
    k: int,
    num_eigs: int,
    tol: Optional[float] = None
) -> np.ndarray:
    """
    n^{1/6} times the `num_eigs` lowest eigenvalues of the k-th edge minor, increasing.

    Args
    ------------
        draw: EnsembleDraw
            The draw.
        k: int
            Rows/columns removed.
        num_eigs: int
            Number of eigenvalues.
        tol: float, Optional
            Bracket width of the unscaled eigenvalues.

    Returns
    ------------
        np.ndarray:
            The scaled eigenvalues.
    """
    airy_types.MinorParams(n=draw.spec.n, k=k, num_eigs=num_eigs)
    minor = edge_minor_matrix(draw, k)
    return draw.spec.edge_scale * lowest_eigenvalues(minor, num_eigs, tol)


def direct_minor_matrix(
    spec: BetaEnsembleSpec,
    k: int,
    stream: RngStream
) -> TridiagSym:
    """
    A matrix with the law of the k-th edge minor, built from a fresh (n−k)-ensemble
    (χ parameters (n−k−1)β, …, β) but still centred at 2√n.

    Comparing it with `edge_minor_matrix` checks that minors of a draw are themselves β-Hermite.
    """
    airy_types.MinorParams(n=spec.n, k=k)
    smaller = sample_hermite(BetaEnsembleSpec(n=spec.n - k, beta=spec.beta), stream)
    return TridiagSym(
        diag=2 * math.sqrt(spec.n) - smaller.diag_raw,
        offdiag=-smaller.offdiag_raw
    )
