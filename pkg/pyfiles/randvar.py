### randvar
## Seeded sampling of every law the minor process and the stochastic Airy operator need:
## Gaussian, Gamma, chi with real degrees of freedom, Dirichlet and Brownian increments.
#
# Streams are counter-based (numpy's Philox) and keyed by a SeedSequence built from
# (master_seed, stream_index, spawn path), so replica streams are cheap, independent
# and reproducible on every platform.

## Imports
# Third-party modules
import numpy as np

from pydantic import (
    BaseModel,
    ConfigDict,
    PrivateAttr,
    field_validator,
    model_validator
)

from typing import (
    Any,
    Dict,
    Optional,
    Tuple
)

# Internal modules
from validators import airy_types
from pyfiles.logger import logger


class RngStream(BaseModel):
    """
    One reproducible stream of random numbers.

    Identical (master_seed, stream_index, spawn_path) give identical sample sequences.
    A stream holds state: every draw advances it. Use `reset` to replay it from the start,
    and `replica` to hand each Monte Carlo replica a stream of its own.

    For example:
    ```python
    stream = RngStream(master_seed=7)
    child = stream.replica(3)
    x = sample_gaussian(child, mean=0.0, variance=2.0)
    ```

    Attributes
    ------------
        master_seed: int
            64-bit master seed.
        stream_index: int
            Replica id at the top level.
        spawn_path: Tuple[int, ...]
            Indices of nested replicas below `stream_index`.
    """
    master_seed: int
    stream_index: int = 0
    spawn_path: Tuple[int, ...] = ()
    _generator: Optional[np.random.Generator] = PrivateAttr(default=None)

    @model_validator(mode='after')
    def validate_stream(self) -> 'RngStream':
        airy_types.StreamParams(master_seed=self.master_seed, stream_index=self.stream_index)
        return self

    @property
    def generator(self) -> np.random.Generator:
        """
        The numpy Generator behind the stream, built on first use.
        """
        if self._generator is None:
            seed_sequence = np.random.SeedSequence(
                self.master_seed,
                spawn_key=(self.stream_index, *self.spawn_path)
            )
            self._generator = np.random.Generator(np.random.Philox(seed_sequence))
        return self._generator

    def reset(self) -> None:
        """
        Rewind the stream so the next draws replay it from the start.
        """
        self._generator = None

    def replica(self, index: int) -> 'RngStream':
        """
        A child stream, independent of this one and of every other child.

        Args
        ------------
            index: int
                Replica number.

        Returns
        ------------
            RngStream:
                The child stream, in its initial state.
        """
        if index < 0:
            error_message = f"The replica `index` should be nonnegative, instead got `{index}`."
            logger.error(f'❌ {error_message}')
            raise ValueError(error_message)
        return RngStream(
            master_seed=self.master_seed,
            stream_index=self.stream_index,
            spawn_path=(*self.spawn_path, index)
        )

    def record(self) -> Dict[str, Any]:
        """
        The seed record written next to every output, enough to replay the stream.
        """
        return {
            'master_seed': self.master_seed,
            'stream_index': self.stream_index,
            'spawn_path': list(self.spawn_path)
        }


class GammaParams(BaseModel):
    """
    A Gamma law in the shape and scale convention.

    Attributes
    ------------
        shape: float
            Shape k > 0.
        scale: float
            Scale θ > 0; the mean is k·θ.
    """
    shape: float
    scale: float

    @field_validator('shape', 'scale')
    @classmethod
    def validate_positive(cls, v: float) -> float:
        if not (0 < v < np.inf):
            error_message = f"Gamma parameters should be positive and finite, instead got `{v}`."
            logger.error(f'❌ {error_message}')
            raise ValueError(error_message)
        return v

    @classmethod
    def derivative_law(cls, beta: float) -> 'GammaParams':
        """
        Γ(β/2, 2/β): the law of the eigenvalue derivatives, mean 1 and variance 2/β.
        """
        return cls(shape=beta / 2, scale=2 / beta)


class BrownianGrid(BaseModel):
    """
    Increments of one Brownian path on a uniform mesh.

    Every shifted-domain solve reads the same increments, which is what couples them.
    Grid point g sits at `origin + g·mesh`, and `increments[g-1]` is b(x_g) − b(x_{g-1}).

    Attributes
    ------------
        mesh: float
            Cell width h.
        increments: np.ndarray
            N increments, each N(0, h). Read-only.
        origin: float
            Leftmost grid point; b(origin) = 0.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    mesh: float
    increments: np.ndarray
    origin: float = 0.0

    @field_validator('increments', mode='before')
    @classmethod
    def validate_increments(cls, v: np.ndarray) -> np.ndarray:
        v = np.array(v, dtype=np.float64)
        if v.ndim != 1 or v.size < 2:
            error_message = f"A Brownian grid needs at least 2 increments, instead got shape {v.shape}."
            logger.error(f'❌ {error_message}')
            raise ValueError(error_message)
        if not np.all(np.isfinite(v)):
            error_message = "Brownian increments should all be finite."
            logger.error(f'❌ {error_message}')
            raise ValueError(error_message)
        v.flags.writeable = False
        return v

    @model_validator(mode='after')
    def validate_grid(self) -> 'BrownianGrid':
        airy_types.BrownianGridParams(mesh=self.mesh, num_cells=self.num_cells, origin=self.origin)
        return self

    @property
    def num_cells(self) -> int:
        return int(self.increments.size)

    @property
    def extent(self) -> float:
        """
        The rightmost grid point.
        """
        return self.origin + self.num_cells * self.mesh

    def path(self) -> np.ndarray:
        """
        b at every grid point, starting from b(origin) = 0.
        """
        return np.concatenate(([0.0], np.cumsum(self.increments)))

    def coarsen(self, factor: int = 2) -> 'BrownianGrid':
        """
        The same path seen on a mesh `factor` times wider.

        Increments are summed blockwise; trailing cells that do not fill a block are dropped.
        """
        if factor < 1:
            error_message = f"The coarsening `factor` should be at least 1, instead got `{factor}`."
            logger.error(f'❌ {error_message}')
            raise ValueError(error_message)
        blocks = self.num_cells // factor
        summed = self.increments[: blocks * factor].reshape(blocks, factor).sum(axis=1)
        return BrownianGrid(mesh=self.mesh * factor, increments=summed, origin=self.origin)

    def refine(self, stream: RngStream) -> 'BrownianGrid':
        """
        The same path on a mesh half as wide, filling each cell with a Brownian-bridge midpoint.

        Given an increment ΔB over width h, the two halves are ΔB/2 ± sqrt(h/4)·Z.
        Coarsening the result by 2 gives back this grid.
        """
        z = stream.generator.standard_normal(self.num_cells)
        half = 0.5 * self.increments
        spread = np.sqrt(self.mesh / 4) * z
        fine = np.empty(2 * self.num_cells)
        fine[0::2] = half + spread
        fine[1::2] = half - spread
        return BrownianGrid(mesh=self.mesh / 2, increments=fine, origin=self.origin)


## Samplers

def sample_gaussian(
    stream: RngStream,
    mean: float = 0.0,
    variance: float = 1.0,
    size: Optional[int] = None
) -> float | np.ndarray:
    """
    Draw from N(mean, variance).

    Args
    ------------
        stream: RngStream
            The stream to draw from.
        mean: float
            Mean of the law.
        variance: float
            Variance of the law, positive.
        size: int, Optional
            If given, that many independent draws as an array.

    Returns
    ------------
        float | np.ndarray:
            One draw, or `size` draws.
    """
    airy_types.GaussianParams(mean=mean, variance=variance)
    draw = stream.generator.normal(mean, np.sqrt(variance), size)
    return float(draw) if size is None else draw


def sample_gamma(
    stream: RngStream,
    p: GammaParams,
    size: Optional[int] = None
) -> float | np.ndarray:
    """
    Draw from Gamma(shape, scale).

    numpy's sampler is the Marsaglia–Tsang squeeze with the boosting identity for shape < 1,
    so β < 2 (shape β/2 < 1) is covered.

    Args
    ------------
        stream: RngStream
            The stream to draw from.
        p: GammaParams
            Shape and scale.
        size: int, Optional
            If given, that many independent draws as an array.

    Returns
    ------------
        float | np.ndarray:
            One positive draw, or `size` draws.
    """
    draw = stream.generator.gamma(p.shape, p.scale, size)
    return float(draw) if size is None else draw


def sample_chi(
    stream: RngStream,
    dof: float | np.ndarray,
    size: Optional[int] = None
) -> float | np.ndarray:
    """
    Draw from χ_dof as sqrt(2·Gamma(dof/2, 1)); `dof` is any positive real.

    An array of `dof` gives one draw per entry, which is how the off-diagonal of a
    β-Hermite matrix is filled in one call.

    Args
    ------------
        stream: RngStream
            The stream to draw from.
        dof: float | np.ndarray
            Degrees of freedom, positive.
        size: int, Optional
            Number of draws for a scalar `dof`.

    Returns
    ------------
        float | np.ndarray:
            One positive draw, or an array of them.
    """
    dof_array = np.asarray(dof, dtype=np.float64)
    airy_types.ChiParams(dof=float(dof_array.min()) if dof_array.size else 1.0)
    if not np.all(np.isfinite(dof_array)):
        airy_types.ChiParams(dof=float(dof_array.max()))
    draw = np.sqrt(2.0 * stream.generator.gamma(dof_array / 2, 1.0, size))
    return float(draw) if np.ndim(draw) == 0 else draw


def sample_dirichlet(
    stream: RngStream,
    n: int,
    alpha: float
) -> np.ndarray:
    """
    Draw a point of the simplex from Dirichlet(alpha, …, alpha).

    Built from n independent Gamma(alpha, 1) draws divided by their sum, the same
    construction that turns spectral weights into independent Gammas in the large-n limit.

    Args
    ------------
        stream: RngStream
            The stream to draw from.
        n: int
            Number of coordinates.
        alpha: float
            Common concentration.

    Returns
    ------------
        np.ndarray:
            n nonnegative entries summing to 1.
    """
    airy_types.DirichletParams(n=n, alpha=alpha)
    gammas = stream.generator.gamma(alpha, 1.0, n)
    return gammas / gammas.sum()


def sample_brownian_grid(
    stream: RngStream,
    mesh: float,
    num_cells: int,
    origin: float = 0.0
) -> BrownianGrid:
    """
    Draw `num_cells` independent N(0, mesh) increments of one Brownian path.

    Args
    ------------
        stream: RngStream
            The stream to draw from.
        mesh: float
            Cell width h.
        num_cells: int
            Number of cells, at least 2.
        origin: float
            Leftmost grid point.

    Returns
    ------------
        BrownianGrid:
            The path increments.
    """
    airy_types.BrownianGridParams(mesh=mesh, num_cells=num_cells, origin=origin)
    increments = stream.generator.normal(0.0, np.sqrt(mesh), num_cells)
    logger.debug(f'Sampled Brownian grid: {num_cells} cells of width {mesh}')
    return BrownianGrid(mesh=mesh, increments=increments, origin=origin)


def zero_grid(
    mesh: float,
    num_cells: int,
    origin: float = 0.0
) -> BrownianGrid:
    """
    A grid with no noise, for β = ∞ solves that still need a mesh and an extent.
    """
    return BrownianGrid(mesh=mesh, increments=np.zeros(num_cells), origin=origin)
