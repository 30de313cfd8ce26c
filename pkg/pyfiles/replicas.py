### replicas
## Runs independent Monte Carlo replicas, each on its own child stream.
## Results come back in replica order, so they never depend on the thread count.

## Imports
# Third-party modules
from concurrent.futures import ThreadPoolExecutor
from typing import (
    Callable,
    List,
    Sequence,
    TypeVar
)

# Internal modules
from pyfiles.logger import (
    logger,
    with_progress
)
from pyfiles.randvar import RngStream


S = TypeVar('S')
T = TypeVar('T')


def map_ordered(
    task: Callable[[S], T],
    items: Sequence[S],
    threads: int = 1,
    description: str = "Replicas"
) -> List[T]:
    """
    `[task(item) for item in items]`, spread over `threads` workers behind a progress bar.

    numpy and LAPACK release the GIL inside the heavy calls, so threads help even
    though the tasks are Python functions.

    Args
    ------------
        task: Callable[[S], T]
            Work for one item; must not share mutable state with other items.
        items: Sequence[S]
            Inputs, at least one.
        threads: int
            Worker threads.
        description: str
            Label for the progress bar.

    Returns
    ------------
        List[T]:
            One result per item, in input order.

    Raises
    ------------
        ValueError:
            If there are no items or no threads.
    """
    if len(items) < 1 or threads < 1:
        error_message = f"Replica runs need at least one item and one thread, instead got {len(items)} and {threads}."
        logger.error(f'❌ {error_message}')
        raise ValueError(error_message)

    with with_progress(description, total=len(items)) as advance:
        def run_one(item: S) -> T:
            result = task(item)
            advance()
            return result

        if threads == 1:
            return [run_one(item) for item in items]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(run_one, items))


def run_replicas(
    task: Callable[[RngStream], T],
    stream: RngStream,
    reps: int,
    threads: int = 1,
    description: str = "Replicas"
) -> List[T]:
    """
    Call `task(stream.replica(r))` for r = 0, …, reps−1.

    For example:
    ```python
    samples = run_replicas(lambda s: sample_gaussian(s), RngStream(master_seed=1), reps=100, threads=4)
    ```

    Args
    ------------
        task: Callable[[RngStream], T]
            Work for one replica; must only draw from the stream it is given.
        stream: RngStream
            Parent stream.
        reps: int
            Number of replicas.
        threads: int
            Worker threads.
        description: str
            Label for the progress bar and the log.

    Returns
    ------------
        List[T]:
            One result per replica, in replica order.
    """
    if reps < 1:
        error_message = f"Replica runs need reps ≥ 1, instead got {reps}."
        logger.error(f'❌ {error_message}')
        raise ValueError(error_message)
    return map_ordered(task, [stream.replica(r) for r in range(reps)], threads, description)
