### logger
## Sets up the package logger for airy-minor.
# Handlers write to the console (rich, on stderr) and optionally to a file.
# The file path comes from `AIRY_LOG_PATH` (empty string disables it) and the level from `AIRY_LOG_LEVEL`.

import os
import logging
from logging import FileHandler, Formatter, Logger, LogRecord
from datetime import datetime
from contextlib import contextmanager
from rich.console import Console
from rich.logging import RichHandler
from rich.progress import (
    Progress,
    SpinnerColumn,
    BarColumn,
    TextColumn,
    TaskProgressColumn,
    TimeElapsedColumn
)
from typing import Callable, Generator


class ElapsedFormatter(Formatter):
    """
    Formatter exposing `%(elapsed)s`, the seconds between `start_time` and the record.

    Attributes
    ------------
        start_time: datetime
            Session start shared by every handler
    """

    def __init__(self, start_time: datetime, *args, **kwargs) -> None:
        super().__init__(*args, **kwargs)
        self.start_time = start_time


    def format(self, record: LogRecord) -> str:
        """
        Attach `record.elapsed` and format as the parent would.

        Raises
        ------------
            Exception:
                Whatever the parent formatter raises for a malformed record
        """
        record.elapsed = (datetime.now() - self.start_time).total_seconds()
        return super().format(record)


@contextmanager
def with_spinner(description: str) -> Generator[None, None, None]:
    """
    Show a spinner while a single long-running task (an eigensolve on a big matrix, writing outputs) is in progress.

    Args
    ------------
        description: str
            Description of the task to show in the log and spinner

    Raises
    ------------
        Exception:
            If the wrapped task fails, error is logged and raised
    """
    try:
        logger.info(f"⚙️ Starting task: {description}")
        with Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            console=console,
            transient=True,
        ) as progress:
            progress.add_task(description)
            yield
        logger.info(f"✅ Completed task: {description}")
    except Exception as e:
        logger.error(f"❌ Task failed: {description} - Error: {str(e)}")
        raise


@contextmanager
def with_progress(description: str, total: int) -> Generator[Callable[[], None], None, None]:
    """
    Show a progress bar over `total` replicas and hand back a callback advancing it by one.

    For example:
    ```python
    with with_progress("Spectral weights", total=reps) as advance:
        for r in range(reps):
            ...
            advance()
    ```

    Args
    ------------
        description: str
            Description of the replica loop
        total: int
            Number of steps expected

    Raises
    ------------
        Exception:
            If the replica loop fails, error is logged and raised
    """
    try:
        logger.info(f"⚙️ Starting task: {description} ({total} replicas)")
        with Progress(
            TextColumn("[progress.description]{task.description}"),
            BarColumn(),
            TaskProgressColumn(),
            TimeElapsedColumn(),
            console=console,
            transient=True,
        ) as progress:
            task = progress.add_task(description, total=total)
            yield lambda: progress.advance(task)
        logger.info(f"✅ Completed task: {description}")
    except Exception as e:
        logger.error(f"❌ Task failed: {description} - Error: {str(e)}")
        raise


## Console shared by the handler and the progress displays
# stderr keeps stdout free for anything piped out of the CLI
console: Console = Console(stderr=True)

## Create the package logger
logger: Logger = logging.getLogger("airy_minor")
logger.setLevel(os.environ.get("AIRY_LOG_LEVEL", "INFO").upper())
logger.propagate = False

## Where the log file is saved
log_path: str = os.environ.get("AIRY_LOG_PATH", "airy-minor.log")

# Record start time
start_time: datetime = datetime.now()

## Formatters
# File | timestamp - log level - elapsed time - message
file_formatter: Formatter = ElapsedFormatter(
    start_time,
    '%(asctime)s - %(levelname)s - %(elapsed).2fs - %(message)s'
)

# Console | elapsed time - message
console_formatter: Formatter = ElapsedFormatter(
    start_time,
    '%(elapsed)8.2fs - %(message)s'
)

## Handlers
rich_handler: RichHandler = RichHandler(
    level=0,
    console=console,
    show_time=False,
    rich_tracebacks=True,
    show_level=True,
    show_path=False
)
rich_handler.setFormatter(console_formatter)

if not logger.handlers:
    logger.addHandler(rich_handler)
    if log_path:
        file_handler: FileHandler = FileHandler(log_path, encoding="UTF-8")
        file_handler.setFormatter(file_formatter)
        logger.addHandler(file_handler)
