"""Shared extension singletons."""
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Iterable, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class WorkerPool:
    """Bounded worker pool shared by every service that fans out work.

    With one worker everything runs in-process, which is the determinism
    reference. ``map`` always returns results in submission order.
    """

    def __init__(self) -> None:
        self.workers = 1
        self._executor: ProcessPoolExecutor | None = None

    def init_app(self, app: Any) -> None:
        """Size the pool from the application configuration.

        Args:
            app: The application handle; its config supplies ``WORKERS``.
        """
        self.shutdown()
        self.workers = max(1, int(app.config.WORKERS))
        logger.debug("Worker pool sized to %d", self.workers)

    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
        """Apply ``fn`` to every item and return the results in order.

        Args:
            fn: A picklable module-level callable.
            items: Work items.

        Returns:
            Results in the order of ``items``.
        """
        items = list(items)
        if self.workers == 1 or len(items) <= 1:
            return [fn(item) for item in items]
        if self._executor is None:
            self._executor = ProcessPoolExecutor(max_workers=self.workers)
        return list(self._executor.map(fn, items))

    def shutdown(self) -> None:
        """Release worker processes, if any were started."""
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None


pool = WorkerPool()
