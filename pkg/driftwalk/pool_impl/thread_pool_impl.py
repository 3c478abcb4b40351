from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, List, Optional, Sequence

from .base_pool import BasePoolImpl, Block


class ThreadPoolImpl(BasePoolImpl):
    """Implementation using a thread pool; numpy kernels release the GIL."""

    def __init__(self, workers: int):
        super().__init__(workers)
        self._executor: Optional[ThreadPoolExecutor] = None

    def _ensure_executor(self) -> ThreadPoolExecutor:
        if self._executor is None:
            self._executor = ThreadPoolExecutor(max_workers=self.workers, thread_name_prefix="driftwalk")
        return self._executor

    def map_blocks(self, kernel: Callable[[Block], Any], blocks: Sequence[Block]) -> List[Any]:
        if len(blocks) <= 1:
            return [kernel(block) for block in blocks]
        # Executor.map yields in submission order.
        return list(self._ensure_executor().map(kernel, blocks))

    def close(self) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None
