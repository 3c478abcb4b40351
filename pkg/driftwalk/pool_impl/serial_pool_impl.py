from typing import Any, Callable, List, Sequence

from .base_pool import BasePoolImpl, Block


class SerialPoolImpl(BasePoolImpl):
    """Implementation running every block in the calling thread."""

    def __init__(self, workers: int = 1):
        super().__init__(1)

    def map_blocks(self, kernel: Callable[[Block], Any], blocks: Sequence[Block]) -> List[Any]:
        return [kernel(block) for block in blocks]
