from typing import Any, Callable, List, Sequence, Tuple

Block = Tuple[int, int]


# Base pool implementation
class BasePoolImpl:
    """Base implementation for mapping a block kernel over Monte Carlo blocks."""

    def __init__(self, workers: int = 1):
        self.workers = workers

    def map_blocks(self, kernel: Callable[[Block], Any], blocks: Sequence[Block]) -> List[Any]:
        """Apply kernel to every block and return the results in block order."""
        raise NotImplementedError("Subclasses must implement map_blocks")

    def close(self) -> None:
        """Release any worker resources."""
        pass

    def __enter__(self) -> 'BasePoolImpl':
        return self

    def __exit__(self, exc_type: Any, exc_val: Any, exc_tb: Any) -> None:
        self.close()
