"""
Counter-based random substreams.

Every Monte Carlo path owns a Philox stream keyed by a SeedSequence hash
of (seed, path index), so a path's draws never depend on how paths are
grouped into blocks or workers. Uniforms are 52-bit midpoint values in the
open interval (0, 1) and become normals through the inverse upper tail.
"""

from typing import Iterable

import numpy as np

from . import normal_kernel as nk

_UNIT = 2.0 ** -52


def derive_seed(seed: int, *labels: int) -> int:
    """Mix a seed with integer labels into a new 64-bit seed."""
    state = np.random.SeedSequence(seed, spawn_key=tuple(int(label) for label in labels))
    return int(state.generate_state(1, dtype=np.uint64)[0])


def path_stream(seed: int, index: int) -> np.random.Philox:
    """Philox bit generator of one path."""
    key = np.random.SeedSequence(seed, spawn_key=(int(index),)).generate_state(2, dtype=np.uint64)
    return np.random.Philox(key=key)


def raw_to_uniform(raw: np.ndarray) -> np.ndarray:
    """Map raw 64-bit words to uniforms in (0, 1), never 0 or 1."""
    return ((raw >> np.uint64(12)).astype(np.float64) + 0.5) * _UNIT


def uniforms(seed: int, index: int, count: int) -> np.ndarray:
    """First ``count`` uniforms of path ``index``."""
    return raw_to_uniform(path_stream(seed, index).random_raw(count))


def normal_block(
    seed: int,
    indices: Iterable[int],
    count: int,
    antithetic: bool = False,
) -> np.ndarray:
    """
    Standard normal draws for a block of paths, one row per path index.

    With ``antithetic`` set, paths 2k and 2k+1 share the stream of pair k
    and the odd path takes the negated draws.
    """
    indices = list(indices)
    u = np.empty((len(indices), count), dtype=np.float64)
    for row, index in enumerate(indices):
        stream_index = index // 2 if antithetic else index
        u[row] = uniforms(seed, stream_index, count)
    z = nk.inv_ccdf(u)
    if antithetic:
        odd = np.array([index % 2 == 1 for index in indices])
        z[odd] = -z[odd]
    return z
