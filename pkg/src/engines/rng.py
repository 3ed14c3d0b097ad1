"""Counter-based random streams (Philox) keyed by seed and block index"""
import numpy as np

_MASK64 = (1 << 64) - 1


def block_key(seed: int, block_index: int) -> int:
    """
    128-bit Philox key for one block of paths.

    The low word is the user seed and the high word the block index, so every
    block owns a disjoint counter space regardless of which worker runs it.
    """
    if seed < 0 or block_index < 0:
        raise ValueError("seed and block_index must be non-negative")
    return ((block_index & _MASK64) << 64) | (seed & _MASK64)


def block_generator(seed: int, block_index: int) -> np.random.Generator:
    """Generator for the paths of block `block_index`"""
    return np.random.Generator(np.random.Philox(key=block_key(seed, block_index)))


def make_generator(seed: int) -> np.random.Generator:
    """Single-stream generator (block 0) for standalone sampling"""
    return block_generator(seed, 0)
