"""Counter-seeded PRNG usable inside numba kernels.

Each independent stream (one walk, one training worker) gets its own
64-bit state derived from ``(seed, stream_id)``, so results do not depend
on how work is split across threads.
"""

import numpy as np
from numba import njit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_MUL = np.uint64(0x2545F4914F6CDD1D)


@njit(cache=True)
def splitmix64(x):
    z = x + _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def stream_state(seed, stream):
    s = splitmix64(splitmix64(np.uint64(seed)) ^ np.uint64(stream))
    if s == np.uint64(0):
        s = _GOLDEN
    return s


@njit(cache=True)
def next_u64(state):
    # xorshift64*, state is a length-1 uint64 array
    x = state[0]
    x ^= x >> np.uint64(12)
    x ^= x << np.uint64(25)
    x ^= x >> np.uint64(27)
    state[0] = x
    return x * _MUL


@njit(cache=True)
def next_float(state):
    """Uniform double in [0, 1)."""
    return (next_u64(state) >> np.uint64(11)) * (1.0 / 9007199254740992.0)


@njit(cache=True)
def next_below(state, n):
    i = np.int64(next_float(state) * n)
    return i if i < n else n - 1


def new_state(seed: int, stream: int = 0) -> np.ndarray:
    return np.array([stream_state(np.uint64(seed), np.uint64(stream))], dtype=np.uint64)


def seed_from(rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2**63))
