"""Counter-based pseudo-random generator embedded in the repo.

All randomness in the package flows through the SplitMix64 mixing function
so that every run is a pure function of user-supplied integer seeds.  The
generator is counter-based: draw ``i`` of a stream is ``mix64(state0 +
(i+1)*GAMMA)``, so draws can be produced out of order or in vectorized
batches without changing their values.  Determinism within this
implementation is contractual; re-implementations of the same scheme
reproduce the exact bit streams as well.
"""

from __future__ import annotations

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_SEED_SALT = np.uint64(0x5DEECE66D1A4F8C7)
_TO_UNIT = 1.0 / 9007199254740992.0  # 2**-53


def mix64(x):
    """SplitMix64 finalizer applied to ``x + GAMMA`` (elementwise on arrays)."""
    with np.errstate(over="ignore"):
        z = np.asarray(x, dtype=np.uint64) + _GAMMA
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
        return z ^ (z >> np.uint64(31))


def stream_state(seed, *keys):
    """Derive the base state of a named stream from a seed and integer keys.

    Distinct key tuples give statistically independent streams, which lets
    one seed drive per-node, per-attempt, or per-replica substreams without
    any draw-order coupling between them.
    """
    state = mix64(np.uint64(int(seed) % (1 << 64)) ^ _SEED_SALT)
    for key in keys:
        state = mix64(state ^ np.uint64(int(key) % (1 << 64)))
    return np.uint64(state)


def uniform_at(state0, index):
    """Uniform draw(s) at counter position(s) ``index``; broadcasts over both args."""
    with np.errstate(over="ignore"):
        counter = (np.asarray(index, dtype=np.uint64) + np.uint64(1)) * _GAMMA
        bits = mix64(np.asarray(state0, dtype=np.uint64) + counter)
    return (bits >> np.uint64(11)).astype(np.float64) * _TO_UNIT


class Stream:
    """A counter-based uniform stream; draw values are independent of call order."""

    def __init__(self, seed, *keys):
        self._state0 = stream_state(seed, *keys)
        self._counter = 0

    def uniforms(self, count):
        """Next ``count`` uniforms in [0, 1) as a float64 array."""
        idx = np.arange(self._counter, self._counter + count, dtype=np.uint64)
        self._counter += int(count)
        return uniform_at(self._state0, idx)

    def uniform(self):
        return float(self.uniforms(1)[0])
