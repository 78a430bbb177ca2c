"""Counter-based uniform random numbers (SplitMix64).

Draw ``i`` of a stream with key ``K`` is a pure function of ``(K, i)``::

    z = K + (i + 1) * 0x9E3779B97F4A7C15          (mod 2**64)
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z =  z ^ (z >> 31)
    u = (z >> 11) * 2**-53                        in [0, 1)

so any shard or chunk layout reproduces the same numbers.  Stream keys are
``mix64(mix64(seed) ^ stream_id)`` with ``mix64`` the three finalizer steps.
"""

from __future__ import annotations

import numpy as np

__all__ = ["GOLDEN", "mix64", "stream_key", "uniforms"]

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK = (1 << 64) - 1


def mix64(z):
    """SplitMix64 finalizer on uint64 scalars or arrays."""
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def stream_key(seed: int, stream: int) -> np.uint64:
    """Key of an independent stream derived from a 64-bit seed."""
    base = mix64(np.uint64(seed & _MASK))
    return np.uint64(mix64(base ^ np.uint64(stream & _MASK)))


def uniforms(key, start: int, count: int) -> np.ndarray:
    """Draws ``start .. start+count-1`` of the stream ``key`` as floats in [0, 1)."""
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(key) + idx * GOLDEN
    z = mix64(z)
    return (z >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)
