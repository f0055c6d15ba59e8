"""Deterministic counter-based random streams.

Every random decision in this package is a pure function of a 64-bit seed
and a fixed-arity integer key (kind, round, attempt, edge, colour, vertex).
Draws therefore do not depend on iteration order, worker count, or any
hidden generator state, which is what makes runs reproducible and safely
parallelisable.

The construction is a keyed splitmix-style hash: the seed and key words are
absorbed one at a time through a 64-bit finaliser, and the top 53 bits of
the result become a uniform in [0, 1).
"""

from __future__ import annotations

import numpy as np

_MASK = np.uint64(0xFFFFFFFFFFFFFFFF)
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MUL1 = np.uint64(0xBF58476D1CE4E5B9)
_MUL2 = np.uint64(0x94D049BB133111EB)
_INV53 = float(2.0**-53)

# Trial kinds.  Each consumer of randomness owns one constant so streams
# for different purposes never collide.
KIND_ACTIVATION = 1
KIND_FLIP = 2
KIND_SAMPLE = 3
KIND_RESAMPLE = 4
KIND_GENERATE = 5
KIND_LISTS = 6
KIND_RETRY = 7
KIND_TRIAL = 8


def _mix(x: np.ndarray) -> np.ndarray:
    x = x ^ (x >> np.uint64(30))
    x = x * _MUL1
    x = x ^ (x >> np.uint64(27))
    x = x * _MUL2
    return x ^ (x >> np.uint64(31))


def _as_u64(value) -> np.ndarray:
    arr = np.asarray(value)
    if arr.dtype.kind == "f":
        raise TypeError("stream keys must be integers")
    return arr.astype(np.int64).view(np.uint64) if arr.dtype.kind == "i" else arr.astype(np.uint64)


def hash_words(seed: int, *words) -> np.ndarray:
    """Absorb `words` (ints or integer arrays, broadcast together) into a
    64-bit state derived from `seed`; returns uint64 hashes."""
    with np.errstate(over="ignore"):
        state = _mix(_as_u64(seed) + _GAMMA)
        for w in words:
            state = _mix((state + _GAMMA) ^ (_as_u64(w) * _MUL1))
    return np.broadcast_arrays(state)[0] if np.ndim(state) else state


def uniforms(seed: int, kind: int, *words) -> np.ndarray:
    """Uniform [0,1) floats keyed by (kind, *words); shape follows broadcasting."""
    h = hash_words(seed, kind, *words)
    return np.asarray((h >> np.uint64(11)).astype(np.float64) * _INV53)


def uniform(seed: int, kind: int, *words) -> float:
    return float(uniforms(seed, kind, *words))


def derive_seed(seed: int, kind: int, *words) -> int:
    """A further 63-bit seed, for handing to third-party generators."""
    return int(np.atleast_1d(hash_words(seed, kind, *words))[0] >> np.uint64(1))


def permutation(seed: int, kind: int, n: int, *words) -> np.ndarray:
    """Deterministic permutation of range(n) keyed by (kind, *words)."""
    return np.argsort(uniforms(seed, kind, *words, np.arange(n)), kind="stable")


def subset(seed: int, kind: int, n: int, size: int, *words) -> np.ndarray:
    """Uniform random `size`-subset of range(n), returned sorted."""
    if size > n:
        raise ValueError(f"cannot draw {size} items from {n}")
    return np.sort(permutation(seed, kind, n, *words)[:size])
