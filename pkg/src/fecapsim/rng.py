"""Counter-based random streams for schedule-invariant simulation.

Streams are Philox generators keyed by (seed, label path), so any row, head,
or task can draw its own noise independently of execution order.  Sample
blocks addressed by absolute counter offset make partitioned runs
byte-identical to single-task runs.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


def _path_hash(path: tuple) -> int:
    """FNV-1a over the utf-8 repr of a label path; stable across runs."""
    h = _FNV_OFFSET
    for part in path:
        for byte in repr(part).encode("utf-8"):
            h = ((h ^ byte) * _FNV_PRIME) & _MASK64
        h = ((h ^ 0x2F) * _FNV_PRIME) & _MASK64
    return h


def stream(seed: int, *path) -> np.random.Generator:
    """Independent generator for this (seed, path) pair."""
    key = ((seed & _MASK64) << 64) | _path_hash(path)
    return np.random.Generator(np.random.Philox(key=key))


def normal_block(seed: int, offset: int, count: int, *path) -> np.ndarray:
    """Standard-normal draws at absolute positions [offset, offset+count).

    Uses inverse-CDF sampling so each draw consumes exactly one counter
    position; concatenating blocks reproduces a single contiguous run.
    """
    key = ((seed & _MASK64) << 64) | _path_hash(path)
    bitgen = np.random.Philox(key=key)
    # advance() steps the 128-bit counter in blocks of four 64-bit outputs,
    # so land on the enclosing block and discard the in-block remainder
    blocks, rem = divmod(offset, 4)
    bitgen.advance(blocks)
    uniforms = np.random.Generator(bitgen).random(rem + count)[rem:]
    # random() can return exactly 0.0; keep ndtri finite
    return ndtri(np.maximum(uniforms, 1e-300))
