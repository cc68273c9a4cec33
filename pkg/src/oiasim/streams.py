"""Deterministic RNG substreams for Monte Carlo runs.

Every random draw in the simulator comes from a stream addressed by
``(master seed, path)``, where the path is a short tuple of small
non-negative integers such as ``(trial, purpose, grid_index)``.  Streams
with distinct paths are statistically independent, and a stream's output
never depends on what was drawn from any other stream, so serial and
worker-pool runs produce bit-identical results.
"""

from __future__ import annotations

import numpy as np

# Purpose tags used as path components.  Values are part of the
# reproducibility contract: changing them changes every result.
CHANNEL = 0
BASES = 1
CODEBOOK = 2
NOISE = 3
PROBE = 4


def substream(seed: int, *path: int) -> np.random.Generator:
    """Return the generator addressed by ``(seed, *path)``.

    Philox is counter-based, so each spawn key yields an independent
    stream regardless of how much is drawn from the others.
    """
    if seed < 0 or seed > 0xFFFFFFFFFFFFFFFF:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    key = tuple(int(p) for p in path)
    if any(p < 0 for p in key):
        raise ValueError(f"stream path components must be non-negative, got {key}")
    ss = np.random.SeedSequence(entropy=seed, spawn_key=key)
    return np.random.Generator(np.random.Philox(ss))
