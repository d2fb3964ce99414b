"""Counter-based random streams for reproducible Monte Carlo.

Uniforms come from the Philox-4x64 generator keyed by the user seed.  Trial
``t`` owns a fixed window of counter blocks, so the numbers it sees depend
only on ``(seed, t)``: any split of the trial range into chunks, in any
order, on any number of workers, reproduces the same draws.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np
from numpy.random import Philox

WORDS_PER_BLOCK = 4
CHUNK_TRIALS = 8192


def _to_unit(raw: np.ndarray) -> np.ndarray:
    # top 53 bits -> (0, 1); the half-ulp offset keeps 0 out of the range
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def substream_uniforms(seed: int, start: int, count: int, width: int) -> np.ndarray:
    """Uniforms on (0, 1) for trials ``start .. start+count-1``.

    Returns an array of shape (count, width); row ``i`` is the substream of
    trial ``start + i``.
    """
    if width < 1 or count < 0 or start < 0:
        raise ValueError("width must be >= 1, start and count nonnegative")
    blocks = -(-width // WORDS_PER_BLOCK)
    gen = Philox(key=int(seed) & (2**64 - 1), counter=start * blocks)
    raw = gen.random_raw(count * blocks * WORDS_PER_BLOCK)
    raw = raw.reshape(count, blocks * WORDS_PER_BLOCK)[:, :width]
    return _to_unit(raw)


def map_trials(fn, seed: int, trials: int, width: int, workers: int = 1,
               chunk: int = CHUNK_TRIALS) -> np.ndarray:
    """Apply ``fn`` to per-trial uniform rows and concatenate in trial order.

    ``fn`` maps a (count, width) block of uniforms to a length-``count``
    (or (count, k)) array.  Chunk boundaries do not depend on ``workers``.
    """
    starts = list(range(0, trials, chunk))

    def run(start):
        n = min(chunk, trials - start)
        return fn(substream_uniforms(seed, start, n, width))

    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, starts))
    else:
        parts = [run(s) for s in starts]
    return np.concatenate(parts) if parts else np.empty(0)
