"""Counter-based random streams for reproducible parallel Monte Carlo.

Every stream is a Philox generator keyed by (seed, sample_id, stream_id),
so the draw a given (sample, mode) receives is independent of scheduling
order, thread count, or how many other streams were consumed before it.
"""

import numpy as np

# Domain-separation constants for the second Philox key word.  Keeping the
# sample and stream ids in disjoint bit ranges avoids key collisions between
# e.g. (sample=1, mode=0) and (sample=0, mode=2**32).
_SAMPLE_SHIFT = np.uint64(32)
_MAX_ID = 2**32 - 1


def substream(seed, sample_id, stream_id=0):
    """Return a fresh ``numpy.random.Generator`` for one (sample, stream) pair.

    Parameters
    ----------
    seed : int
        64-bit study seed.
    sample_id : int
        Monte Carlo sample index, 0 <= sample_id < 2**32.
    stream_id : int
        Sub-stream index within the sample (e.g. a spectral mode number),
        0 <= stream_id < 2**32.
    """
    if not (0 <= sample_id <= _MAX_ID and 0 <= stream_id <= _MAX_ID):
        raise ValueError("sample_id and stream_id must fit in 32 bits")
    key = np.array(
        [
            np.uint64(seed % 2**64),
            (np.uint64(sample_id) << _SAMPLE_SHIFT) | np.uint64(stream_id),
        ],
        dtype=np.uint64,
    )
    return np.random.Generator(np.random.Philox(key=key))


def normal_matrix(seed, sample_ids, stream_id, n):
    """Draw ``n`` standard normals per sample, stacked as an (n, len(samples))
    matrix with one column per sample, each from its own substream."""
    cols = [substream(seed, s, stream_id).standard_normal(n) for s in sample_ids]
    return np.stack(cols, axis=1)
