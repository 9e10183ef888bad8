"""Unaligned heads, sub-block tails, and the short-array path.

The main loop wants aligned full vectors.  The head is handled with an
aligned load whose leading bytes are cleared; anything after the last
full block (and any array too short for the main path at all) is counted
through a vector of 64 byte-sized tail counters, 64 input bits per group,
flushed into the 16-bit counter vectors before the byte counters can
wrap.  Partial blocks are copied into zero-padded scratch rather than
read past their end, so nothing outside the input buffer ever affects
the result.
"""

from dataclasses import dataclass

import numpy as np

from .accumulate import flush_fw
from .core import W_MAX

GROUP_BYTES = W_MAX // 8
_CHUNK_GROUPS = 255  # byte counters hold at most 255 before a flush
_SMALL_TAIL = 24  # below this, plain ints beat the numpy fixed cost


@dataclass(frozen=True)
class HeadResult:
    v0: int
    consumed_bytes: int
    mask_applied: bool


def head_load(view, r):
    """Load the first vector from the aligned address below the view start.

    Bytes that precede the view are cleared, so the result is bit-identical
    to loading a zero-padded aligned copy.  Only valid on the main path
    (at least 15 vectors of input), which guarantees the aligned block
    lies inside the underlying buffer.
    """
    rb = r >> 3
    a = view.offset % rb
    start = view.offset - a
    v0 = int.from_bytes(memoryview(view.base)[start:start + rb], "little")
    if a:
        v0 &= ((1 << r) - 1) ^ ((1 << (8 * a)) - 1)
    return HeadResult(v0, rb - a, bool(a))


def _add_counts(c, vals):
    if isinstance(c, np.ndarray):
        c += np.asarray(vals, dtype=c.dtype)
    else:
        for i in range(W_MAX):
            v = int(vals[i])
            if v:
                c[i] += v


def count_tail(c, tail):
    """Count a tail of fewer than 16 vectors into the counter vectors.

    Works 64 bits at a time via byte-sized tail counters; the final
    partial group is zero padded.  Exact for any length, since the byte
    counters are flushed into c every 255 groups.
    """
    tail = memoryview(tail)
    n = len(tail)
    if n == 0:
        return c
    if n < _SMALL_TAIL:
        t = [0] * W_MAX
        for g in range(0, n, GROUP_BYTES):
            word = int.from_bytes(tail[g:g + GROUP_BYTES], "little")
            while word:
                low = word & -word
                t[low.bit_length() - 1] += 1
                word ^= low
        _add_counts(c, t)
        return c
    bits = np.unpackbits(np.frombuffer(tail, dtype=np.uint8), bitorder="little")
    chunk_bits = _CHUNK_GROUPS * W_MAX
    full = bits.size // chunk_bits * chunk_bits
    if full:
        # one byte-counter vector per 255-group chunk, summed afterwards
        t = bits[:full].reshape(-1, _CHUNK_GROUPS, W_MAX).sum(axis=1, dtype=np.uint8)
        _add_counts(c, t.sum(axis=0, dtype=np.uint32))
    rest = bits[full:]
    if rest.size:
        pad = (-rest.size) % W_MAX
        if pad:
            rest = np.concatenate([rest, np.zeros(pad, dtype=np.uint8)])
        _add_counts(c, rest.reshape(-1, W_MAX).sum(axis=0, dtype=np.uint8))
    return c


def count_short(counters, view, w):
    """Exact counts for arrays shorter than the 15-vector main threshold."""
    view.check_complete(w)
    c = [0] * W_MAX
    count_tail(c, view.mv())
    flush_fw(counters, c, w)
    return counters
