"""Reduction of skimmed bit vectors into 16-bit counter vectors.

The counter vectors ``c`` are kept logically as 64 16-bit counters, one
per bit position modulo 64.  Skimmed a16 vectors (one bit per position,
worth 16 counts each) and the leftover 4-bit accumulators are reduced
into ``c`` with an even/odd split-and-fold scheme: fields repeatedly
split into even and odd positions (doubling the field width) and fold
over themselves (halving the field count) until one field per bit
position remains.  This costs O(log r) vector steps instead of a loop
over positions.

Overflow of ``c`` is prevented by tracking an upper bound h on its
entries and flushing into the 64-bit output counters while enough
headroom for one more main-loop block, the final accumulation, and a
maximal tail remains.

Two backends share the scheme: plain ints treated as r-bit vectors, and
numpy uint64 row stacks (used by the array kernel and for batched
reduction of queued a16 vectors).
"""

from functools import lru_cache

import numpy as np

from .core import W_MAX

COUNTER_MAX = 0xFFFF


@lru_cache(maxsize=None)
def _even_mask(s, width):
    # low s bits of every 2s-bit field, e.g. 0x5555.. / 0x3333.. / 0x0f0f..
    return ((1 << width) - 1) // ((1 << 2 * s) - 1) * ((1 << s) - 1)


def _fold_planes(planes, s, step, width, maxv, w_max):
    """Split-and-fold a group of labelled plane vectors down to w_max fields.

    ``planes`` is a list of (vector, base) pairs: field e of a plane holds a
    partial count for bit positions congruent to base + step*e (mod w_max).
    Fields are s bits wide; every plane spans ``width`` bits and holds at
    most ``maxv`` per field.  Yields (position, count) for the w_max fields
    that remain.
    """
    while (width // s) * step > w_max:
        if 2 * maxv >= (1 << s):
            # widen fields before the next fold would overflow them
            assert s < 16, "field capacity exhausted"
            m = _even_mask(s, width)
            planes = [
                p
                for v, b in planes
                for p in ((v & m, b), ((v >> s) & m, b + step))
            ]
            s *= 2
            step *= 2
        else:
            half = width >> 1
            hm = (1 << half) - 1
            planes = [((v & hm) + (v >> half), b) for v, b in planes]
            width = half
            maxv *= 2
    fm = (1 << s) - 1
    for v, base in planes:
        for e in range(width // s):
            yield base + step * e, (v >> (e * s)) & fm


def accumulate_a16(c, a16, r, w_max=W_MAX):
    """c[i] += 16 * (number of set bits of a16 at positions i mod w_max)."""
    for i, v in _fold_planes([(a16, 0)], 1, 1, r, 1, w_max):
        if v:
            c[i] += v << 4
    return c


def transpose_nibbles(acc, r):
    """Turn (a8, a4, a2, a1) into four vectors of nibble-sized counts.

    Recursive 4x4 bit-matrix transposition in two exchange steps.  Output
    vector k holds value(acc[p]) for positions p with p % 4 == k, packed
    as r/4 nibbles in position order.
    """
    m5 = _even_mask(1, r)  # 0x5555..
    m3 = _even_mask(2, r)  # 0x3333..
    ma = m5 << 1
    mc = m3 << 2
    a8, a4, a2, a1 = acc
    l12 = (a1 & m5) | ((a2 << 1) & ma)  # weights 1,2 interleaved, even positions
    h12 = (a2 & ma) | ((a1 >> 1) & m5)  # same for odd positions
    l48 = (a4 & m5) | ((a8 << 1) & ma)
    h48 = (a8 & ma) | ((a4 >> 1) & m5)
    a_a = (l12 & m3) | ((l48 << 2) & mc)
    a_b = (h12 & m3) | ((h48 << 2) & mc)
    a_c = (l48 & mc) | ((l12 >> 2) & m3)
    a_d = (h48 & mc) | ((h12 >> 2) & m3)
    return a_a, a_b, a_c, a_d


def final_accumulate(c, acc, r, w_max=W_MAX):
    """c[i] += sum of value(acc[p]) over positions p = i mod w_max."""
    planes = list(zip(transpose_nibbles(acc, r), (0, 1, 2, 3)))
    for i, v in _fold_planes(planes, 4, 4, r, 15, w_max):
        if v:
            c[i] += v
    return c


def flush_threshold(r, w_max=W_MAX):
    """Largest safe h: headroom for one block or final pass plus tail."""
    return COUNTER_MAX - 30 * (r // w_max)


def flush_fw(counters, c, w, rot=0):
    """Fold the 64 counter vectors into w output counters by position mod w.

    c is left untouched; resetting it is the overflow check's job.  When
    the input view does not start on a 64-bit boundary, the aligned loads
    of the main path leave c rotated by the in-word bit offset of the
    view start; ``rot`` names that offset so stream position j reads
    c[(j + rot) % 64].
    """
    n = len(c)
    for j in range(w):
        total = 0
        for i in range(j, n, w):
            total += int(c[(i + rot) % n])
        counters[j] += total
    return counters


def check_and_flush(h, c, counters, w, r, w_max=W_MAX, rot=0):
    """Flush c into the output counters if h is past the safe threshold.

    Returns the new h bound (0 after a flush).  Call with h already raised
    by 16*r/w_max for the block just processed.
    """
    if h <= flush_threshold(r, w_max):
        return h
    flush_fw(counters, c, w, rot)
    for i in range(len(c)):
        c[i] = 0
    return 0


# numpy backend: vectors are stacks of uint64 rows, one row per 64 positions.

_NP_EVEN = {s: np.uint64(_even_mask(s, 64)) for s in (1, 2, 4, 8)}
_NP_SHIFT = {s: np.uint64(s) for s in (1, 2, 4, 8)}


def _np_fold_rows(arr):
    m = arr.shape[1]
    h = (m + 1) >> 1
    top = arr[:, h:]
    folded = arr[:, :h].copy()
    folded[:, : top.shape[1]] += top
    return folded


def _np_reduce(arr, bases, s, maxv):
    """Row-stack counterpart of _fold_planes; returns int64 counts per position.

    ``arr`` stacks the planes: shape (planes, rows), field e of every word
    of plane p belonging to position bases[p] + s*e.  Rows span 64
    positions each, so folding them pairwise never mixes positions; the
    even/odd splits only widen fields for headroom and double as the
    final zero extension to 16-bit fields.
    """
    while s < 16:
        while arr.shape[1] > 1 and 2 * maxv < (1 << s):
            arr = _np_fold_rows(arr)
            maxv *= 2
        m = _NP_EVEN[s]
        sh = _NP_SHIFT[s]
        arr = np.concatenate([arr & m, (arr >> sh) & m])
        bases = bases + [b + s for b in bases]
        s *= 2
    while arr.shape[1] > 1:
        arr = _np_fold_rows(arr)
        maxv *= 2
    assert maxv <= COUNTER_MAX, "too many rows for one reduction pass"
    fields = arr.view(np.uint16).reshape(16, 4)
    out = np.zeros(W_MAX, dtype=np.int64)
    idx = np.array([[b + 16 * e for e in range(4)] for b in bases])
    out[idx] = fields
    return out


def positional_bit_counts(words):
    """Set bits per position mod 64 across an array of 64-bit words."""
    words = np.asarray(words, dtype=np.uint64)
    if words.shape[0] == 0:
        return np.zeros(W_MAX, dtype=np.int64)
    return _np_reduce(words.reshape(1, -1), [0], 1, 1)


def accumulate_a16_rows(c, a16_rows):
    """Array-kernel form of accumulate_a16: a16 given as uint64 rows."""
    counts = positional_bit_counts(a16_rows)
    c += (counts << 4).astype(np.uint16)
    return c


def final_accumulate_rows(c, acc):
    """Array-kernel form of final_accumulate over uint64-row accumulators."""
    planes = np.stack(transpose_nibbles_rows(acc))
    counts = _np_reduce(planes, [0, 1, 2, 3], 4, 15)
    c += counts.astype(np.uint16)
    return c


def transpose_nibbles_rows(acc):
    """transpose_nibbles for uint64-row vectors (all exchanges are word-local)."""
    m5 = _NP_EVEN[1]
    m3 = _NP_EVEN[2]
    ma = np.uint64(int(m5) << 1)
    mc = np.uint64(int(m3) << 2)
    one = np.uint64(1)
    two = np.uint64(2)
    a8, a4, a2, a1 = acc
    l12 = (a1 & m5) | ((a2 << one) & ma)
    h12 = (a2 & ma) | ((a1 >> one) & m5)
    l48 = (a4 & m5) | ((a8 << one) & ma)
    h48 = (a8 & ma) | ((a4 >> one) & m5)
    a_a = (l12 & m3) | ((l48 << two) & mc)
    a_b = (h12 & m3) | ((h48 << two) & mc)
    a_c = (l48 & mc) | ((l12 >> two) & m3)
    a_d = (h48 & mc) | ((h12 >> two) & m3)
    return a_a, a_b, a_c, a_d
