"""Shared domain types and the naive scalar reference counter.

A positional population count takes an array of w-bit words and counts,
for each bit position j in 0..w-1, how many words have bit j set.  Words
are assembled from bytes in little-endian order; bit position 0 is the
least significant bit of a word.

The scalar reference here is deliberately naive (one loop iteration per
bit).  It is the correctness oracle for every other code path in this
package and doubles as the "baseline" row of the benchmark harness.
"""

from dataclasses import dataclass

WORD_WIDTHS = (8, 16, 32, 64)
W_MAX = 64


class InputLengthError(ValueError):
    """Input byte length is not a multiple of the word size."""


class UnknownKernelError(ValueError):
    """No kernel with the requested name exists."""


class KernelUnavailableError(RuntimeError):
    """The named kernel exists but cannot run on this host."""


def check_width(w):
    if w not in WORD_WIDTHS:
        raise ValueError(f"word width must be one of {WORD_WIDTHS}, got {w!r}")
    return w


@dataclass(frozen=True)
class InputView:
    """A byte range inside a larger buffer.

    ``offset`` is the position of the first input byte within ``base``.
    Alignment is defined relative to the start of ``base``: a view is
    k-byte aligned when ``offset % k == 0``.  Kernels may read bytes of
    ``base`` outside the view (masked off), but never outside ``base``.
    """

    base: object  # bytes-like
    offset: int
    nbytes: int

    def __post_init__(self):
        if self.offset < 0 or self.nbytes < 0:
            raise ValueError("negative offset or length")
        if self.offset + self.nbytes > len(self.base):
            raise ValueError("view extends past the end of its buffer")

    @classmethod
    def of(cls, data):
        """Wrap bytes-like data (or pass an existing view through)."""
        if isinstance(data, cls):
            return data
        return cls(data, 0, len(data))

    def mv(self):
        """Memoryview of exactly the viewed bytes."""
        return memoryview(self.base)[self.offset:self.offset + self.nbytes]

    def check_complete(self, w):
        """Raise InputLengthError unless the length is word-complete for w."""
        if self.nbytes % (w // 8):
            raise InputLengthError(
                f"{self.nbytes} bytes is not a multiple of the {w // 8}-byte word size"
            )
        return self


def new_counters(w):
    """Fresh all-zero counter array, one 64-bit counter per bit position."""
    return [0] * check_width(w)


def scalar_pospopcnt(data, w, counters=None):
    """Count set bits per position the slow, obvious way.

    Accumulates into ``counters`` (a list of w ints) and returns it;
    counters are never cleared, so repeated calls stream.
    """
    check_width(w)
    view = InputView.of(data).check_complete(w)
    if counters is None:
        counters = new_counters(w)
    code = {8: "B", 16: "H", 32: "I", 64: "Q"}[w]
    for word in view.mv().cast(code):
        for j in range(w):
            counters[j] += (word >> j) & 1
    return counters


def total_popcount_of(counters):
    """Sum of all positional counters (conservation check helper)."""
    return sum(counters)
