"""Positional population counts for arrays of 8/16/32/64-bit words.

>>> import pospopcnt
>>> pospopcnt.pospopcnt(b"\\x01\\x80", 16)[0], pospopcnt.pospopcnt(b"\\x01\\x80", 16)[15]
(1, 1)
"""

from .core import (
    InputLengthError,
    InputView,
    KernelUnavailableError,
    UnknownKernelError,
    WORD_WIDTHS,
    new_counters,
    scalar_pospopcnt,
    total_popcount_of,
)
from .kernels import KERNEL_ENV, get_kernel, list_kernels, pospopcnt, select_kernel

__version__ = "0.1.0"

__all__ = [
    "InputLengthError",
    "InputView",
    "KERNEL_ENV",
    "KernelUnavailableError",
    "UnknownKernelError",
    "WORD_WIDTHS",
    "get_kernel",
    "list_kernels",
    "new_counters",
    "pospopcnt",
    "scalar_pospopcnt",
    "select_kernel",
    "total_popcount_of",
    "__version__",
]
