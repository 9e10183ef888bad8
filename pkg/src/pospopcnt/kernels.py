"""Counting kernels and runtime dispatch.

Every kernel runs the same pipeline at its own vector width r: arrays
shorter than 15 vectors take the short path; otherwise a masked aligned
head load and a 15-input CSA network seed the accumulators, then each
16-vector block goes through a 16+4 CSA network whose skimmed top bit
vector is reduced into the 16-bit counter vectors (flushing to the
output counters before they could wrap), and the leftover accumulators
plus sub-block tail are reduced at the end.

Kernels:

  portable   r=64, machine words as bit vectors; always available
  int256     r=256, big ints as bit vectors
  numba      r=512, compiled lane loops (needs numba)
  numpy      r=65536, uint64 arrays as bit vectors

``run(view, w, counters, fa=None, probe=None)`` accepts a replacement
full adder and a per-block probe for instrumented runs; both force the
pure per-block pipeline (no batching of queued a16 vectors).
"""

import os
from dataclasses import dataclass

import numpy as np

from .accumulate import (
    accumulate_a16,
    accumulate_a16_rows,
    check_and_flush,
    final_accumulate,
    final_accumulate_rows,
    flush_fw,
    flush_threshold,
)
from .core import (
    InputView,
    KernelUnavailableError,
    UnknownKernelError,
    W_MAX,
    check_width,
    new_counters,
)
from .csa import csa15, csa16_4, full_adder
from .edges import count_short, count_tail, head_load

KERNEL_ENV = "POSPOPCNT_KERNEL"
_DRAIN_LIMIT = 255  # queued a16 vectors per batched reduction


@dataclass(frozen=True)
class KernelDescriptor:
    """Identity and geometry of a kernel (block = 16 vectors = 2r bytes)."""

    name: str
    r: int
    block_bytes: int

    def __post_init__(self):
        assert self.r >= W_MAX and self.r & (self.r - 1) == 0
        # headroom proof: one block + final pass + maximal tail must fit
        assert 46 * (self.r // W_MAX) <= 0xFFFF


@dataclass
class PipelineState:
    """Snapshot handed to a probe after each main-loop block."""

    consumed_bytes: int
    acc: object
    c: object
    h: int
    counters: object


class _KernelBase:
    def __init__(self, name, r):
        self.name = name
        self.r = r
        self.descriptor = KernelDescriptor(name, r, 2 * r)

    def available(self):
        return True

    def __repr__(self):
        return f"<kernel {self.name} r={self.r}>"


class IntKernel(_KernelBase):
    """The generic pipeline over plain ints as r-bit vectors."""

    def run(self, view, w, counters, fa=None, probe=None):
        r = self.r
        rb = r >> 3
        n = view.check_complete(w).nbytes
        if n < 15 * rb:
            return count_short(counters, view, w)
        stepwise = fa is not None or probe is not None
        fa_ = fa or full_adder
        base_mv = memoryview(view.base)
        head = head_load(view, r)
        astart = view.offset - view.offset % rb
        from_bytes = int.from_bytes
        if r == 64:
            nblocks = (n - head.consumed_bytes - 14 * rb) // (16 * rb)
            qwords = base_mv[astart:astart + (15 + 16 * nblocks) * rb].cast("Q")
            vs = [head.v0] + qwords[1:15].tolist()
        else:
            qwords = None
            p = astart + rb
            vs = [head.v0] + [
                from_bytes(base_mv[p + i * rb:p + (i + 1) * rb], "little")
                for i in range(14)
            ]
        acc = csa15(vs, fa_)
        pos = head.consumed_bytes + 14 * rb  # real input bytes consumed
        block = 16 * rb
        c = [0] * W_MAX
        h = 0
        hinc = 16 * r // W_MAX
        limit = flush_threshold(r)
        rot = 8 * (view.offset % 8)  # aligned loads shift stream bits in c
        pending = []
        abs_pos = astart + 15 * rb
        qi = 15
        while n - pos >= block:
            if r == 64:
                vs16 = qwords[qi:qi + 16].tolist()
                qi += 16
            else:
                vs16 = [
                    from_bytes(base_mv[abs_pos + i * rb:abs_pos + (i + 1) * rb], "little")
                    for i in range(16)
                ]
            a16, acc = csa16_4(acc, vs16, fa_)
            h += hinc
            if stepwise:
                accumulate_a16(c, a16, r)
                h = check_and_flush(h, c, counters, w, r, rot=rot)
            elif h > limit:
                pending.append(a16)
                _drain(pending, c, rb)
                flush_fw(counters, c, w, rot)
                for i in range(W_MAX):
                    c[i] = 0
                h = 0
            else:
                pending.append(a16)
                if len(pending) >= _DRAIN_LIMIT:
                    _drain(pending, c, rb)
            pos += block
            abs_pos += block
            if probe is not None:
                probe(PipelineState(pos, acc, c, h, counters))
        if pending:
            _drain(pending, c, rb)
        final_accumulate(c, acc, r)
        count_tail(c, base_mv[view.offset + pos:view.offset + n])
        flush_fw(counters, c, w, rot)
        return counters


def _drain(pending, c, rb):
    # queued a16 vectors concatenate into one wide a16 over the same
    # positions; zero-pad to a power-of-two width and fold once
    rbits = 8 * rb * len(pending)
    width = max(W_MAX, 1 << (rbits - 1).bit_length())
    joined = int.from_bytes(b"".join(v.to_bytes(rb, "little") for v in pending),
                            "little")
    accumulate_a16(c, joined, width)
    pending.clear()


class NumpyKernel(_KernelBase):
    """The same pipeline over uint64 arrays as wide bit vectors."""

    def run(self, view, w, counters, fa=None, probe=None):
        r = self.r
        rb = r >> 3
        wpv = r // 64  # uint64 words per vector
        n = view.check_complete(w).nbytes
        if n < 15 * rb:
            return count_short(counters, view, w)
        fa_ = fa or full_adder
        head = head_load(view, r)
        v0 = np.frombuffer(head.v0.to_bytes(rb, "little"), dtype=np.uint64)
        astart = view.offset - view.offset % rb
        pos = head.consumed_bytes + 14 * rb
        block = 16 * rb
        nblocks = (n - pos) // block
        nwords = (14 + 16 * nblocks) * wpv
        arr = np.frombuffer(view.base, dtype=np.uint64, count=nwords,
                            offset=astart + rb)
        vecs = [v0] + [arr[i * wpv:(i + 1) * wpv] for i in range(14)]
        acc = csa15(vecs, fa_)
        c = np.zeros(W_MAX, dtype=np.uint16)
        h = 0
        hinc = 16 * r // W_MAX
        rot = 8 * (view.offset % 8)
        vi = 14
        for _ in range(nblocks):
            vs16 = [arr[(vi + i) * wpv:(vi + i + 1) * wpv] for i in range(16)]
            a16, acc = csa16_4(acc, vs16, fa_)
            accumulate_a16_rows(c, a16)
            h += hinc
            h = check_and_flush(h, c, counters, w, r, rot=rot)
            vi += 16
            pos += block
            if probe is not None:
                probe(PipelineState(pos, acc, c, h, counters))
        final_accumulate_rows(c, acc)
        count_tail(c, memoryview(view.base)[view.offset + pos:view.offset + n])
        flush_fw(counters, c, w, rot)
        return counters


class NumbaKernel(_KernelBase):
    """Compiled r=512 kernel; available when numba imports."""

    def __init__(self):
        super().__init__("numba", 512)
        self._impl = None

    def available(self):
        if self._impl is not None:
            return True
        try:
            import numba  # noqa: F401
        except ImportError:
            return False
        return True

    def _load(self):
        if self._impl is None:
            if not self.available():
                raise KernelUnavailableError("numba is not installed")
            from . import _nbkern
            self._impl = _nbkern
        return self._impl

    def run(self, view, w, counters, fa=None, probe=None):
        if fa is not None or probe is not None:
            raise ValueError("the numba kernel cannot be instrumented")
        impl = self._load()
        r = self.r
        rb = r >> 3
        n = view.check_complete(w).nbytes
        if n < 15 * rb:
            return count_short(counters, view, w)
        head = head_load(view, r)
        v0 = np.frombuffer(head.v0.to_bytes(rb, "little"), dtype=np.uint64).copy()
        v0.flags.writeable = False
        astart = view.offset - view.offset % rb
        pos = head.consumed_bytes + 14 * rb
        block = 16 * rb
        nblocks = (n - pos) // block
        nwords = (14 + 16 * nblocks) * 8
        words = np.frombuffer(view.base, dtype=np.uint64, count=nwords,
                              offset=astart + rb).view()
        words.flags.writeable = False
        c = np.zeros(W_MAX, dtype=np.uint16)
        c64 = np.zeros(W_MAX, dtype=np.uint64)
        impl.run_main(v0, words, nblocks, c, c64)
        pos += nblocks * block
        rot = 8 * (view.offset % 8)
        count_tail(c, memoryview(view.base)[view.offset + pos:view.offset + n])
        flush_fw(counters, c, w, rot)
        flush_fw(counters, c64, w, rot)
        return counters


_KERNELS = None


def _registry():
    global _KERNELS
    if _KERNELS is None:
        _KERNELS = [
            IntKernel("portable", 64),
            IntKernel("int256", 256),
            NumbaKernel(),
            NumpyKernel("numpy", 65536),
        ]
    return _KERNELS


def list_kernels():
    """All built-in kernels with availability, the portable one first."""
    return [(k.descriptor, k.available()) for k in _registry()]


def get_kernel(name):
    for k in _registry():
        if k.name == name:
            return k
    raise UnknownKernelError(f"unknown kernel {name!r}")


def select_kernel(override=None):
    """Resolve a kernel: explicit override, POSPOPCNT_KERNEL, else widest."""
    name = override or os.environ.get(KERNEL_ENV) or None
    if name is not None:
        k = get_kernel(name)
        if not k.available():
            raise KernelUnavailableError(f"kernel {name!r} is not available on this host")
        return k
    best = None
    for k in _registry():
        if k.available() and (best is None or k.r > best.r):
            best = k
    return best


def pospopcnt(data, width, counters=None, kernel=None):
    """Add the positional population count of ``data`` to ``counters``.

    ``data`` is bytes-like (or an InputView); its length must be a
    multiple of width/8.  Returns the counter list (freshly allocated
    when ``counters`` is None).  ``kernel`` may be a kernel object, a
    kernel name, or None for automatic selection.
    """
    check_width(width)
    view = InputView.of(data).check_complete(width)
    if counters is None:
        counters = new_counters(width)
    elif len(counters) < width:
        raise ValueError(f"counter array holds {len(counters)} < {width} entries")
    if kernel is None or isinstance(kernel, str):
        kernel = select_kernel(kernel)
    elif not kernel.available():
        raise KernelUnavailableError(f"kernel {kernel.name!r} is not available on this host")
    return kernel.run(view, width, counters)
