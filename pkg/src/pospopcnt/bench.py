"""Throughput benchmark harness.

Per (kernel, size): a zero-filled buffer (contents do not affect any
kernel's speed; a flag fills it randomly to check exactly that) is
counted k times per round, k growing geometrically from 1 with a final
proportional step, until a round takes at least min_time seconds.  At
least two rounds always run, the earlier ones serving as warm up, and
only the final round is reported.  The counter array is reused across
iterations (a deliberate loop-carried dependency) and its sum goes to a
sink variable afterwards so the work cannot be optimized away.

Reported per row: speed n*k/t in bytes/second, plus cycles/byte,
instructions/byte and IPC when hardware counters are readable.
"""

import math
import random
import time
from dataclasses import dataclass, field
from typing import Optional

from .core import InputView, check_width, new_counters, scalar_pospopcnt
from .hwcounters import PerfCounters
from .kernels import get_kernel

BASELINE = "baseline"  # the naive scalar reference, benchmarked like a kernel

CSV_COLUMNS = ("kernel", "width", "size_bytes", "iterations", "seconds", "bytes_per_sec")
CSV_HW_COLUMNS = ("cycles_per_byte", "instr_per_byte", "ipc")

_sink = 0  # aggregated counter sums; keeps runs observable


def default_size_grid(w=16, max_exp=30):
    """2^i and 3*2^i byte sizes, keeping only word-complete ones."""
    sizes = {1 << i for i in range(1, max_exp + 1)}
    sizes |= {3 << i for i in range(max_exp)}
    step = w // 8
    return tuple(sorted(s for s in sizes if s % step == 0))


@dataclass(frozen=True)
class BenchConfig:
    sizes: tuple = field(default_factory=default_size_grid)
    kernels: tuple = ("portable",)
    width: int = 16
    min_time: float = 2.0
    random_fill: bool = False
    seed: int = 20240 + 2

    def validate(self):
        check_width(self.width)
        if self.min_time <= 0:
            raise ValueError("min_time must be positive")
        if not self.sizes:
            raise ValueError("no sizes to benchmark")
        step = self.width // 8
        for s in self.sizes:
            if s % step:
                raise ValueError(f"size {s} is not word-complete for width {self.width}")
        return self


@dataclass
class BenchResult:
    kernel: str
    width: int
    size_bytes: int
    iterations: int
    seconds: float
    cycles: Optional[int] = None
    instructions: Optional[int] = None

    @property
    def bytes_per_sec(self):
        return self.size_bytes * self.iterations / self.seconds

    @property
    def cycles_per_byte(self):
        if self.cycles is None:
            return None
        return self.cycles / (self.size_bytes * self.iterations)

    @property
    def instr_per_byte(self):
        if self.instructions is None:
            return None
        return self.instructions / (self.size_bytes * self.iterations)

    @property
    def ipc(self):
        if self.cycles in (None, 0):
            return None
        return self.instructions / self.cycles

    def csv_row(self, hw):
        cells = [
            self.kernel,
            str(self.width),
            str(self.size_bytes),
            str(self.iterations),
            repr(self.seconds),
            repr(self.bytes_per_sec),
        ]
        if hw:
            cells += [
                "" if v is None else repr(v)
                for v in (self.cycles_per_byte, self.instr_per_byte, self.ipc)
            ]
        return ",".join(cells)


def _resolve_runner(name):
    if name == BASELINE:
        return lambda view, w, counters: scalar_pospopcnt(view, w, counters)
    kernel = get_kernel(name)
    if not kernel.available():
        from .core import KernelUnavailableError

        raise KernelUnavailableError(f"kernel {name!r} is not available on this host")
    return kernel.run


def bench_one(name, size, width, min_time, random_fill=False, seed=0, perf=None,
              log=None):
    """Measure one (kernel, size) pair; returns a BenchResult of the final round."""
    runner = _resolve_runner(name)
    if random_fill:
        data = random.Random(seed).randbytes(size)
    else:
        data = bytes(size)  # zero filled
    view = InputView.of(data)
    counters = new_counters(width)
    use_hw = perf is not None and perf.available
    k = 1
    rounds = 0
    while True:
        before = perf.read() if use_hw else None
        t0 = time.perf_counter()
        for _ in range(k):
            runner(view, width, counters)
        t = time.perf_counter() - t0
        hw = None
        if use_hw:
            after = perf.read()
            hw = (after[0] - before[0], after[1] - before[1])
        rounds += 1
        if log:
            log(f"{name} n={size} round={rounds} k={k} t={t:.4f}s")
        if rounds >= 2 and t >= min_time:
            break
        if t < min_time:
            if 2 * t < min_time:
                k *= 2
            else:
                k = max(k + 1, math.ceil(k * min_time / t * 1.05))
    global _sink
    _sink += sum(counters)
    cyc, ins = hw if hw else (None, None)
    return BenchResult(name, width, size, k, t, cyc, ins)


def run_benchmark(cfg, on_result=None, log=None):
    """Run the configured sweep; yields results through on_result and a list."""
    cfg.validate()
    for name in cfg.kernels:
        _resolve_runner(name)  # fail fast on unknown/unavailable kernels
    perf = PerfCounters()
    results = []
    try:
        for name in cfg.kernels:
            for size in cfg.sizes:
                res = bench_one(
                    name,
                    size,
                    cfg.width,
                    cfg.min_time,
                    random_fill=cfg.random_fill,
                    seed=cfg.seed,
                    perf=perf,
                    log=log,
                )
                results.append(res)
                if on_result:
                    on_result(res)
    finally:
        perf.close()
    return results


def csv_header(hw):
    return ",".join(CSV_COLUMNS + (CSV_HW_COLUMNS if hw else ()))


def write_csv(results, out, hw=None):
    if hw is None:
        hw = any(r.cycles is not None for r in results)
    out.write(csv_header(hw) + "\n")
    for r in results:
        out.write(r.csv_row(hw) + "\n")
