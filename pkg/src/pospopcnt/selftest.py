"""Randomized self-test: kernels against the scalar oracle and each other.

Deterministic for a given seed.  On a mismatch the failing case is
shrunk to a minimal reproduction (kernel, width, length, offset, seed)
before being reported.
"""

import random

from .core import WORD_WIDTHS, InputView, new_counters, scalar_pospopcnt
from .kernels import _registry

_ORACLE_CAP = 4096  # larger cases are checked kernel-vs-kernel only


def _run(kernel, data, offset, length, w):
    return kernel.run(InputView(data, offset, length), w, new_counters(w))


def _shrink(kernel, data, offset, length, w):
    """Greedily halve the failing input while the mismatch persists."""
    step = w // 8

    def bad(off, ln):
        return _run(kernel, data, off, ln, w) != scalar_pospopcnt(
            InputView(data, off, ln), w
        )

    changed = True
    while changed and length > step:
        changed = False
        half = (length // 2) // step * step
        if half and bad(offset, half):
            length = half
            changed = True
            continue
        if half and bad(offset + (length - half), half):
            offset += length - half
            length = half
            changed = True
    return offset, length


def run_selftest(iterations=1000, seed=1, kernels=None, out=print):
    """Fuzz the kernels; returns True when every case agreed."""
    rng = random.Random(seed)
    if kernels is None:
        kernels = [k for k in _registry() if k.available()]
    kernels = list(kernels)
    if not kernels:
        out("selftest: no kernels available")
        return False
    oracle_cases = equivalence_cases = 0
    for case in range(iterations):
        w = rng.choice(WORD_WIDTHS)
        step = w // 8
        big = case % 16 == 15
        limit = 65536 if big else _ORACLE_CAP
        length = rng.randrange(0, limit // step + 1) * step
        offset = rng.randrange(64)
        data = rng.randbytes(offset + length + rng.randrange(8))
        view = InputView(data, offset, length)
        kernel = kernels[case % len(kernels)]
        got = _run(kernel, data, offset, length, w)
        if big:
            # oracle too slow here: compare against a second kernel
            other = kernels[(case + 1) % len(kernels)]
            want = _run(other, data, offset, length, w)
            label = f"kernel {other.name}"
            equivalence_cases += 1
        else:
            want = scalar_pospopcnt(view, w)
            label = "scalar oracle"
            oracle_cases += 1
        if got != want:
            m_off, m_len = (offset, length)
            if not big:
                m_off, m_len = _shrink(kernel, data, offset, length, w)
            out(
                f"selftest: MISMATCH kernel={kernel.name} vs {label} "
                f"width={w} length={m_len} offset={m_off} seed={seed} case={case}"
            )
            out(f"selftest: reproduce with length={m_len} offset={m_off} "
                f"width={w} seed={seed}")
            return False
    out(
        f"selftest: PASS ({oracle_cases} oracle cases, "
        f"{equivalence_cases} equivalence cases, seed={seed})"
    )
    return True
