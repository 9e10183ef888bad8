"""Best-effort hardware cycle/instruction counters via perf_event_open.

Counters are optional: if the syscall, the architecture, or the
perf_event_paranoid policy says no, everything degrades to None and the
benchmark simply omits the derived columns.  Linux only.
"""

import ctypes
import platform
import struct
import sys

_PERF_TYPE_HARDWARE = 0
_PERF_COUNT_HW_CPU_CYCLES = 0
_PERF_COUNT_HW_INSTRUCTIONS = 1

_SYSCALL_NR = {
    "x86_64": 298,
    "amd64": 298,
    "aarch64": 241,
    "arm64": 241,
}


def _attr(config):
    # perf_event_attr: type, size, config, then zeroed tail; flag bits
    # exclude_kernel (5) and exclude_hv (6) keep it unprivileged-friendly.
    buf = bytearray(128)
    struct.pack_into("<IIQ", buf, 0, _PERF_TYPE_HARDWARE, 128, config)
    struct.pack_into("<Q", buf, 40, (1 << 5) | (1 << 6))
    return buf


class PerfCounters:
    """Paired cycle/instruction counters around a measured region."""

    def __init__(self):
        self._fds = None
        nr = _SYSCALL_NR.get(platform.machine())
        if nr is None or not sys.platform.startswith("linux"):
            return
        try:
            libc = ctypes.CDLL(None, use_errno=True)
            fds = []
            for config in (_PERF_COUNT_HW_CPU_CYCLES, _PERF_COUNT_HW_INSTRUCTIONS):
                attr = _attr(config)
                fd = libc.syscall(
                    nr,
                    ctypes.c_char_p(bytes(attr)),
                    0,  # pid: calling process
                    -1,  # cpu: any
                    -1,  # group leader: none
                    ctypes.c_ulong(0),
                )
                if fd < 0:
                    for f in fds:
                        _close(f)
                    return
                fds.append(fd)
            self._fds = fds
        except OSError:
            return

    @property
    def available(self):
        return self._fds is not None

    def read(self):
        import os

        return tuple(
            struct.unpack("<Q", os.read(fd, 8))[0] for fd in self._fds
        )

    def close(self):
        if self._fds:
            for fd in self._fds:
                _close(fd)
            self._fds = None


def _close(fd):
    import os

    try:
        os.close(fd)
    except OSError:
        pass
