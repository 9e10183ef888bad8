import random

import pytest

from pospopcnt import InputView
from pospopcnt.kernels import _registry


def oracle_bits(data, w, counters=None):
    """Second scalar coding of the reference count, via bit strings."""
    counters = counters if counters is not None else [0] * w
    data = bytes(data)
    step = w // 8
    for k in range(0, len(data), step):
        word = int.from_bytes(data[k:k + step], "little")
        for j, ch in enumerate(bin(word)[2:][::-1]):
            if ch == "1":
                counters[j] += 1
    return counters


def view_at(payload, offset, pad=b"\x00"):
    """Place payload at a chosen offset inside a padded buffer."""
    base = bytes(pad * offset) + bytes(payload) + bytes(pad * 8)
    return InputView(base, offset, len(payload))


@pytest.fixture(scope="session")
def kernels():
    return [k for k in _registry() if k.available()]


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)
