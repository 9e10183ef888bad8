import numpy as np
import pytest

from pospopcnt.accumulate import (
    accumulate_a16,
    accumulate_a16_rows,
    check_and_flush,
    final_accumulate,
    final_accumulate_rows,
    flush_fw,
    flush_threshold,
    positional_bit_counts,
    transpose_nibbles,
    transpose_nibbles_rows,
)
from pospopcnt.csa import Accumulators


def eq_mainaccum(a16, r, w_max=64):
    # direct evaluation: c[i] gains 16 * sum of bits j*w_max + i
    return [
        16 * sum((a16 >> (j * w_max + i)) & 1 for j in range(r // w_max))
        for i in range(w_max)
    ]


def acc_value(acc, p):
    return (
        ((acc.a8 >> p) & 1) * 8
        + ((acc.a4 >> p) & 1) * 4
        + ((acc.a2 >> p) & 1) * 2
        + ((acc.a1 >> p) & 1)
    )


def rand_acc(rng, r):
    return Accumulators(*(rng.getrandbits(r) for _ in range(4)))


def test_accumulate_zero_is_noop():
    c = list(range(64))
    assert accumulate_a16(list(c), 0, 512) == c


def test_accumulate_all_ones_r512():
    c = [0] * 64
    accumulate_a16(c, (1 << 512) - 1, 512)
    assert c == [128] * 64  # 16 * 8 per position


def test_accumulate_single_bit_r128():
    c = [0] * 64
    accumulate_a16(c, 1 << 70, 128)
    want = [0] * 64
    want[6] = 16
    assert c == want


@pytest.mark.parametrize("r", (64, 128, 256, 512, 2048))
def test_accumulate_matches_direct_eval(rng, r):
    for _ in range(40):
        a16 = rng.getrandbits(r)
        c = [0] * 64
        accumulate_a16(c, a16, r)
        assert c == eq_mainaccum(a16, r)


def test_accumulate_small_word_widths(rng):
    # the synthetic small geometry: r=32 over 4 positions
    a16 = rng.getrandbits(32)
    c = [0] * 4
    accumulate_a16(c, a16, 32, w_max=4)
    want = [16 * sum((a16 >> (4 * j + i)) & 1 for j in range(8)) for i in range(4)]
    assert c == want


def test_transpose_zero():
    assert transpose_nibbles(Accumulators(0, 0, 0, 0), 256) == (0, 0, 0, 0)


def test_transpose_value_9_position_0():
    acc = Accumulators(1, 0, 0, 1)  # a8 and a1 set at position 0
    a_a, a_b, a_c, a_d = transpose_nibbles(acc, 64)
    assert a_a & 0xF == 9
    assert (a_a >> 4, a_b, a_c, a_d) == (0, 0, 0, 0)


@pytest.mark.parametrize("r", (64, 128, 512))
def test_transpose_placement_and_roundtrip(rng, r):
    acc = rand_acc(rng, r)
    planes = transpose_nibbles(acc, r)
    for p in range(r):
        nib = (planes[p % 4] >> (4 * (p // 4))) & 0xF
        assert nib == acc_value(acc, p)


def test_transpose_rows_matches_int(rng):
    r = 256
    acc = rand_acc(rng, r)
    rows = Accumulators(
        *(np.frombuffer(v.to_bytes(32, "little"), dtype=np.uint64) for v in acc)
    )
    for got, want in zip(transpose_nibbles_rows(rows), transpose_nibbles(acc, r)):
        assert int.from_bytes(got.tobytes(), "little") == want


def test_final_accumulate_zero():
    c = [7] * 64
    assert final_accumulate(list(c), Accumulators(0, 0, 0, 0), 512) == c


def test_final_accumulate_a1_ones_r512():
    c = [0] * 64
    final_accumulate(c, Accumulators(0, 0, 0, (1 << 512) - 1), 512)
    assert c == [8] * 64  # 8 positions per class, value 1 each


@pytest.mark.parametrize("r", (64, 128, 256, 512))
def test_final_accumulate_matches_position_sums(rng, r):
    for _ in range(40):
        acc = rand_acc(rng, r)
        c = [0] * 64
        final_accumulate(c, acc, r)
        want = [0] * 64
        for p in range(r):
            want[p % 64] += acc_value(acc, p)
        assert c == want


def test_rows_variants_match_int_variants(rng):
    r = 1024
    a16 = rng.getrandbits(r)
    rows = np.frombuffer(a16.to_bytes(r // 8, "little"), dtype=np.uint64)
    c_rows = np.zeros(64, dtype=np.uint16)
    accumulate_a16_rows(c_rows, rows)
    c_int = [0] * 64
    accumulate_a16(c_int, a16, r)
    assert c_rows.tolist() == c_int

    acc = rand_acc(rng, r)
    acc_rows = Accumulators(
        *(np.frombuffer(v.to_bytes(r // 8, "little"), dtype=np.uint64) for v in acc)
    )
    c_rows = np.zeros(64, dtype=np.uint16)
    final_accumulate_rows(c_rows, acc_rows)
    c_int = [0] * 64
    final_accumulate(c_int, acc, r)
    assert c_rows.tolist() == c_int


def test_positional_bit_counts(rng):
    words = [rng.getrandbits(64) for _ in range(37)]
    counts = positional_bit_counts(np.array(words, dtype=np.uint64))
    for i in range(64):
        assert counts[i] == sum(wd >> i & 1 for wd in words)
    assert positional_bit_counts(np.empty(0, dtype=np.uint64)).tolist() == [0] * 64


def test_flush_threshold_values():
    assert flush_threshold(512) == 65535 - 240 == 65295
    assert flush_threshold(64) == 65535 - 30 == 65505
    assert flush_threshold(128) == 65535 - 60
    assert flush_threshold(256) == 65535 - 120
    assert flush_threshold(65536) == 65535 - 30720


def test_flush_fw_identity_at_w64():
    c = list(range(64))
    out = [0] * 64
    flush_fw(out, c, 64)
    assert out == c


def test_flush_fw_w16_all_ones():
    out = [0] * 16
    flush_fw(out, [1] * 64, 16)
    assert out == [4] * 16


def test_flush_fw_w8_series():
    out = [0] * 8
    flush_fw(out, list(range(64)), 8)
    assert out == [8 * j + 224 for j in range(8)]


def test_flush_fw_accumulates_and_preserves_c():
    c = [2] * 64
    out = [10] * 16
    flush_fw(out, c, 16)
    assert out == [18] * 16 and c == [2] * 64


def test_flush_fw_rotation():
    c = [0] * 64
    c[8] = 5  # vector position 8 holding stream position 0 counts
    out = [0] * 16
    flush_fw(out, c, 16, rot=8)
    assert out[0] == 5 and sum(out) == 5


def test_flush_linearity(rng):
    c1 = [rng.randrange(1000) for _ in range(64)]
    c2 = [rng.randrange(1000) for _ in range(64)]
    both = [a + b for a, b in zip(c1, c2)]
    seq = [0] * 16
    flush_fw(seq, c1, 16)
    flush_fw(seq, c2, 16)
    oneshot = [0] * 16
    flush_fw(oneshot, both, 16)
    assert seq == oneshot


def test_check_and_flush_fresh_state_never_flushes():
    c = [1] * 64
    out = [0] * 16
    assert check_and_flush(0, c, out, 16, 512) == 0
    assert out == [0] * 16 and c == [1] * 64


def test_check_and_flush_triggers_past_threshold():
    limit = flush_threshold(512)
    c = [3] * 64
    out = [0] * 16
    assert check_and_flush(limit, c, out, 16, 512) == limit
    assert out == [0] * 16
    h = check_and_flush(limit + 128, c, out, 16, 512)
    assert h == 0 and c == [0] * 64 and out == [12] * 16


@pytest.mark.parametrize("r", (64, 512))
def test_overflow_discipline_worst_case(r):
    # all-ones traffic for over 2^20 blocks: c must stay within 16 bits
    q = r // 64
    hinc = 16 * q
    limit = flush_threshold(r)
    c = [0] * 64
    out = [0] * 64
    h = 0
    iters = (1 << 20) + 17
    for _ in range(iters):
        for i in range(0, 64, 16):
            c[i] += hinc  # worst case: every a16 bit set
        h += hinc
        assert max(c) <= 0xFFFF
        if h > limit:
            flush_fw(out, c, 64)
            c = [0] * 64
            h = 0
        assert h <= limit
    flush_fw(out, c, 64)
    assert out[0] == iters * hinc
