"""Compiled r=512 main loop (8 uint64 lanes per bit vector).

Same wiring as csa.csa15/csa16_4 and the same split-and-fold reduction,
written as plain lane loops so LLVM can vectorize them.  Only imported
when the numba kernel is actually used; the first call compiles (cached
on disk afterwards).

All bit-twiddled scalars stay uint64: numba promotes mixed
uint64/int64 arithmetic to float64, which would corrupt the vectors.
"""

import numpy as np
from numba import njit, uint64

M1 = np.uint64(0x5555555555555555)
M2 = np.uint64(0x3333333333333333)
M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
MA = np.uint64(0xAAAAAAAAAAAAAAAA)
MC = np.uint64(0xCCCCCCCCCCCCCCCC)
BYTE = np.uint64(0xFF)
NIB = np.uint64(0xF)
U1 = np.uint64(1)
U2 = np.uint64(2)
U4 = np.uint64(4)

# byte e of reduction plane p holds the count for bit position _BASE[p] + 8*e
_BASE = (0, 4, 2, 6, 1, 5, 3, 7)

FLUSH_LIMIT = 0xFFFF - 30 * 8  # r=512, w_max=64


@njit(inline="always")
def _fa(a, b, c, carry, s):
    for k in range(8):
        ak = a[k]
        bk = b[k]
        ck = c[k]
        s1 = ak ^ bk
        carry[k] = (ak & bk) | (ck & s1)
        s[k] = s1 ^ ck


@njit(cache=True)
def run_main(head, words, nblocks, c, c64):
    """Head block, main loop, and final accumulation at r=512.

    ``words`` holds the aligned vectors after the head slot (14 head
    vectors, then 16 per block).  Counter overflow is handled by flushing
    c into the 64-wide c64; the caller folds both down to width w.
    """
    s1 = np.empty(8, np.uint64)
    s2 = np.empty(8, np.uint64)
    s3 = np.empty(8, np.uint64)
    s4 = np.empty(8, np.uint64)
    s5 = np.empty(8, np.uint64)
    k1 = np.empty(8, np.uint64)
    k2 = np.empty(8, np.uint64)
    k3 = np.empty(8, np.uint64)
    k4 = np.empty(8, np.uint64)
    k5 = np.empty(8, np.uint64)
    d1 = np.empty(8, np.uint64)
    d2 = np.empty(8, np.uint64)
    d3 = np.empty(8, np.uint64)
    t1 = np.empty(8, np.uint64)
    t2 = np.empty(8, np.uint64)
    e1 = np.empty(8, np.uint64)
    e2 = np.empty(8, np.uint64)
    e3 = np.empty(8, np.uint64)
    e4 = np.empty(8, np.uint64)
    u1 = np.empty(8, np.uint64)
    u2 = np.empty(8, np.uint64)
    u3 = np.empty(8, np.uint64)
    f1 = np.empty(8, np.uint64)
    f2 = np.empty(8, np.uint64)
    x1 = np.empty(8, np.uint64)
    a16 = np.empty(8, np.uint64)
    a1 = np.empty(8, np.uint64)
    a2 = np.empty(8, np.uint64)
    a4 = np.empty(8, np.uint64)
    a8 = np.empty(8, np.uint64)
    ev = np.empty(4, np.uint64)
    od = np.empty(4, np.uint64)

    # initial 15-vector block: 11 full adders, nothing carried in
    _fa(head, words[0:8], words[8:16], k1, s1)
    _fa(words[16:24], words[24:32], words[32:40], k2, s2)
    _fa(words[40:48], words[48:56], words[56:64], k3, s3)
    _fa(words[64:72], words[72:80], words[80:88], k4, s4)
    _fa(words[88:96], words[96:104], words[104:112], k5, s5)
    _fa(s1, s2, s3, d1, t1)
    _fa(t1, s4, s5, d2, a1)
    _fa(k1, k2, k3, e1, u1)
    _fa(k4, k5, d1, e2, u2)
    _fa(u1, u2, d2, e3, a2)
    _fa(e1, e2, e3, a8, a4)

    h = 0
    p = 112
    for _ in range(nblocks):
        # 16+4 CSA network: 15 full adders, a16 skimmed off
        _fa(words[p:p + 8], words[p + 8:p + 16], words[p + 16:p + 24], k1, s1)
        _fa(words[p + 24:p + 32], words[p + 32:p + 40], words[p + 40:p + 48], k2, s2)
        _fa(words[p + 48:p + 56], words[p + 56:p + 64], words[p + 64:p + 72], k3, s3)
        _fa(words[p + 72:p + 80], words[p + 80:p + 88], words[p + 88:p + 96], k4, s4)
        _fa(words[p + 96:p + 104], words[p + 104:p + 112], words[p + 112:p + 120], k5, s5)
        _fa(s1, s2, s3, d1, t1)
        _fa(s4, s5, words[p + 120:p + 128], d2, t2)
        _fa(t1, t2, a1, d3, a1)
        _fa(k1, k2, k3, e1, u1)
        _fa(k4, k5, d1, e2, u2)
        _fa(d2, d3, a2, e3, u3)
        _fa(u1, u2, u3, e4, a2)
        _fa(e1, e2, e3, f1, x1)
        _fa(x1, e4, a4, f2, a4)
        _fa(f1, f2, a8, a16, a8)
        p += 128

        # reduce a16: split even/odd bits and fold rows, 8 -> 4 -> 2 -> 1
        for k in range(4):
            ev[k] = (a16[k] & M1) + (a16[k + 4] & M1)
            od[k] = ((a16[k] >> U1) & M1) + ((a16[k + 4] >> U1) & M1)
        ee = (ev[0] & M2) + (ev[2] & M2)
        eo = ((ev[0] >> U2) & M2) + ((ev[2] >> U2) & M2)
        oe = (od[0] & M2) + (od[2] & M2)
        oo = ((od[0] >> U2) & M2) + ((od[2] >> U2) & M2)
        ee2 = (ev[1] & M2) + (ev[3] & M2)
        eo2 = ((ev[1] >> U2) & M2) + ((ev[3] >> U2) & M2)
        oe2 = (od[1] & M2) + (od[3] & M2)
        oo2 = ((od[1] >> U2) & M2) + ((od[3] >> U2) & M2)
        x0 = (ee & M4) + (ee2 & M4)
        x4 = ((ee >> U4) & M4) + ((ee2 >> U4) & M4)
        x2 = (eo & M4) + (eo2 & M4)
        x6 = ((eo >> U4) & M4) + ((eo2 >> U4) & M4)
        xs1 = (oe & M4) + (oe2 & M4)
        x5 = ((oe >> U4) & M4) + ((oe2 >> U4) & M4)
        x3 = (oo & M4) + (oo2 & M4)
        x7 = ((oo >> U4) & M4) + ((oo2 >> U4) & M4)
        for e in range(8):
            sh = np.uint64(8 * e)
            o = 8 * e
            c[o + 0] += np.uint16(((x0 >> sh) & BYTE) << U4)
            c[o + 4] += np.uint16(((x4 >> sh) & BYTE) << U4)
            c[o + 2] += np.uint16(((x2 >> sh) & BYTE) << U4)
            c[o + 6] += np.uint16(((x6 >> sh) & BYTE) << U4)
            c[o + 1] += np.uint16(((xs1 >> sh) & BYTE) << U4)
            c[o + 5] += np.uint16(((x5 >> sh) & BYTE) << U4)
            c[o + 3] += np.uint16(((x3 >> sh) & BYTE) << U4)
            c[o + 7] += np.uint16(((x7 >> sh) & BYTE) << U4)

        h += 128  # 16 * r / w_max
        if h > FLUSH_LIMIT:
            for i in range(64):
                c64[i] += c[i]
                c[i] = 0
            h = 0

    # final accumulation: transpose the 4-bit counts and add them to c
    for k in range(8):
        b1 = a1[k]
        b2 = a2[k]
        b4 = a4[k]
        b8 = a8[k]
        l12 = (b1 & M1) | ((b2 << U1) & MA)
        h12 = (b2 & MA) | ((b1 >> U1) & M1)
        l48 = (b4 & M1) | ((b8 << U1) & MA)
        h48 = (b8 & MA) | ((b4 >> U1) & M1)
        aa = (l12 & M2) | ((l48 << U2) & MC)
        ab = (h12 & M2) | ((h48 << U2) & MC)
        ac = (l48 & MC) | ((l12 >> U2) & M2)
        ad = (h48 & MC) | ((h12 >> U2) & M2)
        for g in range(16):
            sh = np.uint64(4 * g)
            o = 4 * g
            c[o + 0] += np.uint16((aa >> sh) & NIB)
            c[o + 1] += np.uint16((ab >> sh) & NIB)
            c[o + 2] += np.uint16((ac >> sh) & NIB)
            c[o + 3] += np.uint16((ad >> sh) & NIB)
