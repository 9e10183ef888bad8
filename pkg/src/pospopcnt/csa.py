"""Bit-parallel full adders and the two fixed carry-save adder networks.

Everything here is positionwise: operands are bit vectors (plain ints or
numpy uint64 arrays) and no information ever crosses bit positions.  A
full adder compresses three equal-weight bits into a weight-2 carry and a
weight-1 sum; chaining them compresses many vectors into a few
power-of-two-weighted accumulators.

Both networks take the full-adder as a parameter so tests can swap in a
counting or depth-tracking implementation.
"""

from typing import NamedTuple


def full_adder(a, b, c):
    """Positionwise (carry, sum) of three bit vectors.

    sum is the parity a^b^c, carry the majority.  Written in the five-gate
    form with a shared half-sum; any equivalent formulation is allowed.
    """
    s1 = a ^ b
    return (a & b) | (c & s1), s1 ^ c


class Accumulators(NamedTuple):
    """Four bit vectors forming a 4-bit counter per position (values 0..15)."""

    a8: object
    a4: object
    a2: object
    a1: object


def csa15(vs, fa=full_adder):
    """Compress 15 equal-weight bit vectors into (a8, a4, a2, a1).

    Exactly 11 full adders, critical path 5.  Wiring (weights in
    parentheses; si/ci are the sum/carry of adder i):

        (1) v0..v14 pairwise:  5 adders -> s1..s5 (1), c1..c5 (2)
        (1) s1,s2,s3        -> t1 (1), d1 (2)
        (1) t1,s4,s5        -> a1 (1), d2 (2)
        (2) c1,c2,c3 / c4,c5,d1 -> u1,u2 (2), e1,e2 (4)
        (2) u1,u2,d2        -> a2 (2), e3 (4)
        (4) e1,e2,e3        -> a4 (4), a8 (8)
    """
    v0, v1, v2, v3, v4, v5, v6, v7, v8, v9, v10, v11, v12, v13, v14 = vs
    c1, s1 = fa(v0, v1, v2)
    c2, s2 = fa(v3, v4, v5)
    c3, s3 = fa(v6, v7, v8)
    c4, s4 = fa(v9, v10, v11)
    c5, s5 = fa(v12, v13, v14)
    d1, t1 = fa(s1, s2, s3)
    d2, a1 = fa(t1, s4, s5)
    e1, u1 = fa(c1, c2, c3)
    e2, u2 = fa(c4, c5, d1)
    e3, a2 = fa(u1, u2, d2)
    a8, a4 = fa(e1, e2, e3)
    return Accumulators(a8, a4, a2, a1)


def csa16_4(acc, vs, fa=full_adder):
    """Add 16 bit vectors into a 4-bit accumulator, skimming the overflow.

    Returns (a16, acc') with, per position,
    16*a16 + value(acc') == value(acc) + popcount(inputs).
    Exactly 15 full adders (the csa15 tree plus one extra merge per rank
    to absorb v15 and the carried accumulators).
    """
    v0, v1, v2, v3, v4, v5, v6, v7, v8, v9, v10, v11, v12, v13, v14, v15 = vs
    c1, s1 = fa(v0, v1, v2)
    c2, s2 = fa(v3, v4, v5)
    c3, s3 = fa(v6, v7, v8)
    c4, s4 = fa(v9, v10, v11)
    c5, s5 = fa(v12, v13, v14)
    d1, t1 = fa(s1, s2, s3)
    d2, t2 = fa(s4, s5, v15)
    d3, a1 = fa(t1, t2, acc.a1)
    e1, u1 = fa(c1, c2, c3)
    e2, u2 = fa(c4, c5, d1)
    e3, u3 = fa(d2, d3, acc.a2)
    e4, a2 = fa(u1, u2, u3)
    f1, x1 = fa(e1, e2, e3)
    f2, a4 = fa(x1, e4, acc.a4)
    a16, a8 = fa(f1, f2, acc.a8)
    return a16, Accumulators(a8, a4, a2, a1)
