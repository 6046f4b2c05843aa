#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Bit-level reference for the LTE-style turbo encoder and circular-buffer rate matcher.

Written directly from the shift-register description (8-state PCCC, g0 = 1 + D^2 + D^3,
g1 = 1 + D + D^3, QPP interleaver, 32-column sub-block interleaver). It shares no code with
the C++ implementation. Run once to regenerate tests/fixtures/turbo_vectors.txt.
"""

import random
import sys

COLUMN_PERMUTATION = [0, 16, 8, 24, 4, 20, 12, 28, 2, 18, 10, 26, 6, 22, 14, 30,
                      1, 17, 9, 25, 5, 21, 13, 29, 3, 19, 11, 27, 7, 23, 15, 31]

QPP = {40: (3, 10), 48: (7, 12), 104: (7, 26)}


def rsc(bits):
    """Return (parity, tail_systematic, tail_parity) for one constituent encoder."""
    r = [0, 0, 0]  # r[0] = D, r[1] = D^2, r[2] = D^3
    parity = []
    for u in bits:
        a = u ^ r[1] ^ r[2]
        parity.append(a ^ r[0] ^ r[2])
        r = [a, r[0], r[1]]
    tail_x, tail_z = [], []
    for _ in range(3):
        x = r[1] ^ r[2]          # input that drives the feedback node to zero
        tail_x.append(x)
        tail_z.append(r[0] ^ r[2])
        r = [0, r[0], r[1]]
    assert r == [0, 0, 0]
    return parity, tail_x, tail_z


def turbo_encode(c):
    K = len(c)
    f1, f2 = QPP[K]
    perm = [(f1 * i + f2 * i * i) % K for i in range(K)]
    assert sorted(perm) == list(range(K))
    z, x_t, z_t = rsc(c)
    c2 = [c[perm[i]] for i in range(K)]
    z2, x2_t, z2_t = rsc(c2)
    d0 = list(c) + [x_t[0], z_t[1], x2_t[0], z2_t[1]]
    d1 = list(z) + [z_t[0], x_t[2], z2_t[0], x2_t[2]]
    d2 = list(z2) + [x_t[1], z_t[2], x2_t[1], z2_t[2]]
    return d0, d1, d2


def subblock_interleave(stream, third):
    D = len(stream)
    C = 32
    R = -(-D // C)
    Kpi = R * C
    ND = Kpi - D
    y = [None] * ND + list(stream)
    if not third:
        out = []
        for col in COLUMN_PERMUTATION:
            for row in range(R):
                out.append(y[row * C + col])
        return out
    out = []
    for k in range(Kpi):
        pi = (COLUMN_PERMUTATION[k // R] + C * (k % R) + 1) % Kpi
        out.append(y[pi])
    return out


def rate_match(d0, d1, d2, E, rv):
    v0 = subblock_interleave(d0, False)
    v1 = subblock_interleave(d1, False)
    v2 = subblock_interleave(d2, True)
    Kpi = len(v0)
    R = Kpi // 32
    w = v0[:] + [None] * (2 * Kpi)
    for k in range(Kpi):
        w[Kpi + 2 * k] = v1[k]
        w[Kpi + 2 * k + 1] = v2[k]
    Ncb = 3 * Kpi
    k0 = R * (2 * (-(-Ncb // (8 * R))) * rv + 2)
    e = []
    j = 0
    while len(e) < E:
        bit = w[(k0 + j) % Ncb]
        if bit is not None:
            e.append(bit)
        j += 1
    return e


def to_hex(bits):
    padded = list(bits) + [0] * (-len(bits) % 4)
    return "".join("%x" % (padded[i] << 3 | padded[i + 1] << 2 | padded[i + 2] << 1 | padded[i + 3])
                   for i in range(0, len(padded), 4))


def main(path):
    rng = random.Random(2020)
    cases = [(40, 132, 0), (40, 100, 0), (40, 100, 2), (40, 200, 1), (48, 80, 3), (104, 300, 0)]
    inputs = {}
    with open(path, "w") as f:
        f.write("# turbo code test vectors: K, E, rv headers then hex bit strings (MSB first)\n")
        f.write("# generated by tests/oracles/lte_turbo_oracle.py\n")
        for K, E, rv in cases:
            if K not in inputs:
                inputs[K] = [rng.randint(0, 1) for _ in range(K)]
            c = inputs[K]
            d0, d1, d2 = turbo_encode(c)
            codeword = d0 + d1 + d2
            assert len(codeword) == 3 * K + 12
            e = rate_match(d0, d1, d2, E, rv)
            f.write("\nK %d\nE %d\nrv %d\n" % (K, E, rv))
            f.write("input %s\n" % to_hex(c))
            f.write("codeword %s\n" % to_hex(codeword))
            f.write("rate_matched %s\n" % to_hex(e))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "turbo_vectors.txt")
