#!/usr/bin/env python3
"""Independent reference values for the frozen test vectors (hashlib only)."""
import hashlib
import struct


def h(data, n=16):
    return hashlib.sha256(data).digest()[:n]


def merkle_root(blocks, n=16):
    padded = 2
    while padded < len(blocks):
        padded *= 2
    leaves = list(blocks) + [bytes(len(blocks[0]))] * (padded - len(blocks))
    level = [h(leaves[i] + leaves[i + 1], n) for i in range(0, padded, 2)]
    while len(level) > 1:
        level = [h(level[i] + level[i + 1], n) for i in range(0, len(level), 2)]
    return level[0]


def prf(key, counter):
    return h(key + struct.pack(">Q", counter))


def derive(key, phi, m):
    return [int.from_bytes(prf(key, i), "big") % m + 1 for i in range(1, phi + 1)]


def tlv(tag, value):
    return bytes([tag]) + struct.pack(">I", len(value)) + value


def cp_statement(o, o_max, l, l_max, z):
    q = lambda v: struct.pack(">Q", v)
    return tlv(0x11, q(o)) + tlv(0x12, q(o_max)) + tlv(0x13, q(l)) + tlv(0x14, q(l_max)) + tlv(0x15, struct.pack(">I", z))


if __name__ == "__main__":
    four = [bytes([i]) * 16 for i in range(1, 5)]
    print("merkle_root_4x16", merkle_root(four).hex())
    print("merkle_root_3x16", merkle_root(four[:3]).hex())
    print("merkle_root_1x16", merkle_root(four[:1]).hex())
    print("merkle_root_4x16_h32", merkle_root(four, 32).hex())
    print("prf_zero_key_1", prf(bytes(16), 1).hex())
    print("prf_seq_key_7", prf(bytes(range(16)), 7).hex())
    print("commit_empty_r0to15", h(b"" + bytes(range(16))).hex())
    print("derive_zero_key_3_8", derive(bytes(16), 3, 8))
    print("derive_seq_key_5_1000", derive(bytes(range(16)), 5, 1000))
    cp = cp_statement(5, 5, 2, 2, 3)
    print("cp_5_5_2_2_3", cp.hex())
    print("commit_cp_r0to15", h(cp + bytes(range(16))).hex())
