"""Regenerate the alist assets shipped in src/sepdecode/data.

ldpc_32_16 / peg_64_32: irregular LDPC codes with variable-degree fractions
1/2, 1/4, 1/8, 1/8 on degrees 2, 3, 5, 6 and check degrees 6 (a few 7s to
absorb the leftover edges). Edges are placed greedily: each new edge goes to
the least-loaded check that creates the fewest 4-cycles, ties broken by a
seeded RNG. Seeds are scanned until H has full row rank.

tanner_155_64: the 3 x 5 array of 31 x 31 circulant permutation matrices.

Usage: python scripts/make_code_assets.py
"""
from pathlib import Path

import numpy as np

from sepdecode.codes import write_alist
from sepdecode.gf2 import BinaryMatrix

DATA = Path(__file__).resolve().parents[1] / "src" / "sepdecode" / "data"


def irregular_ldpc(n, m, seed):
    rng = np.random.default_rng(seed)
    degrees = [2] * (n // 2) + [3] * (n // 4) + [5] * (n // 8) + [6] * (n // 8)
    edges = sum(degrees)
    cap = np.full(m, edges // m)
    cap[: edges % m] += 1
    H = np.zeros((m, n), dtype=np.uint8)
    load = np.zeros(m, dtype=int)
    for j, d in enumerate(degrees):
        for _ in range(d):
            free = np.flatnonzero((H[:, j] == 0) & (load < cap))
            chosen = np.flatnonzero(H[:, j])
            # columns already touching a chosen check would close a 4-cycle
            if chosen.size:
                partners = H[chosen].any(axis=0)
                partners[j] = False
                overlap = H[free][:, partners].sum(axis=1)
            else:
                overlap = np.zeros(free.size, dtype=int)
            score = overlap * 1000 + load[free] * 10 + rng.random(free.size)
            i = free[np.argmin(score)]
            H[i, j] = 1
            load[i] += 1
    return H


def full_rank_ldpc(n, m, first_seed=0):
    seed = first_seed
    while True:
        H = irregular_ldpc(n, m, seed)
        if BinaryMatrix.from_array(H).rank == m:
            return H, seed
        seed += 1


def tanner_155_64():
    p = 31
    exponents = [[1, 2, 4, 8, 16], [5, 10, 20, 9, 18], [25, 19, 7, 14, 28]]
    H = np.zeros((3 * p, 5 * p), dtype=np.uint8)
    for a, row in enumerate(exponents):
        for b, e in enumerate(row):
            for r in range(p):
                H[a * p + r, b * p + (r + e) % p] = 1
    return H


def main():
    DATA.mkdir(parents=True, exist_ok=True)
    for name, (n, m) in {"ldpc_32_16": (32, 16), "peg_64_32": (64, 32)}.items():
        H, seed = full_rank_ldpc(n, m)
        (DATA / f"{name}.alist").write_text(write_alist(BinaryMatrix.from_array(H)))
        print(f"{name}: seed {seed}")
    (DATA / "tanner_155_64.alist").write_text(write_alist(BinaryMatrix.from_array(tanner_155_64())))
    print("tanner_155_64 written")


if __name__ == "__main__":
    main()
