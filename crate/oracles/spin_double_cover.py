#!/usr/bin/env python3
"""Lifts of the Coxeter transpositions (j, j+1) of S7 to the double covers 2.S7.

Seven pairwise anticommuting 8x8 matrices e_1..e_7 with e_i^2 = -1 are taken
from tensor products of X, Z and J = XZ.  Then t_j = s (e_j - e_{j+1}) with
s^2 = 1/2 (GF(7): s = 1/3) or s = 1 (GF(3)) lifts the transposition (j, j+1):

  * GF(7): t_j^2 = -1  (transposition lifts have order 4)
  * GF(3): t_j^2 = +1  (transposition lifts are involutions)

Each file holds one matrix, MeatAxe mode 1.

Usage: spin_double_cover.py OUTDIR
"""
import argparse
import hashlib
import itertools
import os

import numpy as np


def pauli(p):
    x = np.array([[0, 1], [1, 0]])
    z = np.array([[1, 0], [0, p - 1]])
    return {"I": np.eye(2, dtype=np.int64), "X": x, "Z": z, "J": (x @ z) % p}


def kron(ms, p):
    r = np.array([[1]])
    for m in ms:
        r = np.kron(r, m) % p
    return r


def anticommuting_family(p):
    basis = pauli(p)
    e8 = np.eye(8, dtype=np.int64)
    cands = []
    for word in itertools.product("IXZJ", repeat=3):
        if word == ("I", "I", "I"):
            continue
        m = kron([basis[c] for c in word], p)
        if ((m @ m) % p == (p - 1) * e8).all():
            cands.append(m)

    def anti(a, b):
        return (((a @ b) + (b @ a)) % p == 0).all()

    def search(chosen, start):
        if len(chosen) == 7:
            return chosen
        for i in range(start, len(cands)):
            if all(anti(cands[i], c) for c in chosen):
                found = search(chosen + [cands[i]], i + 1)
                if found:
                    return found
        return None

    family = search([], 0)
    assert family is not None
    return family


def transposition_lifts(p):
    e = anticommuting_family(p)
    scale = pow(3, p - 2, p) if p == 7 else 1
    return [((e[j] - e[j + 1]) * scale) % p for j in range(6)]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("outdir")
    args = ap.parse_args()
    os.makedirs(args.outdir, exist_ok=True)
    for p in (7, 3):
        for j, t in enumerate(transposition_lifts(p), 1):
            text = "1 %d 8 8\n" % p + "\n".join("".join(str(int(v)) for v in row) for row in t) + "\n"
            name = "2S7-f%dr8-t%d.m1" % (p, j)
            with open(os.path.join(args.outdir, name), "wb") as fh:
                fh.write(text.encode())
            print(name, hashlib.sha256(text.encode()).hexdigest())


if __name__ == "__main__":
    main()
