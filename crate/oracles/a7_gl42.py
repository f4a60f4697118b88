#!/usr/bin/env python3
"""Generators of A7 inside GL(4,2), written as MeatAxe mode-1 files.

GL(4,2) acts on wedge^2 GF(2)^4 (6-dim, quadratic form = Pfaffian).  The 28
nonsingular vectors fall into 8 maximal cliques of size 7 under "bilinear
form = 1"; the action on these cliques is the isomorphism GL(4,2) -> A8.
A7 is the stabiliser of one clique.

Usage: a7_gl42.py OUTDIR [--seed N]
"""
import argparse
import hashlib
import itertools
import os
import random

import numpy as np

PAIRS = list(itertools.combinations(range(4), 2))


def wedge2(m):
    """Matrix of the induced action on wedge^2 (row-vector convention)."""
    out = np.zeros((6, 6), dtype=np.int64)
    for r, (i, j) in enumerate(PAIRS):
        for c, (k, l) in enumerate(PAIRS):
            out[r, c] = (m[i, k] * m[j, l] + m[i, l] * m[j, k]) % 2
    return out


def quad(v):
    # e12 e34 + e13 e24 + e14 e23 is the Pfaffian form for the pair order above
    return (v[0] * v[5] + v[1] * v[4] + v[2] * v[3]) % 2


def bilinear(u, v):
    return (quad((u + v) % 2) + quad(u) + quad(v)) % 2


def stars():
    vecs = [np.array(v) for v in itertools.product([0, 1], repeat=6) if any(v)]
    nonsing = [v for v in vecs if quad(v) == 1]
    assert len(nonsing) == 28
    cliques = []
    for a in range(28):
        for b in range(a + 1, 28):
            if bilinear(nonsing[a], nonsing[b]) != 1:
                continue
            common = [
                c for c in range(28)
                if c not in (a, b)
                and bilinear(nonsing[a], nonsing[c]) == 1
                and bilinear(nonsing[b], nonsing[c]) == 1
            ]
            clique = {a, b}
            for c in common:
                if all(bilinear(nonsing[c], nonsing[d]) == 1 for d in clique):
                    clique.add(c)
            if len(clique) == 7 and frozenset(clique) not in cliques:
                cliques.append(frozenset(clique))
    assert len(cliques) == 8, len(cliques)
    return nonsing, cliques


def star_perm(m, nonsing, cliques):
    w = wedge2(m)
    keys = [tuple(v) for v in nonsing]
    image = {}
    for idx, v in enumerate(nonsing):
        image[idx] = keys.index(tuple((v @ w) % 2))
    perm = []
    for c in cliques:
        target = frozenset(image[i] for i in c)
        perm.append(cliques.index(target))
    return perm


def det2(m):
    return int(round(np.linalg.det(m))) % 2


def group_order(gens):
    seen = {np.eye(4, dtype=np.int64).tobytes()}
    frontier = [np.eye(4, dtype=np.int64)]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = (x @ g) % 2
                if y.tobytes() not in seen:
                    seen.add(y.tobytes())
                    nxt.append(y)
        frontier = nxt
    return len(seen)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("outdir")
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    nonsing, cliques = stars()
    fixers = []
    while len(fixers) < 2:
        m = np.array([[rng.randrange(2) for _ in range(4)] for _ in range(4)], dtype=np.int64)
        if det2(m) == 0:
            continue
        if star_perm(m, nonsing, cliques)[0] != 0:
            continue
        fixers.append(m)
        if len(fixers) == 2 and group_order(fixers) != 2520:
            fixers = []
    os.makedirs(args.outdir, exist_ok=True)
    for n, m in enumerate(fixers, 1):
        text = ("1 2 4 4\n" + "\n".join("".join(str(int(v)) for v in row) for row in m) + "\n").encode()
        name = "A7-f2r4-g%d.m1" % n
        with open(os.path.join(args.outdir, name), "wb") as fh:
            fh.write(text)
        print(name, hashlib.sha256(text).hexdigest())


if __name__ == "__main__":
    main()
