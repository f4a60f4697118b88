#!/usr/bin/env python3
"""Build standard generators of Co1 in its 24-dimensional GF(2) representation.

The representation is the Leech lattice modulo 2.  The lattice is built from
the extended binary Golay code (quadratic-residue construction over the
projective line of GF(23)); Co0 = 2.Co1 is generated by the monomial group
2^12:M24 together with one sextet element xi.  Everything is computed in
exact integer arithmetic in a lattice basis, then reduced modulo 2.

Standard generators (a, b) of Co1: a in class 2B, b in class 3C, ab of order
40 and abab^2 of order 6.  Classes are recognised from lifts to Co0:

  * 2B: lifts to an element g of Co0 with g^2 = -1;
  * 3C: lifts to an element of order 3 and trace -3 (frame shape 1^-3 3^9).

Output: two MeatAxe mode-1 files (a, b) and their SHA-256 digests.

Usage: co1_standard_generators.py OUTDIR [--seed N]
"""
import argparse
import hashlib
import itertools
import os
import random
from fractions import Fraction

import numpy as np

P = 23
INF = 23


def indicator(support):
    v = np.zeros(24, dtype=np.int64)
    for i in support:
        v[i] = 1
    return v


def rref_gf2(rows):
    m = np.array(rows, dtype=np.int64) % 2
    r = 0
    for c in range(m.shape[1]):
        hits = [i for i in range(r, len(m)) if m[i, c]]
        if not hits:
            continue
        m[[r, hits[0]]] = m[[hits[0], r]]
        for i in range(len(m)):
            if i != r and m[i, c]:
                m[i] ^= m[r]
        r += 1
    return m[:r]


def golay_code():
    residues = sorted({(x * x) % P for x in range(1, P)})
    rows = [indicator([s] + [(q + s) % P for q in residues]) for s in range(P)]
    rows.append(indicator(range(24)))
    g = rref_gf2(rows)
    assert len(g) == 12
    return g, residues


def m24_generators(residues):
    inv = lambda x: pow(x, P - 2, P)

    def on_line(f):
        return [f(i) for i in range(24)]

    def delta(x):
        if x in (0, INF):
            return x
        if x in residues:
            return (pow(x, 3, P) * inv(9)) % P
        return (9 * pow(x, 3, P)) % P

    return [
        on_line(lambda x: INF if x == INF else (x + 1) % P),
        on_line(lambda x: INF if x == INF else (2 * x) % P),
        on_line(lambda x: 0 if x == INF else (INF if x == 0 else (-inv(x)) % P)),
        on_line(delta),
    ]


class Leech:
    def __init__(self):
        self.code, residues = golay_code()
        self.octads = []
        for coeffs in itertools.product([0, 1], repeat=12):
            w = (np.array(coeffs) @ self.code) % 2
            if w.sum() == 8:
                self.octads.append(frozenset(int(i) for i in np.nonzero(w)[0]))
        assert len(self.octads) == 759
        self.m24 = m24_generators(residues)
        for perm in self.m24:
            for row in self.code:
                assert self.in_code(indicator(perm[i] for i in np.nonzero(row)[0]))
        spanning = [2 * g for g in self.code]
        spanning += [4 * indicator([0, i]) for i in range(1, 24)]
        spanning += [4 * indicator([0]) - 4 * indicator([1])]
        spanning += [np.array([-3] + [1] * 23)]
        self.basis = hermite_rows(spanning)
        assert len(self.basis) == 24
        for b in self.basis:
            assert self.contains(b)

    def in_code(self, c):
        return not ((self.code @ (np.asarray(c) % 2)) % 2).any()

    def contains(self, x):
        x = [int(t) for t in x]
        m = x[0] % 2
        if any(t % 2 != m for t in x) or sum(x) % 8 != (4 * m) % 8:
            return False
        marked = [i for i in range(24) if x[i] % 4 == (2 if m == 0 else 3)]
        return self.in_code(indicator(marked))

    def sextet(self, tetrad):
        tetrad = frozenset(tetrad)
        rest = set(range(24)) - tetrad
        parts = [tetrad]
        while rest:
            q = min(rest)
            (octad,) = [o for o in self.octads if tetrad | {q} <= o]
            parts.append(octad - tetrad)
            rest -= octad - tetrad
        return parts

    def to_basis(self, m):
        """Standard-coordinate rational matrix -> integer matrix in the lattice basis."""
        b = [[Fraction(int(v)) for v in row] for row in self.basis]
        images = [[sum(row[k] * m[k][j] for k in range(24)) for j in range(24)] for row in b]
        out = []
        for img in images:
            coeffs = solve_upper(self.basis, img)
            assert all(c.denominator == 1 for c in coeffs), "matrix does not preserve the lattice"
            out.append([int(c) for c in coeffs])
        return np.array(out, dtype=np.int64)


def hermite_rows(rows):
    m = [list(map(int, r)) for r in rows]
    n = len(m[0])
    r = 0
    for c in range(n):
        while True:
            nz = [i for i in range(r, len(m)) if m[i][c] != 0]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(m[i][c]))
            m[r], m[i0] = m[i0], m[r]
            clean = True
            for i in range(r + 1, len(m)):
                if m[i][c]:
                    q = m[i][c] // m[r][c]
                    m[i] = [a - q * b for a, b in zip(m[i], m[r])]
                    clean = clean and m[i][c] == 0
            if clean:
                break
        if r < len(m) and m[r][c] != 0:
            if m[r][c] < 0:
                m[r] = [-a for a in m[r]]
            for i in range(r):
                q = m[i][c] // m[r][c]
                m[i] = [a - q * b for a, b in zip(m[i], m[r])]
            r += 1
    return m[:r]


def solve_upper(basis, y):
    """Coefficients c with sum c_i basis_i = y, basis in row echelon form."""
    y = list(y)
    coeffs = [Fraction(0)] * len(basis)
    for i, row in enumerate(basis):
        piv = next(j for j, v in enumerate(row) if v != 0)
        c = Fraction(y[piv]) / row[piv]
        coeffs[i] = c
        y = [a - c * b for a, b in zip(y, row)]
    assert all(v == 0 for v in y)
    return coeffs


def co0_generators(leech):
    gens = []
    for perm in leech.m24:
        m = [[Fraction(0)] * 24 for _ in range(24)]
        for i in range(24):
            m[i][perm[i]] = Fraction(1)
        gens.append(leech.to_basis(m))
    octad = leech.octads[0]
    eps = [[Fraction(0)] * 24 for _ in range(24)]
    for i in range(24):
        eps[i][i] = Fraction(-1 if i in octad else 1)
    gens.append(leech.to_basis(eps))
    parts = leech.sextet([0, 1, 2, 3])
    xi = [[Fraction(0)] * 24 for _ in range(24)]
    for t in parts:
        for i in t:
            for k in t:
                xi[k][i] = Fraction(1, 2) - (1 if i == k else 0)
    for i in parts[0]:
        for k in range(24):
            xi[k][i] = -xi[k][i]
    gens.append(leech.to_basis(xi))
    return gens


class Co0:
    def __init__(self, gens, rng):
        self.rng = rng
        self.slots = [g.copy() for g in gens] * 2
        self.acc = np.eye(24, dtype=np.int64)
        for _ in range(100):
            self.random()

    def random(self):
        i, j = self.rng.sample(range(len(self.slots)), 2)
        if self.rng.random() < 0.5:
            self.slots[i] = self.slots[i] @ self.slots[j]
        else:
            self.slots[i] = self.slots[j] @ self.slots[i]
        self.acc = self.acc @ self.slots[i]
        return self.acc.copy()


ID = np.eye(24, dtype=np.int64)


def order_int(g, bound=1000):
    x = g.copy()
    for n in range(1, bound):
        if (x == ID).all():
            return n
        x = x @ g
    return None


def order_gf2(g, bound=200):
    x = g % 2
    for n in range(1, bound):
        if (x == ID).all():
            return n
        x = (x @ g) % 2
    return None


def inverse_int(g):
    return np.linalg.matrix_power(g, order_int(g) - 1)


def find_standard_generators(seed):
    rng = random.Random(seed)
    leech = Leech()
    group = Co0(co0_generators(leech), rng)
    a_lift = b_lift = None
    while a_lift is None or b_lift is None:
        g = group.random()
        n = order_int(g)
        if n is None:
            continue
        if a_lift is None and n % 4 == 0:
            h = np.linalg.matrix_power(g, n // 4)
            if (h @ h == -ID).all():
                a_lift = h
        if b_lift is None and n % 3 == 0:
            h = np.linalg.matrix_power(g, n // 3)
            if np.trace(h) == -3:
                b_lift = h
    a = a_lift % 2
    while True:
        h = group.random()
        b = (inverse_int(h) @ b_lift @ h) % 2
        ab = (a @ b) % 2
        if order_gf2(ab) != 40:
            continue
        if order_gf2((ab @ ab @ b) % 2) == 6:
            return a, b


def write_meataxe(m):
    lines = ["1 2 %d %d" % m.shape]
    lines += ["".join(str(int(v)) for v in row) for row in m]
    return "\n".join(lines) + "\n"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("outdir")
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    a, b = find_standard_generators(args.seed)
    os.makedirs(args.outdir, exist_ok=True)
    for name, m in (("Co1G1-f2r24B0.m1", a), ("Co1G1-f2r24B0.m2", b)):
        text = write_meataxe(m).encode()
        with open(os.path.join(args.outdir, name), "wb") as fh:
            fh.write(text)
        print(name, hashlib.sha256(text).hexdigest())


if __name__ == "__main__":
    main()
