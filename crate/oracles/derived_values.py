#!/usr/bin/env python3
"""Brute-force reference values frozen into the Rust test-suite and claim table.

Every value here is computed by direct enumeration, without any of the
algorithms the Rust crate implements (no Schreier-Sims, no Krylov minimal
polynomials, no Cantor-Zassenhaus).  Prints a JSON object.

Usage: derived_values.py [--data DIR]
"""
import argparse
import itertools
import json
import os
from collections import Counter

import numpy as np


# ---- GF(2)[x] by integer bit masks -------------------------------------------------

def pdeg(a):
    return a.bit_length() - 1


def pmod(a, b):
    while a and pdeg(a) >= pdeg(b):
        a ^= b << (pdeg(a) - pdeg(b))
    return a


def trial_irreducible(f):
    d = pdeg(f)
    for g in range(2, 1 << (d // 2 + 1)):
        if pmod(f, g) == 0:
            return False
    return True


def field_values():
    return {
        "x3+x2+x+1_reducible": not trial_irreducible(0b1111),
        "x3+x2+x+1_divisible_by_x+1": pmod(0b1111, 0b11) == 0,
        "x4+x+1_irreducible": trial_irreducible(0b10011),
    }


# ---- GF(2) matrices via numpy ------------------------------------------------------

def companion(bits):
    d = pdeg(bits)
    c = np.zeros((d, d), dtype=np.int64)
    for i in range(d - 1):
        c[i, i + 1] = 1
    for j in range(d):
        c[d - 1, j] = (bits >> j) & 1
    return c


def rank2(m):
    m = m.copy() % 2
    r = 0
    for c in range(m.shape[1]):
        hits = [i for i in range(r, m.shape[0]) if m[i, c]]
        if not hits:
            continue
        m[[r, hits[0]]] = m[[hits[0], r]]
        for i in range(m.shape[0]):
            if i != r and m[i, c]:
                m[i] ^= m[r]
        r += 1
    return r


def poly_at(bits, m):
    n = m.shape[0]
    acc = np.zeros((n, n), dtype=np.int64)
    power = np.eye(n, dtype=np.int64)
    for j in range(pdeg(bits) + 1):
        if (bits >> j) & 1:
            acc = (acc + power) % 2
        power = (power @ m) % 2
    return acc


def matrix_values():
    phi7 = 0b1111111
    c = companion(phi7)
    powers = [np.eye(6, dtype=np.int64)]
    for _ in range(7):
        powers.append((powers[-1] @ c) % 2)
    order = next(n for n in range(1, 8) if (powers[n] == np.eye(6)).all())
    first = np.zeros(6, dtype=np.int64)
    first[0] = 1
    v = first.copy()
    vec_period = None
    for n in range(1, 50):
        v = (v @ c) % 2
        if (v == first).all():
            vec_period = n
            break
    return {
        "companion_phi7_order": order,
        "companion_phi7_inverse_is_sixth_power": bool(((powers[6] @ c) % 2 == np.eye(6)).all()),
        "companion_phi7_null_x3+x+1": 6 - rank2(poly_at(0b1011, c)),
        "companion_phi7_null_x3+x2+1": 6 - rank2(poly_at(0b1101, c)),
        "companion_phi7_first_basis_vector_period": vec_period,
    }


# ---- permutations on small sets ----------------------------------------------------

def compose(p, q):
    """p then q."""
    return tuple(q[p[i]] for i in range(len(p)))


def conj(x, g):
    y = [0] * len(x)
    for i in range(len(x)):
        y[g[i]] = g[x[i]]
    return tuple(y)


def closure(gens, n):
    ident = tuple(range(n))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = compose(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def conj_orbit_sizes(targets, gens):
    seen = set()
    sizes = []
    for x in targets:
        if x in seen:
            continue
        orbit = {x}
        stack = [x]
        while stack:
            z = stack.pop()
            for g in gens:
                w = conj(z, g)
                if w not in orbit:
                    orbit.add(w)
                    stack.append(w)
        seen |= orbit
        sizes.append(len(orbit))
    return sorted(sizes)


FANO = [frozenset({i % 7, (i + 1) % 7, (i + 3) % 7}) for i in range(7)]


def fano_group(lines):
    lines = set(lines)
    return [p for p in itertools.permutations(range(7))
            if all(frozenset(p[x] for x in l) in lines for l in lines)]


def involution_values():
    s7 = list(itertools.permutations(range(7)))
    invs = [p for p in s7 if all(p[p[i]] == i for i in range(7)) and sum(p[i] != i for i in range(7)) == 6]
    s3_transpositions = [p for p in itertools.permutations(range(3))
                         if all(p[p[i]] == i for i in range(3)) and sum(p[i] != i for i in range(3)) == 2]
    fano = fano_group(FANO)
    c7 = [tuple((i + 1) % 7 for i in range(7))]
    # A4: stabiliser of two Fano planes in the same A7-orbit
    even = [p for p in s7 if sum(1 for i in range(7) for j in range(i + 1, 7) if p[i] > p[j]) % 2 == 0]
    base = frozenset(FANO)
    same_orbit = {frozenset(frozenset(p[x] for x in l) for l in FANO) for p in even}
    other = sorted(same_orbit - {base}, key=lambda s: sorted(sorted(l) for l in s))[0]
    a4 = [p for p in fano if frozenset(frozenset(p[x] for x in l) for l in other) == other]
    return {
        "s3_transpositions": len(s3_transpositions),
        "s7_type_2^3.1": len(invs),
        "fano_group_order": len(fano),
        "fano_orbits": conj_orbit_sizes(invs, fano),
        "c7_orbits": conj_orbit_sizes(invs, c7),
        "fano_plane_orbit_count_under_a7": len(same_orbit),
        "two_plane_stabiliser_order": len(a4),
        "two_plane_stabiliser_orbits": conj_orbit_sizes(invs, a4),
    }


# ---- projective geometry over GF(8) ------------------------------------------------

def gf8_mul(a, b, modulus=0b1011):
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a & 0b1000:
            a ^= modulus
    return r


def gf8_inv(a):
    return next(b for b in range(1, 8) if gf8_mul(a, b) == 1)


def normalise(v):
    lead = next(x for x in v if x)
    inv = gf8_inv(lead)
    return tuple(gf8_mul(x, inv) for x in v)


def projective_count(q_bits, d):
    q = 1 << q_bits
    return (q ** d - 1) // (q - 1)


def read_matrix(path):
    rows = open(path).read().split("\n")[1:]
    return [[int(c) for c in r] for r in rows if r]


def a7_census(data_dir):
    gens = [read_matrix(os.path.join(data_dir, "a7", "A7-f2r4-g%d.m1" % i)) for i in (1, 2)]
    pts = sorted({normalise(v) for v in itertools.product(range(8), repeat=4) if any(v)})

    def act(v, m):
        out = [0] * 4
        for i in range(4):
            if v[i]:
                for j in range(4):
                    if m[i][j]:
                        out[j] ^= v[i]
        return normalise(out)

    seen = set()
    sizes = []
    for p in pts:
        if p in seen:
            continue
        orbit = {p}
        stack = [p]
        while stack:
            x = stack.pop()
            for g in gens:
                y = act(x, g)
                if y not in orbit:
                    orbit.add(y)
                    stack.append(y)
        seen |= orbit
        sizes.append(len(orbit))
    order = len(closure([tuple(
        pts.index(act(p, g)) for p in pts) for g in gens], len(pts)))
    return {
        "a7_points": len(pts),
        "a7_orbits": sorted(sizes),
        "a7_image_order": order,
        "a7_stabiliser_orders": sorted(order // s for s in sizes),
    }


# ---- PSL2(8) on the projective line and its overgroup A9 ---------------------------

def psl28_values():
    inf = 8
    pts = list(range(9))

    def mobius(f):
        return tuple(f(x) for x in pts)

    def recip(c):
        return mobius(lambda x: inf if x == 0 else (0 if x == inf else gf8_mul(c, gf8_inv(x))))

    translations = [mobius(lambda x, c=c: inf if x == inf else x ^ c) for c in range(8)]
    s = mobius(lambda x: inf if x == inf else gf8_mul(2, x))
    s_inv = mobius(lambda x: inf if x == inf else gf8_mul(gf8_inv(2), x))
    group = closure([translations[1], s, recip(1)], 9)
    ident = tuple(range(9))

    def order(p):
        x, n = p, 1
        while x != ident:
            x = compose(x, p)
            n += 1
        return n

    inverting = [t for t in group if t != ident and compose(t, t) == ident and conj(s, t) == s_inv]
    crit = all(any(order(compose(m, t)) == 3 for m in translations[1:]) for t in inverting)
    gen_orders = sorted({len(closure(translations[1:] + [s, t], 9)) for t in inverting})

    def parity(p):
        return sum(1 for i in range(9) for j in range(i + 1, 9) if p[i] > p[j]) % 2

    a9_inverting = [t for t in itertools.permutations(range(9))
                    if parity(t) == 0 and t != ident and compose(t, t) == ident and conj(s, t) == s_inv]
    return {
        "psl28_order": len(group),
        "psl28_inverting_involutions": len(inverting),
        "psl28_all_satisfy_order3": crit,
        "psl28_generated_orders": gen_orders,
        "a9_inverting_involutions": len(a9_inverting),
    }


# ---- affine 2^3:7 and the lifting formula -------------------------------------------

def affine_values():
    # points GF(8); elements x -> a x + b as pairs (a, b); composition: first then second
    def mul(g, h):
        a1, b1 = g
        a2, b2 = h
        return (gf8_mul(a1, a2), gf8_mul(b1, a2) ^ b2)

    def inv(g):
        a, b = g
        ai = gf8_inv(a)
        return (ai, gf8_mul(b, ai))

    def power(g, n):
        r = (1, 0)
        for _ in range(n):
            r = mul(r, g)
        return r

    i = (2, 0)
    results = []
    for b in range(1, 8):
        x = (1, b)
        ix = mul(mul(inv(x), i), x)
        lifted = mul(mul(i, x), power(mul(i, ix), 3))
        results.append(lifted)
    return {"affine_lift_of_translations": sorted(set(results))}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--data", default=os.path.join(os.path.dirname(__file__), "..", "data"))
    args = ap.parse_args()
    out = {}
    out.update(field_values())
    out.update(matrix_values())
    out.update(involution_values())
    out["projective_gf2_3"] = projective_count(1, 3)
    out["projective_gf8_4"] = projective_count(3, 4)
    out["projective_gf8_1"] = projective_count(3, 1)
    out.update(a7_census(args.data))
    out.update(psl28_values())
    out.update(affine_values())
    print(json.dumps(out, indent=1, sort_keys=True, default=int))


if __name__ == "__main__":
    main()
