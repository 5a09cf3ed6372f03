"""Brute-force reference computations for the tests.

Everything here works on plain Python sets of Matrix objects and never
touches the numpy kernel, so agreement with the package is a real check.
Matrix products are themselves checked against raw Fraction arithmetic in
test_matrix.
"""

from collections import Counter, deque
from fractions import Fraction
from itertools import product

from approxgroups.matrix import Matrix, diag_ratio, pi_prime_project, pi_project


def prod(A, B):
    return {a @ b for a in A for b in B}


def power(A, k):
    out = set(A)
    for _ in range(k - 1):
        out = prod(out, A)
    return out


def inv(A):
    return {a.inverse() for a in A}


def bfs_ball(gens, radius):
    """Words of length <= radius in gens and their inverses, by breadth-first search."""
    n = next(iter(gens)).n
    steps = set(gens) | inv(gens)
    seen = {Matrix.identity(n): 0}
    queue = deque([Matrix.identity(n)])
    while queue:
        g = queue.popleft()
        if seen[g] == radius:
            continue
        for s in steps:
            h = g @ s
            if h not in seen:
                seen[h] = seen[g] + 1
                queue.append(h)
    return set(seen)


def fibre_sizes(A, proj):
    return Counter(proj(a) for a in A)


def ruzsa_greedy(A, B):
    """Greedy maximal X in A with B.x pairwise disjoint, scanning A in key order."""
    X = []
    used = set()
    for a in sorted(A, key=Matrix.key):
        t = {b @ a for b in B}
        if not (t & used):
            X.append(a)
            used |= t
    return X


def greedy_cover_size(A, square):
    """Size of the symmetric greedy cover of square by translates x.A."""
    n = next(iter(A)).n
    covered = set()
    X = set()
    for y in [Matrix.identity(n)] + sorted(square, key=Matrix.key):
        if y in covered:
            continue
        for z in (y, y.inverse()):
            if z not in X:
                X.add(z)
                covered |= {z @ a for a in A}
    return len(X)


def min_symmetric_cover(A, max_size=4):
    """Smallest symmetric X in A^2 with A^2 inside X.A, by exhaustive search (None if > max_size)."""
    sq = power(A, 2)
    # symmetric sets are unions of {y, y^-1} orbits
    orbits = sorted({frozenset({y, y.inverse()}) for y in sq}, key=lambda o: min(m.key() for m in o))
    for size in range(1, max_size + 1):
        for pick in _orbit_unions(orbits, size):
            if {x @ a for x in pick for a in A} >= sq:
                return size
    return None


def _orbit_unions(orbits, size, start=0):
    if size == 0:
        yield set()
        return
    for i in range(start, len(orbits)):
        o = orbits[i]
        if len(o) > size:
            continue
        for rest in _orbit_unions(orbits, size - len(o), i + 1):
            yield set(o) | rest


def pipeline(A):
    """Reference run of the recursive refinement; returns (A_prime, C, x)."""
    A = set(A)
    n = next(iter(A)).n
    if n == 1:
        return A, None, None
    T, _, _ = pipeline({pi_project(a) for a in A})
    A1 = {a for a in A if pi_project(a) in T}
    T2, _, _ = pipeline({pi_prime_project(a) for a in A1})
    A2 = {a for a in A1 if pi_prime_project(a) in T2}

    classes = {}
    for a in A2:
        classes.setdefault(diag_ratio(a), set()).add(a)
    best = min(classes, key=lambda r: (-len(classes[r]), r.sort_key()))
    A3 = classes[best]
    if len(A3) == 1 and len(A2) > 1:
        C = {g for g in prod(A2, inv(A2)) if diag_ratio(g) == 1}
    else:
        C = prod(A3, inv(A3))

    r = Counter(a @ c.inverse() for a in A for c in C)
    assert sum(r.values()) == len(A) * len(C)
    x = min(r, key=lambda g: (-r[g], g.key()))
    xi = x.inverse()
    A_prime = {a for a in A if xi @ a in C}
    return A_prime, C, x


def pipeline_density(A):
    A_prime, _, _ = pipeline(A)
    return Fraction(len(A), len(A_prime))


def raw_mul(P, Q):
    """Product of square lists of lists of Fractions."""
    n = len(P)
    return [[sum((P[i][k] * Q[k][j] for k in range(n)), Fraction(0)) for j in range(n)] for i in range(n)]


def sumset_productset(U, V, W):
    return len({u + v for u, v in product(U, V)}), len({u * w for u, w in product(U, W)})
