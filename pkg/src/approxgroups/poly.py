"""Univariate polynomials over Q(i), coefficient lists lowest degree first.

Only what the Jordan splitting and minimal-polynomial checks need.
"""

from __future__ import annotations

from .scalar import ONE, ZERO, GaussianRational

Poly = list  # list[GaussianRational], trailing zeros trimmed; [] is the zero polynomial


def trim(p):
    p = list(p)
    while p and p[-1].is_zero():
        p.pop()
    return p


def degree(p) -> int:
    return len(p) - 1


def add(p, q):
    out = [ZERO] * max(len(p), len(q))
    for i, c in enumerate(p):
        out[i] = out[i] + c
    for i, c in enumerate(q):
        out[i] = out[i] + c
    return trim(out)


def sub(p, q):
    return add(p, [-c for c in q])


def mul(p, q):
    if not p or not q:
        return []
    out = [ZERO] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a.is_zero():
            continue
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return trim(out)


def scale(p, c):
    return trim([a * c for a in p])


def monic(p):
    if not p:
        return []
    lead = p[-1].inverse()
    return [c * lead for c in p]


def divmod_(p, q):
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    p = trim(p)
    quot = [ZERO] * max(len(p) - len(q) + 1, 0)
    rem = list(p)
    inv_lead = q[-1].inverse()
    while len(rem) >= len(q) and rem:
        shift = len(rem) - len(q)
        factor = rem[-1] * inv_lead
        quot[shift] = factor
        for i, c in enumerate(q):
            rem[shift + i] = rem[shift + i] - factor * c
        rem = trim(rem)
    return trim(quot), rem


def gcd(p, q):
    """Monic gcd (zero polynomial if both are zero)."""
    a, b = trim(p), trim(q)
    while b:
        _, r = divmod_(a, b)
        a, b = b, r
    return monic(a)


def ext_gcd(p, q):
    """Return (g, s, t) with s*p + t*q = g, g monic."""
    r0, r1 = trim(p), trim(q)
    s0, s1 = [ONE], []
    t0, t1 = [], [ONE]
    while r1:
        quo, rem = divmod_(r0, r1)
        r0, r1 = r1, rem
        s0, s1 = s1, sub(s0, mul(quo, s1))
        t0, t1 = t1, sub(t0, mul(quo, t1))
    if not r0:
        return [], s0, t0
    inv = r0[-1].inverse()
    return scale(r0, inv), scale(s0, inv), scale(t0, inv)


def derivative(p):
    return trim([c * k for k, c in enumerate(p)][1:])


def linear_power(root: GaussianRational, m: int):
    """(x - root)^m."""
    out = [ONE]
    factor = [-root, ONE]
    for _ in range(m):
        out = mul(out, factor)
    return out


def is_squarefree(p) -> bool:
    if not p:
        return False
    return degree(gcd(p, derivative(p))) == 0


def crt(residues, moduli):
    """The unique p with deg p < deg(prod moduli) and p = residues[i] mod moduli[i].

    Moduli must be pairwise coprime.
    """
    total = [ONE]
    for m in moduli:
        total = mul(total, m)
    result = []
    for r, m in zip(residues, moduli):
        cofactor, rem = divmod_(total, m)
        assert not rem
        g, s, _ = ext_gcd(cofactor, m)
        if degree(g) != 0:
            raise ValueError("CRT moduli are not coprime")
        # s * cofactor = 1 mod m
        term = mul(mul(r, s), cofactor)
        result = add(result, term)
    _, result = divmod_(result, total)
    return result
