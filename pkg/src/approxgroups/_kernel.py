"""Vectorized exact arithmetic on batches of matrices.

A batch is an integer array ``data`` of shape (m, w) together with a common
positive denominator.  Each row is one matrix: its n*n real-part numerators in
row-major order, followed (when ``cplx``) by its n*n imaginary-part numerators.
Because the denominator is shared, two rows describe the same matrix iff they
are equal as integer vectors, which is what makes exact deduplication cheap.

Rows live in int64 while every value provably fits below 2**62; otherwise the
same code runs on object arrays of Python ints.
"""

from __future__ import annotations

import math
from functools import reduce

import numpy as np
import pandas as pd

INT_LIMIT = 1 << 62
PRODUCT_CHUNK = 1 << 19  # products materialized per batch

_HASH_CACHE: dict[int, np.ndarray] = {}


def is_obj(a: np.ndarray) -> bool:
    return a.dtype == object


def max_abs(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    if is_obj(a):
        return max(abs(int(x)) for x in a.ravel())
    return int(np.abs(a).max())


def fit(a: np.ndarray) -> np.ndarray:
    """Downcast to int64 when every entry is safely in range."""
    if is_obj(a) and max_abs(a) < INT_LIMIT:
        return a.astype(np.int64)
    return a


def to_obj(a: np.ndarray) -> np.ndarray:
    if is_obj(a):
        return a
    out = np.empty(a.shape, dtype=object)
    out[...] = a.tolist() if a.ndim else int(a)
    return out


def scale(a: np.ndarray, k: int) -> np.ndarray:
    """Multiply by a positive Python int, promoting to object on overflow risk."""
    if k == 1:
        return a
    if not is_obj(a) and max_abs(a) * k < INT_LIMIT:
        return a * np.int64(k)
    return to_obj(a) * k


def width(n: int, cplx: bool) -> int:
    return 2 * n * n if cplx else n * n


def split(data: np.ndarray, n: int, cplx: bool):
    nn = n * n
    re = data[:, :nn]
    im = data[:, nn:] if cplx else None
    return re, im


def join(re: np.ndarray, im) -> np.ndarray:
    if im is None:
        return re
    if is_obj(re) != is_obj(im):
        re, im = to_obj(re), to_obj(im)
    return np.concatenate([re, im], axis=1)


def widen(data: np.ndarray, n: int, cplx: bool) -> np.ndarray:
    """Real layout -> complex layout (zero imaginary block)."""
    if cplx:
        return data
    zeros = np.zeros_like(data)
    return np.concatenate([data, zeros], axis=1)


def gcd_all(data: np.ndarray, den: int) -> int:
    if data.size == 0:
        return den
    if is_obj(data):
        return math.gcd(den, *(int(x) for x in data.ravel()))
    g = int(np.gcd.reduce(np.abs(data.ravel())))
    return math.gcd(g, den)


# ---------------------------------------------------------------------------
# hashing and deduplication


def _hash_consts(w: int) -> np.ndarray:
    c = _HASH_CACHE.get(w)
    if c is None:
        rng = np.random.default_rng(0x5EED + w)
        c = rng.integers(1, np.iinfo(np.uint64).max, size=w, dtype=np.uint64) | np.uint64(1)
        _HASH_CACHE[w] = c
    return c


def hash_rows(data: np.ndarray) -> np.ndarray:
    """64-bit row fingerprints (int64 data only). Used as a prefilter, never trusted alone."""
    c = _hash_consts(data.shape[1])
    with np.errstate(over="ignore"):
        u = data.view(np.uint64) if data.flags.c_contiguous else data.astype(np.uint64)
        h = u @ c  # wraps mod 2^64
        h ^= h >> np.uint64(31)
        h *= np.uint64(0x9E3779B97F4A7C15)
        h ^= h >> np.uint64(29)
    return h


def unique(data: np.ndarray, counts=None):
    """Exact dedup (order unspecified). With ``counts``, sums the multiplicities."""
    if len(data) == 0:
        return data, counts
    if is_obj(data):
        acc: dict[tuple, int] = {}
        cts = counts if counts is not None else np.ones(len(data), dtype=np.int64)
        for row, c in zip(map(tuple, data.tolist()), cts.tolist()):
            acc[row] = acc.get(row, 0) + c
        rows = list(acc)
        out = np.empty((len(rows), data.shape[1]), dtype=object)
        for i, r in enumerate(rows):
            out[i] = r
        return out, (np.array(list(acc.values()), dtype=np.int64) if counts is not None else None)
    h = hash_rows(data)
    codes, uniq_h = pd.factorize(h)
    m = len(data)
    first = np.empty(len(uniq_h), dtype=np.int64)
    first[codes[::-1]] = np.arange(m - 1, -1, -1)
    reps = data[first]
    if not (data == reps[codes]).all():
        # genuine fingerprint collision: fall back to the slow exact path
        reps, inv = np.unique(data, axis=0, return_inverse=True)
        codes = inv.ravel()
    if counts is None:
        return reps, None
    return reps, np.bincount(codes, weights=counts, minlength=len(reps)).astype(np.int64)


def lex_sorted(data: np.ndarray) -> np.ndarray:
    """Rows in lexicographic order (rows assumed distinct)."""
    if len(data) <= 1:
        return data
    if is_obj(data):
        rows = sorted(map(tuple, data.tolist()))
        out = np.empty(data.shape, dtype=object)
        for i, r in enumerate(rows):
            out[i] = r
        return out
    return data[np.lexsort(data.T[::-1])]


def lex_order(data: np.ndarray) -> np.ndarray:
    """Permutation sorting rows lexicographically."""
    if is_obj(data):
        return np.array(sorted(range(len(data)), key=lambda i: tuple(data[i].tolist())), dtype=np.int64)
    return np.lexsort(data.T[::-1])


class Accumulator:
    """Exact union of many row batches with periodic merging and a size cap."""

    def __init__(self, cap: int | None = None, stage: str = "", with_counts: bool = False):
        self.cap = cap
        self.stage = stage
        self.with_counts = with_counts
        self.acc = None
        self.acc_counts = None
        self.pending = []
        self.pending_counts = []
        self.pending_rows = 0

    def add(self, data: np.ndarray, counts=None):
        if len(data) == 0:
            return
        if self.with_counts and counts is None:
            counts = np.ones(len(data), dtype=np.int64)
        data, counts = unique(data, counts)
        self.pending.append(data)
        self.pending_counts.append(counts)
        self.pending_rows += len(data)
        base = 0 if self.acc is None else len(self.acc)
        if self.pending_rows > max(base, 1 << 18):
            self._merge()

    def _merge(self):
        parts = ([self.acc] if self.acc is not None else []) + self.pending
        if not parts:
            return
        if any(is_obj(p) for p in parts):
            parts = [to_obj(p) for p in parts]
        data = np.concatenate(parts, axis=0)
        counts = None
        if self.with_counts:
            cparts = ([self.acc_counts] if self.acc_counts is not None else []) + self.pending_counts
            counts = np.concatenate(cparts)
        self.acc, self.acc_counts = unique(data, counts)
        self.pending, self.pending_counts, self.pending_rows = [], [], 0
        if self.cap is not None and len(self.acc) > self.cap:
            from .errors import CapExceeded

            raise CapExceeded(self.cap, len(self.acc), self.stage)

    def result(self, w: int):
        self._merge()
        if self.acc is None:
            empty = np.zeros((0, w), dtype=np.int64)
            return empty, (np.zeros(0, dtype=np.int64) if self.with_counts else None)
        return self.acc, self.acc_counts


# ---------------------------------------------------------------------------
# products


def _mm(a, b):
    return np.matmul(a, b)


def _complex_mm(ar, ai, br, bi):
    re = _mm(ar, br)
    im = None
    if ai is not None and bi is not None:
        re = re - _mm(ai, bi)
    if ai is not None:
        im = _mm(ai, br)
    if bi is not None:
        t = _mm(ar, bi)
        im = t if im is None else im + t
    return re, im


def _product_dtype_obj(a_data, b_data, n, cplx):
    bound = n * max_abs(a_data) * max_abs(b_data) * (2 if cplx else 1)
    return bound >= INT_LIMIT


def pair_products(n: int, a_data, a_cplx: bool, b_data, b_cplx: bool, chunk: int = PRODUCT_CHUNK):
    """Yield batches of the products a*b over all pairs (a-major order).

    Output rows carry denominator den_a*den_b and are complex iff either input is.
    """
    cplx = a_cplx or b_cplx
    if _product_dtype_obj(a_data, b_data, n, cplx):
        a_data, b_data = to_obj(a_data), to_obj(b_data)
    ar, ai = split(a_data, n, a_cplx)
    br, bi = split(b_data, n, b_cplx)
    ar = ar.reshape(-1, n, n)
    br = br.reshape(-1, 1, n, n)[:, 0]
    ai = ai.reshape(-1, n, n) if ai is not None else None
    bi = bi.reshape(-1, n, n) if bi is not None else None
    q = len(br)
    if q == 0 or len(ar) == 0:
        return
    b_step = min(q, chunk)
    a_step = max(1, chunk // b_step)
    for i0 in range(0, len(ar), a_step):
        a_r = ar[i0:i0 + a_step, None]
        a_i = ai[i0:i0 + a_step, None] if ai is not None else None
        for j0 in range(0, q, b_step):
            b_r = br[None, j0:j0 + b_step]
            b_i = bi[None, j0:j0 + b_step] if bi is not None else None
            re, im = _complex_mm(a_r, a_i, b_r, b_i)
            re = re.reshape(-1, n * n)
            if cplx:
                im = im.reshape(-1, n * n) if im is not None else np.zeros_like(re)
            yield join(re, im if cplx else None)


def pointwise_products(n: int, a_data, a_cplx: bool, b_data, b_cplx: bool):
    """Row i of the result is a_i * b_i."""
    cplx = a_cplx or b_cplx
    if _product_dtype_obj(a_data, b_data, n, cplx):
        a_data, b_data = to_obj(a_data), to_obj(b_data)
    ar, ai = split(a_data, n, a_cplx)
    br, bi = split(b_data, n, b_cplx)
    m = len(ar)
    ar, br = ar.reshape(m, n, n), br.reshape(m, n, n)
    ai = ai.reshape(m, n, n) if ai is not None else None
    bi = bi.reshape(m, n, n) if bi is not None else None
    re, im = _complex_mm(ar, ai, br, bi)
    re = re.reshape(m, n * n)
    if not cplx:
        return re
    im = im.reshape(m, n * n) if im is not None else np.zeros_like(re)
    return join(re, im)


# ---------------------------------------------------------------------------
# inverses


def _embed(data, n, cplx):
    """Rows -> (m, k, k) real integer matrices; complex uses [[R, -I], [I, R]]."""
    m = len(data)
    re, im = split(data, n, cplx)
    r = re.reshape(m, n, n)
    if not cplx:
        return r
    i = im.reshape(m, n, n)
    top = np.concatenate([r, -i], axis=2)
    bot = np.concatenate([i, r], axis=2)
    return np.concatenate([top, bot], axis=1)


def inverse_rows(n: int, den: int, data: np.ndarray, cplx: bool):
    """Exact inverses of every row; returns (common_den, rows).

    Faddeev-LeVerrier on the integer numerators N gives adj(N) and det(N)
    with only exact integer divisions; (N/den)^-1 = -den * M_k / c_0.
    """
    m = len(data)
    if m == 0:
        return 1, data
    N = _embed(data, n, cplx)
    k = N.shape[1]
    bound = (k * max(1, max_abs(N))) ** k * (1 << k) * max(1, den)
    if bound >= INT_LIMIT:
        N = to_obj(N)
    eye = np.zeros((k, k), dtype=N.dtype)
    for i in range(k):
        eye[i, i] = 1
    Mj = np.zeros_like(N)
    c = np.ones(m, dtype=N.dtype)
    for j in range(1, k + 1):
        Mj = np.matmul(N, Mj) + c[:, None, None] * eye
        tr = np.trace(np.matmul(N, Mj), axis1=1, axis2=2)
        if not (tr % j == 0).all():  # pragma: no cover - guaranteed by integrality
            raise ArithmeticError("Faddeev-LeVerrier division was not exact")
        c = -(tr // j)
    c0 = c
    adj_part = -Mj  # N^-1 = adj_part / c0
    if cplx:
        inv_re = adj_part[:, :n, :n].reshape(m, n * n)
        inv_im = adj_part[:, n:, :n].reshape(m, n * n)
        num = join(inv_re, inv_im)
    else:
        num = adj_part.reshape(m, n * n)
    num = scale(num, den) if den != 1 else num
    rowden = c0
    if (rowden == 0).any():
        raise ArithmeticError("singular matrix in inverse batch")
    neg = rowden < 0
    if neg.any():
        num = num.copy()
        num[neg] = -num[neg]
        rowden = np.where(neg, -rowden, rowden)
    if is_obj(num) or is_obj(rowden):
        num, rowden = to_obj(num), to_obj(rowden)
        g = np.array([math.gcd(int(d), *(int(x) for x in row)) for row, d in zip(num, rowden)], dtype=object)
    else:
        g = np.gcd(np.gcd.reduce(np.abs(num), axis=1), rowden)
    num = num // g[:, None]
    rowden = rowden // g
    L = reduce(lambda x, y: x * y // math.gcd(x, y), (int(d) for d in set(rowden.tolist())), 1)
    factors = [L // int(d) for d in rowden.tolist()]
    big = max(factors) * max_abs(num) >= INT_LIMIT
    if big or is_obj(num):
        num = to_obj(num)
        f = np.array(factors, dtype=object)
    else:
        f = np.array(factors, dtype=np.int64)
    num = num * f[:, None]
    return L, fit(num)


# ---------------------------------------------------------------------------
# lookups


def rescale_to(data: np.ndarray, den_from: int, den_to: int):
    """Express rows over a new denominator.

    Returns (rows, ok) where ok[i] is False when row i is not representable
    over ``den_to`` (so it cannot equal any row stored with that denominator).
    """
    if den_from == den_to:
        return data, np.ones(len(data), dtype=bool)
    if den_to % den_from == 0:
        return scale(data, den_to // den_from), np.ones(len(data), dtype=bool)
    num = scale(data, den_to)
    ok = (num % den_from == 0).all(axis=1) if len(num) else np.ones(0, dtype=bool)
    out = num // den_from
    return fit(out) if is_obj(out) else out, ok


class RowIndex:
    """Exact membership/position lookup for a fixed batch of distinct rows."""

    def __init__(self, data: np.ndarray):
        self.data = data
        self.obj = is_obj(data)
        if self.obj:
            self.table = {tuple(r): i for i, r in enumerate(data.tolist())}
        else:
            h = hash_rows(data) if len(data) else np.zeros(0, dtype=np.uint64)
            table = pd.Index(h)
            # a hash table on the fingerprints when they are collision-free,
            # sorted fingerprints with run scans otherwise
            self.table_h = table if table.is_unique else None
            if self.table_h is None:
                self.order = np.argsort(h, kind="stable")
                self.hashes = h[self.order]

    def lookup(self, q: np.ndarray) -> np.ndarray:
        """Positions of the query rows in the indexed batch (-1 if absent)."""
        m = len(q)
        out = np.full(m, -1, dtype=np.int64)
        if m == 0 or len(self.data) == 0:
            return out
        if self.obj or is_obj(q):
            table = self.table if self.obj else {tuple(r): i for i, r in enumerate(self.data.tolist())}
            if not self.obj:
                self.table, self.obj = table, True
            for i, r in enumerate(q.tolist()):
                out[i] = table.get(tuple(int(x) for x in r), -1)
            return out
        hq = hash_rows(q)
        if self.table_h is not None:
            cand = self.table_h.get_indexer(hq)
            hit = np.flatnonzero(cand >= 0)
            c = cand[hit]
            eq = (self.data[c] == q[hit]).all(axis=1)
            out[hit[eq]] = c[eq]
            return out
        pos = np.searchsorted(self.hashes, hq)
        pos_c = np.minimum(pos, len(self.hashes) - 1)
        hit = self.hashes[pos_c] == hq
        cand = self.order[pos_c]
        eq = hit & (self.data[cand] == q).all(axis=1)
        out[eq] = cand[eq]
        # rare: equal fingerprints for different rows; scan the whole run
        suspicious = np.flatnonzero(hit & ~eq)
        for i in suspicious:
            j = pos[i]
            while j < len(self.hashes) and self.hashes[j] == hq[i]:
                c = self.order[j]
                if (self.data[c] == q[i]).all():
                    out[i] = c
                    break
                j += 1
        return out
