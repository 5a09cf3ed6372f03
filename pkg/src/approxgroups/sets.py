"""Finite matrix sets and their product-set calculus.

A :class:`GroupSet` is stored as one canonical integer batch (see
``_kernel``): a shared minimal denominator and distinct rows in
lexicographic order of (real parts, imaginary parts).  That order is the
canonical iteration order used for every greedy or tie-breaking choice in
the package.
"""

from __future__ import annotations

import hashlib
import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import numpy as np

from . import _kernel as K
from .errors import CapExceeded, DimensionError, ParseError, PreconditionError
from .matrix import Matrix, decode_matrix, encode_matrix
from .scalar import GaussianRational

DEFAULT_CAP = 5_000_000


@dataclass(frozen=True)
class GrowthCap:
    """Element budget for any computed set; exceeding it raises CapExceeded."""

    max_elements: int = DEFAULT_CAP

    def __post_init__(self):
        if self.max_elements <= 0:
            raise PreconditionError("growth cap must be positive")

    def check(self, size: int, stage: str = ""):
        if size > self.max_elements:
            raise CapExceeded(self.max_elements, size, stage)


DEFAULT_GROWTH_CAP = GrowthCap()


def _cap(cap) -> GrowthCap:
    if cap is None:
        return DEFAULT_GROWTH_CAP
    if isinstance(cap, int):
        return GrowthCap(cap)
    return cap


def _lcm(values: Iterable[int]) -> int:
    return reduce(lambda x, y: x * y // math.gcd(x, y), values, 1)


class Batch:
    """An ordered list of matrices in kernel form (duplicates allowed)."""

    __slots__ = ("cplx", "data", "den", "n")

    def __init__(self, n: int, den: int, data: np.ndarray, cplx: bool):
        self.n = n
        self.den = den
        self.data = data
        self.cplx = cplx

    @classmethod
    def from_matrices(cls, mats, n: int | None = None) -> Batch:
        mats = list(mats)
        if n is None:
            if not mats:
                raise PreconditionError("cannot infer dimension of an empty matrix list")
            n = mats[0].n
        if any(m.n != n for m in mats):
            raise DimensionError("all matrices must share one dimension")
        nn = n * n
        cplx = any(not e.is_real() for m in mats for e in m.entries)
        den = _lcm({e.re.denominator for m in mats for e in m.entries} | {e.im.denominator for m in mats for e in m.entries})
        rows = []
        for m in mats:
            row = [e.re.numerator * (den // e.re.denominator) for e in m.entries]
            if cplx:
                row += [e.im.numerator * (den // e.im.denominator) for e in m.entries]
            rows.append(row)
        w = K.width(n, cplx)
        if not rows:
            return cls(n, 1, np.zeros((0, nn), dtype=np.int64), False)
        arr = np.empty((len(rows), w), dtype=object)
        for i, r in enumerate(rows):
            arr[i] = r
        return cls(n, den, K.fit(arr), cplx)

    def __len__(self):
        return len(self.data)

    def matrix(self, i: int) -> Matrix:
        n, den = self.n, self.den
        row = [int(x) for x in self.data[i].tolist()]
        nn = n * n
        if self.cplx:
            entries = [GaussianRational._make(Fraction(row[k], den), Fraction(row[nn + k], den)) for k in range(nn)]
        else:
            zero = Fraction(0)
            entries = [GaussianRational._make(Fraction(row[k], den), zero) for k in range(nn)]
        return Matrix._trusted(n, entries)

    @property
    def matrices(self) -> list[Matrix]:
        return [self.matrix(i) for i in range(len(self.data))]

    def inverse(self) -> Batch:
        den, data = K.inverse_rows(self.n, self.den, self.data, self.cplx)
        return Batch(self.n, den, data, self.cplx)

    def times(self, other: Batch) -> Batch:
        """Pointwise product: row i is self[i] * other[i]."""
        if self.n != other.n:
            raise DimensionError("dimension mismatch")
        data = K.pointwise_products(self.n, self.data, self.cplx, other.data, other.cplx)
        return Batch(self.n, self.den * other.den, data, self.cplx or other.cplx)

    def take(self, idx) -> Batch:
        return Batch(self.n, self.den, self.data[np.asarray(idx, dtype=np.int64)], self.cplx)

    def identity_mask(self) -> np.ndarray:
        n, den = self.n, self.den
        eye = np.zeros(n * n, dtype=object)
        for i in range(n):
            eye[i * n + i] = den
        re, im = K.split(self.data, n, self.cplx)
        target = eye.astype(np.int64) if not K.is_obj(re) and den < K.INT_LIMIT else eye
        mask = (re == target).all(axis=1)
        if im is not None:
            mask &= (im == 0).all(axis=1)
        return mask

    def to_set(self) -> GroupSet:
        return GroupSet._from_raw(self.n, self.den, self.data, self.cplx)


class GroupSet:
    """A finite, deduplicated set of n x n matrices."""

    __slots__ = ("_index", "_mats", "cplx", "data", "den", "n")

    def __init__(self, elements: Iterable[Matrix] = (), n: int | None = None):
        b = Batch.from_matrices(elements, n)
        self._set_canonical(*_normalize(b.n, b.den, b.data, b.cplx))

    def _set_canonical(self, n, den, data, cplx):
        self.n = n
        self.den = den
        self.data = data
        self.cplx = cplx
        self._index = None
        self._mats = None

    @classmethod
    def _from_raw(cls, n, den, data, cplx) -> GroupSet:
        obj = object.__new__(cls)
        obj._set_canonical(*_normalize(n, den, data, cplx))
        return obj

    @classmethod
    def _from_canonical(cls, n, den, data, cplx) -> GroupSet:
        obj = object.__new__(cls)
        obj._set_canonical(n, den, data, cplx)
        return obj

    @classmethod
    def empty(cls, n: int) -> GroupSet:
        return cls((), n=n)

    @classmethod
    def identity(cls, n: int) -> GroupSet:
        return cls([Matrix.identity(n)])

    # -- container protocol ---------------------------------------------------
    def __len__(self):
        return len(self.data)

    def batch(self) -> Batch:
        return Batch(self.n, self.den, self.data, self.cplx)

    @property
    def matrices(self) -> list[Matrix]:
        """Elements in canonical order (materialized lazily)."""
        if self._mats is None:
            self._mats = self.batch().matrices
        return self._mats

    def __iter__(self):
        return iter(self.matrices)

    def __getitem__(self, i: int) -> Matrix:
        if self._mats is not None:
            return self._mats[i]
        return self.batch().matrix(i)

    @property
    def index(self) -> K.RowIndex:
        if self._index is None:
            self._index = K.RowIndex(self.data)
        return self._index

    def positions(self, other: GroupSet | Batch) -> np.ndarray:
        """Index in self of each row of ``other`` (-1 when absent)."""
        if other.n != self.n:
            raise DimensionError("dimension mismatch")
        q = other.data
        nn = self.n * self.n
        valid = np.ones(len(q), dtype=bool)
        if other.cplx and not self.cplx:
            im = q[:, nn:]
            valid &= (im == 0).all(axis=1) if len(q) else valid
            q = q[:, :nn]
        elif self.cplx and not other.cplx:
            q = K.widen(q, self.n, False)
        q, ok = K.rescale_to(q, other.den, self.den)
        valid &= ok
        out = np.full(len(q), -1, dtype=np.int64)
        if valid.any():
            sel = np.flatnonzero(valid)
            out[sel] = self.index.lookup(q[sel])
        return out

    def contains_mask(self, other: GroupSet | Batch) -> np.ndarray:
        return self.positions(other) >= 0

    def __contains__(self, g: Matrix) -> bool:
        if not isinstance(g, Matrix) or g.n != self.n:
            return False
        return bool(self.contains_mask(Batch.from_matrices([g]))[0])

    def issubset(self, other: GroupSet) -> bool:
        return bool(other.contains_mask(self).all())

    def __le__(self, other):
        return self.issubset(other)

    def __eq__(self, other):
        if not isinstance(other, GroupSet):
            return NotImplemented
        if self.n != other.n or self.den != other.den or self.cplx != other.cplx:
            return False
        if self.data.shape != other.data.shape:
            return False
        return bool((self.data == other.data).all())

    def __hash__(self):
        return hash(self.digest())

    def __repr__(self):
        return f"GroupSet(n={self.n}, size={len(self)})"

    # -- set algebra ----------------------------------------------------------
    def select(self, mask) -> GroupSet:
        mask = np.asarray(mask)
        return GroupSet._from_canonical(self.n, self.den, self.data[mask], self.cplx)._renormalized()

    def take(self, idx) -> GroupSet:
        idx = np.sort(np.asarray(idx, dtype=np.int64))
        return GroupSet._from_canonical(self.n, self.den, self.data[idx], self.cplx)._renormalized()

    def _renormalized(self) -> GroupSet:
        # subsets of canonical rows stay sorted/distinct; only den/cplx can shrink
        return GroupSet._from_raw(self.n, self.den, self.data, self.cplx) if len(self.data) else GroupSet.empty(self.n)

    def union(self, *others: GroupSet) -> GroupSet:
        parts = [self, *others]
        if any(p.n != self.n for p in parts):
            raise DimensionError("dimension mismatch")
        parts = [p for p in parts if len(p)]
        if not parts:
            return GroupSet.empty(self.n)
        cplx = any(p.cplx for p in parts)
        den = _lcm(p.den for p in parts)
        arrays = []
        for p in parts:
            d = K.widen(p.data, p.n, p.cplx) if cplx else p.data
            arrays.append(K.scale(d, den // p.den))
        if any(K.is_obj(a) for a in arrays):
            arrays = [K.to_obj(a) for a in arrays]
        return GroupSet._from_raw(self.n, den, np.concatenate(arrays, axis=0), cplx)

    def __or__(self, other):
        return self.union(other)

    def difference(self, other: GroupSet) -> GroupSet:
        if not len(self):
            return self
        return self.select(~other.contains_mask(self))

    def __sub__(self, other):
        return self.difference(other)

    def intersection(self, other: GroupSet) -> GroupSet:
        return self.select(other.contains_mask(self))

    def __and__(self, other):
        return self.intersection(other)

    def contains_identity(self) -> bool:
        return Matrix.identity(self.n) in self

    def is_symmetric(self) -> bool:
        return inverse_set(self) == self

    def map(self, fn: Callable[[Matrix], Matrix]) -> GroupSet:
        mats = [fn(g) for g in self]
        if not mats:
            raise PreconditionError("cannot map an empty set")
        return GroupSet(mats)

    # -- identity of content --------------------------------------------------
    def digest(self) -> str:
        """sha256 of the canonical content (independent of storage dtype)."""
        h = hashlib.sha256()
        h.update(f"{self.n};{self.den};{int(self.cplx)};{len(self)};".encode())
        if K.is_obj(self.data):
            h.update(b"T")
            h.update(";".join(",".join(str(int(x)) for x in row) for row in self.data.tolist()).encode())
        else:
            h.update(b"B")
            h.update(np.ascontiguousarray(self.data, dtype="<i8").tobytes())
        return h.hexdigest()


def _normalize(n, den, data, cplx):
    nn = n * n
    if len(data) == 0:
        return n, 1, np.zeros((0, nn), dtype=np.int64), False
    if den <= 0:
        raise PreconditionError("denominator must be positive")
    if cplx:
        im = data[:, nn:]
        if not (im != 0).any():
            data = data[:, :nn]
            cplx = False
    data, _ = K.unique(data)
    g = K.gcd_all(data, den)
    if g > 1:
        data = data // g
        den //= g
    data = K.fit(data) if K.is_obj(data) else data
    data = K.lex_sorted(data)
    if not K.is_obj(data):
        data = np.ascontiguousarray(data)
    return n, den, data, cplx


def as_groupset(x, n: int | None = None) -> GroupSet:
    if isinstance(x, GroupSet):
        return x
    return GroupSet(list(x), n=n)


# ---------------------------------------------------------------------------
# product-set calculus


def _same_dim(A: GroupSet, B: GroupSet):
    if A.n != B.n:
        raise DimensionError(f"dimension mismatch: {A.n} vs {B.n}")


def product_set(A: GroupSet, B: GroupSet, cap=None) -> GroupSet:
    """{a*b : a in A, b in B}, exactly, or CapExceeded."""
    _same_dim(A, B)
    cap = _cap(cap)
    if not len(A) or not len(B):
        return GroupSet.empty(A.n)
    cplx = A.cplx or B.cplx
    acc = K.Accumulator(cap.max_elements, "product_set")
    for chunk in K.pair_products(A.n, A.data, A.cplx, B.data, B.cplx):
        acc.add(chunk)
    data, _ = acc.result(K.width(A.n, cplx))
    out = GroupSet._from_raw(A.n, A.den * B.den, data, cplx)
    cap.check(len(out), "product_set")
    return out


def product_counts(A: GroupSet, B: GroupSet, cap=None):
    """Distinct products a*b with their representation counts r(x)."""
    _same_dim(A, B)
    cap = _cap(cap)
    cplx = A.cplx or B.cplx
    acc = K.Accumulator(cap.max_elements, "product_counts", with_counts=True)
    for chunk in K.pair_products(A.n, A.data, A.cplx, B.data, B.cplx):
        acc.add(chunk)
    data, counts = acc.result(K.width(A.n, cplx))
    S = GroupSet._from_raw(A.n, A.den * B.den, data, cplx)
    # re-associate the counts with the canonical order of S
    raw = Batch(A.n, A.den * B.den, data, cplx)
    pos = S.positions(raw)
    aligned = np.zeros(len(S), dtype=np.int64)
    aligned[pos] = counts
    return S, aligned


def pair_batch(A: GroupSet | Batch, B: GroupSet | Batch) -> Batch:
    """All products a*b in a-major order (row i*|B| + j is A[i]*B[j])."""
    if A.n != B.n:
        raise DimensionError(f"dimension mismatch: {A.n} vs {B.n}")
    cplx = A.cplx or B.cplx
    chunks = list(K.pair_products(A.n, A.data, A.cplx, B.data, B.cplx))
    if not chunks:
        return Batch(A.n, 1, np.zeros((0, K.width(A.n, cplx)), dtype=np.int64), cplx)
    if len(chunks) > 1 and any(K.is_obj(c) for c in chunks):
        chunks = [K.to_obj(c) for c in chunks]
    data = chunks[0] if len(chunks) == 1 else np.concatenate(chunks, axis=0)
    return Batch(A.n, A.den * B.den, data, cplx)


def left_translate(g: Matrix, A: GroupSet | Batch) -> Batch:
    """g*a for each a in A, aligned with A."""
    return pair_batch(Batch.from_matrices([g]), A)


def right_translate(A: GroupSet | Batch, g: Matrix) -> Batch:
    """a*g for each a in A, aligned with A."""
    return pair_batch(A, Batch.from_matrices([g]))


def inverse_set(A: GroupSet) -> GroupSet:
    if not len(A):
        return A
    return A.batch().inverse().to_set()


def symmetrize(A: GroupSet) -> GroupSet:
    """A u A^-1 u {id}."""
    return A.union(inverse_set(A), GroupSet.identity(A.n))


def power_sequence(A: GroupSet, m: int, cap=None) -> list[GroupSet]:
    """[A^1, ..., A^m].

    With id in A each step only multiplies the newest layer:
    A^(k+1) = A^k u (A^k minus A^(k-1)) * A.
    """
    if m < 1:
        raise PreconditionError("power must be >= 1")
    cap = _cap(cap)
    seq = [A]
    if not len(A):
        return [A] * m
    if A.contains_identity():
        prev = GroupSet.identity(A.n)
        cur = A
        for k in range(1, m):
            frontier = cur.difference(prev)
            nxt = cur.union(product_set(frontier, A, cap)) if len(frontier) else cur
            cap.check(len(nxt), f"power {k + 1}")
            prev, cur = cur, nxt
            seq.append(cur)
    else:
        cur = A
        for k in range(1, m):
            cur = product_set(cur, A, cap)
            seq.append(cur)
    return seq


def power_set(A: GroupSet, m: int, cap=None) -> GroupSet:
    return power_sequence(A, m, cap)[-1]


def pm_power_set(A: GroupSet, m: int, cap=None) -> GroupSet:
    """A^{+-m}: products of m factors each drawn from A or A^-1."""
    return power_set(A.union(inverse_set(A)), m, cap)


def intersect_subgroup(A: GroupSet, member) -> GroupSet:
    """{a in A : member(a)}; ``member`` is a Matrix predicate or a SubgroupPredicate."""
    if hasattr(member, "mask"):
        return A.select(member.mask(A))
    return A.select(np.array([bool(member(g)) for g in A], dtype=bool))


# ---------------------------------------------------------------------------
# wire format


def encode_groupset(A: GroupSet) -> dict:
    return {"n": A.n, "elements": [encode_matrix(g) for g in A]}


def decode_groupset(obj) -> GroupSet:
    try:
        n = int(obj["n"])
        elems = obj["elements"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad GroupSet object: {exc}") from exc
    if not isinstance(elems, list):
        raise ParseError("GroupSet elements must be a list")
    mats = [decode_matrix(e) for e in elems]
    if any(m.n != n for m in mats):
        raise ParseError("GroupSet element dimension differs from declared n")
    return GroupSet(mats, n=n)
