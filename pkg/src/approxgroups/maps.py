"""Homomorphisms and subgroup membership tests that act on whole sets at once.

The named ones (``pi``, ``pi_prime``, ``corner``, ``diagonal`` ...) work
directly on the kernel rows; anything else falls back to a per-matrix
Python callable.
"""

from __future__ import annotations

from collections.abc import Callable

import numpy as np

from . import _kernel as K
from .errors import DimensionError, NotUpperTriangularError, PreconditionError
from .matrix import (
    Matrix,
    commutator,
    corner_extract,
    elementary,
    pi_prime_project,
    pi_project,
)
from .sets import Batch, GroupSet


def _cols(n, cells, cplx):
    idx = [i * n + j for i, j in cells]
    if cplx:
        idx += [n * n + k for k in idx]
    return np.array(idx, dtype=np.int64)


def _lower_cells(n):
    return [(i, j) for i in range(n) for j in range(i)]


def upper_triangular_mask(A: GroupSet | Batch) -> np.ndarray:
    if A.n == 1 or not len(A):
        return np.ones(len(A), dtype=bool)
    cols = _cols(A.n, _lower_cells(A.n), A.cplx)
    return (A.data[:, cols] == 0).all(axis=1)


def require_upper(A: GroupSet | Batch):
    if not upper_triangular_mask(A).all():
        raise NotUpperTriangularError("set contains a matrix that is not upper triangular")


# ---------------------------------------------------------------------------
# homomorphisms


class Homomorphism:
    """A group homomorphism given by a Matrix -> Matrix function."""

    def __init__(self, name: str, fn: Callable[[Matrix], Matrix]):
        self.name = name
        self.fn = fn

    def __call__(self, g: Matrix) -> Matrix:
        return self.fn(g)

    def images(self, A: GroupSet) -> Batch:
        """Image of every element of A, in A's canonical order."""
        mats = [self.fn(g) for g in A]
        if not mats:
            raise PreconditionError("image of an empty set")
        return Batch.from_matrices(mats)

    def image(self, A: GroupSet) -> GroupSet:
        return self.images(A).to_set()

    def __repr__(self):
        return f"Homomorphism({self.name!r})"


class CornerProjection(Homomorphism):
    """pi (drop last row/column) or pi' (drop first row/column)."""

    def __init__(self, name: str, drop_first: bool):
        super().__init__(name, pi_prime_project if drop_first else pi_project)
        self.drop_first = drop_first

    def images(self, A: GroupSet) -> Batch:
        n = A.n
        if n < 2:
            raise DimensionError("projection needs n >= 2")
        require_upper(A)
        lo = 1 if self.drop_first else 0
        cells = [(i, j) for i in range(lo, lo + n - 1) for j in range(lo, lo + n - 1)]
        cols = _cols(n, cells, A.cplx)
        return Batch(n - 1, A.den, A.data[:, cols], A.cplx)


PI = CornerProjection("pi", drop_first=False)
PI_PRIME = CornerProjection("pi_prime", drop_first=True)

HOMOMORPHISMS = {"pi": PI, "pi_prime": PI_PRIME, "pi-prime": PI_PRIME}


def homomorphism(tag) -> Homomorphism:
    if isinstance(tag, Homomorphism):
        return tag
    if callable(tag):
        return Homomorphism(getattr(tag, "__name__", "user"), tag)
    try:
        return HOMOMORPHISMS[tag]
    except KeyError:
        raise PreconditionError(f"unknown homomorphism {tag!r}") from None


# ---------------------------------------------------------------------------
# subgroup predicates


class SubgroupPredicate:
    """Membership test for a subgroup H, usable on single matrices or whole sets."""

    def __init__(self, name: str, test: Callable[[Matrix], bool], mask_fn=None):
        self.name = name
        self.test = test
        self._mask_fn = mask_fn

    def __call__(self, g: Matrix) -> bool:
        return bool(self.test(g))

    def mask(self, A: GroupSet | Batch) -> np.ndarray:
        if not len(A):
            return np.zeros(0, dtype=bool)
        if self._mask_fn is not None:
            return self._mask_fn(A)
        mats = A.matrices
        return np.array([self.test(g) for g in mats], dtype=bool)

    def __repr__(self):
        return f"SubgroupPredicate({self.name!r})"


def _pattern_mask(A, fixed):
    """Rows whose listed cells equal given multiples of the denominator."""
    n, den = A.n, A.den
    re, im = K.split(A.data, n, A.cplx)
    mask = np.ones(len(A), dtype=bool)
    for (i, j), val in fixed.items():
        col = i * n + j
        target = val * den
        mask &= re[:, col] == target
        if im is not None:
            mask &= im[:, col] == 0
    return mask


def _diagonal_mask(A):
    n = A.n
    cells = [(i, j) for i in range(n) for j in range(n) if i != j]
    if not cells:
        return np.ones(len(A), dtype=bool)
    cols = _cols(n, cells, A.cplx)
    return (A.data[:, cols] == 0).all(axis=1)


def _unitriangular_mask(A):
    n = A.n
    fixed = {(i, i): 1 for i in range(n)}
    fixed.update({(i, j): 0 for i, j in _lower_cells(n)})
    return _pattern_mask(A, fixed)


def _corner_mask(A):
    n = A.n
    if n < 2:
        return np.zeros(len(A), dtype=bool)
    fixed = {(i, j): int(i == j) for i in range(n) for j in range(n) if (i, j) != (0, n - 1)}
    return _pattern_mask(A, fixed)


def _is_center_unitriangular(g: Matrix) -> bool:
    n = g.n
    if not g.is_unitriangular():
        return False
    for i in range(n - 1):
        if not commutator(g, elementary(n, i, i + 1)).is_identity():
            return False
    return True


def _center_mask(A):
    n = A.n
    uni = _unitriangular_mask(A)
    if n < 2 or not uni.any():
        return uni
    sel = np.flatnonzero(uni)
    b = Batch(n, A.den, A.data[sel], A.cplx)
    ok = np.ones(len(sel), dtype=bool)
    for i in range(n - 1):
        e = Batch.from_matrices([elementary(n, i, i + 1)] * len(sel))
        # g*e and e*g carry the same denominator, so rows compare directly
        left, right = b.times(e), e.times(b)
        ok &= (left.data == right.data).all(axis=1)
    out = np.zeros(len(A), dtype=bool)
    out[sel] = ok
    return out


UPPER_TRIANGULAR = SubgroupPredicate("upper_triangular", Matrix.is_upper_triangular, upper_triangular_mask)
DIAGONAL = SubgroupPredicate("diagonal", Matrix.is_diagonal, _diagonal_mask)
UNITRIANGULAR = SubgroupPredicate("unitriangular", Matrix.is_unitriangular, _unitriangular_mask)
CORNER = SubgroupPredicate("corner", lambda g: _corner_test(g), _corner_mask)
CENTER_UNITRIANGULAR = SubgroupPredicate("center_unitriangular", _is_center_unitriangular, _center_mask)
EVERYTHING = SubgroupPredicate("all", lambda g: True, lambda A: np.ones(len(A), dtype=bool))


def _corner_test(g: Matrix) -> bool:
    return g.n >= 2 and corner_extract(g) is not None


PREDICATES = {
    p.name: p for p in (UPPER_TRIANGULAR, DIAGONAL, UNITRIANGULAR, CORNER, CENTER_UNITRIANGULAR, EVERYTHING)
}
PREDICATES["center"] = CENTER_UNITRIANGULAR


def predicate(tag) -> SubgroupPredicate:
    if isinstance(tag, SubgroupPredicate):
        return tag
    if callable(tag):
        return SubgroupPredicate(getattr(tag, "__name__", "user"), tag)
    try:
        return PREDICATES[str(tag).replace("-", "_")]
    except KeyError:
        raise PreconditionError(f"unknown subgroup predicate {tag!r}") from None
