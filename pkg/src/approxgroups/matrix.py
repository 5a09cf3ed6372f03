"""Exact invertible matrices over Q(i) and the structural maps used by the
decomposition: the two corner projections, the corner subgroup H = {m_lambda},
the diagonal ratio x_11/x_nn, and the Jordan splitting.

Commutator convention throughout: [g, h] = g h g^-1 h^-1.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import poly
from .errors import (
    DimensionError,
    NotUpperTriangularError,
    ParseError,
    PreconditionError,
)
from .scalar import ONE, ZERO, GaussianRational, decode_gq, encode_gq


class Matrix:
    """An n x n invertible matrix with Gaussian-rational entries (row-major)."""

    __slots__ = ("_hash", "entries", "n")

    def __init__(self, rows):
        rows = [list(r) for r in rows]
        n = len(rows)
        if n == 0:
            raise DimensionError("matrix must have at least one row")
        if any(len(r) != n for r in rows):
            raise DimensionError("matrix must be square")
        self.n = n
        self.entries = tuple(GaussianRational.coerce(x) for r in rows for x in r)
        self._hash = None
        if self.det().is_zero():
            raise PreconditionError("matrix is singular (determinant 0)")

    @classmethod
    def _trusted(cls, n: int, entries) -> Matrix:
        # entries already canonical and the matrix known to be invertible
        obj = object.__new__(cls)
        obj.n = n
        obj.entries = tuple(entries)
        obj._hash = None
        return obj

    @classmethod
    def identity(cls, n: int) -> Matrix:
        return cls._trusted(n, [ONE if i == j else ZERO for i in range(n) for j in range(n)])

    # -- access ---------------------------------------------------------------
    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.n + j]

    @property
    def rows(self):
        n = self.n
        return [list(self.entries[i * n:(i + 1) * n]) for i in range(n)]

    def key(self):
        """Canonical sort key: real parts row-major, then imaginary parts."""
        return tuple(e.re for e in self.entries) + tuple(e.im for e in self.entries)

    def is_upper_triangular(self) -> bool:
        n = self.n
        return all(self.entries[i * n + j].is_zero() for i in range(n) for j in range(i))

    def is_diagonal(self) -> bool:
        n = self.n
        return all(self.entries[i * n + j].is_zero() for i in range(n) for j in range(n) if i != j)

    def is_unitriangular(self) -> bool:
        n = self.n
        return self.is_upper_triangular() and all(self.entries[i * n + i] == ONE for i in range(n))

    def is_identity(self) -> bool:
        n = self.n
        for i in range(n):
            for j in range(n):
                e = self.entries[i * n + j]
                if (e != ONE) if i == j else (not e.is_zero()):
                    return False
        return True

    # -- arithmetic -----------------------------------------------------------
    def __matmul__(self, other: Matrix) -> Matrix:
        return mat_mul(self, other)

    __mul__ = __matmul__

    def inverse(self) -> Matrix:
        return mat_inv(self)

    def __pow__(self, k: int) -> Matrix:
        if k < 0:
            return self.inverse() ** (-k)
        result = Matrix.identity(self.n)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def scaled(self, c) -> Matrix:
        c = GaussianRational.coerce(c)
        if c.is_zero():
            raise PreconditionError("scaling by zero gives a singular matrix")
        return Matrix._trusted(self.n, [e * c for e in self.entries])

    def det(self) -> GaussianRational:
        n = self.n
        a = [list(self.entries[i * n:(i + 1) * n]) for i in range(n)]
        det = ONE
        for col in range(n):
            pivot = next((r for r in range(col, n) if not a[r][col].is_zero()), None)
            if pivot is None:
                return ZERO
            if pivot != col:
                a[col], a[pivot] = a[pivot], a[col]
                det = -det
            p = a[col][col]
            det = det * p
            inv_p = p.inverse()
            for r in range(col + 1, n):
                f = a[r][col]
                if f.is_zero():
                    continue
                f = f * inv_p
                row_r, row_c = a[r], a[col]
                for c in range(col, n):
                    row_r[c] = row_r[c] - f * row_c[c]
        return det

    # -- value semantics ------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.n == other.n and self.entries == other.entries

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, self.entries))
        return self._hash

    def __lt__(self, other):
        return self.key() < other.key()

    def __repr__(self):
        body = "; ".join(", ".join(str(x) for x in row) for row in self.rows)
        return f"Matrix([{body}])"


# ---------------------------------------------------------------------------
# constructors


def identity(n: int) -> Matrix:
    return Matrix.identity(n)


def elementary(n: int, i: int, j: int, c=1) -> Matrix:
    """id + c*E_ij (0-based indices, i != j)."""
    if i == j:
        raise PreconditionError("elementary matrix needs i != j")
    entries = list(Matrix.identity(n).entries)
    entries[i * n + j] = GaussianRational.coerce(c)
    return Matrix._trusted(n, entries)


def diag(*values) -> Matrix:
    vals = [GaussianRational.coerce(v) for v in values]
    if any(v.is_zero() for v in vals):
        raise PreconditionError("diagonal entries must be nonzero")
    n = len(vals)
    return Matrix._trusted(n, [vals[i] if i == j else ZERO for i in range(n) for j in range(n)])


def scalar_matrix(c, n: int) -> Matrix:
    return diag(*([c] * n))


# ---------------------------------------------------------------------------
# group operations


def _check_same_dim(g: Matrix, h: Matrix):
    if g.n != h.n:
        raise DimensionError(f"dimension mismatch: {g.n} vs {h.n}")


def mat_mul(g: Matrix, h: Matrix) -> Matrix:
    _check_same_dim(g, h)
    n = g.n
    a, b = g.entries, h.entries
    out = []
    for i in range(n):
        row = a[i * n:(i + 1) * n]
        for j in range(n):
            acc = ZERO
            for k in range(n):
                x = row[k]
                if x.is_zero():
                    continue
                y = b[k * n + j]
                if y.is_zero():
                    continue
                acc = acc + x * y
            out.append(acc)
    return Matrix._trusted(n, out)


def mat_inv(g: Matrix) -> Matrix:
    """Exact inverse by Gauss-Jordan elimination."""
    n = g.n
    a = [list(g.entries[i * n:(i + 1) * n]) + [ONE if i == j else ZERO for j in range(n)] for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if not a[r][col].is_zero()), None)
        if pivot is None:
            raise PreconditionError("matrix is singular")
        a[col], a[pivot] = a[pivot], a[col]
        inv_p = a[col][col].inverse()
        a[col] = [x * inv_p for x in a[col]]
        for r in range(n):
            if r == col or a[r][col].is_zero():
                continue
            f = a[r][col]
            a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return Matrix._trusted(n, [x for row in a for x in row[n:]])


def commutator(g: Matrix, h: Matrix) -> Matrix:
    """[g, h] = g h g^-1 h^-1."""
    _check_same_dim(g, h)
    return mat_mul(mat_mul(g, h), mat_mul(mat_inv(g), mat_inv(h)))


# ---------------------------------------------------------------------------
# structural maps on Upp_n


def _require_upper(g: Matrix):
    if not g.is_upper_triangular():
        raise NotUpperTriangularError("matrix is not upper triangular")


def _submatrix(g: Matrix, lo: int, hi: int) -> Matrix:
    n = g.n
    return Matrix._trusted(hi - lo, [g.entries[i * n + j] for i in range(lo, hi) for j in range(lo, hi)])


def pi_project(g: Matrix) -> Matrix:
    """Delete the last row and column."""
    _require_upper(g)
    if g.n < 2:
        raise DimensionError("projection needs n >= 2")
    return _submatrix(g, 0, g.n - 1)


def pi_prime_project(g: Matrix) -> Matrix:
    """Delete the first row and column."""
    _require_upper(g)
    if g.n < 2:
        raise DimensionError("projection needs n >= 2")
    return _submatrix(g, 1, g.n)


def corner_make(lam, n: int) -> Matrix:
    """m_lambda = id + lambda*E_1n."""
    if n < 2:
        raise DimensionError("corner subgroup needs n >= 2")
    entries = list(Matrix.identity(n).entries)
    entries[n - 1] = GaussianRational.coerce(lam)
    return Matrix._trusted(n, entries)


def corner_extract(g: Matrix):
    """lambda if g = m_lambda, else None."""
    n = g.n
    if n < 2:
        return None
    for i in range(n):
        for j in range(n):
            if i == 0 and j == n - 1:
                continue
            e = g.entries[i * n + j]
            if (e != ONE) if i == j else (not e.is_zero()):
                return None
    return g.entries[n - 1]


def diag_ratio(g: Matrix) -> GaussianRational:
    """x_11 / x_nn."""
    _require_upper(g)
    return g.entries[0] / g.entries[-1]


# ---------------------------------------------------------------------------
# Jordan splitting


@dataclass(frozen=True)
class JordanPair:
    semisimple: Matrix
    unipotent: Matrix


def poly_eval_matrix(p, g: Matrix) -> Matrix:
    """p(g) by Horner's rule (may be singular, so built without the det check)."""
    n = g.n
    result = [ZERO] * (n * n)
    for c in reversed(p):
        prod = _raw_mul(result, g.entries, n)
        for i in range(n):
            prod[i * n + i] = prod[i * n + i] + c
        result = prod
    return result


def _raw_mul(a, b, n):
    out = []
    for i in range(n):
        for j in range(n):
            acc = ZERO
            for k in range(n):
                x = a[i * n + k]
                if x.is_zero():
                    continue
                acc = acc + x * b[k * n + j]
            out.append(acc)
    return out


def jordan_split(g: Matrix) -> JordanPair:
    """Multiplicative Jordan decomposition g = s u of an upper-triangular g.

    s = p(g) where p = lambda_i mod (x - lambda_i)^{m_i} for each distinct
    eigenvalue (the diagonal entries), found by polynomial CRT; u = s^-1 g.
    """
    _require_upper(g)
    n = g.n
    mult: dict[GaussianRational, int] = {}
    for i in range(n):
        lam = g.entries[i * n + i]
        mult[lam] = mult.get(lam, 0) + 1
    eigen = sorted(mult, key=GaussianRational.sort_key)
    if len(eigen) == 1:
        s = scalar_matrix(eigen[0], n)
    else:
        moduli = [poly.linear_power(lam, mult[lam]) for lam in eigen]
        p = poly.crt([[lam] for lam in eigen], moduli)
        s = Matrix._trusted(n, poly_eval_matrix(p, g))
    u = mat_mul(mat_inv(s), g)
    return JordanPair(s, u)


def minimal_polynomial(g: Matrix):
    """Monic minimal polynomial via the first linear dependency among I, g, g^2, ..."""
    n = g.n
    vecs = []  # reduced basis rows: (pivot index, vector, combination coefficients)
    power = list(Matrix.identity(n).entries)
    for k in range(n + 1):
        v = list(power)
        combo = [ZERO] * k + [ONE]
        for piv, bv, bc in vecs:
            f = v[piv]
            if f.is_zero():
                continue
            v = [x - f * y for x, y in zip(v, bv)]
            combo = [
                (combo[i] if i < len(combo) else ZERO) - f * (bc[i] if i < len(bc) else ZERO)
                for i in range(max(len(combo), len(bc)))
            ]
        piv = next((i for i, x in enumerate(v) if not x.is_zero()), None)
        if piv is None:
            return poly.monic(poly.trim(combo))
        inv = v[piv].inverse()
        vecs.append((piv, [x * inv for x in v], [c * inv for c in combo]))
        power = _raw_mul(power, g.entries, n)
    raise AssertionError("Cayley-Hamilton violated")  # pragma: no cover


def unipotent_nilpotency_ok(u: Matrix) -> bool:
    """(u - id)^n == 0 exactly."""
    n = u.n
    m = [u.entries[i * n + j] - (ONE if i == j else ZERO) for i in range(n) for j in range(n)]
    acc = list(m)
    for _ in range(n - 1):
        acc = _raw_mul(acc, m, n)
    return all(x.is_zero() for x in acc)


# ---------------------------------------------------------------------------
# wire format


def encode_matrix(g: Matrix) -> dict:
    return {"n": g.n, "rows": [[encode_gq(x) for x in row] for row in g.rows]}


def decode_matrix(obj) -> Matrix:
    try:
        n = int(obj["n"])
        rows = obj["rows"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad matrix object: {exc}") from exc
    if not isinstance(rows, list) or len(rows) != n or any(not isinstance(r, list) or len(r) != n for r in rows):
        raise ParseError(f"matrix rows do not form an {n}x{n} grid")
    try:
        return Matrix([[decode_gq(x) for x in row] for row in rows])
    except PreconditionError as exc:
        raise ParseError(str(exc)) from exc
