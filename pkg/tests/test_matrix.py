import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import raw_mul

from approxgroups.errors import (
    DimensionError,
    NotUpperTriangularError,
    ParseError,
    PreconditionError,
)
from approxgroups.matrix import (
    Matrix,
    commutator,
    corner_extract,
    corner_make,
    decode_matrix,
    diag,
    diag_ratio,
    elementary,
    encode_matrix,
    jordan_split,
    mat_inv,
    mat_mul,
    minimal_polynomial,
    pi_prime_project,
    pi_project,
    unipotent_nilpotency_ok,
)
from approxgroups.poly import is_squarefree
from approxgroups.scalar import GaussianRational, I, gq


def upper(rng, n, pool=(0, 1, -1, 2, -2, Fraction(1, 2), 3)):
    nz = [v for v in pool if v != 0]
    return Matrix([[rng.choice(nz) if i == j else (rng.choice(pool) if j > i else 0) for j in range(n)] for i in range(n)])


def x12(k=1, n=2):
    return elementary(n, 0, 1, k)


def test_unipotent_addition_law():
    a, b = Fraction(2, 3), -5
    assert mat_mul(x12(a), x12(b)) == x12(a + b)


def test_identity_neutral():
    g = Matrix([[2, 1], [0, 3]])
    assert g @ Matrix.identity(2) == g


def test_corner_addition():
    assert corner_make(2, 3) @ corner_make(5, 3) == corner_make(7, 3)


def test_inverse_examples():
    assert mat_inv(diag(2, Fraction(1, 2))) == diag(Fraction(1, 2), 2)
    assert mat_inv(x12(3)) == x12(-3)
    assert mat_inv(corner_make(gq(1, 2), 4)) == corner_make(gq(-1, -2), 4)


def test_singular_rejected():
    with pytest.raises(PreconditionError):
        Matrix([[1, 2], [2, 4]])


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        mat_mul(Matrix.identity(2), Matrix.identity(3))


def test_commutator_examples():
    x, y = elementary(3, 0, 1), elementary(3, 1, 2)
    assert commutator(x, y) == elementary(3, 0, 2)
    assert commutator(diag(2, 1), x12()) == x12()
    assert commutator(diag(2, 3), diag(5, 7)).is_identity()


def test_projections():
    g = Matrix([[1, 2, 3], [0, 4, 5], [0, 0, 6]])
    assert pi_project(g) == Matrix([[1, 2], [0, 4]])
    assert pi_prime_project(g) == Matrix([[4, 5], [0, 6]])
    assert pi_project(Matrix.identity(4)) == Matrix.identity(3)
    with pytest.raises(NotUpperTriangularError):
        pi_project(Matrix([[1, 0], [1, 1]]))
    with pytest.raises(DimensionError):
        pi_prime_project(Matrix([[2]]))


def test_corner_make_extract():
    assert corner_make(7, 3) == elementary(3, 0, 2, 7)
    assert corner_extract(Matrix.identity(3)) == 0
    assert corner_extract(elementary(3, 0, 1)) is None
    assert corner_extract(corner_make(I, 5)) == I


def test_diag_ratio():
    assert diag_ratio(diag(2, 1, 4)) == Fraction(1, 2)
    assert diag_ratio(elementary(4, 0, 3, 9)) == 1


def test_conjugation_identity_sampled():
    rng = random.Random(11)
    for _ in range(50):
        n = rng.choice([2, 3, 4])
        y = upper(rng, n, (0, 1, -1, 2, I, Fraction(1, 3)))
        lam = GaussianRational(rng.randint(-9, 9), rng.randint(-3, 3))
        lhs = y @ corner_make(lam, n) @ y.inverse()
        assert lhs == corner_make(diag_ratio(y) * lam, n)


def test_products_agree_with_raw_fractions():
    rng = random.Random(3)
    for _ in range(40):
        n = rng.randint(1, 4)
        g, h = upper(rng, n), upper(rng, n)
        raw = raw_mul([[e.re for e in r] for r in g.rows], [[e.re for e in r] for r in h.rows])
        assert [[e.re for e in r] for r in (g @ h).rows] == raw


def test_jordan_oracles():
    g = Matrix([[2, 1], [0, 3]])
    p = jordan_split(g)
    assert p.semisimple == g and p.unipotent.is_identity()
    assert is_squarefree(minimal_polynomial(p.semisimple))

    g = Matrix([[2, 1], [0, 2]])
    p = jordan_split(g)
    assert p.semisimple == diag(2, 2)
    assert p.unipotent == Matrix([[1, Fraction(1, 2)], [0, 1]])

    u = Matrix([[1, 4, 1], [0, 1, 2], [0, 0, 1]])
    p = jordan_split(u)
    assert p.semisimple.is_identity() and p.unipotent == u


def jordan_ok(g):
    p = jordan_split(g)
    s, u = p.semisimple, p.unipotent
    return s @ u == g and s @ u == u @ s and unipotent_nilpotency_ok(u) and is_squarefree(minimal_polynomial(s))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.randoms(use_true_random=False))
def test_jordan_properties(n, rng):
    pool = (0, 1, -1, 2, Fraction(1, 2), I, 3, 3)  # repeated 3 makes repeated eigenvalues likely
    assert jordan_ok(upper(rng, n, pool))


def test_jordan_complex_eigenvalues():
    g = Matrix([[I, 1, 0], [0, I, 5], [0, 0, -I]])
    assert jordan_ok(g)
    assert jordan_split(g).semisimple != g


def test_matrix_wire_roundtrip():
    g = Matrix([[gq(1, 2), Fraction(-3, 7)], [0, 5**40]])
    assert decode_matrix(encode_matrix(g)) == g
    with pytest.raises(ParseError):
        decode_matrix({"n": 2, "rows": [[["1", "1", "0", "1"]]]})
    with pytest.raises(ParseError):
        decode_matrix({"rows": []})
