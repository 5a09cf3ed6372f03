import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from approxgroups.errors import NotUpperTriangularError, PreconditionError
from approxgroups.families import heisenberg_ball, random_upper_triangular
from approxgroups.maps import PI, PI_PRIME, homomorphism, predicate, require_upper
from approxgroups.matrix import (
    Matrix,
    corner_make,
    diag,
    elementary,
    pi_prime_project,
    pi_project,
)
from approxgroups.scalar import I
from approxgroups.sets import GroupSet

NAMES = ["upper_triangular", "diagonal", "unitriangular", "corner", "center_unitriangular", "all"]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 4))
def test_vectorized_projections_match_matrix_maps(seed, n):
    A = random_upper_triangular(n, 12, pool=("0", "1", "-1", "1/3", "i", "2-i"), seed=seed)
    assert set(PI.image(A)) == {pi_project(g) for g in A}
    assert set(PI_PRIME.image(A)) == {pi_prime_project(g) for g in A}
    imgs = PI.images(A).matrices
    assert imgs == [pi_project(g) for g in A]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 4))
def test_vectorized_predicates_match_scalar_tests(seed, n):
    A = random_upper_triangular(n, 10, pool=("0", "1", "1", "1", "-1", "i"), seed=seed)
    extra = [Matrix.identity(n)] + ([corner_make(3, n), elementary(n, 0, n - 1, I)] if n >= 2 else [])
    A = A.union(GroupSet(extra, n=n))
    for name in NAMES:
        p = predicate(name)
        assert list(p.mask(A)) == [p(g) for g in A], name


def test_center_of_heisenberg_ball():
    A = heisenberg_ball(1)
    mask = predicate("center").mask(A)
    assert {g for g, keep in zip(A, mask) if keep} == {Matrix.identity(3), corner_make(1, 3), corner_make(-1, 3)}


def test_center_differs_from_corner_in_dimension_two():
    # in 2x2 every unitriangular matrix is central and is also a corner element
    x = elementary(2, 0, 1, 5)
    assert predicate("center")(x) and predicate("corner")(x)
    y = elementary(4, 1, 3)
    assert not predicate("center")(y) and not predicate("corner")(y)


def test_lookup_aliases_and_errors():
    assert predicate("center-unitriangular") is predicate("center_unitriangular")
    assert homomorphism("pi") is PI and homomorphism("pi_prime") is PI_PRIME
    with pytest.raises(PreconditionError):
        predicate("nonsense")
    with pytest.raises(PreconditionError):
        homomorphism("rho")
    user = predicate(lambda g: g[0, 0] == 2)
    assert list(user.mask(GroupSet([diag(2, 1), diag(3, 1)]))) == [True, False]


def test_require_upper():
    with pytest.raises(NotUpperTriangularError):
        require_upper(GroupSet([Matrix([[0, 1], [1, 0]])]))
    require_upper(GroupSet([diag(2, 3)]))
