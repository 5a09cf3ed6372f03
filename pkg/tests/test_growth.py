from fractions import Fraction

import oracles as O
import pytest

from approxgroups.errors import DimensionError, PreconditionError
from approxgroups.families import (
    dihedral,
    heisenberg_ball,
    random_upper_triangular,
    torsion_diag,
)
from approxgroups.growth import (
    certify_approximate_group,
    certify_control,
    check_approximate_group,
    check_control,
    compose_control,
    fiber_stats,
    finite_index_reduce,
    first_failure,
    growth_stats,
    hom_tripling_report,
    intersection_growth,
    ruzsa_cover,
    solymosi_statistic,
)
from approxgroups.maps import DIAGONAL, predicate
from approxgroups.matrix import Matrix, corner_make, diag, elementary, pi_project
from approxgroups.sets import GroupSet, product_set, symmetrize


def ap(L, n=2):
    return GroupSet([elementary(n, 0, 1, k) for k in range(-L, L + 1)])


# -- growth statistics ------------------------------------------------------


def test_growth_examples():
    r = growth_stats(ap(2))
    assert (r.sizes[1], r.sizes[2], r.sizes[3]) == (5, 9, 13)
    assert r.doubling == Fraction(9, 5) and r.tripling == Fraction(13, 5)
    r = growth_stats(torsion_diag(4), max_power=5)
    assert set(r.sizes.values()) == {4} and r.tripling == 1
    r = growth_stats(GroupSet([diag(2, 3)]))
    assert r.sizes == {1: 1, 2: 1, 3: 1}


def test_growth_rejects_empty():
    with pytest.raises(PreconditionError):
        growth_stats(GroupSet.empty(2))


# -- approximate groups -----------------------------------------------------

# minimal symmetric cover sizes by exhaustive search (oracles.min_symmetric_cover), L = 1..6
MIN_COVER = {1: 2, 2: 2, 3: 2, 4: 2, 5: 2, 6: 2}
# greedy witnesses produced by the package, L = 1..6
GREEDY_K = {1: 3, 2: 3, 3: 3, 4: 3, 5: 3, 6: 3}


@pytest.mark.parametrize("L", range(1, 7))
def test_progression_certificate_against_exhaustive_oracle(L):
    A = ap(L)
    assert O.min_symmetric_cover(set(A)) == MIN_COVER[L]
    cert = certify_approximate_group(A)
    assert cert.valid
    assert cert.K_witness == GREEDY_K[L] == O.greedy_cover_size(set(A), O.power(set(A), 2))
    assert cert.K_witness <= 3


def test_subgroup_certificate():
    cert = certify_approximate_group(torsion_diag(4))
    assert cert.valid and cert.K_witness == 1 and list(cert.X) == [Matrix.identity(2)]


def test_infinite_order_triple():
    g = Matrix([[2, 1], [0, 1]])
    A = GroupSet([Matrix.identity(2), g, g.inverse()])
    cert = certify_approximate_group(A)
    assert cert.valid and cert.K_witness <= 4
    assert O.min_symmetric_cover(set(A)) <= cert.K_witness


def test_certify_preconditions():
    with pytest.raises(PreconditionError):
        certify_approximate_group(GroupSet([elementary(2, 0, 1)]))
    with pytest.raises(PreconditionError):
        certify_approximate_group(GroupSet([Matrix.identity(2), elementary(2, 0, 1)]))


def test_check_names_uncovered_element():
    A = ap(3)
    cert = certify_approximate_group(A)
    smaller = GroupSet(list(cert.X)[1:-1])
    fail = first_failure(check_approximate_group(A, smaller))
    assert fail is not None and fail[0] == "AA_in_XA"
    assert "not covered" in fail[2]


# -- control ----------------------------------------------------------------


def test_control_self():
    A = heisenberg_ball(1)
    cert = certify_control(A, A)
    assert cert.valid and list(cert.X) == [Matrix.identity(3)] and cert.K_witness == 1


@pytest.mark.parametrize("L", [1, 2, 3, 5])
def test_control_progressions(L):
    cert = certify_control(ap(2 * L), ap(L))
    assert cert.valid and len(cert.X) <= 3


def test_control_single_translate():
    B = GroupSet([corner_make(k, 3) for k in range(-2, 3)])
    g = elementary(3, 0, 1, 5)  # commutes with the corner subgroup
    A = GroupSet([g @ b for b in B])
    cert = certify_control(A, B)
    assert cert.valid and list(cert.X) == [g]


def test_control_random_always_valid():
    for seed in range(10):
        A = random_upper_triangular(3, 8, seed=seed)
        B = symmetrize(random_upper_triangular(3, 4, seed=100 + seed))
        cert = certify_control(A, B)
        assert cert.valid
        assert all(ok for _, ok, _ in check_control(A, B, cert.X, cert.K_witness))


def test_control_dimension_mismatch():
    with pytest.raises(DimensionError):
        certify_control(ap(1), ap(1, n=3))


def test_compose_control():
    c1 = certify_control(ap(8), ap(4))
    c2 = certify_control(ap(4), ap(2))
    c = compose_control(c1, c2)
    assert c.valid
    assert len(c.X) <= 2 * len(c1.X) * len(c2.X)
    with pytest.raises(PreconditionError):
        compose_control(c2, c1)


# -- Ruzsa covering ---------------------------------------------------------


def test_ruzsa_progression():
    A, B = ap(4), ap(1)
    cov = ruzsa_cover(A, B)
    assert cov.sizes["BA"] == 11 and cov.sizes["B"] == 3
    assert len(cov.X1) <= 3 and len(cov.X2) <= 3
    assert cov.valid
    assert list(cov.X1) == O.ruzsa_greedy(set(A), set(B))


def test_ruzsa_subgroup_and_trivial_B():
    T = torsion_diag(4)
    cov = ruzsa_cover(T, T)
    assert len(cov.X1) == len(cov.X2) == 1
    A = random_upper_triangular(3, 7, seed=2)
    cov = ruzsa_cover(A, GroupSet.identity(3))
    assert cov.X1 == A and cov.X2 == A


def test_ruzsa_triangle_inequality():
    # |A||B^-1 C| <= |A^-1 B||A^-1 C| style bound: |X||B| <= |BA| is its covering form
    for seed in range(8):
        A = random_upper_triangular(2, 10, seed=seed)
        B = symmetrize(random_upper_triangular(2, 3, seed=50 + seed))
        cov = ruzsa_cover(A, B)
        assert cov.valid
        assert len(cov.X1) * len(B) <= len(product_set(B, A))


def test_ruzsa_needs_symmetric_B():
    with pytest.raises(PreconditionError):
        ruzsa_cover(ap(2), GroupSet([elementary(2, 0, 1)]))


# -- fibres -------------------------------------------------------------------


def test_fibers_heisenberg():
    A = heisenberg_ball(1)
    rep = fiber_stats(A, "pi")
    assert sorted(rep.fiber_sizes) == [1, 1, 5]
    assert rep.ratio == 5 and rep.count == 3
    assert rep.doubling == Fraction(29, 7)
    # the max <= K*min form fails here, the averaged form holds
    assert rep.inequality_holds is False
    assert rep.average_bound_holds is True
    assert sorted(O.fibre_sizes(set(A), pi_project).values()) == [1, 1, 5]


def test_fibers_subgroup_and_single_fibre():
    T = torsion_diag(4, n=3)
    rep = fiber_stats(T, "pi_prime")
    assert rep.ratio == 1
    C = GroupSet([corner_make(k, 3) for k in range(4)])
    rep = fiber_stats(C, "pi")
    assert rep.count == 1 and rep.max == rep.min == 4


# -- homomorphic images -----------------------------------------------------


def test_hom_tripling_heisenberg():
    rep = hom_tripling_report(heisenberg_ball(1), "pi")
    assert rep.identity_holds
    assert rep.image_tripling == Fraction(7, 3)


def test_hom_tripling_subgroup():
    rep = hom_tripling_report(torsion_diag(2, n=3), "pi_prime")
    assert rep.identity_holds and rep.tripling == 1 and rep.image_tripling == 1
    assert rep.log_ratio is None


def test_hom_identity_random():
    for seed in range(6):
        A = random_upper_triangular(3, 12, seed=seed)
        for h in ("pi", "pi_prime"):
            assert hom_tripling_report(A, h).identity_holds


# -- intersections ----------------------------------------------------------


def test_intersection_heisenberg_center():
    rep = intersection_growth(heisenberg_ball(1), "center")
    assert rep.sizes == {2: 5, 3: 7, 4: 9}
    assert rep.monotone


def test_intersection_inside_subgroup_and_whole_group():
    C = symmetrize(GroupSet([corner_make(1, 3)]))
    rep = intersection_growth(C, "corner")
    assert rep.sizes == {2: 5, 3: 7, 4: 9}
    A = heisenberg_ball(1)
    rep = intersection_growth(A, "all")
    g = growth_stats(A, 4)
    assert rep.sizes == {k: g.sizes[k] for k in (2, 3, 4)}


def test_intersection_precondition():
    with pytest.raises(PreconditionError):
        intersection_growth(GroupSet([elementary(3, 0, 1)]), "corner")


# -- sum-product ------------------------------------------------------------


@pytest.mark.parametrize(
    "U, sums, prods, ratio",
    [
        ([1], 1, 1, Fraction(1)),
        ([1, 2], 3, 3, Fraction(81, 32)),
        ([2**k for k in range(5)], 15, 9, Fraction(135**2, 5**5)),
    ],
)
def test_solymosi_oracles(U, sums, prods, ratio):
    rep = solymosi_statistic(U, U, U)
    assert (rep.sizes["U+V"], rep.sizes["UW"]) == (sums, prods) == O.sumset_productset(U, U, U)
    assert rep.squared_ratio == ratio


# -- finite-index reduction -------------------------------------------------


def test_dihedral_reduction():
    A = dihedral(2)
    red = finite_index_reduce(A, DIAGONAL)
    assert red.label is True
    assert red.A_prime == GroupSet([diag(Fraction(2) ** k, Fraction(2) ** -k) for k in range(-2, 3)])
    assert red.pigeonhole_ratio == Fraction(1, 2)
    assert red.S_in_subgroup and red.certificate.valid
    assert all(g.is_diagonal() for g in red.S)


def test_reduction_single_class():
    C = GroupSet([corner_make(k, 3) for k in range(-1, 2)])
    red = finite_index_reduce(C, predicate("corner"))
    assert red.A_prime == C and red.pigeonhole_ratio == 1 and red.S_in_subgroup


def test_reduction_dominant_class():
    A = GroupSet([diag(2**k, 1) for k in range(4)] + [Matrix([[0, 1], [1, 0]])])
    red = finite_index_reduce(A, DIAGONAL)
    assert red.pigeonhole_ratio == Fraction(4, 5)
