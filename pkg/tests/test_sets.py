import random
from fractions import Fraction

import numpy as np
import oracles as O
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from approxgroups.errors import (
    CapExceeded,
    DimensionError,
    ParseError,
    PreconditionError,
)
from approxgroups.families import heisenberg_ball, random_upper_triangular, torsion_diag
from approxgroups.matrix import Matrix, corner_make, diag, elementary
from approxgroups.scalar import I, gq
from approxgroups.sets import (
    GroupSet,
    GrowthCap,
    decode_groupset,
    encode_groupset,
    intersect_subgroup,
    inverse_set,
    pair_batch,
    pm_power_set,
    power_sequence,
    power_set,
    product_counts,
    product_set,
    symmetrize,
)


def ap(L, lo=None, n=2):
    lo = -L if lo is None else lo
    return GroupSet([elementary(n, 0, 1, k) for k in range(lo, L + 1)])


def test_dedup_and_order():
    g = Matrix([[2, 1], [0, 1]])
    A = GroupSet([g, g, Matrix.identity(2), g])
    assert len(A) == 2
    assert list(A) == sorted(A, key=Matrix.key)


def test_mixed_dimensions_rejected():
    with pytest.raises(DimensionError):
        GroupSet([Matrix.identity(2), Matrix.identity(3)])


def test_product_examples():
    assert product_set(ap(1), ap(1)) == ap(2)
    T = torsion_diag(4)
    assert product_set(T, T) == T
    assert product_set(T, GroupSet.identity(2)) == T


def test_inverse_examples():
    assert inverse_set(GroupSet([elementary(2, 0, 1, 3)])) == GroupSet([elementary(2, 0, 1, -3)])
    D = GroupSet([diag(2**k, 1) for k in range(4)])
    assert inverse_set(D) == GroupSet([diag(Fraction(1, 2**k), 1) for k in range(4)])
    assert inverse_set(ap(3)) == ap(3)


def test_powers():
    A = GroupSet([Matrix.identity(2), elementary(2, 0, 1)])
    assert power_set(A, 3) == ap(3, lo=0)
    assert power_set(A, 1) == A
    S = ap(2)
    assert pm_power_set(S, 3) == power_set(S, 3) == ap(6)
    x = GroupSet([diag(2, 1)])
    assert [len(P) for P in power_sequence(x, 4)] == [1, 1, 1, 1]


def test_power_sequence_matches_bruteforce():
    rng_sets = [random_upper_triangular(3, 6, seed=s) for s in range(3)]
    for A in rng_sets:
        for B in (A, symmetrize(A)):
            seq = power_sequence(B, 3)
            ref = set(B)
            for k, P in enumerate(seq, start=1):
                if k > 1:
                    ref = O.prod(ref, set(B))
                assert set(P) == ref


def test_symmetrize():
    x = elementary(3, 1, 2, 4)
    assert symmetrize(GroupSet([x])) == GroupSet([Matrix.identity(3), x, x.inverse()])
    assert symmetrize(GroupSet.empty(2)) == GroupSet.identity(2)
    S = heisenberg_ball(1)
    assert symmetrize(S) == S


def test_intersect_subgroup():
    A = heisenberg_ball(1)
    center = intersect_subgroup(A, lambda g: g[0, 1] == 0 and g[1, 2] == 0)
    assert center == GroupSet([Matrix.identity(3), corner_make(1, 3), corner_make(-1, 3)])
    assert intersect_subgroup(A, lambda g: True) == A


def test_cap_is_loud():
    with pytest.raises(CapExceeded) as err:
        product_set(ap(50), ap(50), cap=GrowthCap(100))
    assert err.value.limit == 100 and err.value.reached > 100
    with pytest.raises(PreconditionError):
        GrowthCap(0)


def test_product_counts():
    A = ap(2)
    S, counts = product_counts(A, A)
    assert S == ap(4)
    assert list(counts) == [1, 2, 3, 4, 5, 4, 3, 2, 1]
    assert counts.sum() == len(A) ** 2


def test_pair_batch_order():
    A, B = ap(1), GroupSet([diag(2, 1), diag(3, 1)])
    pb = pair_batch(A, B)
    mats = pb.matrices
    expected = [a @ b for a in A for b in B]
    assert mats == expected


def test_complex_and_mixed_denominators():
    A = GroupSet([diag(I, 1), Matrix([[1, gq(Fraction(1, 3), -2)], [0, Fraction(5, 7)]])])
    ref = O.prod(set(A), set(A))
    assert set(product_set(A, A)) == ref
    # purely real products of complex entries drop back to the real store
    B = GroupSet([diag(I, I)])
    assert set(power_set(B, 2)) == {diag(-1, -1)}


def test_big_entries_switch_to_exact_store():
    g = Matrix([[3**30, 1], [0, 1]])
    A = GroupSet([g])
    P = power_set(A, 3)
    assert list(P) == [g @ g @ g]
    assert P[0][0, 0] == 3**90
    assert GroupSet([g @ g @ g]).digest() == P.digest()


def test_contains_and_subset():
    A = ap(3)
    assert elementary(2, 0, 1, -3) in A
    assert elementary(2, 0, 1, 4) not in A
    assert Matrix.identity(3) not in A
    assert ap(1).issubset(A) and not A.issubset(ap(1))


def test_union_difference_intersection():
    A, B = ap(3), ap(5, lo=2)
    assert set(A.union(B)) == set(A) | set(B)
    assert set(A.difference(B)) == set(A) - set(B)
    assert set(A.intersection(B)) == set(A) & set(B)


def test_wire_roundtrip_and_errors():
    A = random_upper_triangular(3, 8, seed=4)
    assert decode_groupset(encode_groupset(A)) == A
    with pytest.raises(ParseError):
        decode_groupset({"n": 3, "elements": [{"n": 2, "rows": [[["1", "1", "0", "1"], ["0", "1", "0", "1"]], [["0", "1", "0", "1"], ["1", "1", "0", "1"]]]}]})
    with pytest.raises(ParseError):
        decode_groupset({"elements": []})


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 3), st.integers(1, 9), st.integers(1, 9))
def test_products_match_bruteforce(seed, n, a, b):
    A = random_upper_triangular(n, a, seed=seed)
    B = random_upper_triangular(n, b, seed=seed + 1)
    assert set(product_set(A, B)) == O.prod(set(A), set(B))
    assert set(inverse_set(A)) == O.inv(set(A))
    _, counts = product_counts(A, B)
    assert int(counts.sum()) == len(A) * len(B)


def test_digest_depends_on_content_only():
    rng = random.Random(0)
    mats = list(random_upper_triangular(3, 10, seed=9))
    shuffled = mats[:]
    rng.shuffle(shuffled)
    assert GroupSet(mats).digest() == GroupSet(shuffled + mats[:3]).digest()
    assert GroupSet(mats).digest() != GroupSet(mats[1:]).digest()


def test_contains_mask_with_duplicates_in_query():
    A = ap(2)
    q = pair_batch(ap(1), ap(1))
    mask = A.contains_mask(q)
    assert mask.dtype == np.bool_ and mask.all()
