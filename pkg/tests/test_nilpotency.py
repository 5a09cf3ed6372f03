import itertools

import oracles as O
import pytest

from approxgroups.errors import CapExceeded
from approxgroups.families import (
    heisenberg_ball,
    heisenberg_generators,
    unitriangular_generators,
)
from approxgroups.matrix import Matrix, corner_make, diag, elementary
from approxgroups.nilpotency import (
    commutator_levels_vanish,
    group_ball,
    nested_commutator,
    nilpotency_step,
    ordered_progression,
)
from approxgroups.sets import GroupSet

x, y, z = heisenberg_generators()


def brute_step(gens, limit):
    """Smallest s with every (s+1)-fold nested commutator trivial, by enumerating all chains."""
    for s in range(1, limit + 1):
        if all(nested_commutator(c).is_identity() for c in itertools.product(gens, repeat=s + 1)):
            return s
    return None


def test_nested_commutator_examples():
    assert nested_commutator([x, x, y]).is_identity()
    assert nested_commutator([diag(2, 1), elementary(2, 0, 1)]) == elementary(2, 0, 1)
    assert nested_commutator([diag(2, 3), diag(5, 7), diag(1, 2)]).is_identity()
    assert nested_commutator([x, y]) == z


def test_commuting_generators():
    v = nilpotency_step([diag(2, 3), diag(5, 1)], 3)
    assert v.step == 1 and v.flag(2) == "at_most_n_minus_1"


def test_heisenberg_step_two():
    v = nilpotency_step([x, y], 3)
    assert v.step == 2
    assert not nested_commutator(v.nonvanishing_matrices()).is_identity()
    assert commutator_levels_vanish([x, y], 3) and not commutator_levels_vanish([x, y], 2)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_unitriangular_generators(n):
    gens = unitriangular_generators(n)
    v = nilpotency_step(gens, n + 1)
    assert v.step == n - 1
    if n <= 4:
        assert brute_step(gens, n) == n - 1


def test_exceeds_cutoff_with_witness():
    a, b = diag(2, 1), elementary(2, 0, 1)
    for cutoff in (1, 3, 6):
        v = nilpotency_step([a, b], cutoff)
        assert v.step is None and v.exceeds_cutoff and v.flag(2) == "exceeds_cutoff"
        chain = v.witness_matrices()
        assert len(chain) == cutoff + 1
        assert not nested_commutator(chain).is_identity()


def test_random_generators_match_bruteforce():
    from approxgroups.families import random_upper_triangular

    for seed in range(12):
        gens = list(random_upper_triangular(3, 3, pool=("0", "1", "-1", "2"), seed=seed, unipotent=seed % 2 == 0))
        v = nilpotency_step(gens, 3)
        assert v.step == brute_step(gens, 3)


def test_budget_is_enforced():
    gens = list(heisenberg_ball(1))
    with pytest.raises(CapExceeded):
        nilpotency_step(gens, 3, budget=5)


def test_group_ball():
    assert group_ball([x, y], 0) == GroupSet.identity(3)
    B = group_ball([x, y], 2)
    assert set(B) == O.bfs_ball({x, y}, 2)
    assert len(B) == 17
    assert len(group_ball([x, y, z], 1)) == 7
    assert set(group_ball([x, y, z], 2)) == O.bfs_ball({x, y, z}, 2)


def test_group_ball_finite_group_stabilises():
    s = Matrix([[0, 1], [1, 0]])
    d = diag(1, -1)
    full = group_ball([s, d], 4)
    assert len(full) == 8  # dihedral group of order 8
    assert group_ball([s, d], 5) == full


def test_ordered_progression():
    x2 = elementary(2, 0, 1)
    assert ordered_progression([x2], [3]) == GroupSet([elementary(2, 0, 1, k) for k in range(-3, 4)])
    assert ordered_progression([x, y], [0, 0]) == GroupSet.identity(3)
    P = ordered_progression([x, y], [1, 1])
    assert len(P) == 9
    assert set(P) == {x ** a @ y ** b for a in (-1, 0, 1) for b in (-1, 0, 1)}


def test_corner_elements_are_central_in_unitriangular():
    for g in unitriangular_generators(4):
        assert nested_commutator([g, corner_make(5, 4)]).is_identity()
