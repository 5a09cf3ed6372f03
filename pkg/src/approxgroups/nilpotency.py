"""Nested commutators, nilpotency step of a generating set, word balls.

The step of <G> is found level by level: level d holds the distinct
non-identity values of d-fold right-nested commutators of generators.
[g, t] only depends on the value of t, so each level is built from the
deduplicated previous one, which keeps the work far below |G|^d.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .errors import CapExceeded, DimensionError, PreconditionError
from .matrix import Matrix, commutator, encode_matrix
from .sets import Batch, GroupSet, _cap, pair_batch, power_set, product_set, symmetrize

DEFAULT_CHAIN_BUDGET = 10_000_000


def nested_commutator(chain: Sequence[Matrix]) -> Matrix:
    """[b1, [b2, [..., [b_{k-1}, b_k]...]]]."""
    chain = list(chain)
    if len(chain) < 2:
        raise PreconditionError("a nested commutator needs at least two entries")
    n = chain[0].n
    if any(g.n != n for g in chain):
        raise DimensionError("chain entries must share one dimension")
    acc = chain[-1]
    for g in reversed(chain[:-1]):
        acc = commutator(g, acc)
    return acc


@dataclass(frozen=True)
class NilpotencyVerdict:
    """Outcome of the level-by-level commutator test.

    ``step`` is None when every level up to ``cutoff + 1`` still has a
    non-identity commutator; ``witness`` is then the lexicographically
    least such chain at depth cutoff + 1.  For a finite step s >= 2,
    ``nonvanishing`` is the least chain of depth s that is not the identity.
    """

    step: int | None
    cutoff: int
    depth_checked: int
    generators: GroupSet
    witness: tuple = ()
    nonvanishing: tuple = ()
    level_sizes: dict = field(default_factory=dict)
    chains_evaluated: int = 0

    @property
    def exceeds_cutoff(self) -> bool:
        return self.step is None

    def flag(self, n: int) -> str:
        """Where the measured step sits relative to n - 1 and n."""
        if self.step is None:
            return "exceeds_cutoff"
        if self.step <= n - 1:
            return "at_most_n_minus_1"
        if self.step == n:
            return "equals_n"
        return "above_n"

    def witness_matrices(self) -> list[Matrix]:
        return [self.generators[i] for i in self.witness]

    def nonvanishing_matrices(self) -> list[Matrix]:
        return [self.generators[i] for i in self.nonvanishing]

    def to_dict(self) -> dict:
        return {
            "step": self.step,
            "exceeds_cutoff": self.exceeds_cutoff,
            "cutoff": self.cutoff,
            "depth_checked": self.depth_checked,
            "generators_size": len(self.generators),
            "witness": [encode_matrix(g) for g in self.witness_matrices()],
            "witness_indices": list(self.witness),
            "nonvanishing": [encode_matrix(g) for g in self.nonvanishing_matrices()],
            "nonvanishing_indices": list(self.nonvanishing),
            "level_sizes": {str(k): v for k, v in sorted(self.level_sizes.items())},
            "chains_evaluated": self.chains_evaluated,
        }


def _commutator_rows(G: Batch, T: Batch) -> Batch:
    """[g, t] for all pairs, g-major."""
    k, m = len(G), len(T)
    gt = pair_batch(G, T)
    tg = pair_batch(T, G)
    # reorder tg (t-major) to g-major
    perm = (np.arange(m)[None, :] * k + np.arange(k)[:, None]).ravel()
    tg = tg.take(perm)
    return gt.times(tg.inverse())


def _next_level(G: Batch, tails: Batch, chains: list[tuple]):
    """Distinct non-identity [g, t] values, each with its least chain, in chain order."""
    k, m = len(G), len(tails)
    out_chains: list[tuple] = []
    rows = []
    values = None
    step = max(1, (1 << 18) // max(m, 1))
    for g0 in range(0, k, step):
        gsel = G.take(np.arange(g0, min(k, g0 + step)))
        comm = _commutator_rows(gsel, tails)
        keep = np.flatnonzero(~comm.identity_mask())
        if not len(keep):
            continue
        comm = comm.take(keep)
        cand = comm.to_set()
        pos = cand.positions(comm)
        _, first = np.unique(pos, return_index=True)
        first.sort()
        # drop values already produced by an earlier generator block
        fresh = first
        if values is not None:
            fresh = first[values.positions(comm.take(first)) < 0]
        if not len(fresh):
            continue
        new = comm.take(fresh)
        for f in fresh:
            r = int(keep[f])
            out_chains.append((g0 + r // m,) + chains[r % m])
        rows.append(new)
        merged = new.to_set()
        values = merged if values is None else values.union(merged)
    if not out_chains:
        return None, []
    # common denominator for the ordered batch of new tails
    parts = [b.to_set() for b in rows]
    allset = parts[0].union(*parts[1:]) if len(parts) > 1 else parts[0]
    ordered = []
    for b in rows:
        ordered.extend(allset.positions(b).tolist())
    return allset.batch().take(ordered), out_chains


def nilpotency_step(generators, cutoff: int, budget: int = DEFAULT_CHAIN_BUDGET) -> NilpotencyVerdict:
    """Least s <= cutoff such that every (s+1)-fold nested commutator of generators is id."""
    gens = generators if isinstance(generators, GroupSet) else GroupSet(list(generators))
    if not len(gens):
        raise PreconditionError("no generators")
    if cutoff < 1:
        raise PreconditionError("cutoff must be >= 1")
    G = gens.batch()
    tails = G
    chains = [(i,) for i in range(len(G))]
    level_sizes = {}
    evaluated = 0
    prev_chains: list[tuple] = []
    for depth in range(2, cutoff + 2):
        evaluated += len(G) * len(tails)
        if evaluated > budget:
            raise CapExceeded(budget, evaluated, f"nilpotency chains at depth {depth}")
        prev_chains = chains
        tails, chains = _next_level(G, tails, chains)
        level_sizes[depth] = len(chains)
        if not chains:
            s = depth - 1
            nonvanishing = prev_chains[0] if s >= 2 else ()
            return NilpotencyVerdict(s, cutoff, depth, gens, (), nonvanishing, level_sizes, evaluated)
    return NilpotencyVerdict(None, cutoff, cutoff + 1, gens, chains[0], (), level_sizes, evaluated)


def commutator_levels_vanish(generators: Sequence[Matrix], depth: int) -> bool:
    """Plain re-check: do all depth-fold nested commutators of the generators vanish?

    Works on Matrix objects with a value-deduplicated tail set; used by the
    verifier and as an oracle for the vectorized search.
    """
    gens = list(dict.fromkeys(generators))
    if depth < 2:
        return all(g.is_identity() for g in gens)
    tails = [g for g in gens]
    for _ in range(depth - 1):
        nxt = {}
        for g in gens:
            for t in tails:
                c = commutator(g, t)
                if not c.is_identity():
                    nxt.setdefault(c, None)
        tails = list(nxt)
        if not tails:
            return True
    return not tails


# ---------------------------------------------------------------------------
# word balls and ordered progressions


def group_ball(generators, radius: int, cap=None) -> GroupSet:
    """All products of at most ``radius`` generators or inverses (id included)."""
    gens = generators if isinstance(generators, GroupSet) else GroupSet(list(generators))
    if radius < 0:
        raise PreconditionError("radius must be >= 0")
    if radius == 0:
        return GroupSet.identity(gens.n)
    return power_set(symmetrize(gens), radius, cap)


def ordered_progression(generators: Sequence[Matrix], lengths: Sequence[int], cap=None) -> GroupSet:
    """{x1^l1 ... xk^lk : |li| <= Li}."""
    generators, lengths = list(generators), list(lengths)
    if not generators or len(generators) != len(lengths):
        raise PreconditionError("need equally many generators and lengths (at least one)")
    if any(L < 0 for L in lengths):
        raise PreconditionError("lengths must be nonnegative")
    cap = _cap(cap)
    out = None
    for x, L in zip(generators, lengths):
        prog = GroupSet([x ** l for l in range(-L, L + 1)])
        out = prog if out is None else product_set(out, prog, cap)
    cap.check(len(out), "ordered_progression")
    return out
