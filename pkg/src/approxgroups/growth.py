"""Growth statistics, covering certificates and the small lemmas built on them.

Every certificate stores the sets it talks about and can re-check its own
containments from scratch with :meth:`recheck`; construction code never
marks a certificate valid without running that check.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import pairwise
from typing import Any

import numpy as np

from .errors import DimensionError, PreconditionError
from .maps import homomorphism, predicate
from .matrix import Matrix
from .scalar import GaussianRational, encode_rational
from .sets import (
    Batch,
    GroupSet,
    encode_groupset,
    inverse_set,
    left_translate,
    pair_batch,
    pm_power_set,
    power_sequence,
    product_set,
    right_translate,
)

Check = tuple  # (name, ok, detail)


def _first_missing(items: GroupSet | Batch, container: GroupSet) -> Matrix | None:
    """First element of ``items`` (in its own order) that is not in ``container``."""
    if not len(items):
        return None
    miss = np.flatnonzero(~container.contains_mask(items))
    if not len(miss):
        return None
    b = items.batch() if isinstance(items, GroupSet) else items
    return b.matrix(int(miss[0]))


def _containment(name: str, items, container: GroupSet) -> Check:
    g = _first_missing(items, container)
    if g is None:
        return (name, True, "")
    return (name, False, f"element not covered: {_mat_text(g)}")


def _mat_text(g: Matrix) -> str:
    return "[" + "; ".join(" ".join(str(g[i, j]) for j in range(g.n)) for i in range(g.n)) + "]"


def _covered_by(name: str, target: GroupSet, X: GroupSet, A: GroupSet, left: bool = True) -> Check:
    """Is target inside X.A (left) or A.X (right)?

    Marks the hits of blocks of translates instead of building the product
    set, so it stays cheap when X.A would be much larger than the target.
    """
    covered = np.zeros(len(target), dtype=bool)
    if len(target) and len(A):
        step = max(1, (1 << 20) // len(A))
        for x0 in range(0, len(X), step):
            block = X.batch().take(np.arange(x0, min(len(X), x0 + step)))
            prods = pair_batch(block, A) if left else pair_batch(A, block)
            pos = target.positions(prods)
            covered[pos[pos >= 0]] = True
    miss = np.flatnonzero(~covered)
    if not len(miss):
        return (name, True, "")
    return (name, False, f"element not covered: {_mat_text(target[int(miss[0])])}")


def first_failure(checks: Iterable[Check]):
    for c in checks:
        if not c[1]:
            return c
    return None


def _checks_dict(checks) -> dict:
    return {name: ok for name, ok, _ in checks}


# ---------------------------------------------------------------------------
# growth statistics


@dataclass(frozen=True)
class GrowthReport:
    sizes: dict
    doubling: Fraction
    tripling: Fraction

    def to_dict(self) -> dict:
        return {
            "sizes": {str(k): v for k, v in sorted(self.sizes.items())},
            "doubling": encode_rational(self.doubling),
            "tripling": encode_rational(self.tripling),
        }


def growth_stats(A: GroupSet, max_power: int = 3, cap=None) -> GrowthReport:
    """Exact |A^k| for k <= max(max_power, 3), with doubling and tripling."""
    if not len(A):
        raise PreconditionError("growth_stats needs a nonempty set")
    if max_power < 1:
        raise PreconditionError("max_power must be >= 1")
    seq = power_sequence(A, max(max_power, 3), cap)
    sizes = {k + 1: len(s) for k, s in enumerate(seq)}
    return GrowthReport(sizes, Fraction(sizes[2], sizes[1]), Fraction(sizes[3], sizes[1]))


def tripling(A: GroupSet, cap=None) -> Fraction:
    return growth_stats(A, 3, cap).tripling


# ---------------------------------------------------------------------------
# approximate groups


@dataclass(frozen=True)
class ApproximateGroupCertificate:
    """A.A is covered by the |X| left translates X.A with X symmetric inside A.A."""

    A: GroupSet
    X: GroupSet
    K_witness: int
    checks: dict = field(default_factory=dict)

    def recheck(self, square: GroupSet | None = None, cap=None) -> list[Check]:
        return check_approximate_group(self.A, self.X, square, cap)

    @property
    def valid(self) -> bool:
        return all(self.checks.values())

    def to_dict(self, include_sets: bool = True) -> dict:
        out = {"K_witness": self.K_witness, "checks": dict(sorted(self.checks.items())), "X": encode_groupset(self.X)}
        if include_sets:
            out["A"] = encode_groupset(self.A)
        return out


def check_approximate_group(A: GroupSet, X: GroupSet, square: GroupSet | None = None, cap=None) -> list[Check]:
    checks = []
    checks.append(("A_symmetric", A.is_symmetric(), ""))
    checks.append(("A_has_identity", A.contains_identity(), ""))
    if square is None:
        square = product_set(A, A, cap)
    checks.append(_containment("X_in_AA", X, square))
    checks.append(_covered_by("AA_in_XA", square, X, A, left=True))
    checks.append(("X_symmetric", inverse_set(X) == X if len(X) else True, "X is not closed under inverses"))
    return checks


def certify_approximate_group(A: GroupSet, cap=None, square: GroupSet | None = None) -> ApproximateGroupCertificate:
    """Greedy cover of A.A by translates y.A, adding y and y^-1 together.

    The scan starts at the identity, then repeatedly takes the least element
    of A.A that is still uncovered.

    ``square`` may pass a precomputed A.A (it is trusted only for the greedy
    step; the final containment checks still compare against it).
    """
    if not len(A):
        raise PreconditionError("empty set")
    if not A.contains_identity():
        raise PreconditionError("set does not contain the identity")
    if not A.is_symmetric():
        raise PreconditionError("set is not symmetric")
    if square is None:
        square = product_set(A, A, cap)
    covered = np.zeros(len(square), dtype=bool)
    chosen: list[Matrix] = []
    seen = set()
    # id is always in A.A and id.A = A; starting there keeps X = {id} for subgroups
    y = Matrix.identity(A.n)
    while True:
        for t in (y, y.inverse()):
            if t in seen:
                continue
            seen.add(t)
            chosen.append(t)
            pos = square.positions(left_translate(t, A))
            covered[pos[pos >= 0]] = True
        if covered.all():
            break
        y = square[int(np.argmin(covered))]
    X = GroupSet(chosen, n=A.n)
    checks = check_approximate_group(A, X, square, cap)
    return ApproximateGroupCertificate(A, X, len(X), _checks_dict(checks))


# ---------------------------------------------------------------------------
# control


def control_constant(A: GroupSet, B: GroupSet, X: GroupSet) -> Fraction:
    K = Fraction(max(1, len(X)))
    if len(A) and len(B) > len(A):
        K = max(K, Fraction(len(B), len(A)))
    return K


@dataclass(frozen=True)
class ControlCertificate:
    """B K-controls A: |B| <= K|A|, |X| <= K and A inside (X.B) and (B.X)."""

    A: GroupSet
    B: GroupSet
    X: GroupSet
    K_witness: Fraction
    size_check: bool
    checks: dict = field(default_factory=dict)

    def recheck(self, cap=None) -> list[Check]:
        return check_control(self.A, self.B, self.X, self.K_witness, cap)

    @property
    def valid(self) -> bool:
        return all(self.checks.values())

    def to_dict(self, include_sets: bool = True) -> dict:
        out = {
            "K_witness": encode_rational(self.K_witness),
            "size_check": self.size_check,
            "checks": dict(sorted(self.checks.items())),
            "X": encode_groupset(self.X),
            "sizes": {"A": len(self.A), "B": len(self.B), "X": len(self.X)},
        }
        if include_sets:
            out["A"] = encode_groupset(self.A)
            out["B"] = encode_groupset(self.B)
        return out


def check_control(A: GroupSet, B: GroupSet, X: GroupSet, K: Fraction, cap=None) -> list[Check]:
    checks = [
        ("K_at_least_one", K >= 1, ""),
        ("X_size", len(X) <= K, f"|X| = {len(X)} > K = {K}" if len(X) > K else ""),
        ("B_size", len(B) <= K * len(A), "" if len(B) <= K * len(A) else f"|B| = {len(B)} > K|A|"),
        _covered_by("A_in_XB", A, X, B, left=True),
        _covered_by("A_in_BX", A, X, B, left=False),
    ]
    return checks


def _coverage_counts(cand_inv: Batch, targets: Batch, B: GroupSet, left: bool) -> np.ndarray:
    """For each candidate x, how many targets t satisfy x^-1 t in B (left) or t x^-1 in B."""
    m, q = len(cand_inv), len(targets)
    counts = np.zeros(m, dtype=np.int64)
    step = max(1, (1 << 19) // max(q, 1))
    for c0 in range(0, m, step):
        block = cand_inv.take(np.arange(c0, min(m, c0 + step)))
        mb = len(block)
        prods = pair_batch(block, targets) if left else pair_batch(targets, block)
        idx = np.flatnonzero(B.positions(prods) >= 0)
        owner = idx // q if left else idx % mb
        counts[c0:c0 + mb] += np.bincount(owner, minlength=mb)
    return counts


def _greedy_side(A: GroupSet, B: GroupSet, Binv: Batch, left: bool, start: list[Matrix]) -> list[Matrix]:
    """Greedy X with A inside X.B (left) or B.X (right), seeded with ``start``."""
    covered = np.zeros(len(A), dtype=bool)

    def mark(x: Matrix):
        img = left_translate(x, B) if left else right_translate(B, x)
        pos = A.positions(img)
        covered[pos[pos >= 0]] = True

    for x in start:
        mark(x)
    chosen = []
    eye = Matrix.identity(A.n)
    while not covered.all():
        i = int(np.argmin(covered))
        a = A[i]
        # candidates: x with x*b = a (left) or b*x = a (right)
        cands = (right_translate(Binv, a) if not left else left_translate(a, Binv)).to_set()
        todo = A.select(~covered).batch()
        counts = _coverage_counts(cands.batch().inverse(), todo, B, left)
        best = int(counts.max())
        j = int(np.argmax(counts))
        if eye in cands:
            k = int(cands.positions(Batch.from_matrices([eye]))[0])
            if counts[k] == best:
                j = k
        x = cands[j]
        chosen.append(x)
        mark(x)
    return chosen


def certify_control(A: GroupSet, B: GroupSet, cap=None) -> ControlCertificate:
    """Find X with A inside (X.B) and (B.X) and package the control witness."""
    if A.n != B.n:
        raise DimensionError("dimension mismatch")
    if not len(B):
        raise PreconditionError("controlling set is empty")
    if not len(A):
        raise PreconditionError("controlled set is empty")
    Binv = inverse_set(B).batch()
    xl = _greedy_side(A, B, Binv, True, [])
    xr = _greedy_side(A, B, Binv, False, xl)
    X = GroupSet(xl + xr, n=A.n)
    K = control_constant(A, B, X)
    checks = check_control(A, B, X, K, cap)
    return ControlCertificate(A, B, X, K, len(B) <= K * len(A), _checks_dict(checks))


def compose_control(first: ControlCertificate, second: ControlCertificate, cap=None) -> ControlCertificate:
    """From B controlling A (X1) and C controlling B (X2), C controls A.

    A lies in X1.X2.C and in C.X2.X1, so X = X1.X2 u X2.X1 works; its size is
    at most 2|X1||X2|.
    """
    if first.B != second.A:
        raise PreconditionError("certificates do not chain: middle sets differ")
    A, C = first.A, second.B
    X = product_set(first.X, second.X, cap).union(product_set(second.X, first.X, cap))
    K = control_constant(A, C, X)
    checks = check_control(A, C, X, K, cap)
    return ControlCertificate(A, C, X, K, len(C) <= K * len(A), _checks_dict(checks))


# ---------------------------------------------------------------------------
# Ruzsa covering


@dataclass(frozen=True)
class RuzsaCover:
    X1: GroupSet
    X2: GroupSet
    sizes: dict
    checks: dict
    # |B^2| <= K|A| with K = max(|AB|, |BA|)/|B|; informative only, the covering never uses it
    hypothesis_holds: bool = False

    @property
    def valid(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return {
            "X1": encode_groupset(self.X1),
            "X2": encode_groupset(self.X2),
            "sizes": dict(sorted(self.sizes.items())),
            "checks": dict(sorted(self.checks.items())),
            "hypothesis_holds": self.hypothesis_holds,
        }


def _disjoint_greedy(A: GroupSet, B2: GroupSet, right: bool) -> list[Matrix]:
    # y clashes with a chosen x when B.y meets B.x, i.e. y in B^2.x (or x.B^2 on the other side)
    blocked = np.zeros(len(A), dtype=bool)
    chosen = []
    while not blocked.all():
        x = A[int(np.argmin(blocked))]
        chosen.append(x)
        img = right_translate(B2, x) if right else left_translate(x, B2)
        pos = A.positions(img)
        blocked[pos[pos >= 0]] = True
    return chosen


def check_ruzsa(A: GroupSet, B: GroupSet, X1: GroupSet, X2: GroupSet, cap=None) -> list[Check]:
    B2 = product_set(B, B, cap)
    BA = product_set(B, A, cap)
    AB = product_set(A, B, cap)
    return [
        _covered_by("A_in_BBX1", A, X1, B2, left=False),
        _covered_by("A_in_X2BB", A, X2, B2, left=True),
        ("X1_bound", len(X1) * len(B) <= len(BA), f"|X1||B| = {len(X1) * len(B)} > |BA| = {len(BA)}"),
        ("X2_bound", len(X2) * len(B) <= len(AB), f"|X2||B| = {len(X2) * len(B)} > |AB| = {len(AB)}"),
    ]


def ruzsa_cover(A: GroupSet, B: GroupSet, cap=None) -> RuzsaCover:
    """Maximal X1 in A with the translates B.x pairwise disjoint, and the mirror X2."""
    if A.n != B.n:
        raise DimensionError("dimension mismatch")
    if not len(A) or not len(B):
        raise PreconditionError("ruzsa_cover needs nonempty sets")
    if not B.is_symmetric():
        raise PreconditionError("B must be symmetric")
    B2 = product_set(B, B, cap)
    X1 = GroupSet(_disjoint_greedy(A, B2, right=True), n=A.n)
    X2 = GroupSet(_disjoint_greedy(A, B2, right=False), n=A.n)
    BA = product_set(B, A, cap)
    AB = product_set(A, B, cap)
    K = Fraction(max(len(AB), len(BA)), len(B))
    sizes = {"A": len(A), "B": len(B), "BB": len(B2), "BA": len(BA), "AB": len(AB), "X1": len(X1), "X2": len(X2)}
    checks = _checks_dict(check_ruzsa(A, B, X1, X2, cap))
    return RuzsaCover(X1, X2, sizes, checks, len(B2) <= K * len(A))


# ---------------------------------------------------------------------------
# fibres and homomorphic images


@dataclass(frozen=True)
class FiberReport:
    hom: str
    fiber_sizes: tuple
    max: int
    min: int
    count: int
    ratio: Fraction
    doubling: Fraction
    inequality_holds: bool
    average_bound_holds: bool

    def to_dict(self) -> dict:
        return {
            "average_bound_holds": self.average_bound_holds,
            "hom": self.hom,
            "fiber_sizes": list(self.fiber_sizes),
            "max": self.max,
            "min": self.min,
            "count": self.count,
            "ratio": encode_rational(self.ratio),
            "doubling": encode_rational(self.doubling),
            "inequality_holds": self.inequality_holds,
        }


def fibers(A: GroupSet, hom) -> tuple[GroupSet, np.ndarray]:
    """(image set, index of each element's image) for the homomorphism."""
    hom = homomorphism(hom)
    imgs = hom.images(A)
    image = imgs.to_set()
    return image, image.positions(imgs)


def fiber_stats(A: GroupSet, hom, cap=None) -> FiberReport:
    """Fibre sizes of A over its image.

    ``inequality_holds`` tests max <= K*min with K = |A^2|/|A|.  That form can
    fail (the Heisenberg ball with fibres 5, 1, 1 and K = 29/7 is an example);
    the counting argument only gives max <= K*|A|/|image|, reported as
    ``average_bound_holds``.
    """
    if not len(A):
        raise PreconditionError("empty set")
    hom = homomorphism(hom)
    image, owner = fibers(A, hom)
    sizes = np.bincount(owner, minlength=len(image))
    doubling = Fraction(len(product_set(A, A, cap)), len(A))
    mx, mn = int(sizes.max()), int(sizes.min())
    return FiberReport(
        hom.name,
        tuple(int(s) for s in sizes),
        mx,
        mn,
        len(image),
        Fraction(mx, mn),
        doubling,
        mx <= doubling * mn,
        mx * len(image) <= doubling * len(A),
    )


def _log_ratio(num: Fraction, den: Fraction) -> str | None:
    """log(num)/log(den) as a 12-digit decimal string (None when undefined)."""
    if den == 1:
        return None
    value = math.log(num) / math.log(den)
    return f"{value:.12f}"


@dataclass(frozen=True)
class HomTriplingReport:
    hom: str
    identity_holds: bool
    tripling: Fraction
    image_tripling: Fraction
    log_ratio: str | None
    sizes: dict

    def to_dict(self) -> dict:
        return {
            "hom": self.hom,
            "identity_holds": self.identity_holds,
            "tripling": encode_rational(self.tripling),
            "image_tripling": encode_rational(self.image_tripling),
            "log_ratio": self.log_ratio,
            "sizes": dict(sorted(self.sizes.items())),
        }


def hom_tripling_report(A: GroupSet, hom, cap=None) -> HomTriplingReport:
    if not len(A):
        raise PreconditionError("empty set")
    hom = homomorphism(hom)
    A3 = power_sequence(A, 3, cap)[-1]
    image = hom.image(A)
    image3 = power_sequence(image, 3, cap)[-1]
    image_of_A3 = hom.image(A3)
    trip = Fraction(len(A3), len(A))
    trip_img = Fraction(len(image3), len(image))
    sizes = {"A": len(A), "A3": len(A3), "image": len(image), "image3": len(image3), "image_of_A3": len(image_of_A3)}
    return HomTriplingReport(hom.name, image_of_A3 == image3, trip, trip_img, _log_ratio(trip_img, trip), sizes)


# ---------------------------------------------------------------------------
# intersections with a subgroup


@dataclass(frozen=True)
class IntersectionReport:
    predicate: str
    sizes: dict
    ratios: dict
    monotone: bool

    def to_dict(self) -> dict:
        return {
            "predicate": self.predicate,
            "sizes": {str(k): v for k, v in sorted(self.sizes.items())},
            "ratios": {str(k): encode_rational(v) for k, v in sorted(self.ratios.items())},
            "monotone": self.monotone,
        }


def intersection_growth(A: GroupSet, member, max_power: int = 4, cap=None) -> IntersectionReport:
    """|A^k n H| for k = 2..max_power."""
    if max_power < 2:
        raise PreconditionError("max_power must be >= 2")
    if not len(A) or not A.contains_identity() or not A.is_symmetric():
        raise PreconditionError("A must be symmetric and contain the identity")
    pred = predicate(member)
    seq = power_sequence(A, max_power, cap)
    sizes = {k: int(pred.mask(seq[k - 1]).sum()) for k in range(2, max_power + 1)}
    base = sizes[2]
    ratios = {k: Fraction(v, base) for k, v in sizes.items()}
    vals = [sizes[k] for k in sorted(sizes)]
    monotone = all(x <= y for x, y in pairwise(vals))
    return IntersectionReport(pred.name, sizes, ratios, monotone)


# ---------------------------------------------------------------------------
# sum-product statistic


@dataclass(frozen=True)
class SolymosiReport:
    sizes: dict
    lhs: int
    lhs_squared: int
    rhs_squared: int
    squared_ratio: Fraction

    def to_dict(self) -> dict:
        return {
            "sizes": dict(sorted(self.sizes.items())),
            "lhs": self.lhs,
            "lhs_squared": self.lhs_squared,
            "rhs_squared": self.rhs_squared,
            "squared_ratio": encode_rational(self.squared_ratio),
        }


def solymosi_statistic(U, V, W) -> SolymosiReport:
    """(|U+V| |UW|)^2 against |U|^3 |V| |W|, compared exactly."""
    U = {GaussianRational.coerce(u) for u in U}
    V = {GaussianRational.coerce(v) for v in V}
    W = {GaussianRational.coerce(w) for w in W}
    if not U or not V or not W:
        raise PreconditionError("sum-product statistic needs nonempty sets")
    sums = {u + v for u in U for v in V}
    prods = {u * w for u in U for w in W}
    lhs = len(sums) * len(prods)
    rhs2 = len(U) ** 3 * len(V) * len(W)
    sizes = {"U": len(U), "V": len(V), "W": len(W), "U+V": len(sums), "UW": len(prods)}
    return SolymosiReport(sizes, lhs, lhs * lhs, rhs2, Fraction(lhs * lhs, rhs2))


# ---------------------------------------------------------------------------
# finite-index reduction


def _label_key(label) -> tuple:
    return (type(label).__name__, repr(label))


@dataclass(frozen=True)
class FiniteIndexReduction:
    S: GroupSet
    certificate: ControlCertificate
    A_prime: GroupSet
    label: Any
    class_sizes: dict
    pigeonhole_ratio: Fraction
    B_size: int
    S_in_subgroup: bool

    def to_dict(self) -> dict:
        return {
            "label": repr(self.label),
            "class_sizes": {repr(k): v for k, v in sorted(self.class_sizes.items(), key=lambda kv: _label_key(kv[0]))},
            "pigeonhole_ratio": encode_rational(self.pigeonhole_ratio),
            "A_prime": encode_groupset(self.A_prime),
            "B_size": self.B_size,
            "S_size": len(self.S),
            "S_in_subgroup": self.S_in_subgroup,
            "certificate": self.certificate.to_dict(),
        }


def finite_index_reduce(A: GroupSet, coset_label: Callable[[Matrix], Any], cap=None) -> FiniteIndexReduction:
    """Pick the fullest coset class A', set B = A'^-1 A' and S = B^{+-6}; S controls A."""
    if not len(A):
        raise PreconditionError("empty set")
    labels = [coset_label(g) for g in A]
    classes: dict = {}
    for i, lab in enumerate(labels):
        classes.setdefault(lab, []).append(i)
    home = coset_label(Matrix.identity(A.n))
    order = sorted(classes, key=lambda lab: (-len(classes[lab]), lab != home, _label_key(lab)))
    chosen = order[0]
    A_prime = A.take(classes[chosen])
    B = product_set(inverse_set(A_prime), A_prime, cap)
    S = pm_power_set(B, 6, cap)
    cert = certify_control(A, S, cap)
    inside = all(coset_label(s) == home for s in S)
    return FiniteIndexReduction(
        S, cert, A_prime, chosen, {k: len(v) for k, v in classes.items()}, Fraction(len(A_prime), len(A)), len(B), inside
    )
