"""Deterministic test families of matrix sets."""

from __future__ import annotations

import random
from collections.abc import Sequence
from fractions import Fraction

from .errors import ParseError, PreconditionError
from .matrix import Matrix, corner_make, decode_matrix, diag, elementary
from .nilpotency import group_ball, ordered_progression
from .scalar import GaussianRational, I
from .sets import GroupSet

DEFAULT_POOL = ("0", "1", "-1", "2", "-2", "1/2", "-1/2", "i", "-i")


def heisenberg_generators() -> list[Matrix]:
    """x = id+E12, y = id+E23 and their commutator z = id+E13."""
    return [elementary(3, 0, 1), elementary(3, 1, 2), elementary(3, 0, 2)]


def heisenberg_ball(radius: int, cap=None) -> GroupSet:
    return group_ball(heisenberg_generators(), radius, cap)


def unitriangular_generators(n: int) -> list[Matrix]:
    if n < 2:
        raise PreconditionError("unitriangular generators need n >= 2")
    return [elementary(n, i, i + 1) for i in range(n - 1)]


def unitriangular_ball(n: int, radius: int, cap=None) -> GroupSet:
    return group_ball(unitriangular_generators(n), radius, cap)


def diag_progression(base, L: int, n: int = 2) -> GroupSet:
    """{diag(base^k, 1, ..., 1) : |k| <= L}."""
    b = GaussianRational.coerce(base)
    if b.is_zero():
        raise PreconditionError("base must be nonzero")
    if L < 0 or n < 1:
        raise PreconditionError("need L >= 0 and n >= 1")
    one = [1] * (n - 1)
    return GroupSet([diag(b ** k, *one) for k in range(-L, L + 1)])


def corner_progression(L: int, n: int = 3) -> GroupSet:
    """{m_lambda : |lambda| <= L} inside the corner subgroup."""
    if L < 0:
        raise PreconditionError("L must be >= 0")
    return GroupSet([corner_make(k, n) for k in range(-L, L + 1)])


def dihedral(L: int) -> GroupSet:
    """{d^k} u {s d^k}, |k| <= L, with d = diag(2, 1/2) and s the coordinate swap."""
    if L < 0:
        raise PreconditionError("L must be >= 0")
    d = diag(2, Fraction(1, 2))
    s = Matrix([[0, 1], [1, 0]])
    powers = [d ** k for k in range(-L, L + 1)]
    return GroupSet(powers + [s @ p for p in powers])


def torsion_diag(order: int, n: int = 2) -> GroupSet:
    """The scalar subgroup of the given order in {1, 2, 4}."""
    roots = {1: [1], 2: [1, -1], 4: [1, -1, I, -I]}
    if order not in roots:
        raise PreconditionError("order must be 1, 2 or 4")
    return GroupSet([diag(*([r] * n)) for r in roots[order]])


def progression_from_spec(spec: dict, cap=None) -> GroupSet:
    """Spec: {"generators": [Matrix json, ...], "lengths": [int, ...]}."""
    try:
        gens = [decode_matrix(m) for m in spec["generators"]]
        lengths = [int(L) for L in spec["lengths"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad progression spec: {exc}") from exc
    return ordered_progression(gens, lengths, cap)


def parse_pool(items: Sequence[str] | str) -> list[GaussianRational]:
    """Scalars written as "3", "-1/2", "i", "-i", "1+2i", "1/2-i"."""
    if isinstance(items, str):
        items = [t for t in items.split(",") if t.strip()]
    return [parse_scalar(t) for t in items]


def parse_scalar(text: str) -> GaussianRational:
    t = text.strip().replace(" ", "")
    if not t:
        raise ParseError("empty scalar")
    try:
        if not t.endswith("i"):
            return GaussianRational(Fraction(t))
        body = t[:-1]
        # split at the last sign that is not the leading one
        cut = max(body.rfind("+"), body.rfind("-"))
        if cut > 0:
            re_txt, im_txt = body[:cut], body[cut:]
        else:
            re_txt, im_txt = "0", body
        if im_txt in ("", "+"):
            im_txt = "1"
        elif im_txt == "-":
            im_txt = "-1"
        return GaussianRational(Fraction(re_txt), Fraction(im_txt))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad scalar {text!r}") from exc


def random_upper_triangular(n: int, size: int, pool=DEFAULT_POOL, seed: int = 0, unipotent: bool = False) -> GroupSet:
    """``size`` distinct random invertible upper-triangular matrices with entries from ``pool``."""
    if n < 1 or size < 1:
        raise PreconditionError("need n >= 1 and size >= 1")
    values = parse_pool(pool) if not all(isinstance(p, GaussianRational) for p in pool) else list(pool)
    nonzero = [v for v in values if not v.is_zero()]
    if not nonzero:
        raise PreconditionError("entry pool has no nonzero value for the diagonal")
    distinct = len(set(values))
    room = (1 if unipotent else len(set(nonzero))) ** n * distinct ** (n * (n - 1) // 2)
    if room < size:
        raise PreconditionError(f"this pool only yields {room} distinct matrices, asked for {size}")
    rng = random.Random(seed)
    found: dict = {}
    attempts = 0
    while len(found) < size:
        attempts += 1
        if attempts > 200 * size:
            raise PreconditionError(f"could not draw {size} distinct matrices from this pool")
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                if j < i:
                    row.append(0)
                elif j == i:
                    row.append(1 if unipotent else rng.choice(nonzero))
                else:
                    row.append(rng.choice(values))
            rows.append(row)
        g = Matrix(rows)
        found.setdefault(g, None)
    return GroupSet(list(found))


FAMILIES = {
    "heisenberg-ball": heisenberg_ball,
    "unitriangular-ball": unitriangular_ball,
    "diag-progression": diag_progression,
    "corner-progression": corner_progression,
    "dihedral": dihedral,
    "torsion-diag": torsion_diag,
    "ordered-progression": progression_from_spec,
    "random-upper-triangular": random_upper_triangular,
}
