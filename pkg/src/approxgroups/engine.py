"""The recursive decomposition of a small-tripling upper-triangular set.

Outline of :func:`decompose` at dimension n:

* refine A to the fibres over the sub-solution for pi(A), then again over
  the sub-solution for pi'(A1), giving A2;
* split A2 by the ratio x11/xnn and keep the largest class A3;
* C = A3 A3^-1 consists of ratio-1 elements, which commute with the corner
  subgroup; the coset x C meeting A most often is located by counting
  r(x) = |A n xC| over all x in A C^-1;
* A' = A n xC, and the nilpotency step of <rep^-1 A'> is measured.

Every level appends a record to ``branch_trace`` so the accounting (fibre
fractions, ratio counts against the threshold D, the r(x) identities) can be
checked afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import CapExceeded, PreconditionError
from .growth import (
    ApproximateGroupCertificate,
    ControlCertificate,
    certify_approximate_group,
    certify_control,
    fibers,
    solymosi_statistic,
    tripling,
)
from .maps import CORNER, PI, PI_PRIME, require_upper
from .matrix import Matrix, corner_extract, encode_matrix
from .nilpotency import NilpotencyVerdict, nilpotency_step
from .scalar import GaussianRational, encode_gq, encode_rational
from .sets import (
    DEFAULT_CAP,
    GroupSet,
    GrowthCap,
    _cap,
    encode_groupset,
    inverse_set,
    left_translate,
    power_sequence,
    power_set,
    product_counts,
    product_set,
)


def corner_power(n: int) -> int:
    """Word length of the (n-1)-fold nested commutator of n letters: 3*2^(n-1) - 2."""
    if n < 1:
        raise PreconditionError("dimension must be positive")
    return 3 * 2 ** (n - 1) - 2


@dataclass(frozen=True)
class EngineConfig:
    gamma: Fraction = Fraction(4)
    nil_cutoff: int | None = None
    cap: GrowthCap = field(default_factory=GrowthCap)
    corner_cap: GrowthCap = field(default_factory=lambda: GrowthCap(DEFAULT_CAP))
    verify_corner: bool = False
    corner_N: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "gamma", Fraction(self.gamma))
        object.__setattr__(self, "cap", _cap(self.cap))
        object.__setattr__(self, "corner_cap", _cap(self.corner_cap))
        if self.gamma <= 0:
            raise PreconditionError("gamma must be positive")
        if self.nil_cutoff is not None and self.nil_cutoff < 1:
            raise PreconditionError("nil_cutoff must be >= 1")
        if self.corner_N is not None and self.corner_N < 1:
            raise PreconditionError("corner N must be >= 1")

    def to_dict(self) -> dict:
        return {
            "gamma": encode_rational(self.gamma),
            "nil_cutoff": self.nil_cutoff,
            "cap": self.cap.max_elements,
            "corner_cap": self.corner_cap.max_elements,
            "verify_corner": self.verify_corner,
            "corner_N": self.corner_N,
        }


# ---------------------------------------------------------------------------
# ratio classes and the corner subgroup


def ratio_partition(A: GroupSet) -> dict:
    """Map x11/xnn -> the elements of A with that ratio (keys in canonical order)."""
    require_upper(A)
    if not len(A):
        return {}
    n = A.n
    nn = n * n
    cols = [0, nn - 1]
    if A.cplx:
        cols += [nn, 2 * nn - 1]
    corners = A.data[:, cols]
    # group rows by their (x11, xnn) numerators first, then merge equal ratios
    if corners.dtype == object:
        keys = [tuple(int(v) for v in row) for row in corners.tolist()]
        uniq = sorted(set(keys))
        code_of = {k: i for i, k in enumerate(uniq)}
        codes = np.array([code_of[k] for k in keys], dtype=np.int64)
    else:
        uniq_arr, codes = np.unique(corners, axis=0, return_inverse=True)
        uniq = [tuple(int(v) for v in row) for row in uniq_arr.tolist()]
        codes = codes.ravel()
    by_ratio: dict = {}
    for i, key in enumerate(uniq):
        if A.cplx:
            a = GaussianRational(key[0], key[2])
            d = GaussianRational(key[1], key[3])
        else:
            a, d = GaussianRational(key[0]), GaussianRational(key[1])
        by_ratio.setdefault(a / d, []).append(i)
    out = {}
    for ratio in sorted(by_ratio, key=GaussianRational.sort_key):
        mask = np.isin(codes, by_ratio[ratio])
        out[ratio] = A.select(mask)
    return out


def corner_elements(B: GroupSet, N: int, cap=None):
    """(lambda values of B^N n H in canonical order, B^N)."""
    require_upper(B)
    if N < 1:
        raise PreconditionError("N must be >= 1")
    if B.n < 2:
        raise PreconditionError("the corner subgroup needs n >= 2")
    BN = power_set(B, N, cap)
    lams = [corner_extract(g) for g in BN.select(CORNER.mask(BN))]
    return sorted(lams, key=GaussianRational.sort_key), BN


def corner_intersection(B: GroupSet, N: int | None = None, cap=None) -> list:
    """The set S with B^N n H = {m_lambda : lambda in S}."""
    if N is None:
        N = corner_power(B.n)
    return corner_elements(B, N, cap)[0]


# ---------------------------------------------------------------------------
# the recursion


def _threshold(trip: Fraction, gamma: Fraction):
    """Exact information about D = trip^gamma: (floor(D), compare(R) -> R > D)."""
    p, q = gamma.numerator, gamma.denominator
    base = trip ** p  # D^q

    def exceeds(R: int) -> bool:
        return Fraction(R) ** q > base

    # floor of base^(1/q): largest k with k^q <= base
    lo, hi = 1, 1
    while Fraction(hi) ** q <= base:
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if Fraction(mid) ** q <= base:
            lo = mid
        else:
            hi = mid
    return lo, exceeds


def _stage(path: str, what: str, fn, *args):
    try:
        return fn(*args)
    except CapExceeded as exc:
        raise CapExceeded(exc.limit, exc.reached, f"{path}: {what}") from None


def _solve(A: GroupSet, cfg: EngineConfig, path: str, trace: list):
    """Returns (A_prime, top-level data or None at n = 1)."""
    n = A.n
    if n == 1:
        trace.append({"path": path, "dimension": 1, "size": len(A), "branch": "base", "A_prime_size": len(A)})
        return A, None
    cap = cfg.cap
    trip = _stage(path, "tripling", tripling, A, cap)

    image, owner = fibers(A, PI)
    fib = np.bincount(owner, minlength=len(image))
    T = _solve(image, cfg, path + "/pi", trace)[0]
    A1 = A.select(T.contains_mask(image)[owner])

    image2, owner2 = fibers(A1, PI_PRIME)
    fib2 = np.bincount(owner2, minlength=len(image2))
    T2 = _solve(image2, cfg, path + "/pi_prime", trace)[0]
    A2 = A1.select(T2.contains_mask(image2)[owner2])
    # pi(A2) stays inside T because A2 is a subset of A1
    pi_kept = PI.image(A2).issubset(T)

    classes = ratio_partition(A2)
    R = len(classes)
    D_floor, exceeds = _threshold(trip, cfg.gamma)
    ratio_rich = exceeds(R)
    ratio, A3 = max(classes.items(), key=lambda kv: len(kv[1]))  # first maximal in canonical order

    fallback = False
    if len(A3) == 1 and len(A2) > 1:
        fallback = True
        diff = _stage(path, "A2 A2^-1", product_set, A2, inverse_set(A2), cap)
        C = ratio_partition(diff).get(GaussianRational(1), GroupSet.identity(n))
    else:
        C = _stage(path, "A3 A3^-1", product_set, A3, inverse_set(A3), cap)

    xs, r = _stage(path, "r(x) scan", product_counts, A, inverse_set(C), cap)
    j = int(np.argmax(r))
    x = xs[j]
    r_max = int(r[j])
    sum_r = int(r.sum())
    hits = A.positions(left_translate(x, C))
    mask = np.zeros(len(A), dtype=bool)
    mask[hits[hits >= 0]] = True
    A_prime = A.select(mask)

    trace.append(
        {
            "path": path,
            "dimension": n,
            "size": len(A),
            "tripling": encode_rational(trip),
            "pi_fibers": {"count": len(image), "max": int(fib.max()), "min": int(fib.min())},
            "pi_fraction": encode_rational(Fraction(len(A1), len(A))),
            "pi_prime_fibers": {"count": len(image2), "max": int(fib2.max()), "min": int(fib2.min())},
            "pi_prime_fraction": encode_rational(Fraction(len(A2), len(A1))),
            "pi_coset_kept": pi_kept,
            "ratio_classes": R,
            "D_floor": D_floor,
            "gamma": encode_rational(cfg.gamma),
            "branch": "ratio-rich" if ratio_rich else "ratio-poor",
            "chosen_ratio": encode_gq(ratio),
            "class_size": len(A3),
            "singleton_fallback": fallback,
            "C_size": len(C),
            "AC_inv_size": len(xs),
            "r_max": r_max,
            "r_sum": sum_r,
            "r_identity": sum_r == len(A) * len(C),
            "maximizer_bound": r_max * len(xs) >= len(A) * len(C),
            "A_prime_size": len(A_prime),
            "degenerate": len(A_prime) == 1 and len(A) > 1,
        }
    )
    top = {"C": C, "x": x, "A2": A2, "r_max": r_max, "r_sum": sum_r, "AC_inv_size": len(xs)}
    return A_prime, top


@dataclass(frozen=True)
class DecompositionReport:
    A: GroupSet
    A_prime: GroupSet
    coset_rep: Matrix
    density: Fraction
    step_verdict: NilpotencyVerdict
    step_flag: str
    branch_trace: tuple
    config: EngineConfig
    C: GroupSet | None = None
    locator: Matrix | None = None
    r_stats: dict = field(default_factory=dict)
    corner_evidence: dict | None = None

    def to_dict(self) -> dict:
        return {
            "A": encode_groupset(self.A),
            "A_prime": encode_groupset(self.A_prime),
            "coset_rep": encode_matrix(self.coset_rep),
            "density": encode_rational(self.density),
            "step_verdict": self.step_verdict.to_dict(),
            "step_flag": self.step_flag,
            "branch_trace": list(self.branch_trace),
            "config": self.config.to_dict(),
            "C": encode_groupset(self.C) if self.C is not None else None,
            "locator": encode_matrix(self.locator) if self.locator is not None else None,
            "r_stats": dict(sorted(self.r_stats.items())),
            "corner_evidence": self.corner_evidence,
        }


def corner_evidence(A2: GroupSet, cfg: EngineConfig) -> dict:
    """B = A2 A2^-1, the corner set S of B^N, the ratio set T of B^N and |S+S|, |ST|."""
    n = A2.n
    N = cfg.corner_N if cfg.corner_N is not None else corner_power(n)
    B = product_set(A2, inverse_set(A2), cfg.cap)
    S, BN = corner_elements(B, N, cfg.corner_cap)
    T = sorted(ratio_partition(BN), key=GaussianRational.sort_key)
    stat = solymosi_statistic(S, S, T)
    return {
        "N": N,
        "N_formula": corner_power(n),
        "B_size": len(B),
        "BN_size": len(BN),
        "S": [encode_gq(s) for s in S],
        "T": [encode_gq(t) for t in T],
        "S_plus_S": stat.sizes["U+V"],
        "ST": stat.sizes["UW"],
        "statistic": stat.to_dict(),
    }


def decompose(A: GroupSet, config: EngineConfig | None = None) -> DecompositionReport:
    cfg = config or EngineConfig()
    if not len(A):
        raise PreconditionError("decompose needs a nonempty set")
    require_upper(A)
    trace: list = []
    A_prime, top = _solve(A, cfg, "root", trace)
    rep = A_prime[0]
    gens = left_translate(rep.inverse(), A_prime).to_set()
    cutoff = cfg.nil_cutoff if cfg.nil_cutoff is not None else A.n
    verdict = nilpotency_step(gens, cutoff)
    evidence = None
    if cfg.verify_corner and top is not None:
        evidence = corner_evidence(top["A2"], cfg)
    r_stats = {}
    if top is not None:
        r_stats = {
            "r_max": top["r_max"],
            "r_sum": top["r_sum"],
            "A_times_C": len(A) * len(top["C"]),
            "AC_inv_size": top["AC_inv_size"],
        }
    return DecompositionReport(
        A,
        A_prime,
        rep,
        Fraction(len(A), len(A_prime)),
        verdict,
        verdict.flag(A.n),
        tuple(trace),
        cfg,
        top["C"] if top else None,
        top["x"] if top else None,
        r_stats,
        evidence,
    )


# ---------------------------------------------------------------------------
# assembling the controlling approximate group

ASSEMBLY_POWER = 6


def _log_exponent(K: Fraction, base: Fraction) -> str | None:
    if base <= 1:
        return None
    return f"{math.log(K) / math.log(base):.12f}"


@dataclass(frozen=True)
class Assembly:
    S: GroupSet
    B_out: GroupSet
    square: GroupSet
    approx_certificate: ApproximateGroupCertificate
    control_certificate: ControlCertificate
    transfer_verdict: NilpotencyVerdict
    transfer_agrees: bool
    K_report: dict

    def to_dict(self) -> dict:
        return {
            "power": ASSEMBLY_POWER,
            "S": encode_groupset(self.S),
            "B_out_size": len(self.B_out),
            "B_out_digest": self.B_out.digest(),
            "square_size": len(self.square),
            "square_digest": self.square.digest(),
            "approx_certificate": self.approx_certificate.to_dict(include_sets=False),
            "control_certificate": self.control_certificate.to_dict(include_sets=False),
            "transfer_verdict": self.transfer_verdict.to_dict(),
            "transfer_agrees": self.transfer_agrees,
            "K_report": dict(sorted(self.K_report.items())),
        }


def assemble_control(A: GroupSet, report: DecompositionReport, cap=None) -> Assembly:
    """S = A'^-1 A', B_out = S^6; certify B_out and that it controls A."""
    if report.A != A:
        raise PreconditionError("report was produced from a different set")
    cap = _cap(cap)
    S = product_set(inverse_set(report.A_prime), report.A_prime, cap)
    seq = power_sequence(S, 2 * ASSEMBLY_POWER, cap)
    B_out, square = seq[ASSEMBLY_POWER - 1], seq[-1]
    # S is symmetric and contains id, so B_out already equals its symmetrization
    approx = certify_approximate_group(B_out, cap, square=square)
    control = certify_control(A, B_out, cap)
    verdict = nilpotency_step(S, report.step_verdict.cutoff)
    agrees = verdict.step == report.step_verdict.step
    trip = tripling(A, cap)
    K_report = {
        "tripling": encode_rational(trip),
        "approx_K": approx.K_witness,
        "control_K": encode_rational(control.K_witness),
        "log_exponent_approx": _log_exponent(Fraction(approx.K_witness), trip),
        "log_exponent_control": _log_exponent(control.K_witness, trip),
        "S_size": len(S),
        "B_out_size": len(B_out),
        "square_size": len(square),
    }
    return Assembly(S, B_out, square, approx, control, verdict, agrees, K_report)
