"""Independent re-checking of reports produced by :mod:`approxgroups.commands`.

Certificates are checked by testing their containments directly; witnesses
for nilpotency are re-evaluated with plain Matrix arithmetic.  Purely
statistical results (sizes, ratios) are recomputed and compared.
"""

from __future__ import annotations

from fractions import Fraction

from .commands import Options, input_digest, jordan_record, run_command
from .engine import ASSEMBLY_POWER, _solve, corner_elements, ratio_partition
from .errors import ParseError
from .growth import (
    check_approximate_group,
    check_control,
    check_ruzsa,
    control_constant,
    solymosi_statistic,
)
from .maps import predicate
from .matrix import Matrix, decode_matrix, diag_ratio
from .nilpotency import commutator_levels_vanish, nested_commutator
from .scalar import ONE, GaussianRational, decode_gq, decode_rational
from .sets import (
    GroupSet,
    decode_groupset,
    inverse_set,
    left_translate,
    pm_power_set,
    power_sequence,
    product_counts,
    product_set,
)


class Failed(Exception):
    def __init__(self, check: str, detail: str = ""):
        super().__init__(f"{check}: {detail}" if detail else check)
        self.check = check
        self.detail = detail


class Checker:
    """Collects named checks and stops at the first failure."""

    def __init__(self):
        self.passed: list[str] = []

    def __call__(self, name: str, ok: bool, detail: str = ""):
        if not ok:
            raise Failed(name, detail)
        self.passed.append(name)

    def run(self, checks, prefix: str = ""):
        for name, ok, detail in checks:
            self(prefix + name, ok, detail)


def _options(report) -> Options:
    cfg = report["manifest"]["config"]
    return Options(
        cap=int(cfg["cap"]),
        gamma=decode_rational(cfg["gamma"]),
        nil_cutoff=cfg.get("nil_cutoff"),
        seed=int(report["manifest"].get("seed", 0)),
        verify_corner=bool(cfg.get("verify_corner")),
        corner_n=cfg.get("corner_n"),
        max_power=cfg.get("max_power"),
        hom=cfg.get("hom", "pi"),
        subgroup=cfg.get("subgroup", "corner"),
        cutoff=cfg.get("cutoff"),
        radius=int(cfg.get("radius", 1)),
        label=cfg.get("label", "diagonal"),
    )


# ---------------------------------------------------------------------------
# shared pieces


def check_verdict(ck: Checker, gens: GroupSet, v: dict, prefix: str):
    """Re-evaluate a nilpotency verdict on the given generators."""
    mats = list(gens)
    members = set(mats)
    if len(gens) != v["generators_size"]:
        ck(prefix + "generators_size", False, f"{len(gens)} generators, report says {v['generators_size']}")
    step = v["step"]
    cutoff = v["cutoff"]
    if step is None:
        chain = [decode_matrix(m) for m in v["witness"]]
        ck(prefix + "witness_length", len(chain) == cutoff + 1, f"chain of length {len(chain)} for cutoff {cutoff}")
        ck(prefix + "witness_in_generators", all(g in members for g in chain))
        ck(prefix + "witness_nonvanishing", not nested_commutator(chain).is_identity(), "witness commutator is the identity")
        return
    step = int(step)
    ck(
        prefix + "commutators_vanish",
        commutator_levels_vanish(mats, step + 1),
        f"some {step + 1}-fold nested commutator of the generators is not the identity",
    )
    if step >= 2:
        chain = [decode_matrix(m) for m in v["nonvanishing"]]
        ck(prefix + "nonvanishing_length", len(chain) == step, f"chain of length {len(chain)} for step {step}")
        ck(prefix + "nonvanishing_in_generators", all(g in members for g in chain))
        ck(prefix + "nonvanishing_witness", not nested_commutator(chain).is_identity(), "witness commutator is the identity")
    else:
        ck(prefix + "step_positive", step == 1, f"step {step}")


def _flag(step, n):
    if step is None:
        return "exceeds_cutoff"
    if step <= n - 1:
        return "at_most_n_minus_1"
    return "equals_n" if step == n else "above_n"


def check_decomposition(ck: Checker, A: GroupSet, res: dict, prefix: str = "decomposition."):
    A_prime = decode_groupset(res["A_prime"])
    rep = decode_matrix(res["coset_rep"])
    ck(prefix + "A_matches_input", decode_groupset(res["A"]) == A)
    ck(prefix + "A_prime_nonempty", len(A_prime) > 0)
    ck(prefix + "A_prime_in_A", A_prime.issubset(A))
    ck(prefix + "coset_rep_in_A_prime", rep in A_prime)
    ck(prefix + "density", decode_rational(res["density"]) == Fraction(len(A), len(A_prime)))
    if res.get("C") is not None:
        C = decode_groupset(res["C"])
        x = decode_matrix(res["locator"])
        ck(prefix + "C_ratio_one", all(diag_ratio(c) == ONE for c in C), "C has an element with ratio != 1")
        hits = A.positions(left_translate(x, C))
        located = A.take(hits[hits >= 0]) if (hits >= 0).any() else GroupSet.empty(A.n)
        ck(prefix + "A_prime_is_A_cap_xC", located == A_prime)
        xs, r = product_counts(A, inverse_set(C))
        stats = res["r_stats"]
        ck(prefix + "r_identity", int(r.sum()) == len(A) * len(C) == stats["r_sum"] == stats["A_times_C"])
        ck(prefix + "r_max", int(r.max()) == stats["r_max"] == len(A_prime), "maximum of r(x) differs from |A'|")
        ck(prefix + "maximizer_bound", stats["r_max"] * len(xs) >= len(A) * len(C))
        ck(prefix + "AC_inv_size", len(xs) == stats["AC_inv_size"])
    for entry in res["branch_trace"]:
        if entry.get("dimension", 1) >= 2:
            ck(prefix + f"trace[{entry['path']}].r_identity", entry["r_identity"] and entry["r_sum"] == entry["size"] * entry["C_size"])
            ck(prefix + f"trace[{entry['path']}].maximizer_bound", entry["maximizer_bound"] and entry["r_max"] * entry["AC_inv_size"] >= entry["size"] * entry["C_size"])
    gens = left_translate(rep.inverse(), A_prime).to_set()
    v = res["step_verdict"]
    check_verdict(ck, gens, v, prefix + "step_verdict.")
    ck(prefix + "step_flag", res["step_flag"] == _flag(v["step"], A.n), f"flag {res['step_flag']!r} does not match step")
    ev = res.get("corner_evidence")
    if ev:
        S_list = [decode_gq(s) for s in ev["S"]]
        T_list = [decode_gq(t) for t in ev["T"]]
        stat = solymosi_statistic(S_list, S_list, T_list)
        ck(prefix + "corner_S_plus_S", stat.sizes["U+V"] == ev["S_plus_S"])
        ck(prefix + "corner_ST", stat.sizes["UW"] == ev["ST"])


def check_assembly(ck: Checker, A: GroupSet, dec: dict, asm: dict, cap: int, prefix: str = "assembly."):
    A_prime = decode_groupset(dec["A_prime"])
    S = decode_groupset(asm["S"])
    ck(prefix + "S_is_A_prime_difference_set", S == product_set(inverse_set(A_prime), A_prime, cap))
    seq = power_sequence(S, 2 * ASSEMBLY_POWER, cap)
    B_out, square = seq[ASSEMBLY_POWER - 1], seq[-1]
    ck(prefix + "B_out_digest", B_out.digest() == asm["B_out_digest"] and len(B_out) == asm["B_out_size"])
    ck(prefix + "square_digest", square.digest() == asm["square_digest"])
    ac = asm["approx_certificate"]
    X = decode_groupset(ac["X"])
    ck.run(check_approximate_group(B_out, X, square, cap), prefix + "approx.")
    ck(prefix + "approx.K_witness", ac["K_witness"] == len(X))
    cc = asm["control_certificate"]
    Xc = decode_groupset(cc["X"])
    K = decode_rational(cc["K_witness"])
    ck.run(check_control(A, B_out, Xc, K, cap), prefix + "control.")
    ck(prefix + "control.K_witness", K == control_constant(A, B_out, Xc))
    check_verdict(ck, S, asm["transfer_verdict"], prefix + "transfer.")
    agrees = asm["transfer_verdict"]["step"] == dec["step_verdict"]["step"]
    ck(prefix + "transfer_agrees", agrees == asm["transfer_agrees"] and agrees)


# ---------------------------------------------------------------------------
# per-command verification


def _recompute(ck: Checker, report: dict, sets, opts: Options):
    fresh = run_command(report["command"], sets, opts)
    ck("result_matches_recomputation", fresh["result"] == report["result"], "recomputed result differs")


def verify_report(report: dict) -> list[str]:
    """Raise :class:`Failed` naming the first failing check; return passed check names."""
    ck = Checker()
    try:
        command = report["command"]
        sets = [decode_groupset(s) for s in report["inputs"]]
        res = report["result"]
        opts = _options(report)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed report: {exc}") from exc
    if command == "sumproduct":
        opts.scalars = {k: [decode_gq(x) for x in v] for k, v in res["sets"].items()}
        digest_parts = [{k: res["sets"][k] for k in sorted(res["sets"])}]
    else:
        digest_parts = sets
    ck("manifest.input_digest", input_digest(digest_parts) == report["manifest"]["input_digest"], "input digest mismatch")
    ck("manifest.command", report["manifest"]["command"] == command)
    cap = opts.cap

    if command == "certify":
        (A,) = sets
        X = decode_groupset(res["X"])
        ck.run(check_approximate_group(A, X, None, cap))
        ck("K_witness", res["K_witness"] == len(X), f"K_witness {res['K_witness']} but |X| = {len(X)}")
    elif command == "control":
        A, B = sets
        X = decode_groupset(res["X"])
        K = decode_rational(res["K_witness"])
        ck.run(check_control(A, B, X, K, cap))
        ck("K_witness", K == control_constant(A, B, X))
    elif command == "cover":
        A, B = sets
        X1, X2 = decode_groupset(res["X1"]), decode_groupset(res["X2"])
        ck("X1_in_A", X1.issubset(A))
        ck("X2_in_A", X2.issubset(A))
        ck.run(check_ruzsa(A, B, X1, X2, cap))
        B2, AB, BA = product_set(B, B, cap), product_set(A, B, cap), product_set(B, A, cap)
        holds = len(B2) * len(B) <= max(len(AB), len(BA)) * len(A)
        ck("hypothesis_holds", res["hypothesis_holds"] == holds)
    elif command == "nilstep":
        (A,) = sets
        check_verdict(ck, A, res, "verdict.")
    elif command == "jordan":
        (A,) = sets
        for i, rec in enumerate(res["splits"]):
            g, s, u = (decode_matrix(rec[k]) for k in ("g", "semisimple", "unipotent"))
            ck(f"split[{i}].in_input", g in A)
            ck(f"split[{i}].reassembles", s @ u == g)
            ck(f"split[{i}].commute", s @ u == u @ s)
            fresh = jordan_record(g)
            ck(f"split[{i}].unipotent", fresh["checks"]["unipotent"] if u == decode_matrix(fresh["unipotent"]) else False)
            ck(f"split[{i}].squarefree_minpoly", fresh["checks"]["squarefree_minpoly"] if s == decode_matrix(fresh["semisimple"]) else False)
        ck("split_count", len(res["splits"]) == len(A))
    elif command == "reduce":
        (A,) = sets
        pred = predicate(res["label_predicate"])
        A_prime = decode_groupset(res["A_prime"])
        labels = [pred(g) for g in A]
        chosen = [g for g, lab in zip(A, labels) if repr(lab) == res["label"]]
        ck("A_prime_is_label_class", GroupSet(chosen, n=A.n) == A_prime if chosen else False)
        sizes = {}
        for lab in labels:
            sizes[lab] = sizes.get(lab, 0) + 1
        ck("A_prime_class_is_largest", len(A_prime) == max(sizes.values()))
        ck("pigeonhole_ratio", decode_rational(res["pigeonhole_ratio"]) == Fraction(len(A_prime), len(A)))
        B = product_set(inverse_set(A_prime), A_prime, cap)
        S = pm_power_set(B, 6, cap)
        home = pred(Matrix.identity(A.n))
        ck("S_in_subgroup", all(pred(s) == home for s in S))
        cert = res["certificate"]
        X = decode_groupset(cert["X"])
        K = decode_rational(cert["K_witness"])
        ck.run(check_control(A, S, X, K, cap), "certificate.")
        ck("certificate.K_witness", K == control_constant(A, S, X))
    elif command == "decompose":
        (A,) = sets
        check_decomposition(ck, A, res, "")
        if res.get("corner_evidence"):
            _recompute_evidence(ck, A, res, opts)
    elif command == "assemble":
        (A,) = sets
        check_decomposition(ck, A, res["decomposition"])
        check_assembly(ck, A, res["decomposition"], res["assembly"], cap)
    elif command in ("stats", "fibers", "homtripling", "intersect", "sumproduct", "ball"):
        _recompute(ck, report, sets, opts)
    else:
        raise ParseError(f"unknown command {command!r} in report")
    return ck.passed


def _recompute_evidence(ck: Checker, A: GroupSet, res: dict, opts: Options):
    ev = res["corner_evidence"]
    # the corner set depends on A2, which the recursion rebuilds
    # deterministically from A and the config

    trace: list = []
    _, top = _solve(A, opts.engine_config(), "root", trace)
    B = product_set(top["A2"], inverse_set(top["A2"]), opts.cap)
    S, BN = corner_elements(B, ev["N"], opts.cap)
    T = sorted(ratio_partition(BN), key=GaussianRational.sort_key)
    ck("corner_S", [decode_gq(s) for s in ev["S"]] == S)
    ck("corner_T", [decode_gq(t) for t in ev["T"]] == T)


def verify_text(text: str):
    import json

    try:
        report = json.loads(text)
    except ValueError as exc:
        raise ParseError(f"report is not JSON: {exc}") from exc
    return verify_report(report)

