"""One report-producing function per CLI command.

A report is a plain JSON-ready dict: ``{"command", "manifest", "inputs",
"result"}``.  It carries enough data (input sets, witnesses, certificates)
for :mod:`approxgroups.verify` to re-check it without the producing code.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from .engine import EngineConfig, assemble_control, decompose
from .errors import PreconditionError
from .growth import (
    certify_approximate_group,
    certify_control,
    fiber_stats,
    finite_index_reduce,
    growth_stats,
    hom_tripling_report,
    intersection_growth,
    ruzsa_cover,
    solymosi_statistic,
)
from .maps import predicate
from .matrix import (
    Matrix,
    encode_matrix,
    jordan_split,
    minimal_polynomial,
    unipotent_nilpotency_ok,
)
from .nilpotency import group_ball, nilpotency_step
from .poly import is_squarefree
from .scalar import GaussianRational, encode_gq, encode_rational
from .sets import GroupSet, GrowthCap, encode_groupset

COMMANDS = (
    "stats",
    "certify",
    "control",
    "cover",
    "fibers",
    "homtripling",
    "intersect",
    "sumproduct",
    "nilstep",
    "ball",
    "reduce",
    "decompose",
    "assemble",
    "jordan",
)

# commands and how many GroupSet inputs they take
ARITY = {"control": 2, "cover": 2, "sumproduct": 0}


@dataclass
class Options:
    cap: int = GrowthCap().max_elements
    gamma: Fraction = Fraction(4)
    nil_cutoff: int | None = None
    seed: int = 0
    verify_corner: bool = False
    corner_n: int | None = None
    max_power: int | None = None
    hom: str = "pi"
    subgroup: str = "corner"
    cutoff: int | None = None
    radius: int = 1
    label: str = "diagonal"
    scalars: dict = field(default_factory=dict)

    def engine_config(self) -> EngineConfig:
        return EngineConfig(
            gamma=self.gamma,
            nil_cutoff=self.nil_cutoff,
            cap=GrowthCap(self.cap),
            corner_cap=GrowthCap(self.cap),
            verify_corner=self.verify_corner,
            corner_N=self.corner_n,
        )

    def to_dict(self) -> dict:
        return {
            "cap": self.cap,
            "gamma": encode_rational(self.gamma),
            "nil_cutoff": self.nil_cutoff,
            "verify_corner": self.verify_corner,
            "corner_n": self.corner_n,
            "max_power": self.max_power,
            "hom": self.hom,
            "subgroup": self.subgroup,
            "cutoff": self.cutoff,
            "radius": self.radius,
            "label": self.label,
        }


def input_digest(parts) -> str:
    h = hashlib.sha256()
    for p in parts:
        if isinstance(p, GroupSet):
            h.update(p.digest().encode())
        else:
            h.update(json.dumps(p, sort_keys=True).encode())
        h.update(b"|")
    return h.hexdigest()


def manifest(command: str, inputs, opts: Options) -> dict:
    return {
        "command": command,
        "input_digest": input_digest(inputs),
        "config": opts.to_dict(),
        "seed": opts.seed,
        "version": __version__,
    }


# ---------------------------------------------------------------------------


def _stats(sets, o):
    (A,) = sets
    return growth_stats(A, o.max_power or 3, o.cap).to_dict()


def _certify(sets, o):
    (A,) = sets
    return certify_approximate_group(A, o.cap).to_dict(include_sets=False)


def _control(sets, o):
    A, B = sets
    return certify_control(A, B, o.cap).to_dict(include_sets=False)


def _cover(sets, o):
    A, B = sets
    return ruzsa_cover(A, B, o.cap).to_dict()


def _fibers(sets, o):
    (A,) = sets
    return fiber_stats(A, o.hom, o.cap).to_dict()


def _homtripling(sets, o):
    (A,) = sets
    return hom_tripling_report(A, o.hom, o.cap).to_dict()


def _intersect(sets, o):
    (A,) = sets
    return intersection_growth(A, o.subgroup, o.max_power or 4, o.cap).to_dict()


def _sumproduct(sets, o):
    U = o.scalars.get("U")
    if not U:
        raise PreconditionError("sumproduct needs a nonempty U")
    V = o.scalars.get("V") or U
    W = o.scalars.get("W") or U
    U, V, W = ([GaussianRational.coerce(x) for x in v] for v in (U, V, W))
    out = solymosi_statistic(U, V, W).to_dict()
    out["sets"] = {k: [encode_gq(x) for x in sorted(set(v), key=GaussianRational.sort_key)] for k, v in (("U", U), ("V", V), ("W", W))}
    return out


def _nilstep(sets, o):
    (A,) = sets
    cutoff = o.cutoff if o.cutoff is not None else A.n
    return nilpotency_step(A, cutoff).to_dict()


def _ball(sets, o):
    (A,) = sets
    ball = group_ball(A, o.radius, o.cap)
    return {"radius": o.radius, "size": len(ball), "digest": ball.digest(), "ball": encode_groupset(ball)}


def _reduce(sets, o):
    (A,) = sets
    pred = predicate(o.label)
    out = finite_index_reduce(A, pred, o.cap).to_dict()
    out["label_predicate"] = pred.name
    return out


def _decompose(sets, o):
    (A,) = sets
    return decompose(A, o.engine_config()).to_dict()


def _assemble(sets, o):
    (A,) = sets
    rep = decompose(A, o.engine_config())
    asm = assemble_control(A, rep, o.cap)
    return {"decomposition": rep.to_dict(), "assembly": asm.to_dict()}


def jordan_record(g: Matrix) -> dict:
    pair = jordan_split(g)
    s, u = pair.semisimple, pair.unipotent
    return {
        "g": encode_matrix(g),
        "semisimple": encode_matrix(s),
        "unipotent": encode_matrix(u),
        "checks": {
            "reassembles": s @ u == g,
            "commute": s @ u == u @ s,
            "unipotent": unipotent_nilpotency_ok(u),
            "squarefree_minpoly": is_squarefree(minimal_polynomial(s)),
        },
    }


def _jordan(sets, o):
    (A,) = sets
    return {"splits": [jordan_record(g) for g in A]}


RUNNERS = {
    "stats": _stats,
    "certify": _certify,
    "control": _control,
    "cover": _cover,
    "fibers": _fibers,
    "homtripling": _homtripling,
    "intersect": _intersect,
    "sumproduct": _sumproduct,
    "nilstep": _nilstep,
    "ball": _ball,
    "reduce": _reduce,
    "decompose": _decompose,
    "assemble": _assemble,
    "jordan": _jordan,
}


def run_command(command: str, sets: list[GroupSet], opts: Options | None = None) -> dict:
    opts = opts or Options()
    if command not in RUNNERS:
        raise PreconditionError(f"unknown command {command!r}")
    want = ARITY.get(command, 1)
    if len(sets) != want:
        raise PreconditionError(f"{command} takes {want} input set(s), got {len(sets)}")
    result = RUNNERS[command](sets, opts)
    # sumproduct has no set inputs; its digest covers the normalized U, V, W
    digest_parts = list(sets) if sets else [result["sets"]]
    return {
        "command": command,
        "manifest": manifest(command, digest_parts, opts),
        "inputs": [encode_groupset(s) for s in sets],
        "result": result,
    }


def dumps(report: dict) -> str:
    """Canonical JSON text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(report, sort_keys=True, indent=1, separators=(",", ": "), ensure_ascii=True) + "\n"
