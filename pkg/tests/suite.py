"""The report suite shared by the acceptance tests.

``build_reports()`` runs a fixed list of commands on the decomposition corpus
and a few seeded extras and returns the canonical report text of each.
Running this file writes the same mapping as JSON, which lets a test produce
a second copy in a fresh interpreter with a different hash seed.
"""

import json
import sys

from approxgroups import families
from approxgroups.commands import Options, dumps, run_command
from approxgroups.matrix import Matrix, diag, elementary
from approxgroups.sets import GroupSet


def corpus():
    return {
        "heisenberg-ball(1)": families.heisenberg_ball(1),
        "heisenberg-ball(2)": families.heisenberg_ball(2),
        "diag-progression(2,3)": families.diag_progression(2, 3),
        "corner-progression(5,3)": families.corner_progression(5, 3),
        "unitriangular-ball(3,1)": families.unitriangular_ball(3, 1),
    }


def jobs():
    """(name, command, input sets, options) in a fixed order."""
    out = []
    for name, A in corpus().items():
        for command in ("stats", "decompose", "assemble", "certify", "fibers", "homtripling", "intersect", "jordan"):
            out.append((f"{command}:{name}", command, [A], Options()))
    out.append(("decompose-corner:heisenberg-ball(1)", "decompose", [families.heisenberg_ball(1)], Options(verify_corner=True, corner_n=2)))
    out.append(("reduce:dihedral(2)", "reduce", [families.dihedral(2)], Options(label="diagonal")))
    out.append(("control:corner(4)/corner(1)", "control", [families.corner_progression(4, 3), families.corner_progression(1, 3)], Options()))
    out.append(("sumproduct:{1,2}", "sumproduct", [], Options(scalars={"U": [1, 2]})))
    out.append(("sumproduct:geometric", "sumproduct", [], Options(scalars={"U": [2**k for k in range(5)]})))
    out.append(("nilstep:unitriangular(4)", "nilstep", [families.unitriangular_ball(4, 1)], Options(cutoff=5)))
    out.append(("nilstep:affine", "nilstep", [GroupSet([diag(2, 1), elementary(2, 0, 1)])], Options(cutoff=3)))
    out.append(("ball:heisenberg{x,y}", "ball", [GroupSet([elementary(3, 0, 1), elementary(3, 1, 2)])], Options(radius=2)))
    for seed in range(4):
        A = families.random_upper_triangular(3, 12, seed=seed)
        B = families.random_upper_triangular(3, 4, seed=100 + seed)
        B = B.union(GroupSet([g.inverse() for g in B]), GroupSet([Matrix.identity(3)]))
        out.append((f"stats:random({seed})", "stats", [A], Options(seed=seed)))
        out.append((f"cover:random({seed})", "cover", [A, B], Options(seed=seed)))
    return out


def build_reports(skip=()):
    reports = {}
    for name, command, sets, opts in jobs():
        if name in skip:
            continue
        reports[name] = dumps(run_command(command, sets, opts))
    return reports


if __name__ == "__main__":
    with open(sys.argv[1], "w", encoding="utf-8") as fh:
        json.dump(build_reports(), fh, sort_keys=True)
