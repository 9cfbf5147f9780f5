#!/usr/bin/env python3
"""Generate src/qreflect/data/st_rank2.json.

The primitive rank-2 unitary reflection groups (indices 4..22) all live
inside a scalar extension mu_a * P of a complexified binary polyhedral group
P: the image of such a group in SO(3) is a polyhedral rotation group, so the
preimage in U(2) is contained in U(1) * P.  We therefore build the four
ambient groups

    mu_12 * 2T,  mu_24 * 2O,  mu_60 * 2I,  mu_4 * 2I,

take all their reflections, split them into conjugacy classes, and close
every union of classes.  Each of the nineteen target groups is recognized by
(order, set of reflection orders), which is unique within its ambient group.
A small generating set of reflections per group is then serialized as
quaternion-literal matrices and written to the data file.
"""

from __future__ import annotations

import json
import os
import sys
from itertools import combinations

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from qreflect import catalog
from qreflect.engine import MatGroup, closure
from qreflect.quat import (HMatrix, Q_ZERO, complexify, is_reflection,
                           mat_mul, parse_quat, render_quat)

OUT = os.path.join(os.path.dirname(__file__), "..", "src", "qreflect", "data",
                   "st_rank2.json")


def scalar2(z):
    return HMatrix([[z, Q_ZERO], [Q_ZERO, z]])


def ambient(kind: str, a: int) -> MatGroup:
    P = catalog.build_kleinian(catalog.KleinianSpec(kind))
    gens = [complexify(g) for g in P.generators]
    gens.append(scalar2(catalog._zeta(a)))
    return closure(gens)


def reflection_classes(G: MatGroup):
    refl = [p for p in range(len(G.elements)) if is_reflection(G.elements[p])]
    gens = G.full_ref().small_gens()
    left = set(refl)
    classes = []
    while left:
        seed = min(left)
        orbit = {seed}
        queue = [seed]
        while queue:
            x = queue.pop()
            for g in gens:
                y = G.conj_pos(g, x)
                if y not in orbit:
                    orbit.add(y)
                    queue.append(y)
        classes.append(sorted(orbit))
        left -= orbit
    return classes


def _is_scalar(m: HMatrix) -> bool:
    return (m.rows[0][1].is_zero() and m.rows[1][0].is_zero()
            and m.rows[0][0] == m.rows[1][1])


def profile(sub: MatGroup):
    orders = sorted({g.order() for g in sub.elements if is_reflection(g)})
    scalars = sum(1 for g in sub.elements if _is_scalar(g))
    return sub.order, tuple(orders), scalars


def pick_generators(group: MatGroup):
    """A short list of reflections generating the group (essential-generator greedy)."""
    refl = sorted((g for g in group.elements if is_reflection(g)),
                  key=lambda m: (-m.order(), m.key))
    picked = []
    have = None
    for r in refl:
        if have is not None and r in have:
            continue
        picked.append(r)
        have = closure(picked)
        if have.order == group.order:
            break
    assert have is not None and have.order == group.order
    return picked


# (order, reflection orders, scalar-subgroup order) per target index; the
# scalar count is the order of the center (= gcd of the two degrees).
FAMILIES = [
    ("T", 12, {4: (24, (3,), 2), 5: (72, (3,), 6), 6: (48, (2, 3), 4),
               7: (144, (2, 3), 12)}),
    ("O", 24, {8: (96, (2, 4), 4), 9: (192, (2, 4), 8), 10: (288, (2, 3, 4), 12),
               11: (576, (2, 3, 4), 24), 12: (48, (2,), 2), 13: (96, (2,), 4),
               14: (144, (2, 3), 6), 15: (288, (2, 3), 12)}),
    ("I", 60, {16: (600, (5,), 10), 17: (1200, (2, 5), 20), 18: (1800, (3, 5), 30),
               19: (3600, (2, 3, 5), 60), 20: (360, (3,), 6), 21: (720, (2, 3), 12)}),
    ("I", 4, {22: (240, (2,), 4)}),
]


def main():
    out = {}
    for kind, a, targets in FAMILIES:
        F = ambient(kind, a)
        classes = reflection_classes(F)
        print(f"mu_{a}*2{kind}: order {F.order}, "
              f"reflection classes {[len(c) for c in classes]}")
        found: dict[tuple, list[MatGroup]] = {}
        for r in range(1, len(classes) + 1):
            for combo in combinations(classes, r):
                gens = [F.elements[p] for cls in combo for p in cls]
                sub = closure(gens)
                key = profile(sub)
                bucket = found.setdefault(key, [])
                if all(sub.index.keys() != other.index.keys() for other in bucket):
                    bucket.append(sub)
        for idx, key in sorted(targets.items()):
            sub = next((g for g in found.get(key, ())
                        if catalog._is_primitive_rank2(g)), None)
            if sub is None:
                raise SystemExit(f"G{idx} with profile {key} not found; have {sorted(found)}")
            gens = pick_generators(sub)
            check = closure(gens)
            assert check.order == key[0]
            rows_list = []
            for g in gens:
                rows = [";".join(render_quat(q) for q in row) for row in g.rows]
                reparsed = HMatrix([[parse_quat(t) for t in row.split(";")] for row in rows])
                assert reparsed == g, f"serialization round-trip failed for G{idx}"
                rows_list.append(rows)
            out[str(idx)] = {"order": key[0], "gens": rows_list}
            print(f"  G{idx}: order {key[0]}, {len(gens)} generating reflections")
    os.makedirs(os.path.dirname(OUT), exist_ok=True)
    with open(OUT, "w", encoding="utf-8") as fh:
        json.dump({"version": 1, "groups": out}, fh, indent=1, sort_keys=True)
    print("wrote", os.path.relpath(OUT))


if __name__ == "__main__":
    main()
