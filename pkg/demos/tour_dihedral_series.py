#!/usr/bin/env python3
"""Closed-form predictions vs direct computation for the dihedral series.

For a handful of parameter points (m, l, r) the rank-1 parabolic classes of
the associated rank-2 group are classified two ways: once from the closed
formulas (gcd bookkeeping) and once by brute enumeration.  The two answers
are printed side by side.
"""

from collections import Counter

from qreflect import catalog, parabolics


def label(kind_k):
    kind, k = kind_k
    return f"{kind}{k}"


def main():
    for m, l, r in ((2, 1, 1), (3, 1, 1), (4, 2, 1), (6, 2, 1), (6, 3, 1)):
        exp = catalog.dihedral_series_expected(m, l, r)
        G = catalog.build_rank2_exceptional(catalog.dihedral_series_spec(m, l, r))

        got = Counter()
        for c in parabolics.classify_parabolics(G):
            if c.rank != 1:
                continue
            rep = parabolics.complement_report(G, c)
            got[(len(c.rep), c.length, rep.c_label)] += 1

        want = Counter()
        if exp["p1"]:
            want[(l, 2, label(exp["p1"]["complement"]))] += 1
        for side in ("zeta", "j"):
            s = exp[side]
            want[(2, s["length"], label(s["complement"]))] += s["classes"]

        verdict = "agree" if got == want else "DISAGREE"
        print(f"(m,l,r) = ({m},{l},{r}), |G| = {G.order}: {verdict}")
        for (p, ln, comp), k in sorted(want.items()):
            print(f"    {k} class(es): |P|={p}, length {ln}, complement {comp}")


if __name__ == "__main__":
    main()
