#!/usr/bin/env python3
"""Rank-3 walkthrough on the built-in 63-line root set.

Enumerates the order-12096 group spanned by the 63 reflections, classifies
its parabolic subgroups and prints the normalizer/complement summary.
Expect a couple of minutes of exact arithmetic.
"""

import time

from qreflect import catalog, parabolics


def main():
    t0 = time.time()
    spec = catalog.builtin_Q()
    print(f"root set '{spec.name}': {len(spec.lines)} lines")
    G = catalog.build_root_system_group(spec)
    print(f"group order {G.order}  [{time.time() - t0:.1f}s]")
    print()

    for c in parabolics.classify_parabolics(G):
        if not 0 < c.rank < G.n:
            continue
        q = parabolics.orthogonal_parabolic(G, c)
        rep = parabolics.complement_report(G, c)
        print(f"{c.label}: type {c.type_label}, rank {c.rank}, "
              f"length {c.length}, orthogonal partner {q.type_label}")
        if rep.present:
            print(f"    |N| = {rep.normalizer_order}, complement {rep.c_label}, "
                  f"fixed-space action {rep.c0_label}")
        else:
            print(f"    |N| = {rep.normalizer_order}, no complement "
                  f"(exhaustive search over the quotient)")
    print(f"\ntotal {time.time() - t0:.1f}s")


if __name__ == "__main__":
    main()
