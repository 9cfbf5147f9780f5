#!/usr/bin/env python3
"""Walk through the rank-2 story on one small group.

Builds the order-192 group generated by the binary octahedral scalars
together with the swap reflection, lists its parabolic classes, and shows
the normalizer / complement data for each of them.
"""

from qreflect import catalog, parabolics


def main():
    spec = catalog.Rank2ExcSpec(catalog.KleinianSpec("O"),
                                catalog.KleinianSpec("C", 2), "identity")
    G = catalog.build_rank2_exceptional(spec)
    print(f"built {spec.label()}  (order {G.order}, "
          f"{len(parabolics.reflections(G))} reflections)")
    print()

    for c in parabolics.classify_parabolics(G):
        if not 0 < c.rank < G.n:
            continue
        rep = parabolics.complement_report(G, c)
        print(f"{c.label}: type {c.type_label}, rank {c.rank}, "
              f"class length {c.length}")
        print(f"    |N| = {rep.normalizer_order}, "
              f"complement {'present' if rep.present else 'absent'}"
              + (f" of type {rep.c_label}" if rep.present else ""))
        if rep.c0_label is not None:
            print(f"    action on the fixed line: {rep.c0_label}")
    print()
    print("golden-table cross check:")
    print(parabolics.verify_table("table2").render())


if __name__ == "__main__":
    main()
