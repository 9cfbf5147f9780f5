"""Fixed-space lattices, parabolic classification, normalizers."""

import pytest

from qreflect import catalog, engine, parabolics
from qreflect.catalog import (EHSpec, ImprimSpec, KleinianSpec, build_EH,
                              build_imprimitive, build_kleinian)
from qreflect.parabolics import (as_group, classify_parabolics,
                                 complement_report, fix_space_of,
                                 fixed_space_lattice, identify_type,
                                 normalizer_of_parabolic, orthogonal_parabolic,
                                 pointwise_stabilizer, reflections,
                                 restrict_to_fix, same_abstract_type,
                                 verify_table)
from qreflect.quat import HSubspace, is_reflection


def K(label):
    if label in ("T", "O", "I"):
        return KleinianSpec(label)
    return KleinianSpec(label[0], int(label[1:]))


def G2_C2():
    return build_imprimitive(ImprimSpec(K("C2"), K("C2"), 2))


def test_lattice_small_group():
    G = G2_C2()
    lat = fixed_space_lattice(G)
    # V, 0, two coordinate lines and two diagonal lines
    assert len(lat) == 6
    dims = sorted(U.dim for U in lat.spaces)
    assert dims == [0, 1, 1, 1, 1, 2]


def test_lattice_rank_one():
    G = build_kleinian(K("C2"))
    lat = fixed_space_lattice(G)
    assert sorted(U.dim for U in lat.spaces) == [0, 1]


def test_steinberg_property_small():
    # every lattice element equals the fixed space of its stabilizer,
    # and that stabilizer is generated by the reflections it contains
    G = build_imprimitive(ImprimSpec(K("C4"), K("C2"), 2))
    lat = fixed_space_lattice(G)
    for U in lat.spaces:
        P = pointwise_stabilizer(G, U)
        assert fix_space_of(P) == U
        gens = [p for p in P.positions
                if is_reflection(G.elements[p])]
        if U.dim < G.n and U.dim > 0:
            H = engine.subgroup_closure(G, gens) if gens else None
            assert H is not None and len(H) == len(P)


def test_classify_parabolics_counts():
    G = G2_C2()
    classes = classify_parabolics(G)
    # trivial, two rank-1 classes (coordinate / diagonal), full group
    assert len(classes) == 4
    assert [c.rank for c in classes] == [0, 1, 1, 2]
    assert classes[0].type_label == "1"
    assert classes[-1].type_label == "G"
    assert {c.length for c in classes if c.rank == 1} == {2}
    for c in classes:
        assert c.space == fix_space_of(c.rep)


def test_normalizer_orbit_stabilizer():
    G = build_imprimitive(ImprimSpec(K("D2"), K("C2"), 2))
    for c in classify_parabolics(G):
        N = normalizer_of_parabolic(G, c)
        assert len(N) * c.length == G.order
        for p in N.positions:
            pinv = G.inv_pos(p)
            assert c.rep.posset == {
                G.mul_pos(G.mul_pos(p, q), pinv) for q in c.rep.positions}


def test_restrict_to_fix():
    G = build_imprimitive(ImprimSpec(K("C4"), K("C2"), 2))
    classes = classify_parabolics(G)
    c = next(c for c in classes if c.rank == 1)
    N = normalizer_of_parabolic(G, c)
    res, ker = restrict_to_fix(N, c.space)
    assert res.n == c.space.dim
    assert len(ker) * res.order == len(N)
    # the parabolic acts trivially on its own fixed space
    assert c.rep.posset <= ker.posset


def test_identify_type_oracles():
    assert identify_type(build_kleinian(K("C6"))) == "C6"
    assert identify_type(build_kleinian(K("D3"))) == "D3"
    assert identify_type(build_kleinian(K("T"))) == "T"
    assert identify_type(build_kleinian(K("O"))) == "O"
    assert identify_type(build_kleinian(K("I"))) == "I"
    assert identify_type(G2_C2()) == "G(2,1,2)"
    G332 = build_imprimitive(ImprimSpec(K("C3"), K("C1"), 2))
    assert identify_type(G332) == "G(3,3,2)"
    assert identify_type(catalog.st_rank2_group(8)) == "G8"


def test_same_abstract_type():
    A = build_kleinian(K("D2"))
    B = build_imprimitive(ImprimSpec(K("C2"), K("C2"), 2))
    assert not same_abstract_type(A, B)       # Q8 vs D4
    assert same_abstract_type(A, A)
    assert same_abstract_type(G2_C2(), B)


def test_orthogonal_parabolic():
    G = G2_C2()
    classes = classify_parabolics(G)
    triv = classes[0]
    full = classes[-1]
    assert orthogonal_parabolic(G, triv) is full
    assert orthogonal_parabolic(G, full) is triv
    for c in classes:
        q = orthogonal_parabolic(G, c)
        assert c.rank + q.rank == G.n


def test_complement_report_split():
    G = build_imprimitive(ImprimSpec(K("C4"), K("C2"), 2))
    classes = classify_parabolics(G)
    c = next(c for c in classes if c.rank == 1)
    rep = complement_report(G, c)
    assert rep.present
    assert rep.complement is not None
    assert len(rep.complement) * len(c.rep) == rep.normalizer_order
    assert rep.c0 is not None


def test_complement_report_trivial_class():
    G = build_imprimitive(ImprimSpec(K("C4"), K("C2"), 2))
    classes = classify_parabolics(G)
    rep = complement_report(G, classes[0])
    assert rep.present and rep.kernel_order >= 1
    assert rep.normalizer_order == G.order


def test_eh_reflection_class_types():
    G = build_EH(EHSpec(8))
    refl = reflections(G)
    seen = {}
    for p in refl:
        orbit = frozenset(
            G.mul_pos(G.mul_pos(x, p), G.inv_pos(x)) for x in range(G.order))
        seen[orbit] = p
    kinds = []
    for orbit, p in seen.items():
        g = G.elements[p]
        cplx = all(q.is_complex() for row in g.rows for q in row)
        kinds.append((G.order_of(p), len(orbit), cplx))
    assert sorted(kinds) == [(2, 4, False), (2, 6, True), (4, 12, True)]


def test_verify_table2_passes():
    report = verify_table("table2")
    assert report.ok
    assert all(status == "equal" for _, status, _ in report.rows)


def test_verify_table3_default_rows():
    report = verify_table("table3")
    statuses = {k: s for k, s, _ in report.rows}
    assert statuses["E(G8)"] == "equal"
    assert statuses["E(G5)"] == "equal"
    assert statuses["E(G7)"] == "skipped"
    assert report.ok
