"""Group family constructors and counting formulas."""

import pytest

from qreflect import catalog, engine
from qreflect.catalog import (EHSpec, ImprimSpec, KleinianSpec, Rank2ExcSpec,
                              build_EH, build_imprimitive, build_kleinian,
                              build_rank2_exceptional, builtin_Q,
                              build_root_system_group, class_length_formula,
                              dihedral_params, dihedral_series_expected,
                              dihedral_series_spec, kleinian_order,
                              kth_power_subgroup, lemma_e,
                              normalizer_index_formula, parabolic_rep,
                              st_rank2_group, theorem_imprim_predicate)
from qreflect.quat import Q_ONE, is_reflection


def K(label):
    if label in ("T", "O", "I"):
        return KleinianSpec(label)
    return KleinianSpec(label[0], int(label[1:]))


def test_kleinian_orders():
    assert build_kleinian(K("C6")).order == 6
    assert build_kleinian(K("D2")).order == 8
    assert build_kleinian(K("T")).order == 24
    assert build_kleinian(K("O")).order == 48
    assert build_kleinian(K("I")).order == 120


def test_kleinian_validation():
    with pytest.raises(ValueError):
        KleinianSpec("C", 0)
    with pytest.raises(ValueError):
        KleinianSpec("D", 1)
    with pytest.raises(ValueError):
        KleinianSpec("X", 2)


def test_special_element_orders():
    assert catalog.OMEGA.order() if hasattr(catalog.OMEGA, "order") else True
    from qreflect.quat import HMatrix
    assert HMatrix([[catalog.OMEGA]]).order() == 3
    assert HMatrix([[catalog.SIGMA]]).order() == 5
    assert HMatrix([[catalog.GAMMA]]).order() == 4


def test_imprimitive_orders():
    assert build_imprimitive(ImprimSpec(K("C2"), K("C2"), 2)).order == 8
    assert build_imprimitive(ImprimSpec(K("C4"), K("C2"), 2)).order == 16
    assert build_imprimitive(ImprimSpec(K("D2"), K("C2"), 3)).order == 768


def test_imprimitive_admissibility():
    with pytest.raises(ValueError):
        build_imprimitive(ImprimSpec(K("C4"), K("C3"), 2))
    with pytest.raises(ValueError):
        build_imprimitive(ImprimSpec(K("T"), K("C2"), 2))


def test_parabolic_rep_orders():
    G = build_imprimitive(ImprimSpec(K("D2"), K("C2"), 3))
    # |P| = |K|^(n-m-1) |H| (n-m)! prod(lam_i!) for m < n
    P1 = parabolic_rep(G, (1,))
    assert len(P1) == 8 * 2 * 2      # one K-block of rank 2 remains
    P2 = parabolic_rep(G, (2,))
    assert len(P2) == 2 * 2
    P3 = parabolic_rep(G, (1, 1))
    assert len(P3) == 2


def test_theorem_predicate_values():
    # the one advertised failure case
    assert not theorem_imprim_predicate(K("D2"), K("C2"), 3, (1, 1))
    assert theorem_imprim_predicate(K("D2"), K("C2"), 3, (1,))
    assert theorem_imprim_predicate(K("D2"), K("C2"), 3, (2,))
    # non-hard pairs always satisfy the criterion
    assert theorem_imprim_predicate(K("D3"), K("C3"), 3, (1, 1))
    assert theorem_imprim_predicate(K("T"), K("T"), 3, (1, 1))
    # (O, T) is a hard pair
    assert not theorem_imprim_predicate(K("O"), K("T"), 3, (1, 1))


def test_counting_formulas():
    # G2(C4, C2), lam=(2): 4 subgroups in 2 classes
    assert class_length_formula(K("C4"), K("C2"), 2, (2,)) == 4
    assert lemma_e(K("C4"), K("C2"), (2,)) == 2
    assert lemma_e(K("C4"), K("C2"), (1, 1)) == 1
    # index of P in N for a rank-1 parabolic of G3(D2, C2)
    idx = normalizer_index_formula(K("D2"), K("C2"), 3, (1,))
    G = build_imprimitive(ImprimSpec(K("D2"), K("C2"), 3))
    P = parabolic_rep(G, (1,))
    N = engine.normalizer(G, P)
    assert idx == len(N) // len(P)


def test_kth_power_subgroup():
    assert kth_power_subgroup(K("D3"), K("C3"), 2) == K("C6")
    assert kth_power_subgroup(K("T"), K("D2"), 1) == K("D2")
    assert kth_power_subgroup(K("T"), K("D2"), 2) == K("D2")


def test_rank2_exceptional_orders():
    for spec, order, lsize in [
        (Rank2ExcSpec(K("T"), K("C2"), "rho_gamma"), 96, 12),
        (Rank2ExcSpec(K("O"), K("C2"), "identity"), 192, 20),
        (Rank2ExcSpec(K("I"), K("C2"), "theta"), 480, 20),
        (Rank2ExcSpec(K("I"), K("C1"), "theta"), 240, 20),
    ]:
        G = build_rank2_exceptional(spec)
        assert G.order == order
        assert len(G.rank2_data[3]) == lsize


def test_dihedral_series():
    spec = dihedral_series_spec(2, 1, 1)
    G = build_rank2_exceptional(spec)
    assert G.order == 16
    p = dihedral_params(2, 1, 1)
    assert p["n"] == 4 and p["kappa"] == 2 and p["nu"] == 1
    with pytest.raises(ValueError):
        build_rank2_exceptional(dihedral_series_spec(2, 1, 2))  # gcd(n,r)=2


def test_dihedral_series_expected_shape():
    exp = dihedral_series_expected(3, 2, 1)
    assert exp["p1"] == {"length": 2, "complement": ("D", 3)}
    assert exp["zeta"]["classes"] == 1
    assert exp["j"]["classes"] == 1


def test_st_rank2_groups():
    assert st_rank2_group(8).order == 96
    assert st_rank2_group(12).order == 48
    G4 = st_rank2_group(4)
    assert G4.order == 24
    assert all(is_reflection(g) for g in G4.generators)


def test_EH_orders():
    for h0, order in [(5, 144), (8, 192), (12, 480), (14, 288), (22, 960)]:
        G = build_EH(EHSpec(h0))
        assert G.order == order
        H0g, Hg, s = G.eh_data
        assert G.order == 2 * Hg.order
        assert s.order() == 2 and is_reflection(s)


def test_builtin_Q_and_subsystem():
    spec = builtin_Q()
    assert len(spec.lines) == 63
    # first 15 lines (coordinate + plain/i pairs) generate G(4,2,3)
    from qreflect.catalog import RootSystemSpec
    sub = RootSystemSpec("Q15", spec.lines[:15])
    G = build_root_system_group(sub)
    assert G.order == 192
    assert all(is_reflection(g) for g in G.generators)


def test_root_file_round_trip(tmp_path):
    spec = builtin_Q()
    lines = ["# sample root file"]
    for v in spec.lines[:15]:
        from qreflect.quat import render_quat
        lines.append(";".join(render_quat(q) for q in v))
    path = tmp_path / "roots.txt"
    path.write_text("\n".join(lines) + "\n")
    loaded = catalog.load_root_file(path)
    assert len(loaded.lines) == 15
    assert build_root_system_group(loaded).order == 192


def test_block_diagonal_product():
    A = build_kleinian(K("C2"))
    B = build_kleinian(K("C3"))
    P = catalog.block_diagonal_product([A, B])
    assert P.n == 2 and P.order == 6


def test_delta_compatible_hom_oracle():
    assert catalog.delta_compatible_hom_search(K("D2"), K("C2"), 1, 1)
    assert not catalog.delta_compatible_hom_search(K("D2"), K("C2"), 2, 1)
