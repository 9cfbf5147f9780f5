"""Constructors for the supported group families.

Four families of quaternionic reflection groups are provided, each with a
small frozen "spec" describing the parameters:

  * rank-1 groups: the finite subgroups of the unit quaternions (cyclic C_d,
    binary dihedral D_d, binary tetrahedral T, octahedral O, icosahedral I);
  * the imprimitive series G_n(K, H) of monomial matrices with diagonal
    entries in K and diagonal product in H;
  * the exceptional rank-2 groups G(K, H, phi) built from a coset map phi
    on K/H of order at most 2;
  * the rank-2 primitive extensions E(H) = <H, s> with H = mu_d * H0 for a
    primitive complex reflection group H0 (generator data ships with the
    package), and root-system groups W(X) with the rank-3 system Q built in.

Also here: the closed-form complement criterion and the class-length /
normalizer-index formulas for the imprimitive series, so they can be
cross-checked against explicit searches.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from math import factorial, gcd

from . import cyclo, engine
from .cyclo import ONE, from_rational, root_of_unity
from .quat import (HMatrix, HSubspace, Q_I, Q_J, Q_ONE, Q_ZERO, Quat,
                   identity_matrix, is_reflection, parse_quat, quat_conj,
                   quat_inv, quat_mul, reflection_from_root, render_quat)
from .engine import (DEFAULT_CAP, MatGroup, QuotientStructure, SubgroupRef,
                     automorphism_search, closure, delta, homomorphism_search,
                     is_inner, quotient, subgroup_closure)

__all__ = [
    "KleinianSpec",
    "ImprimSpec",
    "Rank2ExcSpec",
    "EHSpec",
    "RootSystemSpec",
    "OMEGA",
    "SIGMA",
    "TAU",
    "GAMMA",
    "kleinian_order",
    "build_kleinian",
    "build_imprimitive",
    "parabolic_rep",
    "theorem_imprim_predicate",
    "class_length_formula",
    "normalizer_index_formula",
    "lemma_e",
    "kth_power_subgroup",
    "build_rank2_exceptional",
    "dihedral_series_spec",
    "rank2_p1",
    "rank2_p2",
    "build_EH",
    "st_rank2_group",
    "ST_MIN_D",
    "build_root_system_group",
    "builtin_Q",
    "parse_root_file",
    "load_root_file",
    "diagonal_power_group",
    "delta_compatible_hom_search",
]

# --- distinguished quaternions -------------------------------------------------

_HALF = from_rational("1/2")

#: omega = (-1 + i + j + k)/2, an element of order 3 in the unit quaternions.
OMEGA = Quat.from_components("-1/2", "1/2", "1/2", "1/2")

#: the golden ratio (1 + sqrt 5)/2 as an exact cyclotomic number.
TAU = (ONE + cyclo.SQRT5) * _HALF
_TAU_INV = TAU - ONE  # tau^-1 = tau - 1

#: sigma = (tau^-1 + i + tau*j)/2, an element of order 5.
SIGMA = Quat(_TAU_INV * _HALF + _HALF * cyclo.I, TAU * _HALF)

_SQRT2 = root_of_unity(8, 1) + root_of_unity(8, 7)

#: gamma = (i - j)/sqrt 2, a unit quaternion normalizing the binary tetrahedral group.
GAMMA = Quat((_SQRT2 * _HALF) * cyclo.I, -(_SQRT2 * _HALF))


def _zeta(n: int, k: int = 1) -> Quat:
    return Quat(root_of_unity(n, k))


def _m1(q: Quat) -> HMatrix:
    return HMatrix([[q]])


# --- rank-1 groups --------------------------------------------------------------

_KLEINIAN_KINDS = ("C", "D", "T", "O", "I")


@dataclass(frozen=True)
class KleinianSpec:
    """A finite subgroup of the unit quaternions: kind in {C, D, T, O, I}."""

    kind: str
    d: int = 0

    def __post_init__(self):
        if self.kind not in _KLEINIAN_KINDS:
            raise ValueError(f"unknown rank-1 kind {self.kind!r}")
        if self.kind == "C" and self.d < 1:
            raise ValueError("C_d requires d >= 1")
        if self.kind == "D" and self.d < 2:
            raise ValueError("binary dihedral D_d requires d >= 2")
        if self.kind in ("T", "O", "I") and self.d:
            raise ValueError(f"{self.kind} takes no parameter")

    def label(self) -> str:
        if self.kind in ("C", "D"):
            return f"{self.kind}{self.d}"
        return self.kind


C1 = KleinianSpec("C", 1)


def kleinian_order(spec: KleinianSpec) -> int:
    if spec.kind == "C":
        return spec.d
    if spec.kind == "D":
        return 4 * spec.d
    return {"T": 24, "O": 48, "I": 120}[spec.kind]


@lru_cache(maxsize=None)
def _kleinian_cached(kind: str, d: int) -> MatGroup:
    if kind == "C":
        gens = [_m1(_zeta(d))]
    elif kind == "D":
        gens = [_m1(_zeta(2 * d)), _m1(Q_J)]
    elif kind == "T":
        gens = [_m1(Q_I), _m1(Q_J), _m1(OMEGA)]
    elif kind == "O":
        gens = [_m1(_zeta(8)), _m1(Q_J), _m1(OMEGA)]
    else:
        gens = [_m1(Q_I), _m1(Q_J), _m1(SIGMA)]
    G = closure(gens)
    spec = KleinianSpec(kind, d)
    expected = kleinian_order(spec)
    if G.order != expected:
        raise AssertionError(f"rank-1 group {spec.label()} has order {G.order}, expected {expected}")
    G.family_spec = spec
    return G


def build_kleinian(spec: KleinianSpec) -> MatGroup:
    """The rank-1 group of the given spec as fully enumerated 1x1 matrices."""
    return _kleinian_cached(spec.kind, spec.d)


def _quats_of(G: MatGroup) -> list[Quat]:
    return [m.rows[0][0] for m in G.elements]


@lru_cache(maxsize=None)
def _subgroup_in(Kspec: KleinianSpec, Hspec: KleinianSpec) -> SubgroupRef:
    """H as a SubgroupRef of the enumerated K; raises if H is not contained in K."""
    Kg = build_kleinian(Kspec)
    Hg = build_kleinian(Hspec)
    try:
        pos = [Kg.pos_of(m) for m in Hg.elements]
    except KeyError:
        raise ValueError(f"{Hspec.label()} is not a subgroup of {Kspec.label()}") from None
    return SubgroupRef(Kg, pos)


def _recognize_subgroup(Kg: MatGroup, positions) -> KleinianSpec:
    """Identify a subgroup of a rank-1 group as a KleinianSpec."""
    positions = sorted(set(positions))
    o = len(positions)
    orders = [Kg.order_of(p) for p in positions]
    abelian = all(
        Kg.mul_pos(a, b) == Kg.mul_pos(b, a) for a in positions for b in positions
    )
    if abelian:
        if max(orders) != o:
            raise ValueError("abelian subgroup of the unit quaternions must be cyclic")
        return KleinianSpec("C", o)
    if o % 4 == 0 and max(orders) == o // 2 and o not in (24, 48, 120):
        return KleinianSpec("D", o // 4)
    if o == 24 and max(orders) == 6:
        return KleinianSpec("T")
    if o == 48 and max(orders) == 8:
        return KleinianSpec("O")
    if o == 120 and max(orders) == 10:
        return KleinianSpec("I")
    if o % 4 == 0 and max(orders) == o // 2:
        return KleinianSpec("D", o // 4)
    raise ValueError(f"unrecognized subgroup of order {o}")


# --- imprimitive series ---------------------------------------------------------


@dataclass(frozen=True)
class ImprimSpec:
    """Parameters of G_n(K, H): monomial matrices over K with diagonal product in H."""

    K: KleinianSpec
    H: KleinianSpec
    n: int

    def label(self) -> str:
        return f"G{self.n}({self.K.label()},{self.H.label()})"


def _admissibility_error(K: KleinianSpec, H: KleinianSpec):
    """None if (K, H) is an admissible pair, else a message naming the violation."""
    if K.kind == "C":
        if H.kind == "C" and K.d % H.d == 0:
            return None
        return f"for K = {K.label()} the subgroup H must be C_e with e | {K.d}"
    if K.kind == "D":
        if H.kind == "C" and H.d in (K.d, 2 * K.d):
            return None
        if H.kind == "D" and (H.d == K.d or (K.d % 2 == 0 and 2 * H.d == K.d)):
            return None
        allowed = f"C{K.d}, C{2 * K.d}, D{K.d}" + (f", D{K.d // 2}" if K.d % 2 == 0 else "")
        return f"for K = {K.label()} the subgroup H must be one of {allowed}"
    table = {"T": ("D2", "T"), "O": ("T", "O"), "I": ("I",)}
    if H.label() in table[K.kind]:
        return None
    return f"for K = {K.label()} the subgroup H must be one of {', '.join(table[K.kind])}"


@lru_cache(maxsize=None)
def _checked_pair(K: KleinianSpec, H: KleinianSpec) -> SubgroupRef:
    """H inside K with normality and [K, K] <= H verified by direct computation."""
    msg = _admissibility_error(K, H)
    if msg is not None:
        raise ValueError(msg)
    Href = _subgroup_in(K, H)
    Kg = Href.parent
    if not Href.is_normal_in(Kg.full_ref()):
        raise ValueError(f"{H.label()} is not normal in {K.label()}")
    hset = Href.posset
    for a in range(len(Kg.elements)):
        for b in range(len(Kg.elements)):
            comm = Kg.mul_pos(Kg.inv_pos(a), Kg.conj_pos(b, a))
            if comm not in hset:
                raise ValueError(f"commutator subgroup of {K.label()} is not contained in {H.label()}")
    return Href


def _transposition(n: int, i: int, j: int, alpha: Quat = Q_ONE) -> HMatrix:
    """The element exchanging alpha*e_i and e_j (the plain swap when alpha = 1)."""
    rows = [[Q_ONE if r == c else Q_ZERO for c in range(n)] for r in range(n)]
    rows[i][i] = Q_ZERO
    rows[j][j] = Q_ZERO
    rows[i][j] = alpha
    rows[j][i] = quat_inv(alpha)
    return HMatrix(rows)


def _embed_scalar(n: int, i: int, q: Quat) -> HMatrix:
    rows = [[Q_ONE if r == c else Q_ZERO for c in range(n)] for r in range(n)]
    rows[i][i] = q
    return HMatrix(rows)


def _imprim_generators(K: KleinianSpec, H: KleinianSpec, n: int) -> list[HMatrix]:
    """Reflection generators: diagonal H-scalars, a twisted swap per K-generator, plain swaps."""
    Href = _checked_pair(K, H)
    Kg = Href.parent
    gens: list[HMatrix] = []
    for p in SubgroupRef(Kg, Href.positions).small_gens():
        gens.append(_embed_scalar(n, 0, Kg.elements[p].rows[0][0]))
    if n >= 2:
        for g in Kg.generators:
            gens.append(_transposition(n, 0, 1, g.rows[0][0]))
        for i in range(n - 1):
            gens.append(_transposition(n, i, i + 1))
    if not gens:
        gens.append(identity_matrix(n))
    return gens


@lru_cache(maxsize=None)
def build_imprimitive(spec: ImprimSpec) -> MatGroup:
    """G_n(K, H), fully enumerated and cross-checked against a closure of reflections."""
    K, H, n = spec.K, spec.H, spec.n
    Href = _checked_pair(K, H)
    Kg = Href.parent
    if n < 0:
        raise ValueError("rank must be nonnegative")
    if n == 0:
        G = MatGroup(0, [identity_matrix(0)])
        G.family_spec = spec
        return G
    Kq = _quats_of(Kg)
    Hq = [Kg.elements[p].rows[0][0] for p in Href.positions]
    elems = []
    for sigma in itertools.permutations(range(n)):
        for pre in itertools.product(Kq, repeat=n - 1):
            prod = Q_ONE
            for x in pre:
                prod = quat_mul(prod, x)
            pinv = quat_inv(prod)
            for h in Hq:
                diag = pre + (quat_mul(pinv, h),)
                rows = [[Q_ZERO] * n for _ in range(n)]
                for col in range(n):
                    rows[sigma[col]][col] = diag[sigma[col]]
                elems.append(HMatrix(rows))
    expected = kleinian_order(K) ** (n - 1) * kleinian_order(H) * factorial(n)
    if len(elems) != expected:
        raise AssertionError(f"{spec.label()}: enumerated {len(elems)} elements, expected {expected}")
    gens = _imprim_generators(K, H, n)
    G = MatGroup(n, elems, generators=gens)
    Gclo = closure(gens, cap=max(DEFAULT_CAP, expected + 1))
    if Gclo.index.keys() != G.index.keys():
        raise AssertionError(f"{spec.label()}: reflection closure disagrees with direct enumeration")
    G.family_spec = spec
    return G


def _partition(lam) -> tuple[int, ...]:
    lam = tuple(int(x) for x in lam)
    if any(x < 1 for x in lam):
        raise ValueError("partition parts must be positive")
    return tuple(sorted(lam, reverse=True))


def _multiplicities(lam: tuple[int, ...]) -> dict[int, int]:
    out: dict[int, int] = {}
    for x in lam:
        out[x] = out.get(x, 0) + 1
    return out


def parabolic_rep(G: MatGroup, lam, alpha: Quat = Q_ONE) -> SubgroupRef:
    """The standard parabolic P_lambda^alpha of an imprimitive group.

    The first n - m coordinates carry a copy of G_{n-m}(K, H); each part of
    lambda contributes a block of coordinates permuted by a symmetric group,
    with the first basis vector of the first block twisted by alpha.
    """
    spec = getattr(G, "family_spec", None)
    if not isinstance(spec, ImprimSpec):
        raise ValueError("parabolic_rep expects a group made by build_imprimitive")
    lam = _partition(lam)
    m = sum(lam)
    n = spec.n
    if m > n:
        raise ValueError(f"lambda sums to {m} > rank {n}")
    Kg = build_kleinian(spec.K)
    if _m1(alpha) not in Kg:
        raise ValueError("alpha must be an element of K")
    if alpha != Q_ONE and m != n:
        raise ValueError("a twist alpha != 1 is only defined for partitions of n")
    if not lam:
        return G.full_ref()
    n0 = n - m
    seeds: list[HMatrix] = []
    if n0 >= 1:
        for g in _imprim_generators(spec.K, spec.H, n0):
            if g.is_identity():
                continue
            rows = [[Q_ONE if r == c else Q_ZERO for c in range(n)] for r in range(n)]
            for r in range(n0):
                for c in range(n0):
                    rows[r][c] = g.rows[r][c]
            seeds.append(HMatrix(rows))
    off = n0
    for bi, part in enumerate(lam):
        for i in range(part - 1):
            tw = alpha if (bi == 0 and i == 0) else Q_ONE
            seeds.append(_transposition(n, off + i, off + i + 1, tw))
        off += part
    P = subgroup_closure(G, [G.pos_of(s) for s in seeds])
    if n0 >= 1:
        expected = (kleinian_order(spec.K) ** (n0 - 1) * kleinian_order(spec.H)
                    * factorial(n0))
    else:
        expected = 1
    for part in lam:
        expected *= factorial(part)
    if P.order != expected:
        raise AssertionError(f"parabolic of {spec.label()} has order {P.order}, expected {expected}")
    return P


def _is_hard_pair(K: KleinianSpec, H: KleinianSpec) -> bool:
    if K.kind == "D" and K.d % 2 == 0:
        if H.kind == "C" and H.d in (K.d, 2 * K.d):
            return True
        if H.kind == "D" and 2 * H.d == K.d:
            return True
    return K.kind == "O" and H.kind == "T"


def theorem_imprim_predicate(K: KleinianSpec, H: KleinianSpec, n: int, lam) -> bool:
    """Closed-form complement criterion for P_lambda in G_n(K, H), lambda |- m < n.

    Pure arithmetic: a complement exists iff the number of odd parts counted
    with multiplicity... more precisely iff sum over odd k of b_k is at most
    n - m, or the pair (K, H) is not one of the four hard pairs.
    """
    msg = _admissibility_error(K, H)
    if msg is not None:
        raise ValueError(msg)
    lam = _partition(lam)
    m = sum(lam)
    if m >= n:
        raise ValueError("the criterion applies to partitions of m < n")
    b = _multiplicities(lam)
    odd_parts = sum(cnt for k, cnt in b.items() if k % 2 == 1)
    return odd_parts <= n - m or not _is_hard_pair(K, H)


def _b_lambda(lam: tuple[int, ...]) -> int:
    out = 1
    for k, cnt in _multiplicities(lam).items():
        out *= factorial(cnt) * factorial(k) ** cnt
    return out


def _require_nontrivial_H(H: KleinianSpec):
    if kleinian_order(H) == 1:
        raise ValueError("H = 1 gives a complex reflection group; out of scope here")


def class_length_formula(K: KleinianSpec, H: KleinianSpec, n: int, lam) -> int:
    """Number of parabolics of shape lambda (union over all twists alpha)."""
    _require_nontrivial_H(H)
    lam = _partition(lam)
    m, k = sum(lam), len(lam)
    if m > n:
        raise ValueError("lambda must be a partition of m <= n")
    num = factorial(n) * kleinian_order(K) ** (m - k)
    den = factorial(n - m) * _b_lambda(lam)
    assert num % den == 0
    return num // den


@lru_cache(maxsize=None)
def _quotient_is_cyclic(K: KleinianSpec, H: KleinianSpec) -> bool:
    Href = _checked_pair(K, H)
    quo = quotient(Href.parent, Href)
    return any(quo.order_of(a) == len(quo) for a in quo.element_ids())


def lemma_e(K: KleinianSpec, H: KleinianSpec, lam) -> int:
    """The number e of conjugacy classes of P_lambda^alpha when lambda |- n."""
    _require_nontrivial_H(H)
    lam = _partition(lam)
    index = kleinian_order(K) // kleinian_order(H)
    if _quotient_is_cyclic(K, H):
        return gcd(index, *lam)
    if all(x % 2 == 0 for x in lam):
        return index
    return 1


def normalizer_index_formula(K: KleinianSpec, H: KleinianSpec, n: int, lam) -> int:
    """|N_G(P)/P| for P = P_lambda^alpha in G_n(K, H)."""
    _require_nontrivial_H(H)
    lam = _partition(lam)
    m = sum(lam)
    if m > n:
        raise ValueError("lambda must be a partition of m <= n")
    base = 1
    for _, cnt in _multiplicities(lam).items():
        base *= kleinian_order(K) ** cnt * factorial(cnt)
    if m < n:
        return base
    e = lemma_e(K, H, lam)
    index = kleinian_order(K) // kleinian_order(H)
    assert (base * e) % index == 0
    return base * e // index


def kth_power_subgroup(K: KleinianSpec, H: KleinianSpec, k: int) -> KleinianSpec:
    """The largest subgroup H' <= K with x^k in H for every x in H'.

    Because K/H is abelian, x -> x^k H is a homomorphism on K/H and the set
    {x in K : x^k in H} is itself a subgroup, so "largest" is unambiguous.
    """
    Href = _checked_pair(K, H)
    Kg = Href.parent
    hset = Href.posset
    members = [p for p in range(len(Kg.elements)) if _pos_pow(Kg, p, k) in hset]
    return _recognize_subgroup(Kg, members)


def _pos_pow(G: MatGroup, p: int, k: int) -> int:
    cur = G.identity_pos
    for _ in range(k % G.order_of(p) if G.order_of(p) else k):
        cur = G.mul_pos(cur, p)
    return cur


# --- exceptional rank-2 groups --------------------------------------------------


@dataclass(frozen=True)
class Rank2ExcSpec:
    """Parameters of G(K, H, phi); phi in {psi, rho_gamma, identity, theta}.

    For the dihedral series phi = psi the triple (m, l, r) fixes K = D_m,
    H = C_l and the coset map psi_r.
    """

    K: KleinianSpec
    H: KleinianSpec
    phi: str
    m: int = 0
    l: int = 0
    r: int = 0

    def label(self) -> str:
        name = {"psi": f"psi_{self.r}", "rho_gamma": "rho(gamma)",
                "identity": "id", "theta": "Theta"}[self.phi]
        return f"G({self.K.label()},{self.H.label()},{name})"


def dihedral_series_spec(m: int, l: int, r: int) -> Rank2ExcSpec:
    return Rank2ExcSpec(KleinianSpec("D", m), KleinianSpec("C", l), "psi", m=m, l=l, r=r)


def dihedral_params(m: int, l: int, r: int) -> dict:
    """The derived quantities n, kappa, nu, epsilon of the psi_r series."""
    n = 2 * m // l
    kappa = n // gcd(n, r + 1)
    nu = n // gcd(n, r - 1)
    eps = 1 if gcd(n, r - 1) % 2 == 1 else 2
    return {"n": n, "kappa": kappa, "nu": nu, "epsilon": eps}


def _psi_conditions_error(m: int, l: int, r: int):
    if (2 * m) % l != 0:
        return f"psi_r requires l | 2m (got l={l}, m={m})"
    n = 2 * m // l
    if not 1 <= r <= n // 2:
        return f"psi_r requires 1 <= r <= n/2 (got r={r}, n={n})"
    if gcd(n, r) != 1:
        return f"psi_r requires gcd(n, r) = 1 (got n={n}, r={r})"
    p = dihedral_params(m, l, r)
    if gcd(p["kappa"], p["nu"]) != 1:
        return f"psi_r requires gcd(kappa, nu) = 1 (got kappa={p['kappa']}, nu={p['nu']})"
    return None


def dihedral_series_expected(m: int, l: int, r: int) -> dict:
    """Predicted parabolic class data for G(D_m, C_l, psi_r).

    Returns per-shape predictions: 'p1' is None for l = 1, else a dict with
    the class length and complement type; 'zeta' and 'j' describe the one or
    two classes of order-2 antidiagonal parabolics with alpha a power of
    zeta_2m respectively a power times j.  Complement types are ('C', k) for
    a cyclic group of order k or ('D', k) for a binary dihedral of order 4k;
    ('D', 1) is normalized to ('C', 4).
    """
    err = _psi_conditions_error(m, l, r)
    if err:
        raise ValueError(err)
    n = 2 * m // l

    def side(g_same: int, g_other: int) -> dict:
        # g_same = gcd(n, r -+ 1) governs the split and the complement,
        # g_other the class lengths on this side.
        if (2 * m // g_same) % 2 == 1:
            comp = ("C", l * g_same)
        else:
            d = l * g_same // 2
            comp = ("C", 4) if d == 1 else ("D", d)
        if (2 * m // g_same) % 2 == 1 or g_same % 2 == 1:
            return {"classes": 1, "length": l * g_other, "complement": comp}
        return {"classes": 2, "length": l * g_other // 2, "complement": comp}

    p1 = None
    if l > 1:
        p1 = {"length": 2, "complement": ("D", m) if m > 1 else ("C", 4)}
    return {"p1": p1,
            "zeta": side(gcd(n, r - 1), gcd(n, r + 1)),
            "j": side(gcd(n, r + 1), gcd(n, r - 1))}


def _extend_coset_map(quo: QuotientStructure, pairs) -> dict[int, int]:
    """Extend images of generating cosets to the whole quotient, or raise."""
    ident = quo.identity
    fmap = {ident: ident}
    frontier = [ident]
    while frontier:
        a = frontier.pop()
        for g, fg in pairs:
            b = quo.mul(a, g)
            fb = quo.mul(fmap[a], fg)
            if b in fmap:
                if fmap[b] != fb:
                    raise ValueError("coset map is not well defined")
            else:
                fmap[b] = fb
                frontier.append(b)
    if len(fmap) != len(quo):
        raise ValueError("coset map generators do not generate the quotient")
    return fmap


_theta_cache: dict[int, engine.GroupHom] = {}


def _theta_of_I() -> engine.GroupHom:
    """An involutive non-inner automorphism of the binary icosahedral group (cached)."""
    if 0 not in _theta_cache:
        Ig = build_kleinian(KleinianSpec("I"))

        def want(hom):
            if not hom.is_bijective():
                return False
            if any(hom.mapping[hom.mapping[p]] != p for p in range(len(Ig.elements))):
                return False
            return not is_inner(hom)

        _theta_cache[0] = automorphism_search(Ig, predicate=want)
    return _theta_cache[0]


def _phi_map(spec: Rank2ExcSpec, quo: QuotientStructure) -> dict[int, int]:
    Kg = quo.parent
    if spec.phi == "identity":
        return {a: a for a in quo.element_ids()}
    if spec.phi == "psi":
        if spec.K != KleinianSpec("D", spec.m) or spec.H != KleinianSpec("C", spec.l):
            raise ValueError("psi_r requires K = D_m and H = C_l")
        msg = _psi_conditions_error(spec.m, spec.l, spec.r)
        if msg is not None:
            raise ValueError(msg)
        z = Kg.pos_of(_m1(_zeta(2 * spec.m)))
        jj = Kg.pos_of(_m1(Q_J))
        minus_j = Kg.pos_of(_m1(-Q_J))
        zr = Kg.pos_of(_m1(_zeta(2 * spec.m, spec.r)))
        pairs = [(quo.coset(z), quo.coset(zr)), (quo.coset(jj), quo.coset(minus_j))]
        return _extend_coset_map(quo, pairs)
    if spec.phi == "rho_gamma":
        if spec.K.kind != "T":
            raise ValueError("rho(gamma) is a map on T/H only")
        gm = _m1(GAMMA)
        gminv = _m1(quat_inv(GAMMA))
        fmap = {}
        for a in quo.element_ids():
            rep = Kg.elements[quo.reps[a]]
            img = gm * rep * gminv
            fmap[a] = quo.coset(Kg.pos_of(img))
        return fmap
    if spec.phi == "theta":
        if spec.K.kind != "I":
            raise ValueError("Theta is an automorphism of I only")
        th = _theta_of_I()
        fmap = {}
        for p in range(len(Kg.elements)):
            a = quo.coset(p)
            fa = quo.coset(th.mapping[p])
            if a in fmap:
                if fmap[a] != fa:
                    raise ValueError("Theta does not descend to K/H")
            else:
                fmap[a] = fa
        return fmap
    raise ValueError(f"unknown coset map {spec.phi!r}")


def _check_involutive_endo(quo: QuotientStructure, fmap: dict[int, int]):
    for a in quo.element_ids():
        if fmap[fmap[a]] != a:
            raise ValueError("coset map is not of order <= 2")
        for b in quo.element_ids():
            if fmap[quo.mul(a, b)] != quo.mul(fmap[a], fmap[b]):
                raise ValueError("coset map is not a homomorphism")


@lru_cache(maxsize=None)
def build_rank2_exceptional(spec: Rank2ExcSpec) -> MatGroup:
    """G(K, H, phi): block matrices (x 0; 0 y) and (0 x; y 0) with phi(xH) = yH."""
    Href = _subgroup_in(spec.K, spec.H)
    Kg = Href.parent
    if not Href.is_normal_in(Kg.full_ref()):
        raise ValueError(f"{spec.H.label()} is not normal in {spec.K.label()}")
    quo = quotient(Kg, Href)
    fmap = _phi_map(spec, quo)
    _check_involutive_endo(quo, fmap)

    Lpos = [p for p in range(len(Kg.elements))
            if fmap[quo.coset(p)] == quo.coset(Kg.inv_pos(p))]
    if subgroup_closure(Kg, Lpos).order != Kg.order:
        raise ValueError(f"{spec.label()}: K is not generated by L_phi")

    coset_members: dict[int, list[Quat]] = {}
    for p in range(len(Kg.elements)):
        coset_members.setdefault(quo.coset(p), []).append(Kg.elements[p].rows[0][0])
    elems = []
    for p in range(len(Kg.elements)):
        x = Kg.elements[p].rows[0][0]
        for y in coset_members[fmap[quo.coset(p)]]:
            elems.append(HMatrix([[x, Q_ZERO], [Q_ZERO, y]]))
            elems.append(HMatrix([[Q_ZERO, x], [y, Q_ZERO]]))
    expected = 2 * Kg.order * Href.order
    if len(set(elems)) != expected:
        raise AssertionError(f"{spec.label()} has order {len(set(elems))}, expected {expected}")

    refls = [g for g in elems if is_reflection(g)]
    G = MatGroup(2, set(elems), generators=refls)
    Gclo = closure(refls)
    if Gclo.index.keys() != G.index.keys():
        raise ValueError(f"{spec.label()} is not generated by its reflections")
    G.family_spec = spec
    G.rank2_data = (Kg, quo, fmap, tuple(Lpos))
    return G


def rank2_p1(G: MatGroup) -> SubgroupRef:
    """The rank-1 parabolic H x 1 of a G(K, H, phi)."""
    Kg, quo, _, _ = G.rank2_data
    hset = quo.normal.posset
    pos = []
    for p in hset:
        h = Kg.elements[p].rows[0][0]
        pos.append(G.pos_of(HMatrix([[h, Q_ZERO], [Q_ZERO, Q_ONE]])))
    return SubgroupRef(G, pos)


def rank2_p2(G: MatGroup, alpha: Quat) -> SubgroupRef:
    """The order-2 parabolic generated by (0 alpha; alpha^-1 0); alpha must be in L_phi."""
    Kg, quo, fmap, Lpos = G.rank2_data
    if Kg.pos_of(_m1(alpha)) not in Lpos:
        raise ValueError("alpha must lie in L_phi")
    g = HMatrix([[Q_ZERO, alpha], [quat_inv(alpha), Q_ZERO]])
    return subgroup_closure(G, [G.pos_of(g)])


# --- rank-2 primitive extensions E(H) -------------------------------------------

#: minimal scalar-parameter d per Shephard--Todd index.
ST_MIN_D = {5: 6, 7: 12, 8: 4, 9: 8, 10: 12, 11: 24, 12: 10, 13: 20, 14: 6,
            15: 12, 16: 10, 17: 20, 18: 30, 19: 60, 20: 6, 21: 12, 22: 8}


@dataclass(frozen=True)
class EHSpec:
    """E(mu_d * H0) for a primitive rank-2 Shephard--Todd group H0."""

    h0: int
    d: int = 0  # 0 = use the minimal d for this index

    def label(self) -> str:
        return f"E(mu{self.d or ST_MIN_D.get(self.h0, 0)}*G{self.h0})"


@lru_cache(maxsize=1)
def _st_raw() -> dict:
    text = resources.files("qreflect").joinpath("data/st_rank2.json").read_text()
    data = json.loads(text)
    if data.get("version") != 1:
        raise ValueError("unsupported generator data version")
    return data["groups"]


def _parse_matrix(rows: list[str]) -> HMatrix:
    return HMatrix([[parse_quat(t) for t in row.split(";")] for row in rows])


def _conj_transpose(a: HMatrix) -> HMatrix:
    return HMatrix([[quat_conj(a.rows[c][r]) for c in range(a.n)] for r in range(a.n)])


def _is_unitary(a: HMatrix) -> bool:
    return (_conj_transpose(a) * a).is_identity()


def _eigenlines(g: HMatrix) -> list[HSubspace]:
    """The (at most two) eigenlines of a finite-order 2x2 complex matrix."""
    N = g.order()
    ident = identity_matrix(2)
    lines = []
    for k in range(N):
        lam = _m1(_zeta(N, k)) if N > 1 else ident
        shifted = [[x - quat_mul(lam.rows[0][0], y) for x, y in zip(rg, ri)]
                   for rg, ri in zip(g.rows, ident.rows)]
        from .quat import kernel_basis
        for vec in kernel_basis([list(r) for r in shifted], 2):
            sp = HSubspace(2, [vec])
            if sp not in lines:
                lines.append(sp)
    return lines


def _is_primitive_rank2(G: MatGroup) -> bool:
    """No pair of lines is permuted by the whole group.

    If a permuted pair exists, its setwise stabilizer has index <= 2, and for
    any non-commuting a, b at least one of a, b, ab stabilizes both lines and
    is non-scalar, so both lines appear among the eigenlines of a, b or ab.
    """
    from .quat import setwise_image
    pair = None
    for a in G.elements:
        for b in G.elements:
            if a * b != b * a:
                pair = (a, b)
                break
        if pair:
            break
    if pair is None:
        return False  # abelian groups preserve an eigenbasis
    gens = [G.elements[p] for p in G.full_ref().small_gens()]
    for cand in (pair[0], pair[1], pair[0] * pair[1]):
        lines = _eigenlines(cand)
        if len(lines) != 2:
            continue
        system = set(lines)
        if all(setwise_image(g, u) in system for g in gens for u in lines):
            return False
    return True


@lru_cache(maxsize=None)
def st_rank2_group(index: int) -> MatGroup:
    """The primitive rank-2 unitary reflection group of the given index, validated."""
    raw = _st_raw().get(str(index))
    if raw is None:
        raise ValueError(f"no generator data for index {index}")
    gens = [_parse_matrix(rows) for rows in raw["gens"]]
    for g in gens:
        if not _is_unitary(g):
            raise ValueError(f"generator of G{index} is not unitary")
        if not all(q.is_complex() for row in g.rows for q in row):
            raise ValueError(f"generator of G{index} is not complex")
    G = closure(gens)
    if G.order != raw["order"]:
        raise ValueError(f"G{index} closed to order {G.order}, expected {raw['order']}")
    refl = [p for p in range(len(G.elements)) if is_reflection(G.elements[p])]
    if subgroup_closure(G, refl).order != G.order:
        raise ValueError(f"G{index} is not generated by its reflections")
    if not _is_primitive_rank2(G):
        raise ValueError(f"G{index} data gives an imprimitive group")
    return G


def _scalar2(z: Quat) -> HMatrix:
    return HMatrix([[z, Q_ZERO], [Q_ZERO, z]])


#: the quaternionic extension generator (0 -j; j 0).
def _s_matrix() -> HMatrix:
    return HMatrix([[Q_ZERO, -Q_J], [Q_J, Q_ZERO]])


@lru_cache(maxsize=None)
def build_EH(spec: EHSpec) -> MatGroup:
    """E(H) = <H, s> with H = mu_d * H0; validates the center of H."""
    if spec.h0 not in ST_MIN_D:
        raise ValueError(f"index {spec.h0} is not in the supported range")
    d = spec.d or ST_MIN_D[spec.h0]
    H0 = st_rank2_group(spec.h0)
    zd = _scalar2(_zeta(d))
    Hg = closure(list(H0.generators) + [zd])
    center = engine.centralizer(Hg, Hg.full_ref())
    scalars = {Hg.pos_of(_scalar2(_zeta(d, k))) for k in range(d)}
    if center.posset != scalars:
        raise ValueError(f"{spec.label()}: center of H is not mu_{d}")
    s = _s_matrix()
    G = closure(list(H0.generators) + [zd, s])
    if G.order != 2 * Hg.order:
        raise ValueError(f"{spec.label()}: <H, s> has order {G.order}, expected {2 * Hg.order}")
    G.family_spec = EHSpec(spec.h0, d)
    G.eh_data = (H0, Hg, s)
    return G


# --- root-system groups ---------------------------------------------------------


@dataclass(frozen=True)
class RootSystemSpec:
    name: str
    lines: tuple  # tuple of root vectors, each a tuple of Quat
    reflections: tuple = ()
    expected_order: int | None = None


def _dedupe_lines(n: int, vectors) -> list[tuple[Quat, ...]]:
    seen = {}
    for v in vectors:
        key = HSubspace(n, [v])
        if key.dim != 1:
            raise ValueError("root vectors must be nonzero")
        if key not in seen:
            seen[key] = tuple(v)
    return list(seen.values())


def builtin_Q() -> RootSystemSpec:
    """The rank-3 root system Q: 63 lines in H^3."""
    alpha = Quat.from_components("1/2", "-1/2", "-1/2", -(cyclo.SQRT5 * _HALF))
    i_pows = (Q_ONE, Q_I, -Q_ONE, -Q_I)
    zero, one = Q_ZERO, Q_ONE
    vectors = [(one, zero, zero), (zero, one, zero), (zero, zero, one)]
    for unit in (one, -one, Q_I, -Q_I):
        vectors.append((one, unit, zero))
        vectors.append((one, zero, unit))
        vectors.append((zero, one, unit))
    for perm in itertools.permutations(range(3)):
        for a, b in itertools.product(i_pows, repeat=2):
            c = quat_inv(quat_mul(a, b))
            v = [zero, zero, zero]
            v[perm[0]], v[perm[1]], v[perm[2]] = a, b, quat_mul(c, alpha)
            vectors.append(tuple(v))
    lines = _dedupe_lines(3, vectors)
    if len(lines) != 63:
        raise AssertionError(f"built-in root system has {len(lines)} lines, expected 63")
    return RootSystemSpec("Q", tuple(lines), expected_order=12096)


def build_root_system_group(spec: RootSystemSpec, cap: int = DEFAULT_CAP) -> MatGroup:
    """The group generated by the reflections of the given root lines."""
    if not spec.lines and not spec.reflections:
        raise ValueError("root system needs at least one line or reflection")
    n = len(spec.lines[0]) if spec.lines else spec.reflections[0].n
    lines = _dedupe_lines(n, spec.lines) if spec.lines else []
    refls = list(spec.reflections) or [reflection_from_root(v) for v in lines]
    for g in refls:
        if not is_reflection(g):
            raise ValueError("a supplied matrix is not a reflection")
    G = closure(refls, cap=cap)
    if spec.expected_order is not None and G.order != spec.expected_order:
        raise ValueError(f"root system {spec.name!r} closed to order {G.order}, "
                         f"expected {spec.expected_order}")
    G.family_spec = RootSystemSpec(spec.name, tuple(lines), tuple(refls), spec.expected_order)
    return G


def parse_root_file(text: str, name: str = "roots") -> RootSystemSpec:
    """Line-oriented root format: quaternion coordinates separated by `;`,
    comments starting with `#`, optional `order: <int>` header."""
    lines = []
    expected = None
    for raw in text.splitlines():
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        if body.lower().startswith("order:"):
            expected = int(body.split(":", 1)[1])
            continue
        lines.append(tuple(parse_quat(part) for part in body.split(";")))
    if not lines:
        raise ValueError("no roots found")
    widths = {len(v) for v in lines}
    if len(widths) != 1:
        raise ValueError("all roots must have the same number of coordinates")
    return RootSystemSpec(name, tuple(lines), expected_order=expected)


def load_root_file(path) -> RootSystemSpec:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    import os
    return parse_root_file(text, name=os.path.basename(str(path)))


# --- the map-existence oracle ---------------------------------------------------


def block_diagonal_product(groups) -> MatGroup:
    """The direct product of matrix groups, embedded block-diagonally."""
    groups = list(groups)
    n = sum(g.n for g in groups)
    elements = []
    for combo in itertools.product(*(g.elements for g in groups)):
        rows = [[Q_ZERO] * n for _ in range(n)]
        off = 0
        for m in combo:
            for i in range(m.n):
                for j in range(m.n):
                    rows[off + i][off + j] = m.rows[i][j]
            off += m.n
        elements.append(HMatrix(rows))
    return MatGroup(n, elements)


@lru_cache(maxsize=None)
def diagonal_power_group(K: KleinianSpec, p: int) -> MatGroup:
    """K^p as the group of p x p diagonal matrices with entries in K."""
    Kq = _quats_of(build_kleinian(K))
    elems = []
    for diag in itertools.product(Kq, repeat=p):
        rows = [[diag[r] if r == c else Q_ZERO for c in range(p)] for r in range(p)]
        elems.append(HMatrix(rows))
    gens = []
    for i in range(p):
        for g in build_kleinian(K).generators:
            gens.append(_embed_scalar(p, i, g.rows[0][0]))
    return MatGroup(p, elems, generators=gens)


def delta_compatible_hom_search(K: KleinianSpec, H: KleinianSpec, p: int, q: int,
                                first_only: bool = True):
    """Homomorphisms K^p -> G_q(K, K) compatible with the coset-product maps.

    The compatibility condition is delta_q(phi(x)) = delta_1^p(x) where both
    sides are homomorphisms into the abelian K/H, so checking it on the
    generators of K^p is equivalent to checking it everywhere.  An empty
    result is an exhaustive-search certificate of non-existence.
    """
    Href = _checked_pair(K, H)
    quo = quotient(Href.parent, Href)
    dom = diagonal_power_group(K, p)
    cod = build_imprimitive(ImprimSpec(K, K, q))

    def dval(group, pos):
        return delta(group.elements[pos], quo)

    def gen_ok(gp, ci):
        return dval(cod, ci) == dval(dom, gp)

    def constraint(hom):
        return all(dval(cod, hom.mapping[gp]) == dval(dom, gp)
                   for gp in hom.gen_positions)

    return homomorphism_search(dom, cod, constraint=constraint,
                               first_only=first_only, gen_filter=gen_ok)
