"""Finite matrix-group machinery over exact quaternionic matrices.

Groups are fully enumerated; elements live in a deterministic order (sorted
by the canonical serialization of their entries) so that identical inputs
give identical groups across runs.  Subgroups are index sets into a parent
group; quotients are coset tables.
"""

from __future__ import annotations

from .quat import HMatrix, identity_matrix, mat_inv, mat_mul

__all__ = [
    "MatGroup",
    "SubgroupRef",
    "QuotientStructure",
    "GroupHom",
    "SizeExceededError",
    "closure",
    "subgroup_closure",
    "are_conjugate",
    "normalizer",
    "centralizer",
    "complement_search",
    "quotient",
    "delta",
    "homomorphism_search",
    "twisted_conjugacy_classes",
    "automorphism_search",
]

DEFAULT_CAP = 2_000_000


class SizeExceededError(RuntimeError):
    def __init__(self, partial_count: int, cap: int):
        super().__init__(f"group enumeration exceeded cap={cap} (at least {partial_count} elements)")
        self.partial_count = partial_count
        self.cap = cap


class MatGroup:
    """A fully enumerated finite matrix group over H."""

    def __init__(self, n: int, elements, generators=None, cap: int = DEFAULT_CAP):
        self.n = n
        self.elements: tuple[HMatrix, ...] = tuple(sorted(elements, key=lambda m: m.key))
        self.generators: tuple[HMatrix, ...] = tuple(generators or ())
        self.cap = cap
        self.index: dict = {m.key: i for i, m in enumerate(self.elements)}
        self.identity_pos = self.index[identity_matrix(n).key]
        self._mul: dict[tuple[int, int], int] = {}
        self._inv: dict[int, int] = {}
        self._order: dict[int, int] = {}

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, m: HMatrix) -> bool:
        return m.key in self.index

    def pos_of(self, m: HMatrix) -> int:
        return self.index[m.key]

    def mul_pos(self, i: int, j: int) -> int:
        key = (i, j)
        hit = self._mul.get(key)
        if hit is None:
            hit = self.index[mat_mul(self.elements[i], self.elements[j]).key]
            self._mul[key] = hit
        return hit

    def inv_pos(self, i: int) -> int:
        hit = self._inv.get(i)
        if hit is None:
            hit = self.index[mat_inv(self.elements[i]).key]
            self._inv[i] = hit
            self._inv[hit] = i
        return hit

    def conj_pos(self, g: int, x: int) -> int:
        """g x g^-1."""
        return self.mul_pos(self.mul_pos(g, x), self.inv_pos(g))

    def order_of(self, i: int) -> int:
        hit = self._order.get(i)
        if hit is None:
            k, cur = 1, i
            while cur != self.identity_pos:
                cur = self.mul_pos(cur, i)
                k += 1
            self._order[i] = hit = k
        return hit

    def full_ref(self) -> "SubgroupRef":
        return SubgroupRef(self, range(len(self.elements)))

    def __repr__(self):
        return f"MatGroup(rank={self.n}, order={self.order})"


def _mulclose(n: int, gens: list[HMatrix], cap: int) -> dict:
    seen = {identity_matrix(n).key: identity_matrix(n)}
    queue = [identity_matrix(n)]
    while queue:
        x = queue.pop()
        for g in gens:
            y = mat_mul(x, g)
            if y.key not in seen:
                if len(seen) >= cap:
                    raise SizeExceededError(len(seen) + 1, cap)
                seen[y.key] = y
                queue.append(y)
    return seen


def closure(generators, cap: int = DEFAULT_CAP) -> MatGroup:
    """Fully enumerate the group generated by the given matrices.

    Generators already contained in the closure of the earlier ones are
    skipped, so passing a long redundant list (e.g. every reflection of a
    root system) costs little more than passing a minimal one.
    """
    generators = list(generators)
    if not generators:
        raise ValueError("need at least one generator")
    n = generators[0].n
    for g in generators:
        if g.n != n:
            raise ValueError("generators must share ambient rank")
    essential: list[HMatrix] = []
    seen = {identity_matrix(n).key: identity_matrix(n)}
    for g in generators:
        if g.key in seen:
            continue
        essential.append(g)
        seen = _mulclose(n, essential, cap)
    return MatGroup(n, seen.values(), generators=generators, cap=cap)


class SubgroupRef:
    """A subgroup of a parent MatGroup given by member positions."""

    def __init__(self, parent: MatGroup, positions):
        self.parent = parent
        self.positions: tuple[int, ...] = tuple(sorted(set(positions)))
        self.posset = frozenset(self.positions)
        self._gens: tuple[int, ...] | None = None

    @property
    def order(self) -> int:
        return len(self.positions)

    def __len__(self):
        return len(self.positions)

    def __contains__(self, pos: int) -> bool:
        return pos in self.posset

    def __eq__(self, other):
        if isinstance(other, SubgroupRef):
            return self.parent is other.parent and self.posset == other.posset
        return NotImplemented

    def __hash__(self):
        return hash((id(self.parent), self.posset))

    def matrices(self):
        return [self.parent.elements[i] for i in self.positions]

    def small_gens(self) -> tuple[int, ...]:
        """A greedy small generating set (positions), deterministic."""
        if self._gens is None:
            G = self.parent
            ident = G.identity_pos
            # try elements in decreasing order first: big cyclic chunks early
            cands = sorted((p for p in self.positions if p != ident),
                           key=lambda p: (-G.order_of(p), p))
            gens: list[int] = []
            have = {ident}
            for p in cands:
                if p in have:
                    continue
                gens.append(p)
                have = _pos_close(G, gens)
                if len(have) == len(self.positions):
                    break
            self._gens = tuple(gens)
        return self._gens

    def conjugate_by(self, g: int) -> "SubgroupRef":
        G = self.parent
        return SubgroupRef(G, (G.conj_pos(g, p) for p in self.positions))

    def is_normal_in(self, other: "SubgroupRef") -> bool:
        G = self.parent
        return all(G.conj_pos(g, p) in self.posset
                   for g in other.small_gens() for p in self.small_gens())

    def __repr__(self):
        return f"SubgroupRef(order={self.order} of {self.parent!r})"


def _pos_close(G: MatGroup, gens: list[int]) -> set[int]:
    have = {G.identity_pos}
    queue = [G.identity_pos]
    while queue:
        x = queue.pop()
        for g in gens:
            y = G.mul_pos(x, g)
            if y not in have:
                have.add(y)
                queue.append(y)
    return have


def subgroup_closure(G: MatGroup, seed) -> SubgroupRef:
    """Smallest subgroup of G containing the seed positions."""
    return SubgroupRef(G, _pos_close(G, [p for p in seed if p != G.identity_pos]))


def _invariant(G: MatGroup, P: SubgroupRef):
    orders = sorted(G.order_of(p) for p in P.positions)
    return (P.order, tuple(orders))


def are_conjugate(P: SubgroupRef, Q: SubgroupRef):
    """A g with g P g^-1 = Q, or None (exhaustive, so None is a certificate)."""
    if P.parent is not Q.parent:
        raise ValueError("subgroups must share a parent group")
    G = P.parent
    if P.posset == Q.posset:
        return G.identity_pos
    if _invariant(G, P) != _invariant(G, Q):
        return None
    gens = P.small_gens()
    qset = Q.posset
    for g in range(len(G.elements)):
        if all(G.conj_pos(g, p) in qset for p in gens):
            return g
    return None


def normalizer(G: MatGroup, P: SubgroupRef) -> SubgroupRef:
    gens = P.small_gens()
    pset = P.posset
    keep = [g for g in range(len(G.elements))
            if all(G.conj_pos(g, p) in pset for p in gens)]
    return SubgroupRef(G, keep)


def centralizer(G: MatGroup, P: SubgroupRef) -> SubgroupRef:
    gens = P.small_gens()
    keep = [g for g in range(len(G.elements))
            if all(G.conj_pos(g, p) == p for p in gens)]
    return SubgroupRef(G, keep)


class QuotientStructure:
    """Coset representatives and multiplication table of K/H."""

    def __init__(self, parent: MatGroup, normal: SubgroupRef):
        if normal.parent is not parent:
            raise ValueError("normal subgroup must live in the parent group")
        K = parent
        self.parent = K
        self.normal = normal
        if not normal.is_normal_in(K.full_ref()):
            raise ValueError("subgroup is not normal")
        coset_of: dict[int, int] = {}
        reps: list[int] = []
        nset = normal.positions
        for p in range(len(K.elements)):
            if p in coset_of:
                continue
            cid = len(reps)
            reps.append(p)
            for h in nset:
                coset_of[K.mul_pos(p, h)] = cid
        self.reps = tuple(reps)
        self.coset_of = coset_of
        m = len(reps)
        self.table = [[coset_of[K.mul_pos(reps[a], reps[b])] for b in range(m)] for a in range(m)]
        self.identity = coset_of[K.identity_pos]

    @property
    def order(self) -> int:
        return len(self.reps)

    def __len__(self):
        return len(self.reps)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        row = self.table[a]
        return row.index(self.identity)

    def order_of(self, a: int) -> int:
        k, cur = 1, a
        while cur != self.identity:
            cur = self.mul(cur, a)
            k += 1
        return k

    def coset(self, pos: int) -> int:
        return self.coset_of[pos]

    def element_ids(self):
        return range(len(self.reps))

    def __repr__(self):
        return f"QuotientStructure(order={self.order})"


def quotient(K: MatGroup, H: SubgroupRef) -> QuotientStructure:
    return QuotientStructure(K, H)


def delta(g: HMatrix, quo: QuotientStructure) -> int:
    """Product of the diagonal-part entries of a monomial matrix, modulo H.

    `quo` is K/H for the rank-1 group K; the returned value is a coset id.
    Well defined (independent of factor order) because K/H is abelian here.
    """
    from .quat import Q_ONE, HMatrix as _HM

    acc = Q_ONE
    for row in g.rows:
        nz = [q for q in row if not q.is_zero()]
        if len(nz) != 1:
            raise ValueError("element is not in monomial (wreath) form")
        acc = acc * nz[0]
    pos = quo.parent.pos_of(_HM([[acc]]))
    return quo.coset(pos)


class GroupHom:
    """A homomorphism from a fully enumerated MatGroup, stored as a full map."""

    def __init__(self, domain: MatGroup, codomain, mapping: dict[int, int],
                 gen_positions=None, gen_images=None):
        self.domain = domain
        self.codomain = codomain  # MatGroup or QuotientStructure
        self.mapping = mapping
        self.gen_positions = tuple(gen_positions or ())
        self.gen_images = tuple(gen_images or ())

    def __call__(self, pos: int) -> int:
        return self.mapping[pos]

    def image_ids(self) -> set[int]:
        return set(self.mapping.values())

    def is_bijective(self) -> bool:
        return len(self.image_ids()) == len(self.domain.elements) == _codomain_size(self.codomain)

    def __repr__(self):
        return f"GroupHom(domain order {len(self.domain.elements)}, image size {len(self.image_ids())})"


def _codomain_size(codomain) -> int:
    return len(codomain.elements) if isinstance(codomain, MatGroup) else len(codomain)


def _co_mul(codomain, a, b):
    return codomain.mul_pos(a, b) if isinstance(codomain, MatGroup) else codomain.mul(a, b)


def _co_order(codomain, a):
    return codomain.order_of(a)


def _co_identity(codomain):
    return codomain.identity_pos if isinstance(codomain, MatGroup) else codomain.identity


def _build_hom(domain: MatGroup, codomain, gen_positions, gen_images):
    """Extend generator images to a full map, or None if inconsistent."""
    ident_d = domain.identity_pos
    mapping = {ident_d: _co_identity(codomain)}
    queue = [ident_d]
    while queue:
        x = queue.pop()
        fx = mapping[x]
        for g, fg in zip(gen_positions, gen_images):
            y = domain.mul_pos(x, g)
            fy = _co_mul(codomain, fx, fg)
            if y in mapping:
                if mapping[y] != fy:
                    return None
            else:
                mapping[y] = fy
                queue.append(y)
    if len(mapping) != len(domain.elements):
        return None  # generators do not generate the domain
    # full multiplicativity check against the generators
    for x, fx in mapping.items():
        for g, fg in zip(gen_positions, gen_images):
            if mapping[domain.mul_pos(x, g)] != _co_mul(codomain, fx, fg):
                return None
    return GroupHom(domain, codomain, mapping, gen_positions, gen_images)


def homomorphism_search(domain: MatGroup, codomain, constraint=None, first_only=False,
                        gen_filter=None):
    """All homomorphisms domain -> codomain passing the constraint.

    Backtracking over generator images with order-divisibility pruning; an
    empty result is an exhaustive-search certificate of non-existence.
    `gen_filter(gen_pos, image_id)` may prune candidate images per generator
    (it must be implied by the constraint, so pruning never loses solutions).
    """
    gen_positions = domain.full_ref().small_gens()
    co_ids = list(codomain.element_ids()) if isinstance(codomain, QuotientStructure) \
        else list(range(len(codomain.elements)))
    cands = []
    for g in gen_positions:
        og = domain.order_of(g)
        ok = [c for c in co_ids if og % _co_order(codomain, c) == 0]
        if gen_filter is not None:
            ok = [c for c in ok if gen_filter(g, c)]
        cands.append(ok)
    found = []

    def rec(level, images):
        if level == len(gen_positions):
            hom = _build_hom(domain, codomain, gen_positions, images)
            if hom is not None and (constraint is None or constraint(hom)):
                found.append(hom)
            return
        for c in cands[level]:
            rec(level + 1, images + [c])
            if first_only and found:
                return

    rec(0, [])
    return found


def twisted_conjugacy_classes(Q: QuotientStructure, phi, S):
    """Partition of S under a ~ xi^-1 * a * phi(xi), xi ranging over Q.

    `phi` is a map on coset ids (a callable or a GroupHom on Q).
    """
    f = phi if callable(phi) else (lambda a: phi.mapping[a])
    left = list(S)
    classes = []
    while left:
        seed = left[0]
        orbit = {Q.mul(Q.inv(xi), Q.mul(seed, f(xi))) for xi in range(len(Q))}
        classes.append(sorted(orbit & set(S)))
        left = [x for x in left if x not in orbit]
    return classes


def is_inner(hom: GroupHom) -> bool:
    """True iff the endomorphism of its own domain is conjugation by some element."""
    G = hom.domain
    gens = G.full_ref().small_gens()
    for g in range(len(G.elements)):
        if all(hom.mapping[p] == G.conj_pos(g, p) for p in gens):
            return True
    return False


def automorphism_search(G: MatGroup, predicate=None) -> GroupHom:
    """A bijective endomorphism of G satisfying the predicate.

    Raises ValueError when the exhaustive search finds none.
    """
    def ok(hom: GroupHom) -> bool:
        return hom.is_bijective() and (predicate is None or predicate(hom))

    res = homomorphism_search(G, G, constraint=ok, first_only=True)
    if not res:
        raise ValueError("no automorphism satisfying the constraints")
    return res[0]


def complement_search(N: SubgroupRef, P: SubgroupRef):
    """A complement C of P in N (N = P x| C), or None after exhaustive search.

    Backtracking over lifts of a generating set of N/P: candidates for the
    lift of a coset q are the elements of qP whose order equals the order of
    q in N/P; the first generator is only tried up to P-conjugacy.
    """
    G = N.parent
    if P.parent is not G:
        raise ValueError("subgroups must share a parent group")
    if not P.posset <= N.posset:
        raise ValueError("P must be contained in N")
    if not P.is_normal_in(N):
        raise ValueError("P is not normal in N")
    target = N.order // P.order
    if target == 1:
        return SubgroupRef(G, [G.identity_pos])
    if P.order == 1:
        return SubgroupRef(G, N.positions)

    # cosets of P in N
    coset_of: dict[int, int] = {}
    reps: list[int] = []
    for p in N.positions:
        if p in coset_of:
            continue
        cid = len(reps)
        reps.append(p)
        for h in P.positions:
            coset_of[G.mul_pos(p, h)] = cid
    m = len(reps)
    qmul = [[coset_of[G.mul_pos(reps[a], reps[b])] for b in range(m)] for a in range(m)]
    qid = coset_of[G.identity_pos]

    def q_order(a):
        k, cur = 1, a
        while cur != qid:
            cur = qmul[cur][a]
            k += 1
        return k

    # greedy generators of the quotient
    qgens: list[int] = []
    have = {qid}
    for a in sorted(range(m), key=lambda a: (-q_order(a), a)):
        if a in have:
            continue
        qgens.append(a)
        have = {qid}
        queue = [qid]
        while queue:
            x = queue.pop()
            for g in qgens:
                y = qmul[x][g]
                if y not in have:
                    have.add(y)
                    queue.append(y)
        if len(have) == m:
            break

    members = [[p for p in N.positions if coset_of[p] == a] for a in qgens]
    pset = P.posset
    ident = G.identity_pos

    def lift_candidates(level):
        a = qgens[level]
        oa = q_order(a)
        cands = [p for p in members[level] if G.order_of(p) == oa]
        if level == 0:
            # restrict to orbit representatives of P-conjugation
            seen: set[int] = set()
            out = []
            for p in cands:
                if p in seen:
                    continue
                out.append(p)
                seen.update(G.conj_pos(h, p) for h in P.positions)
            return out
        return cands

    cand_lists = [lift_candidates(level) for level in range(len(qgens))]

    def close_partial(gens: list[int]):
        have = {ident}
        queue = [ident]
        while queue:
            x = queue.pop()
            for g in gens:
                y = G.mul_pos(x, g)
                if y not in have:
                    if y != ident and y in pset:
                        return None
                    have.add(y)
                    if len(have) > target:
                        return None
                    queue.append(y)
        return have

    def rec(level, chosen):
        if level == len(qgens):
            have = close_partial(chosen)
            if have is not None and len(have) == target:
                return SubgroupRef(G, have)
            return None
        for p in cand_lists[level]:
            if close_partial(chosen + [p]) is None:
                continue
            got = rec(level + 1, chosen + [p])
            if got is not None:
                return got
        return None

    return rec(0, [])
