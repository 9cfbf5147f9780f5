"""Quaternions over cyclotomic complex parts and linear algebra over H.

A Quat is z1 + z2*j with z1, z2 exact complex cyclotomics and the relation
j*w = conj(w)*j.  Matrices act on column vectors of H^n from the left;
scalars act on vectors from the right.  Subspaces are right-H spans kept in
a unique rightmost-pivot echelon form so they can be hashed and compared.
"""

from __future__ import annotations

from . import cyclo
from .cyclo import CycloNum, ZERO, ONE, complex_conjugate, from_rational, parse_cyclo

__all__ = [
    "Quat",
    "HMatrix",
    "HSubspace",
    "quat_mul",
    "quat_conj",
    "quat_inv",
    "mat_mul",
    "mat_inv",
    "fix_space",
    "is_reflection",
    "reflection_from_root",
    "intersect",
    "setwise_image",
    "orthogonal_complement",
    "complexify",
    "parse_quat",
    "render_quat",
    "hermitian_form",
    "identity_matrix",
]

_qintern: dict[tuple[int, int], "Quat"] = {}


class Quat:
    """z1 + z2*j with complex cyclotomic parts; immutable and interned."""

    __slots__ = ("z1", "z2", "key", "_hash")

    def __new__(cls, z1: CycloNum, z2: CycloNum = ZERO):
        ik = (id(z1), id(z2))
        obj = _qintern.get(ik)
        if obj is None:
            obj = object.__new__(cls)
            obj.z1 = z1
            obj.z2 = z2
            obj.key = (z1.n, z1.num, z1.den, z2.n, z2.num, z2.den)
            obj._hash = hash(obj.key)
            _qintern[ik] = obj
        return obj

    @classmethod
    def from_components(cls, a, b=0, c=0, d=0) -> "Quat":
        a, b, c, d = (x if isinstance(x, CycloNum) else from_rational(x) for x in (a, b, c, d))
        return cls(a + b * cyclo.I, c + d * cyclo.I)

    def is_zero(self) -> bool:
        return self.z1.is_zero() and self.z2.is_zero()

    def is_complex(self) -> bool:
        return self.z2.is_zero()

    def __eq__(self, other):
        if isinstance(other, Quat):
            return self is other
        return NotImplemented

    def __hash__(self):
        return self._hash

    def __add__(self, other):
        if not isinstance(other, Quat):
            return NotImplemented
        return Quat(self.z1 + other.z1, self.z2 + other.z2)

    def __sub__(self, other):
        if not isinstance(other, Quat):
            return NotImplemented
        return Quat(self.z1 - other.z1, self.z2 - other.z2)

    def __neg__(self):
        return Quat(-self.z1, -self.z2)

    def __mul__(self, other):
        if not isinstance(other, Quat):
            return NotImplemented
        return quat_mul(self, other)

    def __pow__(self, k: int):
        if k < 0:
            return quat_inv(self) ** (-k)
        result = Q_ONE
        base = self
        while k:
            if k & 1:
                result = quat_mul(result, base)
            base = quat_mul(base, base)
            k >>= 1
        return result

    def conj(self) -> "Quat":
        return quat_conj(self)

    def norm(self) -> CycloNum:
        """Reduced norm conj(q)*q; a nonnegative rational."""
        return self.z1 * complex_conjugate(self.z1) + self.z2 * complex_conjugate(self.z2)

    def __repr__(self):
        return f"Quat({render_quat(self)})"

    def __str__(self):
        return render_quat(self)


Q_ZERO = Quat(ZERO, ZERO)
Q_ONE = Quat(ONE, ZERO)
Q_I = Quat(cyclo.I, ZERO)
Q_J = Quat(ZERO, ONE)
Q_K = Quat(ZERO, cyclo.I)

_qmul_cache: dict[tuple[int, int], Quat] = {}


def quat_mul(a: Quat, b: Quat) -> Quat:
    key = (id(a), id(b))
    hit = _qmul_cache.get(key)
    if hit is not None:
        return hit
    w1c = complex_conjugate(b.z1)
    w2c = complex_conjugate(b.z2)
    res = Quat(a.z1 * b.z1 - a.z2 * w2c, a.z1 * b.z2 + a.z2 * w1c)
    _qmul_cache[key] = res
    return res


def quat_conj(a: Quat) -> Quat:
    return Quat(complex_conjugate(a.z1), -a.z2)


def quat_inv(a: Quat) -> Quat:
    if a.is_zero():
        raise ZeroDivisionError("division by zero quaternion")
    nrm_inv = cyclo.inv(a.norm())
    c = quat_conj(a)
    return Quat(c.z1 * nrm_inv, c.z2 * nrm_inv)


def _scale_right(a: Quat, s: CycloNum) -> Quat:
    """a*s for a central (rational) scalar s."""
    return Quat(a.z1 * s, a.z2 * s)


# --- matrices ----------------------------------------------------------------

_matmul_sentinel = object()


class HMatrix:
    """Square matrix of Quat acting on H^n column vectors from the left."""

    __slots__ = ("n", "rows", "key", "_hash", "_nz")

    def __init__(self, rows):
        rows = tuple(tuple(r) for r in rows)
        self.n = len(rows)
        for r in rows:
            if len(r) != self.n:
                raise ValueError("matrix must be square")
        self.rows = rows
        self.key = tuple(q.key for r in rows for q in r)
        self._hash = hash(self.key)
        self._nz = None

    def _nonzeros(self):
        if self._nz is None:
            self._nz = tuple(
                tuple((j, q) for j, q in enumerate(r) if not q.is_zero()) for r in self.rows
            )
        return self._nz

    def __eq__(self, other):
        if isinstance(other, HMatrix):
            return self.key == other.key
        return NotImplemented

    def __hash__(self):
        return self._hash

    def __mul__(self, other):
        if isinstance(other, HMatrix):
            return mat_mul(self, other)
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            return mat_inv(self) ** (-k)
        result = identity_matrix(self.n)
        base = self
        while k:
            if k & 1:
                result = mat_mul(result, base)
            base = mat_mul(base, base)
            k >>= 1
        return result

    def apply(self, vec: tuple[Quat, ...]) -> tuple[Quat, ...]:
        out = []
        for nz in self._nonzeros():
            acc = Q_ZERO
            for j, q in nz:
                if not vec[j].is_zero():
                    acc = acc + quat_mul(q, vec[j])
            out.append(acc)
        return tuple(out)

    def is_identity(self) -> bool:
        return self == identity_matrix(self.n)

    def order(self, bound: int = 10000) -> int:
        g = self
        ident = identity_matrix(self.n)
        for k in range(1, bound + 1):
            if g == ident:
                return k
            g = mat_mul(g, self)
        raise ValueError("order exceeds bound")

    def __repr__(self):
        body = "; ".join(", ".join(render_quat(q) for q in r) for r in self.rows)
        return f"HMatrix[{body}]"


_ident_cache: dict[int, HMatrix] = {}


def identity_matrix(n: int) -> HMatrix:
    m = _ident_cache.get(n)
    if m is None:
        m = HMatrix([[Q_ONE if i == j else Q_ZERO for j in range(n)] for i in range(n)])
        _ident_cache[n] = m
    return m


def mat_mul(a: HMatrix, b: HMatrix) -> HMatrix:
    if a.n != b.n:
        raise ValueError("size mismatch")
    n = a.n
    bnz = b._nonzeros()
    out = [[Q_ZERO] * n for _ in range(n)]
    for i, anz in enumerate(a._nonzeros()):
        row = out[i]
        for k, qa in anz:
            for j, qb in bnz[k]:
                row[j] = row[j] + quat_mul(qa, qb)
    return HMatrix(out)


def mat_inv(a: HMatrix) -> HMatrix:
    """Inverse by noncommutative Gaussian elimination (left row operations)."""
    n = a.n
    work = [list(a.rows[i]) + [Q_ONE if j == i else Q_ZERO for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if not work[r][col].is_zero()), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        work[col], work[piv] = work[piv], work[col]
        pinv = quat_inv(work[col][col])
        work[col] = [quat_mul(pinv, q) for q in work[col]]
        for r in range(n):
            if r != col and not work[r][col].is_zero():
                f = work[r][col]
                work[r] = [q - quat_mul(f, p) for q, p in zip(work[r], work[col])]
    return HMatrix([row[n:] for row in work])


def mat_sub(a: HMatrix, b: HMatrix) -> HMatrix:
    return HMatrix([[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a.rows, b.rows)])


def _row_echelon(rows: list[list[Quat]]) -> tuple[list[list[Quat]], list[int]]:
    """Reduced row echelon form via left row operations; returns (rows, pivot columns)."""
    rows = [list(r) for r in rows]
    m = len(rows)
    width = len(rows[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for col in range(width):
        piv = next((i for i in range(r, m) if not rows[i][col].is_zero()), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pinv = quat_inv(rows[r][col])
        rows[r] = [quat_mul(pinv, q) for q in rows[r]]
        for i in range(m):
            if i != r and not rows[i][col].is_zero():
                f = rows[i][col]
                rows[i] = [q - quat_mul(f, p) for q, p in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == m:
            break
    return rows[:r], pivots


def mat_rank(a: HMatrix) -> int:
    _, pivots = _row_echelon([list(r) for r in a.rows])
    return len(pivots)


def kernel_basis(rows: list[list[Quat]], width: int) -> list[tuple[Quat, ...]]:
    """Basis of the right null space {x : M x = 0} of the given row list."""
    red, pivots = _row_echelon(rows)
    pivset = set(pivots)
    basis = []
    for free in range(width):
        if free in pivset:
            continue
        vec = [Q_ZERO] * width
        vec[free] = Q_ONE
        for i, p in enumerate(pivots):
            vec[p] = -red[i][free]
        basis.append(tuple(vec))
    return basis


# --- subspaces ----------------------------------------------------------------


def _canonical_basis(n: int, vecs) -> tuple[tuple[Quat, ...], ...]:
    """Unique rightmost-pivot echelon basis of the right span of vecs."""
    work = [list(v) for v in vecs if any(not q.is_zero() for q in v)]
    done: list[list[Quat]] = []  # maintained with distinct pivots (= last nonzero index)
    for vec in work:
        for b in done:
            p = _last_nonzero(b)
            if not vec[p].is_zero():
                f = vec[p]
                for t in range(n):
                    vec[t] = vec[t] - quat_mul(b[t], f)
        p = _last_nonzero(vec)
        if p < 0:
            continue
        pinv = quat_inv(vec[p])
        vec = [quat_mul(q, pinv) for q in vec]
        # re-eliminate this new pivot from earlier vectors
        for b in done:
            if not b[p].is_zero():
                f = b[p]
                for t in range(n):
                    b[t] = b[t] - quat_mul(vec[t], f)
        done.append(vec)
    done.sort(key=_last_nonzero)
    return tuple(tuple(v) for v in done)


def _last_nonzero(vec) -> int:
    for t in range(len(vec) - 1, -1, -1):
        if not vec[t].is_zero():
            return t
    return -1


class HSubspace:
    """A right-H subspace of H^n in canonical echelon form."""

    __slots__ = ("n", "basis", "key", "_hash")

    def __init__(self, n: int, vecs, canonical: bool = False):
        self.n = n
        self.basis = tuple(tuple(v) for v in vecs) if canonical else _canonical_basis(n, vecs)
        self.key = tuple(q.key for v in self.basis for q in v)
        self._hash = hash((n, self.key))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @classmethod
    def full(cls, n: int) -> "HSubspace":
        return cls(n, identity_matrix(n).rows)

    @classmethod
    def zero(cls, n: int) -> "HSubspace":
        return cls(n, [])

    def __eq__(self, other):
        if isinstance(other, HSubspace):
            return self.n == other.n and self.key == other.key
        return NotImplemented

    def __hash__(self):
        return self._hash

    def reduce_vector(self, vec) -> tuple[Quat, ...]:
        vec = list(vec)
        for b in self.basis:
            p = _last_nonzero(b)
            if not vec[p].is_zero():
                f = vec[p]
                for t in range(self.n):
                    vec[t] = vec[t] - quat_mul(b[t], f)
        return tuple(vec)

    def contains_vector(self, vec) -> bool:
        return all(q.is_zero() for q in self.reduce_vector(vec))

    def contains_space(self, other: "HSubspace") -> bool:
        return all(self.contains_vector(v) for v in other.basis)

    def __repr__(self):
        vecs = "; ".join("(" + ", ".join(render_quat(q) for q in v) + ")" for v in self.basis)
        return f"HSubspace[{vecs}]"


def fix_space(g: HMatrix) -> HSubspace:
    """Right-H kernel of (I - g): the pointwise fixed subspace."""
    n = g.n
    ident = identity_matrix(n)
    rows = [[x - y for x, y in zip(ri, rg)] for ri, rg in zip(ident.rows, g.rows)]
    return HSubspace(n, kernel_basis(rows, n))


def is_reflection(g: HMatrix) -> bool:
    """True iff rank(I - g) = 1."""
    n = g.n
    ident = identity_matrix(n)
    rows = [[x - y for x, y in zip(ri, rg)] for ri, rg in zip(ident.rows, g.rows)]
    _, pivots = _row_echelon(rows)
    return len(pivots) == 1


def hermitian_form(v, x) -> Quat:
    """(v, x) = sum_i conj(v_i) x_i."""
    acc = Q_ZERO
    for a, b in zip(v, x):
        if not (a.is_zero() or b.is_zero()):
            acc = acc + quat_mul(quat_conj(a), b)
    return acc


def reflection_from_root(v) -> HMatrix:
    """The order-2 reflection with root line v*H: r(x) = x - v*(v,v)^(-1)*2*(v,x)."""
    v = tuple(v)
    n = len(v)
    vv = hermitian_form(v, v)  # positive rational
    if vv.is_zero():
        raise ValueError("zero root vector")
    scale = cyclo.inv(vv.z1) * from_rational(2)
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            t = quat_mul(v[i], _scale_right(quat_conj(v[j]), scale))
            e = Q_ONE if i == j else Q_ZERO
            row.append(e - t)
        rows.append(row)
    return HMatrix(rows)


def intersect(u: HSubspace, w: HSubspace) -> HSubspace:
    if u.n != w.n:
        raise ValueError("ambient dimension mismatch")
    if not u.basis or not w.basis:
        return HSubspace.zero(u.n)
    cols = list(u.basis) + list(w.basis)
    width = len(cols)
    rows = [[cols[c][r] for c in range(width)] for r in range(u.n)]
    vecs = []
    for coeffs in kernel_basis(rows, width):
        vec = [Q_ZERO] * u.n
        for c in range(len(u.basis)):
            if not coeffs[c].is_zero():
                for t in range(u.n):
                    vec[t] = vec[t] + quat_mul(u.basis[c][t], coeffs[c])
        vecs.append(tuple(vec))
    return HSubspace(u.n, vecs)


def setwise_image(g: HMatrix, u: HSubspace) -> HSubspace:
    if g.n != u.n:
        raise ValueError("ambient dimension mismatch")
    return HSubspace(u.n, [g.apply(v) for v in u.basis])


def orthogonal_complement(u: HSubspace) -> HSubspace:
    """{x : (v, x) = 0 for all v in u} under the standard Hermitian form."""
    if not u.basis:
        return HSubspace.full(u.n)
    rows = [[quat_conj(q) for q in v] for v in u.basis]
    return HSubspace(u.n, kernel_basis(rows, u.n))


def complexify(a: HMatrix) -> HMatrix:
    """Restriction of scalars to C: the 2n x 2n complex matrix of a."""
    n = a.n
    out = [[Q_ZERO] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        for j in range(n):
            q = a.rows[i][j]
            z1, z2 = q.z1, q.z2
            out[i][j] = Quat(z1)
            out[i][j + n] = Quat(-z2)
            out[i + n][j] = Quat(complex_conjugate(z2))
            out[i + n][j + n] = Quat(complex_conjugate(z1))
    return HMatrix(out)


# --- literals -----------------------------------------------------------------


def _real_imag(z: CycloNum) -> tuple[CycloNum, CycloNum]:
    zc = complex_conjugate(z)
    half = from_rational("1/2")
    re = (z + zc) * half
    im = (z - zc) * half * cyclo.inv(cyclo.I)
    return re, im


def _component(text: str) -> str:
    return f"({text})" if (" + " in text or " - " in text) else text


def render_quat(q: Quat) -> str:
    """Render as `a + b*i + c*j + d*k` with cyclotomic-literal components."""
    a, b = _real_imag(q.z1)
    c, d = _real_imag(q.z2)
    parts = []
    for comp, unit in ((a, ""), (b, "i"), (c, "j"), (d, "k")):
        if comp.is_zero():
            continue
        body = _component(cyclo.render_cyclo(comp))
        parts.append(body if not unit else (f"{body}*{unit}" if body != "1" else unit))
    if not parts:
        return "0"
    text = parts[0]
    for p in parts[1:]:
        if p.startswith("-") and "(" not in p.split("*")[0]:
            text += " - " + p[1:]
        else:
            text += " + " + p
    return text


def _split_terms(s: str) -> list[tuple[int, str]]:
    terms = []
    depth = 0
    sign = 1
    cur: list[str] = []
    seen = False
    for ch in s:
        if ch == "(":
            depth += 1
            cur.append(ch)
        elif ch == ")":
            depth -= 1
            cur.append(ch)
        elif ch in "+-" and depth == 0 and seen and cur and cur[-1] not in "*^/(":
            terms.append((sign, "".join(cur)))
            sign = 1 if ch == "+" else -1
            cur = []
        elif ch in "+-" and depth == 0 and not seen:
            if ch == "-":
                sign = -sign
        else:
            if not ch.isspace():
                seen = True
            cur.append(ch)
    terms.append((sign, "".join(cur)))
    return [(sg, t.strip()) for sg, t in terms if t.strip()]


def parse_quat(text: str) -> Quat:
    """Parse the quaternion literal grammar `a + b*i + c*j + d*k`."""
    z1 = ZERO
    z2 = ZERO
    for sign, term in _split_terms(text.strip()):
        unit = None
        body = term
        if term in ("i", "j", "k"):
            unit, body = term, "1"
        elif term.endswith(("*i", "*j", "*k")):
            unit, body = term[-1], term[:-2].strip()
        if body.startswith("(") and body.endswith(")"):
            body = body[1:-1]
        coef = parse_cyclo(body)
        if sign < 0:
            coef = -coef
        if unit is None:
            z1 = z1 + coef
        elif unit == "i":
            z1 = z1 + coef * cyclo.I
        elif unit == "j":
            z2 = z2 + coef
        else:  # k = i*j
            z2 = z2 + coef * cyclo.I
    return Quat(z1, z2)
