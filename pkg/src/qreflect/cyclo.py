"""Exact cyclotomic numbers.

A CycloNum is an element of Q(zeta_N) stored at its *minimal* conductor in
the power basis {zeta_N^0, ..., zeta_N^(phi(N)-1)} reduced modulo the N-th
cyclotomic polynomial.  Values are immutable, interned, hashable, and two
CycloNum compare equal iff they are the same mathematical number.

Internally a value is (N, num, den): a tuple of integer numerators over a
single positive denominator, in lowest terms.  All arithmetic is exact; no
floating point is used anywhere.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm

from sympy import cyclotomic_poly, primefactors, totient

__all__ = [
    "CycloNum",
    "add",
    "mul",
    "neg",
    "inv",
    "root_of_unity",
    "complex_conjugate",
    "from_rational",
    "parse_cyclo",
    "ZERO",
    "ONE",
    "SQRT5",
    "I",
]


@lru_cache(maxsize=None)
def _phi(n: int) -> int:
    return int(totient(n))


@lru_cache(maxsize=None)
def _primes(n: int) -> tuple[int, ...]:
    return tuple(int(p) for p in primefactors(n))


@lru_cache(maxsize=None)
def _cyclo_coeffs(n: int) -> tuple[int, ...]:
    """Coefficients of the n-th cyclotomic polynomial, constant term first."""
    poly = cyclotomic_poly(n, polys=True)
    cs = [int(c) for c in poly.all_coeffs()]  # leading first
    cs.reverse()
    return tuple(cs)


@lru_cache(maxsize=None)
def _power_table(n: int) -> tuple[tuple[int, ...], ...]:
    """Row e = representation of zeta_n^e in the power basis, 0 <= e < max(n, 2*phi(n))."""
    phi = _phi(n)
    cs = _cyclo_coeffs(n)  # monic, degree phi
    rows: list[tuple[int, ...]] = []
    cur = [0] * phi
    cur[0] = 1
    top = max(n, 2 * phi)
    for e in range(top):
        rows.append(tuple(cur))
        # multiply by zeta: shift, then reduce the overflow coefficient
        over = cur[phi - 1]
        nxt = [0] + cur[: phi - 1]
        if over:
            for t in range(phi):
                nxt[t] -= over * cs[t]
        cur = nxt
    return tuple(rows)


@lru_cache(maxsize=None)
def _lift_matrix(n: int, big: int) -> tuple[tuple[int, ...], ...]:
    """Row e = representation of zeta_n^e (e < phi(n)) in the basis of Q(zeta_big)."""
    assert big % n == 0
    table = _power_table(big)
    step = big // n
    return tuple(table[(e * step) % big] for e in range(_phi(n)))


@lru_cache(maxsize=None)
def _conj_matrix(n: int) -> tuple[tuple[int, ...], ...]:
    """Row e = representation of zeta_n^(-e) in the basis of Q(zeta_n)."""
    table = _power_table(n)
    return tuple(table[(-e) % n] for e in range(_phi(n)))


def _apply_matrix(mat: tuple[tuple[int, ...], ...], vec: tuple[int, ...], width: int) -> list[int]:
    out = [0] * width
    for c, row in zip(vec, mat):
        if c:
            for t in range(width):
                if row[t]:
                    out[t] += c * row[t]
    return out


# --- subfield descent -------------------------------------------------------

@lru_cache(maxsize=None)
def _descent_solver(n: int, m: int):
    """Data to rewrite a Q(zeta_n) vector in terms of the Q(zeta_m) basis.

    Returns (pivot_rows, inv_rows) where inv_rows is the exact inverse of the
    phi(m) x phi(m) submatrix of the embedding matrix picked on pivot_rows.
    """
    phin, phim = _phi(n), _phi(m)
    emb = _lift_matrix(m, n)  # phim rows of length phin: zeta_m^t in basis(n)
    # columns of the system are the basis vectors of Q(zeta_m); rows index basis(n)
    cols = [[Fraction(emb[t][r]) for t in range(phim)] for r in range(phin)]
    # Gaussian elimination to find phim independent rows
    work = [row[:] for row in cols]
    pivots: list[int] = []
    used = [False] * phin
    for c in range(phim):
        pr = -1
        for r in range(phin):
            if not used[r] and work[r][c] != 0:
                pr = r
                break
        assert pr >= 0
        used[pr] = True
        pivots.append(pr)
        pv = work[pr][c]
        for r in range(phin):
            if r != pr and work[r][c] != 0:
                f = work[r][c] / pv
                for cc in range(phim):
                    work[r][cc] -= f * work[pr][cc]
    # invert the square submatrix on the pivot rows
    sub = [[Fraction(emb[t][pr]) for t in range(phim)] for pr in pivots]
    inv = [[Fraction(int(i == j)) for j in range(phim)] for i in range(phim)]
    for c in range(phim):
        pr = next(r for r in range(c, phim) if sub[r][c] != 0)
        sub[c], sub[pr] = sub[pr], sub[c]
        inv[c], inv[pr] = inv[pr], inv[c]
        pv = sub[c][c]
        sub[c] = [x / pv for x in sub[c]]
        inv[c] = [x / pv for x in inv[c]]
        for r in range(phim):
            if r != c and sub[r][c] != 0:
                f = sub[r][c]
                sub[r] = [a - f * b for a, b in zip(sub[r], sub[c])]
                inv[r] = [a - f * b for a, b in zip(inv[r], inv[c])]
    return tuple(pivots), tuple(tuple(row) for row in inv)


def _try_descend(n: int, m: int, num: tuple[int, ...], den: int):
    """If the value lies in Q(zeta_m), return its (num, den) there, else None."""
    phin, phim = _phi(n), _phi(m)
    pivots, inv = _descent_solver(n, m)
    v = [Fraction(num[r], den) for r in range(phin)]
    x = [sum(inv[i][j] * v[pivots[j]] for j in range(phim)) for i in range(phim)]
    # verify against the full embedding
    emb = _lift_matrix(m, n)
    for r in range(phin):
        if sum(x[t] * emb[t][r] for t in range(phim)) != v[r]:
            return None
    d = 1
    for f in x:
        d = d * f.denominator // gcd(d, f.denominator)
    return tuple(int(f * d) for f in x), d


_canon_cache: dict[tuple, tuple] = {}


def _canonical(n: int, num: tuple[int, ...], den: int) -> tuple[int, tuple[int, ...], int]:
    """Reduce (n, num, den) to lowest terms and minimal conductor."""
    key = (n, num, den)
    hit = _canon_cache.get(key)
    if hit is not None:
        return hit
    g = den
    for c in num:
        g = gcd(g, c)
        if g == 1:
            break
    if g > 1:
        num = tuple(c // g for c in num)
        den //= g
    cn, cnum, cden = n, num, den
    changed = True
    while changed and cn > 1:
        changed = False
        for p in _primes(cn):
            m = cn // p
            if m % 4 == 2:
                m //= 2
            if m == cn:
                continue
            got = _try_descend(cn, m, cnum, cden)
            if got is not None:
                cnum, cden = got
                cn = m
                changed = True
                break
    res = (cn, cnum, cden)
    _canon_cache[key] = res
    _canon_cache[res] = res
    return res


_intern: dict[tuple, "CycloNum"] = {}


class CycloNum:
    """An exact element of a cyclotomic field, in canonical normal form."""

    __slots__ = ("n", "num", "den", "_hash")

    def __new__(cls, n: int, num: tuple[int, ...], den: int = 1):
        n, num, den = _canonical(n, tuple(num), den)
        key = (n, num, den)
        obj = _intern.get(key)
        if obj is None:
            obj = object.__new__(cls)
            obj.n = n
            obj.num = num
            obj.den = den
            obj._hash = hash(key)
            _intern[key] = obj
        return obj

    # -- spec field accessors ------------------------------------------------
    @property
    def conductor(self) -> int:
        return self.n

    @property
    def coeffs(self) -> dict[int, Fraction]:
        return {e: Fraction(c, self.den) for e, c in enumerate(self.num) if c}

    # -- predicates ----------------------------------------------------------
    def is_zero(self) -> bool:
        return self.n == 1 and self.num[0] == 0

    def is_rational(self) -> bool:
        return self.n == 1

    def as_rational(self) -> Fraction:
        if self.n != 1:
            raise ValueError(f"not rational: {self}")
        return Fraction(self.num[0], self.den)

    # -- arithmetic ----------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return add(self, neg(other))

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return add(other, neg(self))

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return mul(self, inv(other))

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return mul(other, inv(self))

    def __neg__(self):
        return neg(self)

    def __pow__(self, k: int):
        if k < 0:
            return inv(self) ** (-k)
        result = ONE
        base = self
        while k:
            if k & 1:
                result = mul(result, base)
            base = mul(base, base)
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, CycloNum):
            return self is other
        if isinstance(other, (int, Fraction)):
            return self.n == 1 and Fraction(self.num[0], self.den) == other
        return NotImplemented

    def __hash__(self):
        return self._hash

    def conj(self) -> "CycloNum":
        return complex_conjugate(self)

    def __repr__(self):
        return f"CycloNum({self!s})"

    def __str__(self):
        return render_cyclo(self)


def _coerce(x):
    if isinstance(x, CycloNum):
        return x
    if isinstance(x, int):
        return CycloNum(1, (x,), 1)
    if isinstance(x, Fraction):
        return CycloNum(1, (x.numerator,), x.denominator)
    return NotImplemented


def from_rational(q) -> CycloNum:
    f = Fraction(q)
    return CycloNum(1, (f.numerator,), f.denominator)


ZERO = from_rational(0)
ONE = from_rational(1)


def _lift(a: CycloNum, big: int) -> tuple[list[int], int]:
    if a.n == big:
        return list(a.num), a.den
    mat = _lift_matrix(a.n, big)
    return _apply_matrix(mat, a.num, _phi(big)), a.den


_add_cache: dict[tuple[int, int], CycloNum] = {}
_mul_cache: dict[tuple[int, int], CycloNum] = {}


def add(a: CycloNum, b: CycloNum) -> CycloNum:
    ka, kb = id(a), id(b)
    key = (ka, kb) if ka <= kb else (kb, ka)
    hit = _add_cache.get(key)
    if hit is not None:
        return hit
    big = lcm(a.n, b.n)
    va, da = _lift(a, big)
    vb, db = _lift(b, big)
    den = da * db
    num = tuple(x * db + y * da for x, y in zip(va, vb))
    res = CycloNum(big, num, den)
    _add_cache[key] = res
    return res


def mul(a: CycloNum, b: CycloNum) -> CycloNum:
    ka, kb = id(a), id(b)
    key = (ka, kb) if ka <= kb else (kb, ka)
    hit = _mul_cache.get(key)
    if hit is not None:
        return hit
    big = lcm(a.n, b.n)
    va, da = _lift(a, big)
    vb, db = _lift(b, big)
    phi = _phi(big)
    conv = [0] * (2 * phi - 1)
    for i, x in enumerate(va):
        if x:
            for j, y in enumerate(vb):
                if y:
                    conv[i + j] += x * y
    table = _power_table(big)
    out = conv[:phi]
    for e in range(phi, 2 * phi - 1):
        c = conv[e]
        if c:
            row = table[e]
            for t in range(phi):
                if row[t]:
                    out[t] += c * row[t]
    res = CycloNum(big, tuple(out), da * db)
    _mul_cache[key] = res
    return res


def neg(a: CycloNum) -> CycloNum:
    return CycloNum(a.n, tuple(-c for c in a.num), a.den)


def _poly_xgcd_mod(anum: tuple[int, ...], aden: int, n: int) -> list[Fraction]:
    """Coefficients of the inverse of the given value modulo the n-th cyclotomic polynomial."""
    mod = [Fraction(c) for c in _cyclo_coeffs(n)]
    a = [Fraction(c, aden) for c in anum]
    # extended Euclid: maintain r0 = mod, r1 = a with Bezout coefficients for a
    r0, r1 = mod, a[:]
    s0, s1 = [Fraction(0)], [Fraction(1)]

    def deg(p):
        d = len(p) - 1
        while d >= 0 and p[d] == 0:
            d -= 1
        return d

    while True:
        d1 = deg(r1)
        if d1 < 0:
            raise ZeroDivisionError("division by zero cyclotomic number")
        if d1 == 0:
            c = r1[0]
            return [x / c for x in s1]
        d0 = deg(r0)
        if d0 < d1:
            r0, r1, s0, s1 = r1, r0, s1, s0
            continue
        # r0 -= (lead(r0)/lead(r1)) x^(d0-d1) * r1
        f = r0[d0] / r1[d1]
        shift = d0 - d1
        for t in range(d1 + 1):
            r0[t + shift] -= f * r1[t]
        for t in range(len(s1)):
            while t + shift >= len(s0):
                s0.append(Fraction(0))
            s0[t + shift] -= f * s1[t]


_inv_cache: dict[int, CycloNum] = {}


def inv(a: CycloNum) -> CycloNum:
    if a.is_zero():
        raise ZeroDivisionError("division by zero cyclotomic number")
    hit = _inv_cache.get(id(a))
    if hit is not None:
        return hit
    if a.n == 1:
        res = CycloNum(1, (a.den if a.num[0] > 0 else -a.den,), abs(a.num[0]))
    else:
        coeffs = _poly_xgcd_mod(a.num, a.den, a.n)
        phi = _phi(a.n)
        coeffs += [Fraction(0)] * (phi - len(coeffs))
        den = 1
        for f in coeffs[:phi]:
            den = den * f.denominator // gcd(den, f.denominator)
        res = CycloNum(a.n, tuple(int(f * den) for f in coeffs[:phi]), den)
    _inv_cache[id(a)] = res
    return res


def root_of_unity(N: int, k: int) -> CycloNum:
    """zeta_N^k in canonical form."""
    if N < 1:
        raise ValueError("N must be positive")
    k %= N
    if N % 4 == 2:
        # Q(zeta_N) = Q(zeta_(N/2)) for odd N/2: zeta_N = -zeta_(N/2)^((N/2+1)/2)
        half = N // 2
        sign = -1 if k % 2 else 1
        e = (k * ((half + 1) // 2)) % half
        base = root_of_unity(half, e)
        return neg(base) if sign < 0 else base
    phi = _phi(N)
    return CycloNum(N, _power_table(N)[k][:phi], 1)


_conj_cache: dict[int, CycloNum] = {}


def complex_conjugate(a: CycloNum) -> CycloNum:
    hit = _conj_cache.get(id(a))
    if hit is not None:
        return hit
    if a.n == 1:
        res = a
    else:
        mat = _conj_matrix(a.n)
        res = CycloNum(a.n, tuple(_apply_matrix(mat, a.num, _phi(a.n))), a.den)
    _conj_cache[id(a)] = res
    return res


def galois(a: CycloNum, k: int) -> CycloNum:
    """The field automorphism zeta_n -> zeta_n^k (k coprime to the conductor)."""
    if a.n == 1:
        return a
    if gcd(k, a.n) != 1:
        raise ValueError(f"exponent {k} not coprime to conductor {a.n}")
    table = _power_table(a.n)
    phi = _phi(a.n)
    out = [0] * phi
    for e, c in enumerate(a.num):
        if c:
            row = table[(e * k) % a.n]
            for t in range(phi):
                if row[t]:
                    out[t] += c * row[t]
    return CycloNum(a.n, tuple(out), a.den)


# --- literals ---------------------------------------------------------------

I = root_of_unity(4, 1)
SQRT5 = add(ONE, mul(from_rational(2), add(root_of_unity(5, 1), root_of_unity(5, 4))))
assert mul(SQRT5, SQRT5) == from_rational(5), "sqrt5 self-check failed"


def render_cyclo(a: CycloNum) -> str:
    """Render as a sum of `q*z{N}^{k}` terms (plain rational for the constant term)."""
    if a.is_zero():
        return "0"
    parts: list[tuple[Fraction, int]] = [
        (Fraction(c, a.den), e) for e, c in enumerate(a.num) if c
    ]
    pieces = []
    for idx, (q, e) in enumerate(parts):
        sign = "-" if q < 0 else "+"
        mag = abs(q)
        if e == 0:
            body = str(mag)
        elif mag == 1:
            body = f"z{a.n}^{e}"
        else:
            body = f"{mag}*z{a.n}^{e}"
        if idx == 0:
            pieces.append(body if q > 0 else "-" + body)
        else:
            pieces.append(f" {sign} {body}")
    return "".join(pieces)


_TERM_RE = re.compile(
    r"""^\s*
        (?P<coef>\d+(?:/\d+)?)?      # optional rational coefficient
        (?:\s*\*\s*)?                # optional *
        (?P<atom>z(?P<n>\d+)(?:\^(?P<k>\d+))?|i|sqrt5)?  # optional atom
        \s*$""",
    re.VERBOSE,
)


def parse_cyclo(text: str) -> CycloNum:
    """Parse the `q*z{N}^{k}` sum grammar, plus the aliases `i` and `sqrt5`."""
    s = text.strip()
    if not s:
        raise ValueError("empty cyclotomic literal")
    # split into signed terms at top level (no parentheses in the grammar)
    terms: list[tuple[int, str]] = []
    sign, cur = 1, []
    first = True
    for ch in s:
        if ch in "+-" and not first and (cur and cur[-1] not in "*^/"):
            terms.append((sign, "".join(cur)))
            sign = 1 if ch == "+" else -1
            cur = []
        elif ch == "-" and first:
            sign = -sign
        elif ch == "+" and first:
            pass
        else:
            cur.append(ch)
            first = False
    terms.append((sign, "".join(cur)))
    total = ZERO
    for tsign, term in terms:
        m = _TERM_RE.match(term)
        if not m or (m.group("coef") is None and m.group("atom") is None):
            raise ValueError(f"cannot parse cyclotomic term {term!r} in {text!r}")
        coef = Fraction(m.group("coef")) if m.group("coef") else Fraction(1)
        atom = m.group("atom")
        if atom is None:
            val = from_rational(coef)
        else:
            if atom == "i":
                base = I
            elif atom == "sqrt5":
                base = SQRT5
            else:
                n = int(m.group("n"))
                k = int(m.group("k")) if m.group("k") else 1
                base = root_of_unity(n, k)
            val = mul(from_rational(coef), base)
        if tsign < 0:
            val = neg(val)
        total = add(total, val)
    return total
