"""Full-rank Z_(p)-lattices in Q^n and their canonical p-Hermite form.

A lattice is stored as ``p**(-s) * span(H)`` where ``H`` is an integer
lower-triangular matrix whose columns are the basis vectors, with diagonal
``p**a_i`` and below-diagonal entries of row ``i`` reduced into
``[0, p**a_i)``.  ``s`` is the least integer making ``p**s * L`` integral, so
the pair ``(s, H)`` is unique per lattice and equality is structural.

All elimination runs on integers modulo ``p**N`` where ``p**N Z^n`` is known to
lie inside the lattice being computed; the caller supplies that bound.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from . import _matrix as mx
from .valuation import INF, PAdicContext, int_valuation


class SingularMatrixError(ValueError):
    pass


def _hnf(cols: list[list[int]], n: int, p: int, N: int):
    """Lower-triangular Hermite form of ``span(cols) + p**N Z^n``.

    Returns (rows of H, diagonal exponents).
    """
    q = p ** N
    pw = [p ** k for k in range(N + 1)]
    work = []
    for c in cols:
        c = [x % q for x in c]
        if any(c):
            work.append(c)
    piv: list[list[int]] = []
    diag: list[int] = []
    for i in range(n):
        best, bv = -1, N
        for idx, c in enumerate(work):
            x = c[i]
            if x:
                v = int_valuation(x, p)
                if v < bv:
                    best, bv = idx, v
                    if v == 0:
                        break
        if best < 0:
            col = [0] * n
            col[i] = q
            piv.append(col)
            diag.append(N)
            continue
        c = work.pop(best)
        u = c[i] // pw[bv]
        if u != 1:
            ui = pow(u, -1, q)
            c = [y * ui % q for y in c]
        nxt = []
        for w in work:
            x = w[i]
            if x:
                f = x // pw[bv]
                w = [0] * (i + 1) + [(w[k] - f * c[k]) % q for k in range(i + 1, n)]
            if any(w):
                nxt.append(w)
        if bv:
            # p**N e_i is in the lattice; what is left of it after clearing row i.
            m = pw[N - bv]
            sat = [0] * (i + 1) + [c[k] * m % q for k in range(i + 1, n)]
            if any(sat):
                nxt.append(sat)
        work = nxt
        piv.append(c)
        diag.append(bv)
    for j in range(n):
        cj = piv[j]
        for i in range(j + 1, n):
            m = pw[diag[i]]
            x = cj[i]
            r = x % m
            f = (x - r) // m
            if f:
                ci = piv[i]
                for k in range(i + 1, n):
                    cj[k] = (cj[k] - f * ci[k]) % q
            cj[i] = r
    rows = tuple(tuple(piv[j][i] if j <= i else 0 for j in range(n)) for i in range(n))
    return rows, tuple(diag)


def _as_int_unit(x: Fraction, q: int) -> int:
    """Image in Z/q of a rational whose denominator is prime to q."""
    return x.numerator * pow(x.denominator, -1, q) % q if q > 1 else 0


class Lattice:
    """A full-rank lattice over Z_(p) in Q^n, kept in canonical form."""

    __slots__ = ("ctx", "n", "s", "h", "a", "_hash", "_k", "_basis")

    def __init__(self, ctx: PAdicContext, n: int, s: int, h: tuple, a: tuple):
        self.ctx = ctx
        self.n = n
        self.s = s
        self.h = h
        self.a = a
        self._hash = hash((ctx.p, n, s, h))
        self._k = None
        self._basis = None

    # -- construction -----------------------------------------------------

    @classmethod
    def _from_int(cls, ctx, n, cols, t, N):
        """Lattice ``p**(-t) span(cols)`` known to contain ``p**N Z^n``."""
        p = ctx.p
        Nw = N + t
        if Nw < 0:
            raise ValueError("containment bound inconsistent with generators")
        h, a = _hnf(cols, n, p, Nw)
        s = t
        while min(a) >= 1 and all(x % p == 0 for row in h for x in row):
            h = tuple(tuple(x // p for x in row) for row in h)
            a = tuple(x - 1 for x in a)
            s -= 1
        return cls(ctx, n, s, h, a)

    @classmethod
    def from_generators(cls, ctx: PAdicContext, gens: Sequence[Sequence], bound=None):
        """Lattice spanned by the given rational column vectors.

        ``bound`` is an integer N with p**N Z^n inside the span; it is derived
        from a maximal independent subset when omitted.
        """
        gens = [tuple(Fraction(x) for x in g) for g in gens]
        if not gens:
            raise SingularMatrixError("no generators")
        n = len(gens[0])
        if bound is None:
            idx = mx.independent_columns(gens)
            if len(idx) < n:
                raise SingularMatrixError("generators do not span a full-rank lattice")
            sq = mx.from_columns([gens[i] for i in idx])
            ds = mx.det(sq)
        t = max(-ctx.valuation(x) for g in gens for x in g if x != 0)
        if bound is None:
            # p**t B is integral and p**v(det) times its inverse is too.
            bound = ctx.valuation(ds) + (n - 1) * t
        q = ctx.p ** max(bound + t, 0)
        pt = Fraction(ctx.p) ** t
        cols = [[_as_int_unit(x * pt, q) for x in g] for g in gens]
        return cls._from_int(ctx, n, cols, t, bound)

    @classmethod
    def from_basis(cls, ctx: PAdicContext, basis: Sequence[Sequence]) -> "Lattice":
        """Canonicalize a square matrix whose columns are a basis."""
        b = mx.to_matrix(basis)
        n = len(b)
        if any(len(row) != n for row in b):
            raise ValueError("basis must be square")
        d = mx.det(b)
        if d == 0:
            raise SingularMatrixError("singular basis")
        t = max(-ctx.valuation(x) for row in b for x in row if x != 0)
        # p**t B is integral with determinant valuation v(det) + n t.
        bound = ctx.valuation(d) + n * t - t
        q = ctx.p ** (bound + t)
        pt = Fraction(ctx.p) ** t
        cols = [[_as_int_unit(b[i][j] * pt, q) for i in range(n)] for j in range(n)]
        return cls._from_int(ctx, n, cols, t, bound)

    @classmethod
    def standard(cls, ctx: PAdicContext, n: int) -> "Lattice":
        h = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
        return cls(ctx, n, 0, h, (0,) * n)

    # -- views ------------------------------------------------------------

    @property
    def p(self) -> int:
        return self.ctx.p

    @property
    def basis(self):
        if self._basis is None:
            ps = Fraction(self.ctx.p) ** self.s
            self._basis = tuple(tuple(Fraction(x) / ps for x in row) for row in self.h)
        return self._basis

    @property
    def exponents(self) -> tuple:
        """Valuations of the diagonal of the canonical basis."""
        return tuple(x - self.s for x in self.a)

    @property
    def det_valuation(self) -> int:
        return sum(self.a) - self.n * self.s

    def columns(self) -> list[tuple]:
        b = self.basis
        return [mx.column(b, j) for j in range(self.n)]

    def _kinv(self):
        """Integer K with H K = p**A I, A = sum of diagonal exponents."""
        if self._k is None:
            p, n, h = self.ctx.p, self.n, self.h
            big = p ** sum(self.a)
            pa = [p ** x for x in self.a]
            k = [[0] * n for _ in range(n)]
            for j in range(n):
                for i in range(j, n):
                    acc = big if i == j else 0
                    hi = h[i]
                    for m in range(j, i):
                        acc -= hi[m] * k[m][j]
                    k[i][j] = acc // pa[i]
            self._k = tuple(tuple(r) for r in k)
        return self._k

    # -- equality ---------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Lattice):
            return NotImplemented
        return (self._hash == other._hash and self.ctx.p == other.ctx.p and self.n == other.n
                and self.s == other.s and self.h == other.h)

    def __hash__(self):
        return self._hash

    def sort_key(self):
        return self.basis

    def __repr__(self):
        rows = ", ".join("[" + ", ".join(str(x) for x in row) + "]" for row in self.basis)
        return f"Lattice(p={self.ctx.p}, [{rows}])"

    # -- arithmetic -------------------------------------------------------

    def scale(self, k: int) -> "Lattice":
        """p**k * L."""
        out = Lattice(self.ctx, self.n, self.s - k, self.h, self.a)
        return out

    def member(self, v: Sequence) -> bool:
        v = [Fraction(x) for x in v]
        if len(v) != self.n:
            raise ValueError("dimension mismatch")
        p = self.ctx.p
        k = self._kinv()
        e = sum(self.a) - self.s  # coordinates are p**(-e) K v
        for row in k:
            c = sum(x * y for x, y in zip(row, v))
            if c != 0 and self.ctx.valuation(c) < e:
                return False
        return True

    def __contains__(self, v):
        return self.member(v)

    def _contains_int(self, cols, t) -> bool:
        """Whether every column of p**(-t) cols lies in the lattice."""
        e = sum(self.a) - self.s + t
        if e <= 0:
            return True
        q = self.ctx.p ** e
        k = self._kinv()
        for c in cols:
            for row in k:
                if sum(x * y for x, y in zip(row, c)) % q:
                    return False
        return True

    def contains(self, other: "Lattice") -> bool:
        """other ⊆ self."""
        cols = [[other.h[i][j] for i in range(other.n)] for j in range(other.n)]
        return self._contains_int(cols, other.s)

    def __le__(self, other: "Lattice") -> bool:
        return other.contains(self)

    def __add__(self, other: "Lattice") -> "Lattice":
        return lattice_sum(self, other)

    def __and__(self, other: "Lattice") -> "Lattice":
        return intersect(self, other)

    def dual(self) -> "Lattice":
        return dual(self)


def _check_compatible(l1: Lattice, l2: Lattice):
    if l1.ctx.p != l2.ctx.p or l1.n != l2.n:
        raise ValueError("lattices over different primes or dimensions")


def canonicalize(ctx: PAdicContext, basis) -> Lattice:
    return Lattice.from_basis(ctx, basis)


def member(lat: Lattice, v) -> bool:
    return lat.member(v)


def sum_of(lattices: Sequence[Lattice]) -> Lattice:
    """Sum of several lattices in one elimination."""
    lats = list(lattices)
    first = lats[0]
    for x in lats[1:]:
        _check_compatible(first, x)
    p, n = first.ctx.p, first.n
    t = max(x.s for x in lats)
    bound = min(sum(x.a) - x.s for x in lats)
    cols = []
    for x in lats:
        f = p ** (t - x.s)
        for j in range(n):
            cols.append([x.h[i][j] * f for i in range(n)])
    return Lattice._from_int(first.ctx, n, cols, t, bound)


def lattice_sum(l1: Lattice, l2: Lattice) -> Lattice:
    return sum_of([l1, l2])


def dual(lat: Lattice) -> Lattice:
    """Dual lattice under the standard pairing: basis is the inverse transpose."""
    k = lat._kinv()
    A = sum(lat.a)
    cols = [list(row) for row in k]  # columns of K^T
    return Lattice._from_int(lat.ctx, lat.n, cols, A - lat.s, lat.s)


def intersect(l1: Lattice, l2: Lattice) -> Lattice:
    _check_compatible(l1, l2)
    return dual(lattice_sum(dual(l1), dual(l2)))


def intersect_all(lattices: Sequence[Lattice]) -> Lattice:
    return dual(sum_of([dual(x) for x in lattices]))


# -- elementary divisors --------------------------------------------------


def smith_decomposition(ctx: PAdicContext, a):
    """Return (U, D, V) with U A V = D, U and V in GL_n(Z_(p)), D = diag(p**e_i).

    Pivots are chosen by minimal valuation, lowest row then lowest column on
    ties, so the exponents come out nondecreasing.
    """
    m = [list(row) for row in mx.to_matrix(a)]
    n = len(m)
    u = [list(row) for row in mx.identity(n)]
    v = [list(row) for row in mx.identity(n)]
    for k in range(n):
        best, bv = None, INF
        for i in range(k, n):
            for j in range(k, n):
                if m[i][j] != 0:
                    val = ctx.valuation(m[i][j])
                    if val < bv:
                        best, bv = (i, j), val
        if best is None:
            raise SingularMatrixError("singular matrix")
        i, j = best
        m[k], m[i] = m[i], m[k]
        u[k], u[i] = u[i], u[k]
        for row in m:
            row[k], row[j] = row[j], row[k]
        for row in v:
            row[k], row[j] = row[j], row[k]
        piv = m[k][k]
        for i in range(k + 1, n):
            f = m[i][k] / piv
            if f:
                m[i] = [x - f * y for x, y in zip(m[i], m[k])]
                u[i] = [x - f * y for x, y in zip(u[i], u[k])]
        for j in range(k + 1, n):
            f = m[k][j] / piv
            if f:
                for row in m:
                    row[j] -= f * row[k]
                for row in v:
                    row[j] -= f * row[k]
        unit = Fraction(ctx.p) ** bv / piv
        for row in m:
            row[k] *= unit
        for row in v:
            row[k] *= unit
    return mx.to_matrix(u), mx.to_matrix(m), mx.to_matrix(v)


def smith_valuations(ctx: PAdicContext, a) -> list[int]:
    """Exponents of the p-elementary divisors of an invertible matrix, nondecreasing."""
    _, d, _ = smith_decomposition(ctx, a)
    return sorted(ctx.valuation(d[i][i]) for i in range(len(d)))


def _rep(x):
    return getattr(x, "rep", x)


def distance(c1, c2) -> int:
    """Building distance between two lattices or lattice classes."""
    l1, l2 = _rep(c1), _rep(c2)
    _check_compatible(l1, l2)
    if l1 == l2:
        return 0
    # For C = B1^{-1} B2 the extreme elementary divisors are -minval(C^{-1})
    # and minval(C); with B^{-1} = p**(s - A) K both are integer products.
    p = l1.ctx.p
    c12 = _int_product(l1._kinv(), l2.h)
    c21 = _int_product(l2._kinv(), l1.h)
    return sum(l1.a) + sum(l2.a) - _min_valuation(c12, p) - _min_valuation(c21, p)


def _int_product(a, b):
    n = len(a)
    return [sum(a[i][m] * b[m][j] for m in range(n)) for i in range(n) for j in range(n)]


def _min_valuation(entries, p):
    return min(int_valuation(x, p) for x in entries if x)


def transporter(ctx: PAdicContext, m: Lattice, nl: Lattice) -> Lattice:
    """{X in Q^{d x d} : X N ⊆ M}, flattened column-major to dimension d**2.

    It equals B_M Z^{dxd} B_N^{-1}; the basis is B_M E_ij B_N^{-1}.
    """
    _check_compatible(m, nl)
    d = m.n
    kn = nl._kinv()
    an = sum(nl.a)
    hm = m.h
    cols = []
    for i in range(d):
        for j in range(d):
            cols.append([hm[a][i] * kn[j][b] for b in range(d) for a in range(d)])
    t = m.s - nl.s + an
    bound = sum(m.a) - m.s + nl.s
    return Lattice._from_int(ctx, d * d, cols, t, bound)


def endomorphism_dual(lat: Lattice) -> Lattice:
    """Dual of End(L) under the trace pairing: B^{-T} Z^{dxd} B^T."""
    d = lat.n
    k = lat._kinv()
    h = lat.h
    A = sum(lat.a)
    cols = []
    for i in range(d):
        for j in range(d):
            cols.append([k[i][a] * h[b][j] for b in range(d) for a in range(d)])
    return Lattice._from_int(lat.ctx, d * d, cols, A, A)


def compatible_bases(l1: Lattice, l2: Lattice):
    """Frame F with L1 = F diag(p**u) Z^d and L2 = F diag(p**v) Z^d.

    Returns (F, u, v); here u is always zero and v nondecreasing.
    """
    _check_compatible(l1, l2)
    ctx = l1.ctx
    a = mx.matmul(mx.inverse(l1.basis), l2.basis)
    u, dmat, _ = smith_decomposition(ctx, a)
    frame = mx.matmul(l1.basis, mx.inverse(u))
    v = tuple(ctx.valuation(dmat[i][i]) for i in range(l1.n))
    return frame, (0,) * l1.n, v


def lattice_from_frame(ctx: PAdicContext, frame, u: Sequence[int]) -> Lattice:
    """L_u = span of p**u_i times the frame columns."""
    p = Fraction(ctx.p)
    n = len(frame)
    b = tuple(tuple(frame[i][j] * p ** u[j] for j in range(n)) for i in range(n))
    return Lattice.from_basis(ctx, b)
