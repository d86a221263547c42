"""Orders in the matrix algebra Q^{d x d} over Z_(p).

An order is stored through its carrier, a rank d**2 lattice of flattened
matrices (column-major, entry (i, j) at index i + d*j).  Equality of orders is
equality of carriers.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import _matrix as mx
from .building import ClassSet, LatticeClass, invariant_classes
from .lattice import Lattice, dual, endomorphism_dual, sum_of, transporter
from .valuation import PAdicContext


class NotAnOrder(ValueError):
    pass


class NotClosed(ValueError):
    pass


class Order:
    __slots__ = ("ctx", "d", "carrier", "_ib")

    def __init__(self, carrier: Lattice, validate: bool = True):
        d = math.isqrt(carrier.n)
        if d * d != carrier.n:
            raise ValueError("carrier dimension must be a square")
        self.ctx = carrier.ctx
        self.d = d
        self.carrier = carrier
        self._ib = None
        if validate and not is_order(carrier):
            raise NotAnOrder("lattice is not closed under multiplication or lacks the identity")

    @classmethod
    def from_matrices(cls, ctx: PAdicContext, mats, validate: bool = True) -> "Order":
        """Order spanned by the given matrices (which must span a full-rank lattice)."""
        return cls(Lattice.from_generators(ctx, [mx.vec(mx.to_matrix(m)) for m in mats]), validate)

    def int_basis(self):
        """(s, [X_k]) with integer matrices X_k such that p**(-s) X_k is a basis."""
        if self._ib is None:
            c, d = self.carrier, self.d
            mats = []
            for k in range(c.n):
                mats.append(tuple(tuple(c.h[i + d * j][k] for j in range(d)) for i in range(d)))
            self._ib = (c.s, mats)
        return self._ib

    def basis_matrices(self):
        return [mx.unvec(col, self.d) for col in self.carrier.columns()]

    def member(self, x) -> bool:
        return self.carrier.member(mx.vec(mx.to_matrix(x)))

    def contains(self, other: "Order") -> bool:
        return self.carrier.contains(other.carrier)

    def __le__(self, other: "Order") -> bool:
        return other.contains(self)

    def __eq__(self, other):
        if not isinstance(other, Order):
            return NotImplemented
        return self.carrier == other.carrier

    def __hash__(self):
        return hash(self.carrier)

    def __repr__(self):
        return f"Order(p={self.ctx.p}, d={self.d}, det_valuation={self.carrier.det_valuation})"


def _identity_vec(d):
    return [int(i == j) for j in range(d) for i in range(d)]


def _matmul_int(a, b):
    n = len(a)
    return [[sum(a[i][m] * b[m][j] for m in range(n)) for j in range(n)] for i in range(n)]


def _vec_int(x):
    d = len(x)
    return [x[i][j] for j in range(d) for i in range(d)]


def is_order(lat: Lattice) -> bool:
    d = math.isqrt(lat.n)
    if d * d != lat.n:
        return False
    if not lat._contains_int([_identity_vec(d)], 0):
        return False
    s = lat.s
    mats = [[[lat.h[i + d * j][k] for j in range(d)] for i in range(d)] for k in range(lat.n)]
    prods = [_vec_int(_matmul_int(x, y)) for x in mats for y in mats]
    return lat._contains_int(prods, 2 * s)


def _coords(lat: Lattice, v, t: int):
    """Exact integer coordinates of p**(-t) v in the canonical basis; None if not integral."""
    p = lat.ctx.p
    e = sum(lat.a) + t - lat.s
    k = lat._kinv()
    out = []
    for row in k:
        x = sum(a * b for a, b in zip(row, v))
        if e >= 0:
            q, r = divmod(x, p ** e)
            if r:
                return None
            out.append(q)
        else:
            out.append(x * p ** (-e))
    return out


def endomorphism_order(lat: Lattice) -> Order:
    return Order(transporter(lat.ctx, lat, lat), validate=False)


@lru_cache(maxsize=4096)
def _end_dual(lat: Lattice) -> Lattice:
    return endomorphism_dual(lat)


def _reps(s):
    out = []
    for c in s:
        out.append(c.rep if isinstance(c, LatticeClass) else c)
    return out


def pz_order(s) -> Order:
    """Intersection of End(L) over the classes in s."""
    reps = _reps(s)
    if not reps:
        raise ValueError("empty class set")
    return Order(dual(sum_of([_end_dual(x) for x in reps])), validate=False)


# -- residue algebra and radical -----------------------------------------


class ResidueAlgebra:
    """Finite-dimensional algebra over F_p given by structure constants.

    ``consts[i, j, k]`` is the coefficient of e_k in e_i e_j.
    """

    def __init__(self, p: int, consts, identity):
        self.p = p
        self.consts = np.asarray(consts, dtype=np.int64) % p
        self.n = self.consts.shape[0]
        self.identity = tuple(int(x) % p for x in identity)

    def mul(self, x, y):
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        return np.einsum("i,j,ijk->k", x, y, self.consts) % self.p

    def left_matrix(self, z):
        """Matrix of y -> z y; column j is z e_j."""
        z = np.asarray(z, dtype=np.int64)
        return np.einsum("i,ijk->kj", z, self.consts)

    def is_associative(self) -> bool:
        c = self.consts
        lhs = np.einsum("ijm,mkl->ijkl", c, c) % self.p
        rhs = np.einsum("jkm,iml->ijkl", c, c) % self.p
        return bool((lhs == rhs).all())

    def has_identity(self) -> bool:
        e = np.asarray(self.identity, dtype=np.int64)
        eye = np.eye(self.n, dtype=np.int64)
        left = np.einsum("i,ijk->jk", e, self.consts) % self.p
        right = np.einsum("j,ijk->ik", e, self.consts) % self.p
        return bool((left == eye).all() and (right == eye).all())


def residue_algebra(order: Order) -> ResidueAlgebra:
    """Λ/pΛ with respect to the canonical basis of the carrier."""
    lat = order.carrier
    p, n = lat.ctx.p, lat.n
    s, mats = order.int_basis()
    consts = np.zeros((n, n, n), dtype=np.int64)
    for i, x in enumerate(mats):
        for j, y in enumerate(mats):
            c = _coords(lat, _vec_int(_matmul_int(x, y)), 2 * s)
            if c is None:
                raise NotAnOrder("carrier is not multiplicatively closed")
            consts[i, j] = [v % p for v in c]
    ident = _coords(lat, _identity_vec(order.d), 0)
    if ident is None:
        raise NotAnOrder("carrier lacks the identity")
    return ResidueAlgebra(p, consts, [v % p for v in ident])


def rref_mod_p(rows, p: int):
    """Reduced row echelon basis of the row span mod p (list of tuples)."""
    m = [[int(x) % p for x in r] for r in rows]
    if not m:
        return []
    ncols = len(m[0])
    out = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [x * inv % p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    out = [tuple(row) for row in m[:r]]
    return out


def nullspace_mod_p(mat, p: int):
    """Basis of {c : c @ mat = 0} mod p, for mat with shape (k, m)."""
    mat = [[int(x) % p for x in r] for r in mat]
    k = len(mat)
    if k == 0:
        return []
    m = len(mat[0])
    # Solve mat^T c = 0.
    t = [[mat[i][j] for i in range(k)] for j in range(m)]
    red = rref_mod_p(t, p)
    pivots = [next(j for j, x in enumerate(r) if x) for r in red]
    free = [j for j in range(k) if j not in pivots]
    basis = []
    for f in free:
        c = [0] * k
        c[f] = 1
        for r, pc in zip(red, pivots):
            c[pc] = (-r[f]) % p
        basis.append(tuple(c))
    return basis


def _matpow_mod(a, e: int, q: int):
    result = np.eye(a.shape[0], dtype=np.int64)
    base = a % q
    while e:
        if e & 1:
            result = (result @ base) % q
        base = (base @ base) % q
        e >>= 1
    return result


def algebra_radical(alg: ResidueAlgebra):
    """Basis (rref) of the radical of a finite-dimensional F_p-algebra.

    Uses the characteristic-p trace iteration: starting from the whole
    algebra, keep the x with g_i(x y) = 0 for all basis y, where
    g_i(z) = Tr(lift(L_z)**(p**i)) / p**i mod p, for i = 0 .. floor(log_p n).
    Each g_i is linear on the previous space, so each step is a kernel.
    """
    p, n = alg.p, alg.n
    l = 0
    while p ** (l + 1) <= n:
        l += 1
    basis = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    for i in range(l + 1):
        if not basis:
            break
        q = p ** (i + 1)
        pi = p ** i
        g = []
        for b in basis:
            row = []
            for j in range(n):
                ej = np.zeros(n, dtype=np.int64)
                ej[j] = 1
                z = alg.mul(b, ej)
                tr = int(np.trace(_matpow_mod(alg.left_matrix(z), pi, q))) % q
                if tr % pi:
                    raise ArithmeticError("trace form not divisible as expected")
                row.append((tr // pi) % p)
            g.append(row)
        ker = nullspace_mod_p(g, p)
        new = []
        for c in ker:
            v = [0] * n
            for coef, b in zip(c, basis):
                if coef:
                    v = [(x + coef * y) % p for x, y in zip(v, b)]
            new.append(v)
        basis = rref_mod_p(new, p)
    return rref_mod_p(basis, p)


def _span_closure_ideal(alg: ResidueAlgebra, gens):
    """Two-sided ideal generated by gens, as an rref basis."""
    p, n = alg.p, alg.n
    cur = rref_mod_p(gens, p)
    units = [np.eye(n, dtype=np.int64)[j] for j in range(n)]
    while True:
        new = list(cur)
        for v in cur:
            for e in units:
                new.append(tuple(alg.mul(e, v)))
                new.append(tuple(alg.mul(v, e)))
        nxt = rref_mod_p(new, p)
        if len(nxt) == len(cur):
            return cur
        cur = nxt


def _is_nilpotent_subspace(alg: ResidueAlgebra, basis) -> bool:
    p = alg.p
    power = list(basis)
    for _ in range(alg.n + 1):
        if not power:
            return True
        prods = [tuple(alg.mul(x, y)) for x in power for y in basis]
        nxt = rref_mod_p(prods, p)
        if len(nxt) >= len(power):
            return False
        power = nxt
    return not power


def is_nilpotent_ideal(alg: ResidueAlgebra, basis) -> bool:
    basis = rref_mod_p(basis, alg.p)
    if len(_span_closure_ideal(alg, basis)) != len(basis):
        return False
    return _is_nilpotent_subspace(alg, basis)


def verify_radical_exhaustive(alg: ResidueAlgebra, rad, limit: int = 65536) -> bool | None:
    """Check that rad is the largest nilpotent two-sided ideal by brute force.

    Returns None when the quotient has more than ``limit`` elements.
    """
    p, n = alg.p, alg.n
    rad = rref_mod_p(rad, p)
    if p ** (n - len(rad)) > limit:
        return None
    if not is_nilpotent_ideal(alg, rad):
        return False
    pivots = {next(j for j, x in enumerate(r) if x) for r in rad}
    comp = [j for j in range(n) if j not in pivots]
    # One representative per line of the quotient: first nonzero coefficient 1.
    for coefs in itertools.product(range(p), repeat=len(comp)):
        nz = next((c for c in coefs if c), 0)
        if nz != 1:
            continue
        x = [0] * n
        for j, c in zip(comp, coefs):
            x[j] = c
        ideal = _span_closure_ideal(alg, list(rad) + [tuple(x)])
        if _is_nilpotent_subspace(alg, ideal):
            return False
    return True


def jacobson_radical(order: Order) -> Lattice:
    """Preimage in Λ of the radical of Λ/pΛ."""
    alg = residue_algebra(order)
    rad = algebra_radical(alg)
    lat = order.carrier
    p, n = lat.ctx.p, lat.n
    cols = [[sum(r[k] * lat.h[i][k] for k in range(n)) for i in range(n)] for r in rad]
    cols += [[p * lat.h[i][k] for i in range(n)] for k in range(n)]
    bound = 1 + sum(lat.a) - lat.s
    return Lattice._from_int(lat.ctx, n, cols, lat.s, bound)


def idealizer(ideal: Lattice) -> Order:
    """{X : X I ⊆ I and I X ⊆ I} for a full-rank lattice I of matrices.

    It is the dual of the span of the coordinate functionals
    X -> coords(X Y_k) and X -> coords(Y_k X) over a basis Y_k of I.
    """
    d = math.isqrt(ideal.n)
    if d * d != ideal.n:
        raise ValueError("lattice dimension must be a square")
    k = ideal._kinv()
    A = sum(ideal.a)
    ys = [[[ideal.h[i + d * j][m] for j in range(d)] for i in range(d)] for m in range(ideal.n)]
    funcs = []
    for y in ys:
        for row in k:
            left = [0] * ideal.n
            right = [0] * ideal.n
            for a in range(d):
                for c in range(d):
                    # coefficient of X[a][c] in coords(X Y) and of X[a][c] in coords(Y X)
                    left[a + d * c] = sum(row[a + d * b] * y[c][b] for b in range(d))
                    right[a + d * c] = sum(row[e + d * c] * y[e][a] for e in range(d))
            funcs.append(left)
            funcs.append(right)
    span = Lattice._from_int(ideal.ctx, ideal.n, funcs, A, A)
    return Order(dual(span), validate=False)


def radical_idealizer_chain(order: Order, max_steps: int = 1000) -> list:
    """Ω_0 = Λ, Ω_{i+1} = Id(Jac(Ω_i)) up to and including the fixed point."""
    chain = [order]
    for _ in range(max_steps):
        nxt = idealizer(jacobson_radical(chain[-1]))
        if nxt == chain[-1]:
            return chain
        chain.append(nxt)
    raise RuntimeError("radical idealizer chain did not stabilize")


def chain_class_sets(chain, cap: int | None = None) -> list:
    return [invariant_classes(o, cap) for o in chain]


def closure(order: Order, cap: int | None = None) -> Order:
    return pz_order(invariant_classes(order, cap))


def is_closed(order: Order, cap: int | None = None) -> bool:
    return closure(order, cap) == order


# -- degree ---------------------------------------------------------------


class DegreeExceeds:
    """Search result when no generating set of size <= k_max + 1 exists."""

    def __init__(self, k_max: int):
        self.k_max = k_max

    def __eq__(self, other):
        return isinstance(other, DegreeExceeds) and other.k_max == self.k_max

    def __hash__(self):
        return hash(("exceeds", self.k_max))

    def __str__(self):
        return f"exceeds {self.k_max}"

    __repr__ = __str__


class _Span:
    """Incremental row echelon form over F_p; vectors as lists, or ints when p = 2."""

    __slots__ = ("p", "rows")

    def __init__(self, p, rows=None):
        self.p = p
        self.rows = dict(rows or {})

    def copy(self):
        return _Span(self.p, self.rows)

    def add(self, v) -> bool:
        p = self.p
        if p == 2:
            while v:
                top = v.bit_length() - 1
                r = self.rows.get(top)
                if r is None:
                    self.rows[top] = v
                    return True
                v ^= r
            return False
        v = list(v)
        for c in range(len(v)):
            if v[c]:
                r = self.rows.get(c)
                if r is None:
                    inv = pow(v[c], -1, p)
                    self.rows[c] = [x * inv % p for x in v]
                    return True
                f = v[c]
                v = [(x - f * y) % p for x, y in zip(v, r)]
        return False

    def __len__(self):
        return len(self.rows)


def _image_mod_p(target: Lattice, sub: Lattice):
    """Basis of (sub + p target) / p target inside target / p target ≅ F_p^n."""
    p, n = target.ctx.p, target.n
    vecs = []
    for j in range(n):
        c = _coords(target, [sub.h[i][j] for i in range(n)], sub.s)
        if c is None:
            raise ValueError("sublattice not contained in target")
        vecs.append([x % p for x in c])
    return rref_mod_p(vecs, p)


def degree_search(order: Order, k_max: int = 4, cap: int | None = None):
    """(degree or DegreeExceeds, witness classes or None).

    Subsets of Q(Λ) are tried by increasing size in canonical order.  Since
    PZ(S) ⊇ Λ always, PZ(S) = Λ iff the End(L)^# span Λ^#, and by Nakayama
    that can be tested in Λ^# / p Λ^# over F_p.
    """
    q = invariant_classes(order, cap)
    if pz_order(q) != order:
        raise NotClosed("order is not closed")
    target = dual(order.carrier)
    p, n = target.ctx.p, target.n
    images = []
    for c in q:
        rows = _image_mod_p(target, _end_dual(c.rep))
        if p == 2:
            rows = [int("".join(str(x) for x in r), 2) for r in rows]
        images.append(rows)
    maxdim = max(len(r) for r in images)

    def extend(span, idx):
        s = span.copy()
        grew = False
        for v in images[idx]:
            grew |= s.add(v)
        return s, grew

    for size in range(1, k_max + 2):
        if size * maxdim < n:
            continue
        found = _search(images, len(q), size, n, maxdim, extend, _Span(p))
        if found is not None:
            return size - 1, ClassSet([q[i] for i in found])
    return DegreeExceeds(k_max), None


def _search(images, total, size, n, maxdim, extend, empty):
    # Depth-first in lexicographic order of index tuples.
    def rec(span, start, chosen):
        left = size - len(chosen)
        if left == 0:
            return chosen if len(span) == n else None
        if len(span) + left * maxdim < n:
            return None
        for i in range(start, total - left + 1):
            s, grew = extend(span, i)
            if not grew:
                # A witness with a redundant member implies a smaller one.
                continue
            res = rec(s, i + 1, chosen + (i,))
            if res is not None:
                return res
        return None

    return rec(empty, 0, ())


def degree_exact_small(order: Order, k_max: int = 4, cap: int | None = None):
    return degree_search(order, k_max, cap)[0]
