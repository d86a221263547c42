"""Exponent matrices, polytropes, and the orders built from them.

An exponent matrix M has zero diagonal and satisfies M_ij + M_jk >= M_ik.  In a
frame (e_1, ..., e_d) it defines the graduated order Λ(M) of matrices whose
(i, j) entry lies in p**M_ij Z_(p), and the polytrope Q_M of exponent vectors u
with u_i - u_j <= M_ij.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from . import _matrix as mx
from .building import (
    Apartment,
    ClassSet,
    LatticeClass,
    convex_hull,
    exponent_vector,
    in_apartment,
    invariant_classes,
    neighbors,
)
from .lattice import Lattice, compatible_bases, distance, smith_valuations, sum_of
from .orders import (
    Order,
    algebra_radical,
    pz_order,
    radical_idealizer_chain,
    residue_algebra,
)
from .valuation import PAdicContext


class InvalidExponentMatrix(ValueError):
    pass


class FrameSearchExhausted(RuntimeError):
    """No graduated chain term was found in any frame that was tried."""


class InternalConsistencyError(RuntimeError):
    pass


@dataclass(frozen=True)
class ExponentMatrix:
    entries: tuple

    def __post_init__(self):
        e = tuple(tuple(int(x) for x in row) for row in self.entries)
        object.__setattr__(self, "entries", e)
        d = len(e)
        if any(len(row) != d for row in e):
            raise InvalidExponentMatrix("exponent matrix must be square")
        if any(e[i][i] != 0 for i in range(d)):
            raise InvalidExponentMatrix("diagonal must be zero")
        for i, j, k in itertools.product(range(d), repeat=3):
            if e[i][j] + e[j][k] < e[i][k]:
                raise InvalidExponentMatrix(f"triangle inequality fails at ({i},{j},{k})")

    @classmethod
    def zero(cls, d: int) -> "ExponentMatrix":
        return cls(tuple((0,) * d for _ in range(d)))

    @classmethod
    def J(cls, d: int) -> "ExponentMatrix":
        return cls(tuple(tuple(int(i != j) for j in range(d)) for i in range(d)))

    @property
    def d(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def plus_rJ(self, r: int) -> "ExponentMatrix":
        d = self.d
        return ExponentMatrix(tuple(tuple(self.entries[i][j] + (r if i != j else 0)
                                          for j in range(d)) for i in range(d)))

    def column(self, j: int) -> tuple:
        return tuple(self.entries[i][j] for i in range(self.d))

    def normalized(self) -> "ExponentMatrix":
        """Change of base point making the first column zero: M_ij - M_i1 + M_j1."""
        m, d = self.entries, self.d
        return ExponentMatrix(tuple(tuple(m[i][j] - m[i][0] + m[j][0] for j in range(d))
                                    for i in range(d)))

    def permuted(self, perm) -> "ExponentMatrix":
        return ExponentMatrix(tuple(tuple(self.entries[perm[i]][perm[j]] for j in range(self.d))
                                    for i in range(self.d)))

    def tolist(self):
        return [list(r) for r in self.entries]


def triangle_closure(m) -> ExponentMatrix:
    """Largest exponent matrix entrywise below m (min-plus shortest paths)."""
    a = [[int(x) for x in row] for row in m]
    d = len(a)
    if any(a[i][i] != 0 for i in range(d)):
        raise InvalidExponentMatrix("diagonal must be zero")
    for k in range(d):
        for i in range(d):
            for j in range(d):
                if a[i][k] + a[k][j] < a[i][j]:
                    a[i][j] = a[i][k] + a[k][j]
    if any(a[i][i] < 0 for i in range(d)):
        raise InvalidExponentMatrix("negative cycle")
    return ExponentMatrix(tuple(tuple(r) for r in a))


def _as_exponent_matrix(m) -> ExponentMatrix:
    return m if isinstance(m, ExponentMatrix) else ExponentMatrix(tuple(tuple(r) for r in m))


def _unit(d, i, j, scale=1):
    return tuple(tuple(Fraction(scale) if (a, b) == (i, j) else Fraction(0) for b in range(d))
                 for a in range(d))


def _order_in_frame(ctx, frame, mats, validate=False) -> Order:
    """Order spanned by F X F^{-1} for X in mats."""
    f = mx.to_matrix(frame)
    finv = mx.inverse(f)
    gens = [mx.vec(mx.matmul(mx.matmul(f, x), finv)) for x in mats]
    return Order(Lattice.from_generators(ctx, gens), validate)


def _frame_of(frame, d):
    if frame is None:
        return mx.identity(d)
    if isinstance(frame, Apartment):
        return frame.frame
    return mx.to_matrix(frame)


def graduated_order(ctx: PAdicContext, frame, m) -> Order:
    m = _as_exponent_matrix(m)
    d = m.d
    p = ctx.p
    mats = [_unit(d, i, j, Fraction(p) ** m[i, j]) for i in range(d) for j in range(d)]
    return _order_in_frame(ctx, _frame_of(frame, d), mats)


def polytrope_points(m) -> list:
    """Integral points of Q_M, normalized to minimum entry 0, sorted."""
    m = _as_exponent_matrix(m)
    d = m.d
    ranges = [range(-m[d - 1, i], m[i, d - 1] + 1) for i in range(d - 1)]
    out = set()
    for head in itertools.product(*ranges):
        u = head + (0,)
        if all(m[i, j] + u[j] >= u[i] for i in range(d) for j in range(d)):
            lo = min(u)
            out.add(tuple(x - lo for x in u))
    return sorted(out)


def projective_classes(m, ctx: PAdicContext | None = None, frame=None):
    """(classes of the columns of M, dim Q_M).

    With no context the classes are returned as normalized exponent vectors.
    """
    m = _as_exponent_matrix(m)
    cols = []
    for j in range(m.d):
        c = m.column(j)
        lo = min(c)
        cols.append(tuple(x - lo for x in c))
    distinct = sorted(set(cols))
    dim = len(distinct) - 1
    if ctx is None:
        return distinct, dim
    apt = frame if isinstance(frame, Apartment) else Apartment(ctx, _frame_of(frame, m.d))
    return ClassSet(apt.vertex(u) for u in distinct), dim


def ball_order(ctx: PAdicContext, lat: Lattice, r: int) -> Order:
    """{X in End(L) : X_11 = ... = X_dd mod p**r, X_ij in p**r for i != j} in a basis of L."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    return bolytrope_order(ctx, lat.basis, ExponentMatrix.zero(lat.n), r)


def bolytrope_order(ctx: PAdicContext, frame, m, r: int) -> Order:
    """Λ_r(M): Λ(M + rJ) with diagonal entries congruent mod p**r."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    m = _as_exponent_matrix(m)
    d = m.d
    p = Fraction(ctx.p)
    mats = [mx.identity(d)]
    mats += [_unit(d, i, i, p ** r) for i in range(1, d)]
    mats += [_unit(d, i, j, p ** (m[i, j] + r)) for i in range(d) for j in range(d) if i != j]
    return _order_in_frame(ctx, _frame_of(frame, d), mats)


# -- star configurations --------------------------------------------------


@dataclass(frozen=True)
class StarConfiguration:
    center: Lattice
    r: int
    lattices: tuple
    classes: ClassSet
    collapsed: bool


def _cyclic(ctx, center, v, r):
    # O v + p**r L as a lattice: generated by v and a basis of p**r L.
    cols = [v] + [tuple(Fraction(x) for x in col) for col in center.scale(r).columns()]
    return Lattice.from_generators(ctx, cols)


def star_configuration(ctx: PAdicContext, basis, r: int) -> StarConfiguration:
    """L_i = O e_i + p**r L and L_{d+1} = O (e_1 + ... + e_d) + p**r L."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    b = mx.to_matrix(basis)
    center = Lattice.from_basis(ctx, b)
    d = len(b)
    vecs = [mx.column(b, j) for j in range(d)]
    vecs.append(tuple(sum(v[i] for v in vecs) for i in range(d)))
    lats = tuple(_cyclic(ctx, center, v, r) for v in vecs)
    classes = ClassSet(LatticeClass(x) for x in lats)
    return StarConfiguration(center, r, lats, classes, len(classes) < d + 1)


def star_conditions(center: Lattice, lattices, r: int) -> dict:
    """The three defining conditions of a star configuration, as booleans."""
    ctx = center.ctx
    inner = center.scale(r)
    contain = all(x.contains(inner) and center.contains(x) for x in lattices)
    cyclic = True
    if contain:
        for x in lattices:
            e = smith_valuations(ctx, mx.matmul(mx.inverse(x.basis), inner.basis))
            if e != [0] * (center.n - 1) + [r]:
                cyclic = False
    else:
        cyclic = False
    spans = True
    for i in range(len(lattices)):
        rest = [x for j, x in enumerate(lattices) if j != i]
        if sum_of(rest) != center:
            spans = False
    return {"containment": contain, "cyclic": cyclic, "spanning": spans}


def bolystar_generators(ctx: PAdicContext, frame, m, r: int) -> ClassSet:
    """Projective classes of Λ(M + rJ) plus one extra class L_{d+1}.

    L is the lattice of the first column of M (a point of Q_M) in the frame,
    and L_{d+1} = O (e_1 + ... + e_d) + p**r L for its scaled frame basis.
    """
    m = _as_exponent_matrix(m)
    apt = frame if isinstance(frame, Apartment) else Apartment(ctx, _frame_of(frame, m.d))
    proj, _ = projective_classes(m.plus_rJ(r), ctx, apt)
    if r == 0:
        return proj
    lat = apt.lattice(m.column(0))
    d = m.d
    p = Fraction(ctx.p)
    u = m.column(0)
    cols = [tuple(apt.frame[i][j] * p ** u[j] for i in range(d)) for j in range(d)]
    v = tuple(sum(c[i] for c in cols) for i in range(d))
    extra = _cyclic(ctx, lat, v, r)
    return ClassSet(list(proj) + [LatticeClass(extra)])


# -- recognizing graduated orders -----------------------------------------


def is_graduated_in_frame(order: Order, frame) -> ExponentMatrix | None:
    """M if Λ = Λ(M) in this frame, else None."""
    ctx, d = order.ctx, order.d
    f = _frame_of(frame, d)
    finv = mx.inverse(f)
    m = [[None] * d for _ in range(d)]
    for x in order.basis_matrices():
        y = mx.matmul(mx.matmul(finv, x), f)
        for i in range(d):
            for j in range(d):
                if y[i][j] != 0:
                    v = ctx.valuation(y[i][j])
                    if m[i][j] is None or v < m[i][j]:
                        m[i][j] = v
    if any(m[i][j] is None for i in range(d) for j in range(d)):
        return None
    try:
        em = ExponentMatrix(tuple(tuple(r) for r in m))
    except InvalidExponentMatrix:
        return None
    if graduated_order(ctx, f, em) != order:
        return None
    return em


def _pair_frames(classes, budget):
    out = []
    for a, b in itertools.combinations(classes, 2):
        if len(out) >= budget:
            break
        out.append(compatible_bases(a.rep, b.rep)[0])
    return out


def central_polytrope(order: Order, frames=(), pair_budget: int = 500, cap=None):
    """(index, M) for the first graduated term of the radical idealizer chain.

    Frames tried: those supplied, the standard frame, then frames from
    compatible bases of pairs of invariant classes of each term (at most
    ``pair_budget`` pairs).  Failure is not a proof that none exists.
    """
    d = order.d
    supplied = [_frame_of(f, d) for f in frames] + [mx.identity(d)]
    for idx, term in enumerate(radical_idealizer_chain(order)):
        # d orthogonal idempotents stay independent modulo the radical.
        alg = residue_algebra(term)
        if alg.n - len(algebra_radical(alg)) < d:
            continue
        for f in supplied:
            m = is_graduated_in_frame(term, f)
            if m is not None:
                return idx, m.normalized()
        q = invariant_classes(term, cap)
        for f in _pair_frames(q, pair_budget):
            m = is_graduated_in_frame(term, f)
            if m is not None:
                return idx, m.normalized()
    raise FrameSearchExhausted("frame search exhausted")


def apartment_slice(order: Order, apt: Apartment, cap=None) -> ExponentMatrix | None:
    """M with Q(Λ) ∩ A = Q(Λ(M)) in A's frame, or None if the slice is empty."""
    pts = []
    for c in invariant_classes(order, cap):
        if in_apartment(apt, c):
            pts.append(exponent_vector(apt, c))
    if not pts:
        return None
    d = order.d
    m = ExponentMatrix(tuple(tuple(max(u[i] - u[j] for u in pts) for j in range(d))
                             for i in range(d)))
    if set(polytrope_points(m)) != set(pts):
        raise InternalConsistencyError("apartment slice is not a polytrope")
    return m


# -- the tree case --------------------------------------------------------


def _bfs_distances(adj, sources):
    dist = {c: 0 for c in sources}
    queue = deque(sources)
    while queue:
        c = queue.popleft()
        for x in adj[c]:
            if x not in dist:
                dist[x] = dist[c] + 1
                queue.append(x)
    return dist


def d2_canonical_form(order: Order, cap=None):
    """(r, m, apartment) with Λ = Λ_r([[0, m], [0, 0]]) in the apartment's frame.

    Q(Λ) is a finite subtree, so distances inside it are path lengths in the
    neighbor graph restricted to Q(Λ).
    """
    if order.d != 2:
        raise ValueError("canonical form needs d = 2")
    q = invariant_classes(order, cap)
    if pz_order(q) != order:
        raise ValueError("order is not closed")
    ctx = order.ctx
    qset = set(q)
    adj = {c: [x for x in neighbors(c) if x in qset] for c in q}
    best, pair = 0, None
    for i, a in enumerate(q):
        dist = _bfs_distances(adj, [a])
        for b in q[i + 1:]:
            if dist[b] > best:
                best, pair = dist[b], (a, b)
    if pair is None:
        return 0, 0, Apartment(ctx, q[0].rep.basis)
    l1, l2 = pair
    hull = convex_hull([l1, l2], cap)
    r = max(_bfs_distances(adj, list(hull)).values())
    m = best - 2 * r
    f, _, v = compatible_bases(l1.rep, l2.rep)
    # L1 = F Z^2 and L2 ~ (0, R) in F; swap and shift so L1 = L_(0,r), L2 = L_(m+r,0).
    p = Fraction(ctx.p)
    frame = tuple((f[i][1], f[i][0] * p ** (-r)) for i in range(2))
    apt = Apartment(ctx, frame)
    em = ExponentMatrix(((0, m), (0, 0)))
    if bolytrope_order(ctx, frame, em, r) != order:
        raise InternalConsistencyError("reconstructed order differs from input")
    return r, m, apt
