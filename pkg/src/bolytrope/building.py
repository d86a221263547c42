"""Vertices of the affine building as homothety classes of lattices.

Classes are normalized so the smallest diagonal exponent of the canonical
basis is 0.  Everything that returns a set of classes returns a ``ClassSet``,
sorted by canonical basis entries so that output is reproducible.
"""

from __future__ import annotations

import itertools
import os
from collections.abc import Sequence
from fractions import Fraction
from functools import lru_cache

from . import _matrix as mx
from .lattice import Lattice, compatible_bases, distance, lattice_from_frame, lattice_sum
from .valuation import PAdicContext

DEFAULT_CAP = 100_000


class CapExceeded(RuntimeError):
    """An enumeration grew past its class cap."""


class NotInApartment(ValueError):
    pass


def default_cap() -> int:
    env = os.environ.get("BOLYTROPE_CAP")
    return int(env) if env else DEFAULT_CAP


class LatticeClass:
    """The class [L] = {p**k L}, represented by its normalized member."""

    __slots__ = ("rep", "_key")

    def __init__(self, rep: Lattice):
        a = rep.a
        m = min(a)
        if rep.s != m:
            rep = Lattice(rep.ctx, rep.n, m, rep.h, a)
        self.rep = rep
        self._key = None

    @property
    def ctx(self) -> PAdicContext:
        return self.rep.ctx

    @property
    def d(self) -> int:
        return self.rep.n

    def key(self):
        if self._key is None:
            self._key = self.rep.basis
        return self._key

    def __eq__(self, other):
        if not isinstance(other, LatticeClass):
            return NotImplemented
        return self.rep == other.rep

    def __hash__(self):
        return hash(self.rep)

    def __lt__(self, other):
        return self.key() < other.key()

    def __repr__(self):
        return f"LatticeClass(exponents={self.rep.exponents}, {self.rep!r})"


def class_of(lat: Lattice) -> LatticeClass:
    return LatticeClass(lat)


class ClassSet(Sequence):
    """Finite set of lattice classes in canonical (lexicographic) order."""

    def __init__(self, classes=()):
        uniq = set(classes)
        self._items = tuple(sorted(uniq, key=LatticeClass.key))
        self._set = frozenset(uniq)

    def __getitem__(self, i):
        return self._items[i]

    def __len__(self):
        return len(self._items)

    def __contains__(self, c):
        return c in self._set

    def __iter__(self):
        return iter(self._items)

    def __eq__(self, other):
        if isinstance(other, ClassSet):
            return self._set == other._set
        return NotImplemented

    def __hash__(self):
        return hash(self._set)

    def __or__(self, other):
        return ClassSet(self._set | set(other))

    def issubset(self, other) -> bool:
        return self._set <= set(other)

    def __repr__(self):
        return f"ClassSet({len(self)} classes)"


class Apartment:
    """Classes [L_u] diagonal in one frame; the frame columns are e_1..e_d."""

    def __init__(self, ctx: PAdicContext, frame):
        self.ctx = ctx
        self.frame = mx.to_matrix(frame)
        if mx.det(self.frame) == 0:
            raise ValueError("frame must be invertible")
        self._inv = mx.inverse(self.frame)

    @classmethod
    def standard(cls, ctx: PAdicContext, d: int) -> "Apartment":
        return cls(ctx, mx.identity(d))

    @property
    def d(self) -> int:
        return len(self.frame)

    @property
    def inverse(self):
        return self._inv

    def lattice(self, u) -> Lattice:
        return lattice_from_frame(self.ctx, self.frame, u)

    def vertex(self, u) -> LatticeClass:
        return LatticeClass(self.lattice(u))

    def __eq__(self, other):
        return isinstance(other, Apartment) and self.ctx == other.ctx and self.frame == other.frame

    def __hash__(self):
        return hash(self.frame)


def exponent_vector(apt: Apartment, c: LatticeClass) -> tuple:
    """u with [L_u] = c in the apartment's frame, normalized to min entry 0."""
    ctx = apt.ctx
    y = mx.matmul(apt.inverse, c.rep.basis)
    u = []
    for row in y:
        vals = [ctx.valuation(x) for x in row if x != 0]
        if not vals:
            raise NotInApartment("class not in apartment")
        u.append(min(vals))
    # diag(p**-u) Y has nonnegative valuations; it is unimodular iff det matches.
    if ctx.valuation(mx.det(y)) != sum(u):
        raise NotInApartment("class not in apartment")
    m = min(u)
    return tuple(x - m for x in u)


def in_apartment(apt: Apartment, c: LatticeClass) -> bool:
    try:
        exponent_vector(apt, c)
    except NotInApartment:
        return False
    return True


# -- neighbors ------------------------------------------------------------


def rref_subspaces(p: int, d: int, k: int):
    """All k-dimensional subspaces of F_p^d as reduced row-echelon row lists."""
    out = []
    for pivots in itertools.combinations(range(d), k):
        free = [(r, c) for r in range(k) for c in range(pivots[r] + 1, d) if c not in pivots]
        for vals in itertools.product(range(p), repeat=len(free)):
            rows = [[0] * d for _ in range(k)]
            for r, c in enumerate(pivots):
                rows[r][c] = 1
            for (r, c), x in zip(free, vals):
                rows[r][c] = x
            out.append(tuple(tuple(r) for r in rows))
    return out


@lru_cache(maxsize=None)
def _neighbor_transforms(p: int, d: int):
    """Integer matrices T with T Z^d = W + p Z^d, one per proper nonzero W."""
    out = []
    for k in range(1, d):
        for rows in rref_subspaces(p, d, k):
            pivots = [next(j for j, x in enumerate(r) if x) for r in rows]
            cols = [list(r) for r in rows]
            for j in range(d):
                if j not in pivots:
                    e = [0] * d
                    e[j] = p
                    cols.append(e)
            out.append(cols)
    return tuple(out)


def _neighbor_lattices(lat: Lattice):
    p, d = lat.ctx.p, lat.n
    h = lat.h
    bound = 1 + sum(lat.a) - lat.s
    out = []
    for cols in _neighbor_transforms(p, d):
        gens = [[sum(h[i][m] * c[m] for m in range(d)) for i in range(d)] for c in cols]
        out.append(Lattice._from_int(lat.ctx, d, gens, lat.s, bound))
    return out


def _neighbors(c: LatticeClass):
    return [LatticeClass(x) for x in _neighbor_lattices(c.rep)]


def neighbors(c: LatticeClass) -> ClassSet:
    """The classes at distance exactly 1."""
    return ClassSet(_neighbors(c))


def _bfs_layers(sources, r: int, cap: int):
    seen = set(sources)
    frontier = sorted(seen, key=LatticeClass.key)
    if len(seen) > cap:
        raise CapExceeded(f"more than {cap} classes")
    for _ in range(r):
        nxt = []
        for c in frontier:
            for x in _neighbors(c):
                if x not in seen:
                    seen.add(x)
                    nxt.append(x)
                    if len(seen) > cap:
                        raise CapExceeded(f"more than {cap} classes")
        frontier = nxt
    return seen


def ball(c: LatticeClass, r: int, cap: int | None = None) -> ClassSet:
    """All classes within distance r of c."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    return ClassSet(_bfs_layers([c], r, cap or default_cap()))


def ball_around_set(s, r: int, cap: int | None = None) -> ClassSet:
    s = list(s)
    if not s:
        raise ValueError("empty center set")
    if r < 0:
        raise ValueError("radius must be nonnegative")
    return ClassSet(_bfs_layers(s, r, cap or default_cap()))


def geodesic(c1: LatticeClass, c2: LatticeClass) -> list:
    """Shortest 1-skeleton path [c1, ..., c2] via X_i = p**i L_1 + L_2."""
    if c1 == c2:
        return [c1]
    ctx = c1.ctx
    frame, _, v = compatible_bases(c1.rep, c2.rep)
    m = min(v)
    l1 = lattice_from_frame(ctx, frame, (0,) * c1.d)
    l2 = lattice_from_frame(ctx, frame, tuple(x - m for x in v))
    s = max(v) - m
    return [LatticeClass(lattice_sum(l1.scale(i), l2)) for i in range(s + 1)]


# -- invariant lattices ---------------------------------------------------


def stabilizes(order, lat: Lattice) -> bool:
    """Whether order * lat ⊆ lat, i.e. B^{-1} X B is integral for every basis X."""
    so, mats = order.int_basis()
    e = sum(lat.a) + so
    if e <= 0:
        return True
    q = lat.ctx.p ** e
    k = lat._kinv()
    h = lat.h
    d = lat.n
    for x in mats:
        # (K X) H mod q
        kx = [[sum(k[i][m] * x[m][j] for m in range(d)) % q for j in range(d)] for i in range(d)]
        for i in range(d):
            row = kx[i]
            for j in range(d):
                if sum(row[m] * h[m][j] for m in range(d)) % q:
                    return False
    return True


def _seed_class(order) -> LatticeClass:
    """Class of Λ·Z^d, which Λ stabilizes."""
    so, mats = order.int_basis()
    d = order.d
    gens = [[x[i][j] for i in range(d)] for x in mats for j in range(d)]
    lat = Lattice._from_int(order.ctx, d, gens, so, 0)
    return LatticeClass(lat)


def invariant_classes(order, cap: int | None = None) -> ClassSet:
    """Q(Λ): all classes [L] with ΛL = L.

    Breadth-first search from the class of Λ·Z^d through distance-1
    neighbors, expanding only invariant classes.  Q(Λ) is connected in the
    1-skeleton, so this reaches all of it.
    """
    cap = cap or default_cap()
    seed = _seed_class(order)
    found = {seed}
    seen = {seed}
    frontier = [seed]
    while frontier:
        nxt = []
        for c in frontier:
            for x in _neighbors(c):
                if x in seen:
                    continue
                seen.add(x)
                if stabilizes(order, x.rep):
                    found.add(x)
                    nxt.append(x)
                    if len(found) > cap:
                        raise CapExceeded(f"more than {cap} invariant classes")
        frontier = nxt
    return ClassSet(found)


# -- simplices and hulls --------------------------------------------------


def is_simplex(s) -> bool:
    """Whether representatives form a chain L_1 ⊃ ... ⊃ L_k ⊃ p L_1."""
    s = list(s)
    if not s:
        raise ValueError("empty set")
    first = s[0].rep
    reps = [first]
    for c in s[1:]:
        frame, _, v = compatible_bases(first, c.rep)
        m = min(v)
        if max(v) - m > 1:
            return False
        reps.append(lattice_from_frame(first.ctx, frame, tuple(x - m for x in v)))
    reps.sort(key=lambda x: x.det_valuation)
    for a, b in zip(reps, reps[1:]):
        if a.det_valuation == b.det_valuation or not a.contains(b):
            return False
    return True


def convex_hull(s, cap: int | None = None) -> ClassSet:
    """Q(PZ(S)), the smallest PZ-closed set containing S."""
    from .orders import pz_order

    return invariant_classes(pz_order(s), cap)


def diameter(s) -> int:
    s = list(s)
    return max((distance(a, b) for a, b in itertools.combinations(s, 2)), default=0)


def distance_to_set(c: LatticeClass, s) -> int:
    return min(distance(c, x) for x in s)
