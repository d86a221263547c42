"""Fixture-driven verification suites.

Each suite returns a list of ``Check`` results; randomness comes from a seeded
``random.Random`` so reports are reproducible.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import _matrix as mx
from .building import (
    Apartment,
    ball,
    ball_around_set,
    class_of,
    exponent_vector,
    geodesic,
    in_apartment,
    invariant_classes,
    is_simplex,
)
from .lattice import Lattice, distance
from .orders import (
    Order,
    chain_class_sets,
    closure,
    degree_exact_small,
    is_closed,
    pz_order,
    radical_idealizer_chain,
)
from .polytrope import (
    ExponentMatrix,
    ball_order,
    bolystar_generators,
    bolytrope_order,
    central_polytrope,
    d2_canonical_form,
    graduated_order,
    polytrope_points,
    star_conditions,
    star_configuration,
    triangle_closure,
)
from .valuation import PAdicContext


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class SuiteReport:
    suite: str
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def summary(self) -> str:
        bad = self.failures()
        status = "PASS" if self.passed else "FAIL"
        text = f"{status} {self.suite}: {len(self.checks) - len(bad)}/{len(self.checks)} checks"
        if bad:
            text += "; first failure: " + bad[0].name + (f" ({bad[0].detail})" if bad[0].detail else "")
        return text


# -- samplers -------------------------------------------------------------


def random_exponent_matrix(rng: random.Random, d: int, hi: int) -> ExponentMatrix:
    m = [[0 if i == j else rng.randint(0, hi) for j in range(d)] for i in range(d)]
    return triangle_closure(m)


def random_lattice(rng: random.Random, ctx: PAdicContext, d: int, emax: int) -> Lattice:
    """Random lattice in Hermite form with diagonal exponents in [0, emax]."""
    p = ctx.p
    a = [rng.randint(0, emax) for _ in range(d)]
    b = [[0] * d for _ in range(d)]
    for i in range(d):
        b[i][i] = p ** a[i]
        for j in range(i):
            b[i][j] = rng.randrange(p ** a[i])
    return Lattice.from_basis(ctx, b)


def random_class(rng, ctx, d, emax):
    return class_of(random_lattice(rng, ctx, d, emax))


def random_invertible(rng: random.Random, d: int, hi: int = 3):
    while True:
        m = [[rng.randint(-hi, hi) for _ in range(d)] for _ in range(d)]
        if mx.det(mx.to_matrix(m)) != 0:
            return m


def standard_class(ctx, d):
    return class_of(Lattice.standard(ctx, d))


# -- suites ---------------------------------------------------------------


def suite_ball_theorem(rng):
    out = []
    for p, d, r in itertools.product((2, 3), (2, 3), (1, 2)):
        ctx = PAdicContext(p)
        c = standard_class(ctx, d)
        b = ball(c, r)
        explicit = ball_order(ctx, c.rep, r)
        tag = f"p={p} d={d} r={r}"
        out.append(Check(f"pz(ball) = congruence order, {tag}", pz_order(b) == explicit))
        out.append(Check(f"Q(ball order) = ball, {tag}", invariant_classes(explicit) == b,
                         f"{len(b)} classes"))
    return out


def suite_apartment_slice(rng, n=50):
    out = []
    for k in range(n):
        p = rng.choice((2, 3))
        d = rng.choice((2, 3))
        r = rng.randint(0, 2)
        m = random_exponent_matrix(rng, d, 3 if d == 2 else 2)
        ctx = PAdicContext(p)
        apt = Apartment.standard(ctx, d)
        center = invariant_classes(graduated_order(ctx, None, m))
        bs = ball_around_set(center, r)
        diag = sorted(exponent_vector(apt, c) for c in bs if in_apartment(apt, c))
        want = polytrope_points(m.plus_rJ(r))
        out.append(Check(f"slice #{k} p={p} M={m.tolist()} r={r}", diag == want))
    return out


def suite_bolytrope_theorem(rng, per_case=20):
    out = []
    for p, d in itertools.product((2, 3), (2, 3)):
        ctx = PAdicContext(p)
        apt = Apartment.standard(ctx, d)
        hi = 4 if d == 2 else 2
        for k in range(per_case):
            r = k % 3
            m = random_exponent_matrix(rng, d, hi)
            order = bolytrope_order(ctx, None, m, r)
            region = ball_around_set([apt.vertex(u) for u in polytrope_points(m)], r)
            tag = f"p={p} d={d} M={m.tolist()} r={r}"
            out.append(Check(f"Λ_r(M) = pz(B_r(M)), {tag}", pz_order(region) == order))
            out.append(Check(f"Q(Λ_r(M)) = B_r(M), {tag}", invariant_classes(order) == region))
    return out


def suite_radical_chain(rng):
    out = []
    for p, d, r in itertools.product((2, 3), (2, 3), (1, 2)):
        ctx = PAdicContext(p)
        lat = Lattice.standard(ctx, d)
        chain = radical_idealizer_chain(ball_order(ctx, lat, r))
        want = [ball_order(ctx, lat, k) for k in range(r, -1, -1)]
        out.append(Check(f"ball chain p={p} d={d} r={r}", chain == want, f"length {len(chain)}"))
    samples = [(2, [[0, 3], [1, 0]], 2), (3, [[0, 2], [0, 0]], 1),
               (2, [[0, 1, 2], [2, 0, 1], [1, 1, 0]], 1), (3, [[0, 0, 1], [1, 0, 1], [1, 0, 0]], 2),
               (2, [[0, 2, 2], [1, 0, 1], [0, 1, 0]], 2)]
    for p, mm, r in samples:
        ctx = PAdicContext(p)
        m = ExponentMatrix(mm)
        chain = radical_idealizer_chain(bolytrope_order(ctx, None, m, r))
        want = [bolytrope_order(ctx, None, m, k) for k in range(r, -1, -1)]
        out.append(Check(f"bolytrope chain p={p} M={mm} r={r}", chain[:r + 1] == want))
        idx, found = central_polytrope(chain[0])
        out.append(Check(f"central polytrope p={p} M={mm} r={r}",
                         (idx, found) == (r, m.normalized()), f"got {idx}, {found.tolist()}"))
    return out


FIG1_M = [[0, 7, 9], [12, 0, 8], [5, 6, 0]]


def suite_fig1_chain(rng):
    ctx = PAdicContext(2)
    apt = Apartment.standard(ctx, 3)
    m = ExponentMatrix(FIG1_M)
    chain = radical_idealizer_chain(graduated_order(ctx, None, m))
    sets = chain_class_sets(chain)
    sizes = [len(s) for s in sets]
    out = [
        Check("Q(Λ(M)) matches the polytrope",
              sorted(exponent_vector(apt, c) for c in sets[0]) == polytrope_points(m)),
        Check("strictly descending", all(b.issubset(a) and len(b) < len(a)
                                         for a, b in zip(sets, sets[1:])), f"sizes {sizes}"),
        Check("all in standard apartment", all(in_apartment(apt, c) for s in sets for c in s)),
        Check("terminal set is a simplex", is_simplex(sets[-1])),
    ]
    return out


def suite_star_config(rng, n=50):
    out = []
    for k in range(n):
        p = rng.choice((2, 3))
        d = rng.choice((2, 3))
        r = rng.randint(0, 2)
        ctx = PAdicContext(p)
        basis = random_invertible(rng, d)
        star = star_configuration(ctx, basis, r)
        conds = star_conditions(star.center, star.lattices, r)
        tag = f"#{k} p={p} d={d} r={r}"
        out.append(Check(f"star predicates {tag}", all(conds.values()), str(conds)))
        out.append(Check(f"pz(star) = ball order {tag}",
                         pz_order(star.classes) == ball_order(ctx, star.center, r)))
    return out


def d4_lattices(r: int):
    q = 2 ** r
    return [
        [[1, 0, 0, 0], [0, 1, 0, 0], [1, 0, q, 0], [0, 0, 0, q]],
        [[q, 0, 0, 0], [0, q, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
        [[1, 0, 0, 0], [0, 1, 0, 0], [1, 1, q, 0], [1, 0, 0, q]],
        [[q, 0, 0, 0], [0, 1, 0, 0], [0, 0, q, 0], [0, 1, 0, q]],
    ]


def suite_d4_degree(rng):
    ctx = PAdicContext(2)
    z4 = Lattice.standard(ctx, 4)
    out = []
    for r in (1, 2):
        s = [class_of(Lattice.from_basis(ctx, b)) for b in d4_lattices(r)]
        out.append(Check(f"pz(four lattices) = ball order, r={r}",
                         pz_order(s) == ball_order(ctx, z4, r)))
    deg = degree_exact_small(ball_order(ctx, z4, 1))
    out.append(Check("degree of B_1([Z^4]) is 3", deg == 3, f"got {deg}"))
    return out


def fig2_classes():
    ctx = PAdicContext(2)
    apt = Apartment.standard(ctx, 2)
    l3 = class_of(Lattice.from_basis(ctx, [[8, 16], [1, 0]]))
    return [apt.vertex((0, 1)), apt.vertex((8, 0)), l3]


def suite_d2_classification(rng, n=100):
    out = []
    for k in range(n):
        p = rng.choice((2, 3))
        ctx = PAdicContext(p)
        s = [random_class(rng, ctx, 2, 6) for _ in range(rng.randint(2, 5))]
        order = pz_order(s)
        r, m, apt = d2_canonical_form(order)
        back = bolytrope_order(ctx, apt, [[0, m], [0, 0]], r)
        out.append(Check(f"round trip #{k} p={p} (r={r}, m={m})", back == order))
    r, m, _ = d2_canonical_form(pz_order(fig2_classes()))
    out.append(Check("three-class segment fixture gives (r, m) = (1, 7)", (r, m) == (1, 7), f"got {(r, m)}"))
    return out


def nonclosed_order():
    ctx = PAdicContext(2)
    return Order.from_matrices(ctx, [[[1, 0], [0, 1]], [[0, 0], [0, 2]],
                                     [[0, 1], [0, 0]], [[0, 0], [2, 0]]])


def suite_nonclosed(rng):
    order = nonclosed_order()
    target = graduated_order(order.ctx, None, [[0, 0], [1, 0]])
    return [
        Check("is_closed is false", not is_closed(order)),
        Check("closure is Λ([[0,0],[1,0]])", closure(order) == target),
    ]


def suite_metric(rng, triples=500, pairs=200):
    out = []
    bad = []
    for k in range(triples):
        p = rng.choice((2, 3))
        d = rng.choice((2, 3))
        ctx = PAdicContext(p)
        x, y, z = (random_class(rng, ctx, d, 3) for _ in range(3))
        dxy, dyz, dxz = distance(x, y), distance(y, z), distance(x, z)
        ok = (dxy >= 0 and (dxy == 0) == (x == y) and dxy == distance(y, x)
              and dxz <= dxy + dyz and distance(x, x) == 0)
        if not ok:
            bad.append(k)
    out.append(Check(f"metric axioms on {triples} triples", not bad, f"failing {bad[:5]}"))
    bad = []
    for k in range(pairs):
        p = rng.choice((2, 3))
        d = rng.choice((2, 3))
        ctx = PAdicContext(p)
        x, y = random_class(rng, ctx, d, 4), random_class(rng, ctx, d, 4)
        path = geodesic(x, y)
        ok = (len(path) - 1 == distance(x, y) and path[0] == x and path[-1] == y
              and all(distance(a, b) == 1 for a, b in zip(path, path[1:])))
        if not ok:
            bad.append(k)
    out.append(Check(f"geodesic length on {pairs} pairs", not bad, f"failing {bad[:5]}"))
    return out


def suite_bolystar(rng, n=20):
    out = []
    for k in range(n):
        p = rng.choice((2, 3))
        d = rng.choice((2, 3))
        r = rng.randint(0, 2)
        ctx = PAdicContext(p)
        m = random_exponent_matrix(rng, d, 3)
        gens = bolystar_generators(ctx, None, m, r)
        ok = pz_order(gens) == bolytrope_order(ctx, None, m, r) and len(gens) <= d + 1
        out.append(Check(f"bolystar #{k} p={p} M={m.tolist()} r={r}", ok, f"{len(gens)} classes"))
    return out


SUITES = {
    "ball-theorem": suite_ball_theorem,
    "apartment-slice": suite_apartment_slice,
    "bolytrope-theorem": suite_bolytrope_theorem,
    "radical-chain": suite_radical_chain,
    "fig1-chain": suite_fig1_chain,
    "star-config": suite_star_config,
    "d4-degree": suite_d4_degree,
    "d2-classification": suite_d2_classification,
    "nonclosed": suite_nonclosed,
    "metric": suite_metric,
    "bolystar": suite_bolystar,
}


class UnknownSuite(KeyError):
    def __str__(self):
        return f"unknown suite {self.args[0]!r}; available: {', '.join(SUITES)}"


def run_suite(suite_id: str, seed: int = 0) -> SuiteReport:
    fn = SUITES.get(suite_id)
    if fn is None:
        raise UnknownSuite(suite_id)
    return SuiteReport(suite_id, fn(random.Random(seed)))
