import random

import pytest

import oracles
from bolytrope.building import (
    Apartment,
    CapExceeded,
    ClassSet,
    NotInApartment,
    ball,
    ball_around_set,
    class_of,
    convex_hull,
    exponent_vector,
    geodesic,
    invariant_classes,
    is_simplex,
    neighbors,
)
from bolytrope.lattice import Lattice, distance
from bolytrope.orders import idealizer, jacobson_radical, pz_order
from bolytrope.polytrope import ball_order, bolytrope_order, graduated_order
from bolytrope.suites import random_class, random_exponent_matrix
from bolytrope.valuation import PAdicContext

C2, C3 = PAdicContext(2), PAdicContext(3)


def std(ctx, d):
    return class_of(Lattice.standard(ctx, d))


def vectors(apt, s):
    return sorted(exponent_vector(apt, c) for c in s)


def test_class_of_examples():
    z3 = Lattice.standard(C2, 3)
    assert class_of(z3).rep == z3
    assert class_of(z3.scale(3)) == class_of(z3)
    lat = Lattice.from_basis(C2, [[4, 0], [0, 32]])
    assert class_of(lat).rep.exponents == (0, 3)


def test_exponent_vector_examples():
    apt = Apartment.standard(C2, 3)
    assert exponent_vector(apt, std(C2, 3)) == (0, 0, 0)
    c = class_of(Lattice.from_basis(C2, [[1, 0, 0], [0, 8, 0], [0, 0, 2]]))
    assert exponent_vector(apt, c) == (0, 3, 1)
    with pytest.raises(NotInApartment):
        exponent_vector(Apartment.standard(C2, 2), class_of(Lattice.from_basis(C2, [[1, 0], [1, 2]])))


def test_exponent_vector_in_other_frame():
    frame = [[1, 1], [0, 1]]
    apt = Apartment(C3, frame)
    for u in [(0, 0), (2, 0), (0, 5), (1, 4)]:
        assert exponent_vector(apt, apt.vertex(u)) == tuple(x - min(u) for x in u)


def test_neighbor_counts():
    assert len(neighbors(std(C2, 2))) == 3
    assert len(neighbors(std(C3, 2))) == 4
    assert len(neighbors(std(C2, 3))) == 14
    assert len(neighbors(std(C3, 3))) == 26
    assert all(distance(std(C3, 3), c) == 1 for c in neighbors(std(C3, 3)))


def test_ball_counts():
    c = std(C2, 2)
    assert ball(c, 0) == ClassSet([c])
    assert len(ball(c, 1)) == 4
    assert len(ball(c, 2)) == 10


def test_ball_around_segment():
    apt = Apartment.standard(C2, 2)
    seg = ClassSet([apt.vertex((0, 0)), apt.vertex((1, 0))])
    assert ball_around_set(seg, 0) == seg
    assert len(ball_around_set(seg, 1)) == 6


@pytest.mark.parametrize("p,d,r", [(2, 2, 1), (2, 2, 2), (3, 2, 2), (2, 3, 1), (2, 3, 2), (3, 3, 1)])
def test_ball_matches_enumeration(p, d, r):
    """Classes with a representative in [p^r L, L], filtered by the oracle distance."""
    ctx = PAdicContext(p)
    ident = [[int(i == j) for j in range(d)] for i in range(d)]
    found = set()
    for h in oracles.hermite_lattices_between(p, d, r):
        if oracles.building_distance(ident, h, p) <= r:
            found.add(class_of(Lattice.from_basis(ctx, h)))
    assert ball(std(ctx, d), r) == ClassSet(found)


def test_ball_cap():
    with pytest.raises(CapExceeded):
        ball(std(C3, 3), 2, cap=50)


def test_cap_from_environment(monkeypatch):
    monkeypatch.setenv("BOLYTROPE_CAP", "5")
    with pytest.raises(CapExceeded):
        ball(std(C2, 2), 2)


def test_geodesic_examples():
    apt = Apartment.standard(C2, 2)
    a, b = apt.vertex((0, 0)), apt.vertex((3, 0))
    assert geodesic(a, a) == [a]
    n = neighbors(a)[0]
    assert geodesic(a, n) == [a, n]
    assert [exponent_vector(apt, c) for c in geodesic(a, b)] == [(0, 0), (1, 0), (2, 0), (3, 0)]


def test_geodesics_are_shortest():
    rng = random.Random(3)
    for _ in range(60):
        ctx = PAdicContext(rng.choice([2, 3]))
        d = rng.choice([2, 3])
        x, y = random_class(rng, ctx, d, 4), random_class(rng, ctx, d, 4)
        path = geodesic(x, y)
        assert len(path) - 1 == distance(x, y)
        assert path[0] == x and path[-1] == y
        assert all(distance(u, v) == 1 for u, v in zip(path, path[1:]))


def test_invariant_classes_examples():
    apt = Apartment.standard(C2, 2)
    lat = Lattice.from_basis(C2, [[1, 0], [1, 4]])
    end = pz_order([class_of(lat)])
    assert invariant_classes(end) == ClassSet([class_of(lat)])
    lam = graduated_order(C2, None, [[0, 0], [1, 0]])
    assert vectors(apt, invariant_classes(lam)) == [(0, 0), (0, 1)]
    for r in (1, 2):
        assert invariant_classes(ball_order(C3, Lattice.standard(C3, 2), r)) == ball(std(C3, 2), r)


def test_invariant_classes_cap():
    with pytest.raises(CapExceeded):
        invariant_classes(ball_order(C3, Lattice.standard(C3, 3), 2), cap=100)


def test_is_simplex_examples():
    apt = Apartment.standard(C2, 3)
    c = std(C2, 3)
    assert is_simplex([c])
    assert is_simplex([c, neighbors(c)[0]])
    assert not is_simplex([apt.vertex((0, 0, 0)), apt.vertex((2, 0, 0))])
    # a chamber: Z^3 ⊃ span(e1, e2, 2e3) ⊃ span(e1, 2e2, 2e3)
    assert is_simplex([apt.vertex((0, 0, 0)), apt.vertex((0, 0, 1)), apt.vertex((0, 1, 1))])
    # pairwise adjacent but not a chain: three lines in the same plane quotient
    assert not is_simplex([apt.vertex((0, 0, 0)), apt.vertex((0, 0, 1)), apt.vertex((0, 1, 0))])


def test_convex_hull_examples():
    apt = Apartment.standard(C2, 2)
    c = apt.vertex((0, 0))
    assert convex_hull([c]) == ClassSet([c])
    seg = convex_hull([c, apt.vertex((3, 0))])
    assert vectors(apt, seg) == [(0, 0), (1, 0), (2, 0), (3, 0)]
    assert convex_hull(seg) == seg


def test_invariant_sets_are_convex_and_sandwich():
    rng = random.Random(11)
    for _ in range(8):
        ctx = PAdicContext(rng.choice([2, 3]))
        d = rng.choice([2, 3])
        m = random_exponent_matrix(rng, d, 2)
        order = bolytrope_order(ctx, None, m, rng.randint(0, 1))
        q = invariant_classes(order)
        assert convex_hull(q) == q
        omega = idealizer(jacobson_radical(order))
        q1 = invariant_classes(omega)
        assert q1.issubset(q)
        assert q.issubset(ball_around_set(q1, 1))
