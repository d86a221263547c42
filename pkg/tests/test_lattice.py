import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from bolytrope.lattice import (
    Lattice,
    SingularMatrixError,
    canonicalize,
    compatible_bases,
    distance,
    dual,
    endomorphism_dual,
    intersect,
    lattice_from_frame,
    lattice_sum,
    member,
    smith_valuations,
    transporter,
)
from bolytrope.valuation import PAdicContext

F = Fraction


def rows(lat):
    return [list(r) for r in lat.basis]


@st.composite
def rational_bases(draw, d=None, p=None):
    p = p or draw(st.sampled_from([2, 3, 5]))
    d = d or draw(st.integers(1, 3))
    entry = st.builds(lambda n, e: F(n) * F(p) ** e, st.integers(-6, 6), st.integers(-2, 2))
    m = draw(st.lists(st.lists(entry, min_size=d, max_size=d), min_size=d, max_size=d)
             .filter(lambda m: oracles.det(m) != 0))
    return p, m


def test_canonicalize_examples():
    c2, c3 = PAdicContext(2), PAdicContext(3)
    assert rows(canonicalize(c2, [[1, 0], [0, 1]])) == [[1, 0], [0, 1]]
    # columns (2,0) and (1,1)
    assert rows(canonicalize(c2, [[2, 1], [0, 1]])) == [[1, 0], [1, 2]]
    assert rows(canonicalize(c3, [[9, 0], [0, F(1, 3)]])) == [[9, 0], [0, F(1, 3)]]
    with pytest.raises(SingularMatrixError):
        canonicalize(c2, [[1, 2], [0, 0]])


def test_non_integral_canonical_entries():
    # span{(1, 1/2), (0, 1)} genuinely needs the entry 1/2
    lat = canonicalize(PAdicContext(2), [[1, 0], [F(1, 2), 1]])
    assert rows(lat) == [[1, 0], [F(1, 2), 1]]
    assert lat.exponents == (0, 0)


def test_member_examples():
    c2 = PAdicContext(2)
    lat = canonicalize(c2, [[1, 0], [1, 2]])
    assert not member(lat, [1, 0])
    assert member(lat, [0, 2])
    assert member(lat, [1, 1])
    assert member(lat, [F(1, 3), F(1, 3)])


def test_sum_dual_intersect_examples():
    c = PAdicContext(2)
    z2 = Lattice.standard(c, 2)
    l = canonicalize(c, [[2, 0], [0, 1]])
    assert lattice_sum(z2, l) == z2
    assert intersect(z2, l) == l
    assert rows(dual(l)) == [[F(1, 2), 0], [0, 1]]
    assert dual(dual(l)) == l


def test_smith_and_distance_examples():
    c = PAdicContext(2)
    assert smith_valuations(c, [[2, 1], [0, 2]]) == [0, 2]
    assert smith_valuations(c, [[1, 0], [0, 1]]) == [0, 0]
    assert distance(Lattice.standard(c, 2), canonicalize(c, [[1, 0], [0, 8]])) == 3
    assert distance(Lattice.standard(c, 2), Lattice.standard(c, 2).scale(4)) == 0


def test_transporter_example():
    c = PAdicContext(2)
    l01 = canonicalize(c, [[1, 0], [0, 2]])
    end = transporter(c, l01, l01)
    # X11, X22 in Z, X21 in 2Z, X12 in (1/2)Z: column-major (11, 21, 12, 22)
    assert end == canonicalize(c, [[1, 0, 0, 0], [0, 2, 0, 0], [0, 0, F(1, 2), 0], [0, 0, 0, 1]])


def test_compatible_bases_example():
    c = PAdicContext(2)
    frame, u, v = compatible_bases(Lattice.standard(c, 2), canonicalize(c, [[1, 0], [0, 8]]))
    assert u == (0, 0) and v == (0, 3)
    assert lattice_from_frame(c, frame, v) == canonicalize(c, [[1, 0], [0, 8]])


@settings(max_examples=150, deadline=None)
@given(rational_bases())
def test_canonical_form_matches_oracle(pm):
    p, m = pm
    lat = canonicalize(PAdicContext(p), m)
    want = oracles.hermite(oracles.basis_columns(m), p)
    assert rows(lat) == want
    assert oracles.same_lattice(rows(lat), m, p)


@settings(max_examples=100, deadline=None)
@given(rational_bases(), st.data())
def test_canonical_form_is_basis_invariant(pm, data):
    p, m = pm
    d = len(m)
    # random matrix in GL_d(Z_(p)): unit determinant
    u = data.draw(st.lists(st.lists(st.integers(-4, 4), min_size=d, max_size=d),
                           min_size=d, max_size=d).filter(lambda u: oracles.val(oracles.det(u), p) == 0))
    ctx = PAdicContext(p)
    assert canonicalize(ctx, oracles.matmul(m, u)) == canonicalize(ctx, m)


@settings(max_examples=100, deadline=None)
@given(rational_bases())
def test_canonical_invariants(pm):
    p, m = pm
    lat = canonicalize(PAdicContext(p), m)
    b = lat.basis
    n = len(b)
    for i in range(n):
        a = oracles.val(b[i][i], p)
        assert b[i][i] == F(p) ** a
        for j in range(n):
            if j > i:
                assert b[i][j] == 0
            elif j < i:
                assert 0 <= b[i][j] < F(p) ** a
    assert canonicalize(lat.ctx, b) == lat


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_sum_intersection_dual_against_oracle(data):
    p, m1 = data.draw(rational_bases())
    d = len(m1)
    _, m2 = data.draw(rational_bases(d=d, p=p))
    ctx = PAdicContext(p)
    l1, l2 = canonicalize(ctx, m1), canonicalize(ctx, m2)
    s = lattice_sum(l1, l2)
    want = oracles.hermite(oracles.basis_columns(m1) + oracles.basis_columns(m2), p)
    assert rows(s) == want
    i = intersect(l1, l2)
    assert oracles.contains(m1, rows(i), p) and oracles.contains(m2, rows(i), p)
    # [L1 + L2 : L1] = [L2 : L1 ∩ L2]
    v = lambda x: oracles.val(oracles.det(x), p)
    assert v(rows(i)) == v(m1) + v(m2) - v(want)
    dl = dual(l1)
    assert oracles.same_lattice(rows(dl), [list(r) for r in zip(*oracles.inverse(m1))], p)


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_distance_against_oracle(data):
    p, m1 = data.draw(rational_bases())
    d = len(m1)
    _, m2 = data.draw(rational_bases(d=d, p=p))
    ctx = PAdicContext(p)
    l1, l2 = canonicalize(ctx, m1), canonicalize(ctx, m2)
    assert distance(l1, l2) == oracles.building_distance(m1, m2, p)
    e = smith_valuations(ctx, oracles.matmul(oracles.inverse(m1), m2))
    assert e == sorted(oracles.elementary_exponents(oracles.matmul(oracles.inverse(m1), m2), p))


@settings(max_examples=60, deadline=None)
@given(rational_bases(), st.data())
def test_membership_against_oracle(pm, data):
    p, m = pm
    d = len(m)
    lat = canonicalize(PAdicContext(p), m)
    v = data.draw(st.lists(st.builds(lambda n, e: F(n) * F(p) ** e, st.integers(-9, 9),
                                     st.integers(-3, 3)), min_size=d, max_size=d))
    coords = oracles.matmul(oracles.inverse(m), [[x] for x in v])
    assert lat.member(v) == oracles.integral(coords, p)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_compatible_bases_property(data):
    p, m1 = data.draw(rational_bases())
    _, m2 = data.draw(rational_bases(d=len(m1), p=p))
    ctx = PAdicContext(p)
    l1, l2 = canonicalize(ctx, m1), canonicalize(ctx, m2)
    frame, u, v = compatible_bases(l1, l2)
    assert lattice_from_frame(ctx, frame, u) == l1
    assert lattice_from_frame(ctx, frame, v) == l2


def test_transporter_and_endomorphism_dual_against_definition():
    rng = random.Random(5)
    for _ in range(20):
        p = rng.choice([2, 3])
        ctx = PAdicContext(p)
        b1 = [[F(rng.randint(-4, 4)) * F(p) ** rng.randint(-1, 1) for _ in range(2)] for _ in range(2)]
        b2 = [[F(rng.randint(-4, 4)) * F(p) ** rng.randint(-1, 1) for _ in range(2)] for _ in range(2)]
        if oracles.det(b1) == 0 or oracles.det(b2) == 0:
            continue
        m, n = canonicalize(ctx, b1), canonicalize(ctx, b2)
        t = transporter(ctx, m, n)
        # every basis element X satisfies X N ⊆ M
        for col in t.columns():
            x = [[col[0], col[2]], [col[1], col[3]]]
            assert oracles.contains(b1, oracles.matmul(x, b2), p)
        # index check: [End : ...] via det: B_M ⊗ B_N^{-T} has det valuation 2(v(M) - v(N))
        vm, vn = oracles.val(oracles.det(b1), p), oracles.val(oracles.det(b2), p)
        assert t.det_valuation == 2 * (vm - vn)
        ed = endomorphism_dual(m)
        assert ed == dual(transporter(ctx, m, m))
