from fractions import Fraction
from itertools import product

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from cotangent.linalg import (
    ChainComplex,
    CohomologyBasis,
    Field,
    InvariantError,
    Matrix,
    Retract,
    complex_cohomology,
    cone_of_identity,
    inverse,
    kernel,
    rank,
    rref,
    solve,
)

FIELDS = [Field(2), Field(3), Field(7), Field(None)]


small_ints = st.integers(min_value=-4, max_value=4)
shapes = st.tuples(st.integers(1, 5), st.integers(1, 5))


@st.composite
def matrices(draw, f=None):
    f = f or draw(st.sampled_from(FIELDS))
    r, c = draw(shapes)
    rows = draw(st.lists(st.lists(small_ints, min_size=c, max_size=c), min_size=r, max_size=r))
    return Matrix.from_dense(f, [[f(x) for x in row] for row in rows]), rows


def brute_rank_fp(rows, p):
    """Rank over F_p from the size of the row space, by enumeration."""
    c = len(rows[0])
    space = set()
    for coeffs in product(range(p), repeat=len(rows)):
        space.add(tuple(sum(a * r[j] for a, r in zip(coeffs, rows)) % p for j in range(c)))
    n, k = len(space), 0
    while p ** k < n:
        k += 1
    return k


@given(matrices(Field(None)))
def test_rank_matches_sympy_over_q(mr):
    m, rows = mr
    assert rank(m) == sympy.Matrix(rows).rank()


@given(st.sampled_from([2, 3]), st.data())
def test_rank_matches_enumeration_over_fp(p, data):
    m, rows = data.draw(matrices(Field(p)))
    if len(rows) > 4:
        rows = rows[:4]
        m = Matrix.from_dense(Field(p), [[Field(p)(x) for x in row] for row in rows])
    assert rank(m) == brute_rank_fp(rows, p)


@given(matrices())
def test_rank_nullity_and_kernel(mr):
    m, _ = mr
    ker = kernel(m)
    assert rank(m) + len(ker) == m.ncols
    assert all(not m.apply(v) for v in ker)


@given(matrices())
def test_rref_rows_are_reduced(mr):
    m, _ = mr
    pivots, rows = rref(m)
    assert pivots == sorted(pivots)
    for p, row in zip(pivots, rows):
        assert row[p] == m.field.one()
        for q in pivots:
            if q != p:
                assert q not in row


@given(matrices(), st.data())
def test_solve_finds_preimages(mr, data):
    m, _ = mr
    f = m.field
    x = {j: f(data.draw(small_ints)) for j in range(m.ncols)}
    b = m.apply(x)
    y = solve(m, b)
    assert y is not None and m.apply(y) == b


def test_solve_reports_inconsistency():
    f = Field(5)
    m = Matrix.from_dense(f, [[1, 1], [2, 2]])
    assert solve(m, {0: f(1), 1: f(0)}) is None


@pytest.mark.parametrize("f", FIELDS, ids=str)
def test_inverse(f):
    m = Matrix.from_dense(f, [[f(1), f(2)], [f(0), f(1)]])
    assert m @ inverse(m) == Matrix.identity(f, 2)
    with pytest.raises((ValueError, ZeroDivisionError, InvariantError)):
        inverse(Matrix.from_dense(f, [[f(1), f(1)], [f(1), f(1)]]))


def test_field_arithmetic_and_parse():
    assert Field.parse("F7")(9) == 2
    assert Field.parse("Q")(Fraction(1, 2)) == Fraction(1, 2)
    assert Field(7).inv(3) * 3 % 7 == 1
    with pytest.raises(ValueError):
        Field.parse("R")
    with pytest.raises(ValueError):
        Field(6)


def _circle_cochains(f):
    # C^0 = K^3, C^1 = K^3 with the simplicial coboundary of a triangle
    d0 = Matrix.from_dense(f, [[-1, 1, 0], [-1, 0, 1], [0, -1, 1]])
    return ChainComplex(f, {0: 3, 1: 3}, {0: d0})


@pytest.mark.parametrize("f", FIELDS, ids=str)
def test_complex_cohomology_and_basis(f):
    c = _circle_cochains(f)
    assert complex_cohomology(c) == {0: 1, 1: 1}
    cb = CohomologyBasis.of(c)
    assert cb.dims() == {0: 1, 1: 1}
    z = {0: f.one()}
    assert cb.coordinates(1, z) != [0]
    assert complex_cohomology(cone_of_identity(c)) == {}


def test_d_squared_failure_is_located():
    f = Field(None)
    d0 = Matrix.from_dense(f, [[1]])
    d1 = Matrix.from_dense(f, [[1]])
    with pytest.raises(InvariantError, match="0"):
        ChainComplex(f, {0: 1, 1: 1, 2: 1}, {0: d0, 1: d1}).check()


@pytest.mark.parametrize("f", FIELDS, ids=str)
def test_retract_identities(f):
    c = _circle_cochains(f)
    r = Retract.of(c)
    r.check()
    assert r.hdims == {0: 1, 1: 1}
    for n in (0, 1):
        assert r.p[n] @ r.i[n] == Matrix.identity(f, r.hdims[n])


@given(st.sampled_from(FIELDS), st.data())
def test_retract_on_random_two_term_complexes(f, data):
    m, _ = data.draw(matrices(f))
    c = ChainComplex(f, {0: m.ncols, 1: m.nrows}, {0: m})
    r = Retract.of(c)
    r.check()
    assert r.hdims == complex_cohomology(c)
