import random
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cotangent.covers import (
    GroupModule,
    build_cover,
    cyclic_table,
    edge_path_data,
    ext_group_module,
    formality_obstruction_degrees,
    gauged_edge_monodromy,
    group_module_from_json,
    group_module_to_json,
    monodromy_image,
    pullback_local_system,
    symmetric3_table,
    trivial_group_module,
)
from cotangent.linalg import Field, InvariantError, Matrix
from cotangent.local_systems import (
    circle_system,
    gauge_transform,
    random_invertible,
    torus_system,
    trivial_system,
    twisted_cohomology_oracle,
)
from cotangent.simplicial import corpus_complex, simplicial_cohomology_oracle


def test_circle_cover():
    f = Field.parse("F7")
    p = circle_system(f, 2)
    g = monodromy_image(p)
    assert g.order == 3 and g.summary()["scalars"] == ["1", "2", "4"]
    c = build_cover(p, g)
    assert c.summary()["vertices"] == 9 and c.summary()["connected"]
    # a connected triple cover of a circle is a circle
    assert simplicial_cohomology_oracle(c.total, f) == {0: 1, 1: 1}
    pb = pullback_local_system(c, p)
    assert pb.trivial
    q = gauge_transform(pb.system, pb.gauge)
    assert all(m == Matrix.identity(f, 1) for m in q.transport.values())


def test_torus_cover():
    p = torus_system(Field.parse("Q"), -1, 1)
    c = build_cover(p)
    s = c.summary()
    assert s["degree"] == 2 and s["vertices"] == 14
    assert s["euler_base"] == s["euler_cover"] == 0
    assert pullback_local_system(c, p).trivial


def test_non_generating_system_keeps_monodromy():
    f = Field.parse("Q")
    c = build_cover(torus_system(f, -1, 1))
    other = pullback_local_system(c, torus_system(f, 1, -1))
    assert not other.trivial and other.gauge is None
    assert other.obstruction is not None


def test_trivial_system_has_trivial_cover():
    p = trivial_system(corpus_complex("torus7"), Field.parse("F3"), 2)
    c = build_cover(p)
    assert c.degree == 1 and len(c.total.vertices) == 7


def test_infinite_monodromy():
    g = monodromy_image(circle_system(Field.parse("Q"), 2), cap=50)
    assert not g.finite and g.order is None
    with pytest.raises(ValueError):
        build_cover(circle_system(Field.parse("Q"), 2), g)


def test_tree_edges_have_trivial_gauged_monodromy():
    p = torus_system(Field.parse("F5"), 2, 3)
    e = edge_path_data(p.base)
    mono = gauged_edge_monodromy(p, e)
    one = Matrix.identity(p.field, 1)
    for a, b in e.tree:
        assert mono[(min(a, b), max(a, b))] == one


@settings(max_examples=15)
@given(st.sampled_from(["circle3", "torus7"]), st.sampled_from(["F3", "F5"]), st.integers(1, 2), st.integers(0, 10 ** 6))
def test_random_finite_covers_trivialize(name, spec, r, seed):
    rng = random.Random(seed)
    f = Field.parse(spec)
    m = random_invertible(f, r, rng)
    rows = m.to_dense()
    if name == "circle3":
        p = circle_system(f, rows)
    else:
        p = torus_system(f, rows, [[int(i == j) for j in range(r)] for i in range(r)])
    p = gauge_transform(p, {v: random_invertible(f, r, rng) for v in p.base.vertices})
    c = build_cover(p)
    assert c.total.is_connected
    assert c.total.euler_characteristic() == c.degree * p.base.euler_characteristic()
    pb = pullback_local_system(c, p)
    assert pb.trivial
    assert twisted_cohomology_oracle(pb.system) == {n: r * d for n, d in simplicial_cohomology_oracle(c.total, f).items()}


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("spec", ["F2", "F7", "Q"])
def test_ext_over_free_abelian_is_binomial(n, spec):
    t = trivial_group_module("Zn", Field.parse(spec), n=n)
    assert ext_group_module(t, t, n + 1) == {r: comb(n, r) for r in range(n + 1)}


@given(st.sampled_from(["F3", "F5", "F7"]), st.integers(1, 6), st.integers(1, 6))
def test_ext_agrees_with_torus_cohomology(spec, a, b):
    f = Field.parse(spec)
    if f(a) == 0 or f(b) == 0:
        return
    t = trivial_group_module("Zn", f, n=2)
    m = GroupModule("Zn", f, 1, [Matrix.from_dense(f, [[a]]), Matrix.from_dense(f, [[b]])], 2)
    assert ext_group_module(t, m, 2) == twisted_cohomology_oracle(torus_system(f, a, b))


def test_ext_with_matrix_coefficients_agrees_with_torus():
    f = Field.parse("F5")
    a, b = [[1, 1], [0, 1]], [[2, 2], [0, 2]]
    t = trivial_group_module("Zn", f, n=2)
    m = GroupModule("Zn", f, 2, [Matrix.from_dense(f, a), Matrix.from_dense(f, b)], 2)
    assert ext_group_module(t, m, 2) == twisted_cohomology_oracle(torus_system(f, a, b))
    u = GroupModule("Zn", f, 2, [Matrix.from_dense(f, a), Matrix.identity(f, 2)], 2)
    assert ext_group_module(t, u, 2) == twisted_cohomology_oracle(torus_system(f, a, [[1, 0], [0, 1]]))


def test_finite_groups():
    f2, f3, q = Field.parse("F2"), Field.parse("F3"), Field.parse("Q")
    c2 = trivial_group_module("finite", f2, table=cyclic_table(2))
    assert ext_group_module(c2, c2, 4) == {r: 1 for r in range(5)}
    c3 = trivial_group_module("finite", q, table=cyclic_table(3))
    assert ext_group_module(c3, c3, 3) == {0: 1}
    s3 = trivial_group_module("finite", f3, table=symmetric3_table())
    assert ext_group_module(s3, s3, 4) == {0: 1, 3: 1, 4: 1}
    s3q = trivial_group_module("finite", q, table=symmetric3_table())
    assert ext_group_module(s3q, s3q, 3) == {0: 1}


def test_obstruction_reports():
    q = Field.parse("Q")
    for n, want in [(1, {}), (2, {2: 1}), (3, {2: 3, 3: 1})]:
        rep = formality_obstruction_degrees(trivial_group_module("Zn", q, n=n), n + 1)
        assert rep.dims == want and rep.degrees == sorted(want) and rep.complete
    rep = formality_obstruction_degrees(trivial_group_module("finite", Field.parse("F2"), table=cyclic_table(2)), 3)
    assert rep.degrees == [2, 3] and not rep.complete


def test_group_module_validation():
    q = Field.parse("Q")
    with pytest.raises(InvariantError):
        GroupModule("Zn", q, 2, [Matrix.from_dense(q, [[1, 1], [0, 1]]), Matrix.from_dense(q, [[1, 0], [1, 1]])], 2).verify()
    with pytest.raises(InvariantError):
        GroupModule("finite", q, 1, [Matrix.from_dense(q, [[1]]), Matrix.from_dense(q, [[2]])], table=cyclic_table(2)).verify()
    with pytest.raises(ValueError):
        ext_group_module(trivial_group_module("Zn", q, n=1), trivial_group_module("Zn", q, n=2), 2)


def test_group_module_json_roundtrip():
    f = Field.parse("F7")
    m = GroupModule("Zn", f, 1, [Matrix.from_dense(f, [[2]]), Matrix.from_dense(f, [[3]])], 2)
    back = group_module_from_json(group_module_to_json(m))
    assert back.action == m.action and back.group_key() == m.group_key()
