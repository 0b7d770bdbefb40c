import pytest
from hypothesis import given
from hypothesis import strategies as st

from cotangent.cobar import (
    ReducedSimplicialSet,
    builtin_sset,
    cobar_of_sset,
    collapse_skeleton,
    normalize_degeneracies,
    sphere_sset,
    sset_from_json,
)
from cotangent.linalg import Field, InvariantError
from cotangent.simplicial import corpus_complex


def test_loop_space_rows():
    assert cobar_of_sset(builtin_sset("sphere2_min"), 5).row() == [1] * 6
    assert cobar_of_sset(builtin_sset("sphere3_min"), 6).row() == [1, 0, 1, 0, 1, 0, 1]
    assert cobar_of_sset(builtin_sset("wedge_s2_s2"), 2).row() == [1, 2, 4]


@pytest.mark.parametrize("spec", ["F2", "F3", "Q"])
def test_rows_do_not_depend_on_field(spec):
    assert cobar_of_sset(builtin_sset("sphere2_min"), 4, Field.parse(spec)).row() == [1] * 5


def test_collapsed_skeleton_of_sphere_is_wedge_of_four_spheres():
    # the 1-skeleton of the tetrahedron has b_1 = 3, so K / K^1 is a wedge of 4 two-spheres
    s = collapse_skeleton(corpus_complex("sphere2"), 1)
    assert cobar_of_sset(s, 2).row() == [1, 4, 16]


def test_wedge_of_three_spheres():
    s = sphere_sset(4, 3)
    # tensor algebra on three classes of degree 3
    assert cobar_of_sset(s, 6).row() == [1, 0, 0, 3, 0, 0, 9]


@given(st.lists(st.integers(0, 4), max_size=5))
def test_normalized_words_are_decreasing(word):
    w = normalize_degeneracies(word)
    assert len(w) == len(word)
    assert all(a > b for a, b in zip(w, w[1:]))
    assert normalize_degeneracies(w) == w


def test_degeneracy_relations():
    assert normalize_degeneracies([0, 0]) == (1, 0)
    assert normalize_degeneracies([0, 1]) == (2, 0)
    assert normalize_degeneracies([2, 0]) == (2, 0)


def test_json_roundtrip():
    s = builtin_sset("wedge_s2_s2")
    t = sset_from_json(s.to_json())
    assert t.dims == s.dims and t.faces == s.faces
    assert sset_from_json("sphere3_min").dims == builtin_sset("sphere3_min").dims


def test_validation_errors():
    with pytest.raises(ValueError):
        ReducedSimplicialSet({"a": 0, "b": 0}, {})
    with pytest.raises(InvariantError):
        bad = ReducedSimplicialSet({"v": 0, "x": 2}, {"v": [], "x": [((0,), "v")] * 2})
        bad.validate()
    with pytest.raises(KeyError):
        builtin_sset("nope")


def test_one_cells_are_rejected():
    with pytest.raises(ValueError):
        cobar_of_sset(sphere_sset(1), 2)
    with pytest.raises(ValueError):
        cobar_of_sset(builtin_sset("sphere2_min"), -1)
