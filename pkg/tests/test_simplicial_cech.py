import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cotangent.cech import build_cech_dga, cup_product_classes, dga_cohomology
from cotangent.linalg import Field
from cotangent.simplicial import (
    BUILTIN,
    build_complex,
    certify_simply_connected,
    complex_from_json,
    corpus_complex,
    simplicial_cohomology_oracle,
    spanning_tree,
)

FIELDS = ["F2", "F3", "F7", "Q"]

# Betti numbers of the corpus, frozen from the classification of surfaces
KNOWN = {
    ("circle3", "Q"): {0: 1, 1: 1},
    ("interval", "Q"): {0: 1},
    ("sphere2", "F3"): {0: 1, 2: 1},
    ("torus7", "Q"): {0: 1, 1: 2, 2: 1},
    ("torus7", "F2"): {0: 1, 1: 2, 2: 1},
    ("rp2_6", "F2"): {0: 1, 1: 1, 2: 1},
    ("rp2_6", "Q"): {0: 1},
    ("rp2_6", "F3"): {0: 1},
    ("klein", "F2"): {0: 1, 1: 2, 2: 1},
    ("klein", "Q"): {0: 1, 1: 1},
}


@pytest.mark.parametrize("name,spec", sorted(KNOWN))
def test_oracle_matches_known_betti_numbers(name, spec):
    assert simplicial_cohomology_oracle(corpus_complex(name), Field.parse(spec)) == KNOWN[(name, spec)]


@pytest.mark.parametrize("spec", FIELDS)
@pytest.mark.parametrize("name", sorted(BUILTIN))
def test_cech_dga_identities_and_cohomology(name, spec):
    k, f = corpus_complex(name), Field.parse(spec)
    c = build_cech_dga(k, f)
    c.verify()
    assert dga_cohomology(c)[0] == simplicial_cohomology_oracle(k, f)


def test_corpus_shapes():
    assert corpus_complex("torus7").f_vector() == (7, 21, 14)
    assert corpus_complex("rp2_6").f_vector() == (6, 15, 10)
    assert corpus_complex("klein").euler_characteristic() == 0
    assert corpus_complex("sphere2").euler_characteristic() == 2


def _h1_reps(c):
    return dga_cohomology(c)[1].get(1, [])


def test_torus_cup_product_is_nondegenerate():
    c = build_cech_dga(corpus_complex("torus7"), Field.parse("Q"))
    a, b = _h1_reps(c)
    ab = cup_product_classes(c, a, b)
    ba = cup_product_classes(c, b, a)
    assert not ab.is_zero
    # graded commutativity on cohomology
    assert [x + y for x, y in zip(ab.coordinates, ba.coordinates)] == [0]
    assert cup_product_classes(c, a, a).is_zero


def test_rp2_square_of_generator_over_f2():
    c = build_cech_dga(corpus_complex("rp2_6"), Field.parse("F2"))
    (a,) = _h1_reps(c)
    assert not cup_product_classes(c, a, a).is_zero


def test_unit_class_and_cup_with_unit():
    c = build_cech_dga(corpus_complex("circle3"), Field.parse("F7"))
    (a,) = _h1_reps(c)
    one = c.unit()
    assert not c.d(one)
    assert cup_product_classes(c, one, a).coordinates == cup_product_classes(c, a, one).coordinates


def test_cup_rejects_non_cocycles():
    c = build_cech_dga(corpus_complex("circle3"), Field.parse("Q"))
    with pytest.raises(ValueError):
        cup_product_classes(c, {0: 1}, {0: 1})


def test_disconnected_needs_base_vertex():
    k = build_complex([(0, 1), (2, 3)])
    with pytest.raises(ValueError):
        build_cech_dga(k, Field.parse("Q"))
    c = build_cech_dga(k, Field.parse("Q"), base_vertex=2)
    assert dga_cohomology(c)[0] == {0: 2}


def test_json_roundtrip():
    k = corpus_complex("rp2_6")
    k2 = complex_from_json(json.loads(json.dumps(k.to_json())))
    assert k2.simplices == k.simplices


def test_spanning_tree_and_simple_connectivity():
    for name in BUILTIN:
        k = corpus_complex(name)
        assert len(spanning_tree(k)) == len(k.vertices) - 1
    verdicts = {name: certify_simply_connected(corpus_complex(name)) for name in BUILTIN}
    assert verdicts == {"circle3": False, "interval": True, "sphere2": True,
                        "torus7": False, "rp2_6": False, "klein": False}


@st.composite
def random_complexes(draw):
    n = draw(st.integers(3, 6))
    tris = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1), st.integers(0, n - 1))
                         .filter(lambda t: len(set(t)) == 3), min_size=1, max_size=6))
    edges = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
                          .filter(lambda t: t[0] != t[1]), max_size=3))
    return build_complex(list(tris) + list(edges))


@given(random_complexes(), st.sampled_from(FIELDS))
def test_random_complexes_dga_matches_oracle(k, spec):
    f = Field.parse(spec)
    c = build_cech_dga(k, f, base_vertex=k.vertices[0])
    c.verify()
    h = dga_cohomology(c)[0]
    assert h == simplicial_cohomology_oracle(k, f)
    assert sum((-1) ** n * d for n, d in h.items()) == k.euler_characteristic()


def test_corpus_dir_override(tmp_path, monkeypatch):
    (tmp_path / "circle3.json").write_text(json.dumps({"maximal_simplices": [[0, 1], [1, 2], [2, 3], [0, 3]]}))
    monkeypatch.setenv("COTANGENT_CORPUS_DIR", str(tmp_path))
    assert len(corpus_complex("circle3").vertices) == 4
    assert len(corpus_complex("sphere2").vertices) == 4      # falls back to the built-in
