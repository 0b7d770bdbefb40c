import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cotangent.linalg import Field, InvariantError, Matrix, complex_cohomology
from cotangent.local_systems import (
    _mod2_cocycles,
    build_module_EP,
    circle_system,
    cone_of_identity_module,
    contracting_homotopy,
    gauge_transform,
    hom_complex,
    hom_complex_bruteforce,
    hom_system,
    local_system_from_json,
    local_system_to_json,
    random_flat_system,
    random_invertible,
    shift_module,
    system_from_edges,
    torus_system,
    trivial_system,
    twisted_cohomology_oracle,
    validate_local_system,
)
from cotangent.simplicial import corpus_complex

SMALL = ["circle3", "interval", "sphere2", "torus7"]


def test_circle_monodromy_examples():
    f7 = Field.parse("F7")
    assert twisted_cohomology_oracle(circle_system(f7, 2)) == {}
    assert twisted_cohomology_oracle(circle_system(f7, 1)) == {0: 1, 1: 1}
    # rank 2 with one eigenvalue 1: H^0 = H^1 = 1
    assert twisted_cohomology_oracle(circle_system(f7, [[1, 0], [0, 3]])) == {0: 1, 1: 1}


def test_torus_sign_system_is_acyclic():
    assert twisted_cohomology_oracle(torus_system(Field.parse("Q"), -1, 1)) == {}


def test_rp2_orientation_system():
    k = corpus_complex("rp2_6")
    q = Field.parse("Q")
    w = _mod2_cocycles(k)[0]
    p = system_from_edges(k, q, {e: [[-1]] for e, x in w.items() if x})
    assert validate_local_system(p).flat
    # the orientation character: H^2(RP^2; Q^-) = Q and nothing else
    assert twisted_cohomology_oracle(p) == {2: 1}


def test_non_flat_system_is_reported():
    k = corpus_complex("sphere2")
    p = system_from_edges(k, Field.parse("Q"), {(0, 1): [[2]]})
    rep = validate_local_system(p)
    assert not rep.flat and rep.violations
    with pytest.raises(InvariantError):
        build_module_EP(p)


@given(st.sampled_from(SMALL), st.sampled_from(["F3", "F7", "Q"]), st.integers(1, 2), st.integers(0, 10 ** 6))
def test_random_systems_are_flat_and_gauge_invariant(name, spec, r, seed):
    rng = random.Random(seed)
    k, f = corpus_complex(name), Field.parse(spec)
    p = random_flat_system(k, f, r, rng)
    assert validate_local_system(p).flat
    g = {v: random_invertible(f, r, rng) for v in k.vertices}
    assert twisted_cohomology_oracle(gauge_transform(p, g)) == twisted_cohomology_oracle(p)


@given(st.sampled_from(SMALL), st.sampled_from(["F2", "F7", "Q"]), st.integers(0, 10 ** 6))
def test_module_total_complex_computes_twisted_cohomology(name, spec, seed):
    rng = random.Random(seed)
    p = random_flat_system(corpus_complex(name), Field.parse(spec), rng.randint(1, 2), rng)
    m = build_module_EP(p)
    m.verify()
    assert complex_cohomology(m.total_complex()) == twisted_cohomology_oracle(p)


@given(st.sampled_from(["circle3", "interval", "sphere2"]), st.sampled_from(["F3", "Q"]), st.integers(0, 10 ** 6))
def test_hom_complex_matches_bruteforce_and_oracle(name, spec, seed):
    rng = random.Random(seed)
    k, f = corpus_complex(name), Field.parse(spec)
    p0 = random_flat_system(k, f, rng.randint(1, 2), rng)
    p1 = random_flat_system(k, f, 1, rng)
    m0, m1 = build_module_EP(p0), build_module_EP(p1)
    h = hom_complex(m0, m1)
    assert h.cohomology() == complex_cohomology(hom_complex_bruteforce(m0, m1))
    assert h.cohomology() == twisted_cohomology_oracle(hom_system(p0, p1))


def test_contracting_homotopy_on_cone_of_identity():
    p = circle_system(Field.parse("F7"), 3)
    res = contracting_homotopy(cone_of_identity_module(build_module_EP(p)))
    assert res.found
    m = cone_of_identity_module(build_module_EP(p))
    h = contracting_homotopy(m).homotopy
    assert m.diff @ h + h @ m.diff == Matrix.identity(m.field, m.dim)


def test_contracting_homotopy_reports_non_acyclic_stalk():
    p = trivial_system(corpus_complex("interval"), Field.parse("Q"))
    res = contracting_homotopy(build_module_EP(p))
    assert not res.found and res.failing_simplex is not None


@pytest.mark.parametrize("x", ["-1/3", "2", "5/7"])
def test_cone_and_shift_homs_stay_exact(x):
    # maps of negative degree used to pick up float signs
    from fractions import Fraction
    q = Field.parse("Q")
    p = system_from_edges(corpus_complex("interval"), q, {(0, 1): [[Fraction(x)]]})
    e = build_module_EP(p)
    for m in (cone_of_identity_module(e), shift_module(e, -1)):
        h = hom_complex(m, m)
        for k in h.complex.degrees():
            for row in h.complex.d(k).rows:
                assert not any(isinstance(v, float) for v in row.values())
        assert h.cohomology() == complex_cohomology(hom_complex_bruteforce(m, m))
    assert contracting_homotopy(cone_of_identity_module(e)).found


def test_floats_are_rejected():
    with pytest.raises(TypeError):
        Field.parse("Q").norm(0.5)


def test_json_roundtrip():
    p = torus_system(Field.parse("F7"), 2, 3)
    data = json.loads(json.dumps(local_system_to_json(p)))
    q = local_system_from_json(data)
    assert q.transport == p.transport
    assert twisted_cohomology_oracle(q) == twisted_cohomology_oracle(p)
