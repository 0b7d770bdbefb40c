import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cotangent.linalg import ChainComplex, Field, InvariantError, Matrix, complex_cohomology
from cotangent.local_systems import (
    LocalSystem,
    build_module_EP,
    hom_complex,
    random_flat_system,
    trivial_system,
)
from cotangent.simplicial import corpus_complex
from cotangent.spectral import (
    FilteredComplex,
    cech_filtration,
    compare_E2_twisted,
    corner_argument,
    end_dims,
    run_spectral_sequence,
)


def graded_sum(p: LocalSystem, q: LocalSystem, shift: int) -> LocalSystem:
    """p in its own degrees plus q moved up by ``shift``, block-diagonal transport."""
    f = p.field
    tr = {}
    for e, a in p.transport.items():
        b = q.transport[e]
        m = Matrix(f, a.nrows + b.nrows, a.ncols + b.ncols)
        for (r, c), v in _entries(a):
            m.add_entry(r, c, v)
        for (r, c), v in _entries(b):
            m.add_entry(a.nrows + r, a.ncols + c, v)
        tr[e] = m
    degs = {v: p.degrees[v] + [d + shift for d in q.degrees[v]] for v in p.base.vertices}
    return LocalSystem(p.base, f, degs, tr)


def _entries(m: Matrix):
    return [((r, c), v) for r, row in enumerate(m.rows) for c, v in row.items()]


def e1_oracle(fc: FilteredComplex):
    """E_1^{p,q} = H^{p+q}(F^p / F^{p+1}), computed from the diagonal blocks."""
    c = fc.complex
    out = {}
    levels = sorted({x for v in fc.levels.values() for x in v})
    for p in levels:
        idx = {n: [j for j, x in enumerate(fc.levels.get(n, [])) if x == p] for n in c.degrees()}
        dims = {n: len(v) for n, v in idx.items()}
        diffs = {n: c.d(n).block(idx.get(n + 1, []), idx[n]) for n in c.degrees() if n + 1 in idx}
        for n, d in complex_cohomology(ChainComplex(c.field, dims, diffs)).items():
            if d:
                out[(p, n - p)] = d
    return out


def test_two_step_filtration_by_hand():
    f = Field.parse("Q")
    c = ChainComplex(f, {0: 1, 1: 1}, {0: Matrix.from_dense(f, [[1]])})
    ss = run_spectral_sequence(FilteredComplex(c, {0: [0], 1: [1]}))
    assert ss.page(1).cells == {(0, 0): 1, (1, 0): 1}
    assert ss.page(1).diffs == {(0, 0): 1}
    assert ss.e_infinity == {} and ss.abutment == {}


def test_filtration_must_be_preserved():
    f = Field.parse("Q")
    c = ChainComplex(f, {0: 1, 1: 1}, {0: Matrix.from_dense(f, [[1]])})
    with pytest.raises(InvariantError):
        run_spectral_sequence(FilteredComplex(c, {0: [1], 1: [0]}))


def test_cech_filtration_needs_bookkeeping():
    f = Field.parse("Q")
    with pytest.raises(ValueError):
        cech_filtration(ChainComplex(f, {0: 1}, {}))


@given(st.sampled_from(["circle3", "sphere2", "torus7"]), st.sampled_from(["F3", "F7", "Q"]),
       st.integers(0, 2), st.integers(0, 10 ** 6))
def test_E2_matches_twisted_oracle(name, spec, shift, seed):
    rng = random.Random(seed)
    k, f = corpus_complex(name), Field.parse(spec)
    p0 = random_flat_system(k, f, 1, rng)
    p1 = graded_sum(random_flat_system(k, f, 1, rng), random_flat_system(k, f, 1, rng), shift)
    h = hom_complex(build_module_EP(p0), build_module_EP(p1))
    fc = cech_filtration(h)
    ss = run_spectral_sequence(fc)
    assert ss.page(1).cells == e1_oracle(fc)
    rep = compare_E2_twisted(ss, p0, p1)
    assert rep.match, rep.mismatches
    assert ss.abutment == h.cohomology()


def test_graded_fiber_on_sphere():
    f = Field.parse("F7")
    p = trivial_system(corpus_complex("sphere2"), f, degrees=[0, 1])
    ss = run_spectral_sequence(cech_filtration(hom_complex(build_module_EP(p), build_module_EP(p))))
    assert compare_E2_twisted(ss, p, p).match
    # End(V) in degrees -1, 0, 1 over H^*(S^2) in rows 0 and 2
    assert ss.page(2).cells == {(0, -1): 1, (0, 0): 2, (0, 1): 1, (2, -1): 1, (2, 0): 2, (2, 1): 1}


def test_end_dims():
    assert end_dims({0: 2}) == {0: 4}
    assert end_dims({0: 1, 1: 1}) == {-1: 1, 0: 2, 1: 1}
    assert end_dims({0: 1, 3: 2}) == {-3: 2, 0: 5, 3: 2}


def test_corner_verdicts():
    ok = corner_argument([1, 0, 1], {0: 1}, 1)
    assert ok.consistent and ok.rank_forced == 1
    too_big = corner_argument([1, 0, 1], {0: 2}, 1)
    assert not too_big.consistent and "dim" in too_big.deduction[-1]
    graded = corner_argument([1, 0, 1], {0: 1, 1: 1}, 1)
    assert not graded.consistent and "escapes" in graded.deduction[-1]
    assert graded.euler_characteristic == 0
    with pytest.raises(ValueError):
        corner_argument([1, 1], {0: 1}, 1, base_top_degree=2)
