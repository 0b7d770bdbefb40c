import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cotangent.bar import (
    AugmentedDga,
    NotSimplyConnectedWarning,
    bar_complex,
    bar_resolution,
    bar_window,
    dual_dga_B,
    endomorphism_dga_of_R,
    resolution_is_simple,
    resolution_window,
)
from cotangent.cech import build_cech_dga
from cotangent.linalg import Field
from cotangent.simplicial import BUILTIN, corpus_complex


def adga(name, spec="Q"):
    return AugmentedDga.of(build_cech_dga(corpus_complex(name), Field.parse(spec)))


@pytest.mark.parametrize("name", sorted(BUILTIN))
def test_resolution_is_simple_in_window(name):
    a = adga(name)
    a.verify()
    prev = None
    for w in (1, 2, 3):
        b = bar_resolution(a, w)
        assert resolution_is_simple(b)
        assert b.window_dims()[0] == 1
        if prev is not None:
            if b.window_hi is not None:
                assert b.window_hi >= prev.window_hi
            for n, d in prev.window_dims().items():
                assert b.cohomology.get(n, 0) == d
        prev = b


@settings(max_examples=12)
@given(st.sampled_from(["interval", "sphere2", "circle3"]), st.sampled_from(["F2", "F3", "Q"]), st.integers(1, 2))
def test_perturbation_matches_explicit_complex(name, spec, w):
    a = adga(name, spec)
    for b in (bar_resolution(a, w, route="both"), bar_complex(a, w, route="both")):
        assert b.direct == b.cohomology


def test_bar_complex_of_sphere():
    a = adga("sphere2")
    for w in (1, 2, 3):
        b = bar_complex(a, w)
        assert b.window_hi == w
        # dual of the loop-space homology of S^2, one class per word length
        assert b.window_dims() == {n: 1 for n in range(w + 1)}


def test_windows():
    s2, circle, interval = adga("sphere2"), adga("circle3"), adga("interval")
    assert [resolution_window(s2, w) for w in (1, 2, 3)] == [1, 2, 3]
    assert resolution_window(circle, 3) == 0
    assert bar_window(circle, 3) == -1
    assert resolution_window(interval, 1) is None


def test_dual_dga_on_sphere():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        d = dual_dga_B(adga("sphere2", "F2"), 1)
    d.verify()
    assert d.simply_connected
    assert d.window_lo == -1
    assert d.window_dims() == {0: 1, -1: 1}


def test_dual_dga_warns_without_simple_connectivity():
    with pytest.warns(NotSimplyConnectedWarning):
        d = dual_dga_B(adga("circle3"), 1)
    assert not d.simply_connected


def test_dual_dga_rejects_zero_words():
    with pytest.raises(ValueError):
        dual_dga_B(adga("sphere2"), 0)


@pytest.mark.parametrize("name", ["interval", "sphere2"])
def test_endomorphisms_match_dual(name):
    e = endomorphism_dga_of_R(bar_resolution(adga(name), 2))
    assert not e.window_empty
    assert e.agree, e.comparison()


def test_endomorphisms_of_sphere_values():
    e = endomorphism_dga_of_R(bar_resolution(adga("sphere2"), 2))
    assert e.comparison() == {-2: (1, 1), -1: (1, 1), 0: (1, 1)}
    small = endomorphism_dga_of_R(bar_resolution(adga("sphere2"), 1), route="both")
    assert small.direct == small.cohomology
