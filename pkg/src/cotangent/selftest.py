"""Quick invariant suite over every module, used by ``cotangent selftest``."""

from __future__ import annotations

import random
import warnings
from typing import Callable, List, Tuple

from .linalg import Field, Matrix, kernel, rank, solve

Check = Tuple[str, Callable[[random.Random], str]]


def _linalg(rng: random.Random) -> str:
    for p in (2, 3, 7, None):
        f = Field(p)
        for _ in range(5):
            r, c = rng.randint(1, 6), rng.randint(1, 6)
            m = Matrix.from_dense(f, [[f(rng.randint(-3, 3)) for _ in range(c)] for _ in range(r)])
            ker = kernel(m)
            assert rank(m) + len(ker) == c, "rank-nullity"
            assert all(not m.apply(v) for v in ker), "kernel vectors"
            b = m.apply({j: f(rng.randint(-2, 2)) for j in range(c)})
            x = solve(m, b)
            assert x is not None and m.apply(x) == b, "solve"
    return "rank-nullity, kernels and solves over F2, F3, F7, Q"


def _cech(rng: random.Random) -> str:
    from .cech import build_cech_dga, dga_cohomology
    from .simplicial import BUILTIN, corpus_complex, simplicial_cohomology_oracle
    for name in sorted(BUILTIN):
        for spec in ("F2", "Q"):
            f = Field.parse(spec)
            k = corpus_complex(name)
            c = build_cech_dga(k, f)
            c.verify()
            assert dga_cohomology(c)[0] == simplicial_cohomology_oracle(k, f), (name, spec)
    return "dga identities and H vs oracle on the corpus over F2, Q"


def _local(rng: random.Random) -> str:
    from .local_systems import build_module_EP, hom_complex, random_flat_system, twisted_cohomology_oracle, hom_system
    from .simplicial import corpus_complex
    for _ in range(3):
        k = corpus_complex(rng.choice(["circle3", "torus7", "sphere2"]))
        f = Field.parse(rng.choice(["F3", "F7", "Q"]))
        p0 = random_flat_system(k, f, rng.randint(1, 2), rng)
        p1 = random_flat_system(k, f, rng.randint(1, 2), rng)
        h = hom_complex(build_module_EP(p0), build_module_EP(p1))
        assert h.cohomology() == twisted_cohomology_oracle(hom_system(p0, p1)), k.name
    return "H(hom(E_P0, E_P1)) = H(Z; Hom(P0, P1)) on 3 random pairs"


def _spectral(rng: random.Random) -> str:
    from .local_systems import build_module_EP, circle_system, hom_complex, torus_system
    from .spectral import cech_filtration, compare_E2_twisted, corner_argument, run_spectral_sequence
    f = Field.parse("F7")
    for p in (circle_system(f, 2), torus_system(f, 2, 3)):
        h = hom_complex(build_module_EP(p), build_module_EP(p))
        ss = run_spectral_sequence(cech_filtration(h))
        assert compare_E2_twisted(ss, p, p).match
    assert corner_argument([1, 0, 1], {0: 1}, 1).consistent
    assert not corner_argument([1, 0, 1], {0: 2}, 1).consistent
    assert not corner_argument([1, 0, 0, 1], {0: 1, 1: 1}, 1).consistent
    return "E_2 vs oracle on circle3 and torus7; three corner verdicts"


def _bar(rng: random.Random) -> str:
    from .bar import AugmentedDga, bar_resolution, dual_dga_B, resolution_is_simple
    from .cech import build_cech_dga
    from .simplicial import corpus_complex
    for name in ("interval", "sphere2", "circle3"):
        a = AugmentedDga.of(build_cech_dga(corpus_complex(name), Field.parse("Q")))
        assert resolution_is_simple(bar_resolution(a, 2)), name
    a = AugmentedDga.of(build_cech_dga(corpus_complex("sphere2"), Field.parse("F2")))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        d = dual_dga_B(a, 1)
    d.verify()
    return "H(R_2) = K on interval, sphere2, circle3; dual dga identities"


def _cobar(rng: random.Random) -> str:
    from .cobar import builtin_sset, cobar_of_sset
    assert cobar_of_sset(builtin_sset("sphere2_min"), 3).row() == [1, 1, 1, 1]
    assert cobar_of_sset(builtin_sset("sphere3_min"), 4).row() == [1, 0, 1, 0, 1]
    assert cobar_of_sset(builtin_sset("wedge_s2_s2"), 2).row() == [1, 2, 4]
    return "loop-space rows for S^2, S^3, S^2 v S^2"


def _exceptional(rng: random.Random) -> str:
    from .exceptional import (check_exceptional, koszul_dual_collection, linear_quiver, postnikov_tower,
                              projective_collection, random_object, tower_spectral_sequence)
    for n in (2, 3):
        a = linear_quiver(n)
        c = projective_collection(a)
        assert check_exceptional(c)["certified"]
        d = koszul_dual_collection(c)
        for _ in range(2):
            x = random_object(a, rng)
            t = postnikov_tower(c, x, d)
            ts = tower_spectral_sequence(t, d)
            assert t.full and ts.e1_match and ts.abutment_match
    return "A2, A3: certificates, dual orthogonality, towers and tower spectral sequences"


def _covers(rng: random.Random) -> str:
    from .covers import build_cover, ext_group_module, monodromy_image, pullback_local_system, trivial_group_module
    from .local_systems import circle_system
    p = circle_system(Field.parse("F7"), 2)
    c = build_cover(p, monodromy_image(p))
    assert len(c.total.vertices) == 9 and pullback_local_system(c, p).trivial
    t = trivial_group_module("Zn", Field.parse("Q"), n=2)
    assert ext_group_module(t, t, 2) == {0: 1, 1: 2, 2: 1}
    return "order-3 cover of circle3 trivializes its system; Ext over Z^2"


CHECKS: List[Check] = [
    ("exact-linalg", _linalg),
    ("simplicial-cech", _cech),
    ("local-systems", _local),
    ("spectral", _spectral),
    ("bar", _bar),
    ("cobar", _cobar),
    ("exceptional", _exceptional),
    ("covers-groups", _covers),
]


def run_selftest(seed: int = 0) -> List[Tuple[str, bool, str]]:
    out = []
    for name, fn in CHECKS:
        rng = random.Random(f"{seed}:{name}")
        try:
            out.append((name, True, fn(rng)))
        except Exception as exc:        # report and keep going
            out.append((name, False, f"{type(exc).__name__}: {exc}"))
    return out
