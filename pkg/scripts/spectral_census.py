#!/usr/bin/env python3
"""How often do higher differentials appear?

Runs the Cech spectral sequence of End(E_P) for random systems on the corpus, and
the tower spectral sequence for random objects over small directed algebras, and
counts the pages r >= 2 (Cech) or r >= 1 (tower) that carry a nonzero differential.
"""

from __future__ import annotations

import argparse
import random
from collections import Counter
from dataclasses import dataclass

from cotangent.exceptional import (
    commutative_square,
    koszul_dual_collection,
    linear_quiver,
    postnikov_tower,
    projective_collection,
    random_object,
    tower_spectral_sequence,
)
from cotangent.linalg import Field
from cotangent.local_systems import build_module_EP, hom_complex, random_flat_system
from cotangent.simplicial import BUILTIN, corpus_complex
from cotangent.spectral import cech_filtration, run_spectral_sequence


@dataclass
class CensusConfig:
    trials: int = 10
    seed: int = 0
    field: str = "F7"


def highest_page(ss, start: int) -> int:
    live = [pg.r for pg in ss.pages if pg.r >= start and pg.diffs]
    return max(live) if live else 0


def cech_census(cfg: CensusConfig) -> Counter:
    rng = random.Random(cfg.seed)
    f = Field.parse(cfg.field)
    out: Counter = Counter()
    for name in sorted(BUILTIN):
        k = corpus_complex(name)
        for _ in range(cfg.trials):
            p = random_flat_system(k, f, rng.randint(1, 2), rng)
            ss = run_spectral_sequence(cech_filtration(hom_complex(build_module_EP(p), build_module_EP(p))))
            out[(name, highest_page(ss, 2))] += 1
    return out


def tower_census(cfg: CensusConfig) -> Counter:
    rng = random.Random(cfg.seed)
    out: Counter = Counter()
    for label, alg in [("A3", linear_quiver(3)), ("A4", linear_quiver(4)), ("square", commutative_square())]:
        c = projective_collection(alg)
        d = koszul_dual_collection(c)
        for _ in range(cfg.trials):
            x = random_object(alg, rng, steps=4)
            ts = tower_spectral_sequence(postnikov_tower(c, x, d), d)
            assert ts.e1_match and ts.abutment_match
            out[(label, highest_page(ts.ss, 1))] += 1
    return out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--field", default="F7")
    a = ap.parse_args(argv)
    cfg = CensusConfig(a.trials, a.seed, a.field)
    print("Cech spectral sequence of End(P): last page with a nonzero d_r, r >= 2 (0 = degenerates at E_2)")
    for (name, r), n in sorted(cech_census(cfg).items()):
        print(f"  {name:<10} r={r}: {n}")
    print("tower spectral sequence: last page with a nonzero d_r, r >= 1 (0 = degenerates at E_1)")
    for (name, r), n in sorted(tower_census(cfg).items()):
        print(f"  {name:<10} r={r}: {n}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
