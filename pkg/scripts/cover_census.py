#!/usr/bin/env python3
"""Finite monodromy images and their Galois covers for random systems over F_p."""

from __future__ import annotations

import argparse
import random
from dataclasses import dataclass

from cotangent.covers import build_cover, monodromy_image, pullback_local_system
from cotangent.linalg import Field
from cotangent.local_systems import circle_system, random_invertible, torus_system


@dataclass
class CoverConfig:
    trials: int = 8
    seed: int = 0
    field: str = "F5"
    rank: int = 2


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--field", default="F5")
    ap.add_argument("--rank", type=int, default=2)
    a = ap.parse_args(argv)
    cfg = CoverConfig(a.trials, a.seed, a.field, a.rank)
    rng = random.Random(cfg.seed)
    f = Field.parse(cfg.field)
    print(f"{'base':<8}{'order':>6}{'vertices':>10}{'chi':>6}  pullback")
    for t in range(cfg.trials):
        a_m = random_invertible(f, cfg.rank, rng)
        if t % 2 == 0:
            p = circle_system(f, a_m.to_dense())
        else:
            # commuting pair: a power of the first matrix
            b_m = a_m
            for _ in range(rng.randint(0, 3)):
                b_m = b_m @ a_m
            p = torus_system(f, a_m.to_dense(), b_m.to_dense())
        g = monodromy_image(p)
        if not g.finite:
            print(f"{p.base.name:<8}{'inf':>6}")
            continue
        c = build_cover(p, g)
        pb = pullback_local_system(c, p)
        s = c.summary()
        print(f"{p.base.name:<8}{s['degree']:>6}{s['vertices']:>10}{s['euler_cover']:>6}  "
              f"{'trivial' if pb.trivial else 'nontrivial at ' + str(pb.obstruction)}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
