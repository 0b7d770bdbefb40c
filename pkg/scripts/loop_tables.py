#!/usr/bin/env python3
"""Loop-space homology rows from the cobar construction.

Covers the built-in minimal simplicial sets and the quotients K / K^(1) of the
corpus complexes (which are reduced with no 1-cells, so the cobar complex is
finite in each degree).
"""

from __future__ import annotations

import argparse
import time
from dataclasses import dataclass

from cotangent.cobar import BUILTIN_SSETS, builtin_sset, cobar_of_sset, collapse_skeleton
from cotangent.linalg import Field
from cotangent.simplicial import BUILTIN, corpus_complex


@dataclass
class TableConfig:
    depth: int = 3
    field: str = "Q"


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--depth", type=int, default=3)
    ap.add_argument("--field", default="Q")
    a = ap.parse_args(argv)
    cfg = TableConfig(a.depth, a.field)
    f = Field.parse(cfg.field)
    ssets = [builtin_sset(n) for n in sorted(BUILTIN_SSETS)]
    for name in sorted(BUILTIN):
        k = corpus_complex(name)
        if k.dimension >= 2:
            ssets.append(collapse_skeleton(k, 1))
    print(f"H_*(Omega X; {cfg.field}) in homological degrees 0..{cfg.depth}")
    for s in ssets:
        t0 = time.perf_counter()
        row = cobar_of_sset(s, cfg.depth, f).row()
        dt = time.perf_counter() - t0
        print(f"  {s.name:<16} " + " ".join(f"{d:>5}" for d in row) + f"   ({dt:.2f}s)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
