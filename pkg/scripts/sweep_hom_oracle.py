#!/usr/bin/env python3
"""Randomized sweep: H(hom(E_P0, E_P1)) against the direct twisted-cohomology oracle.

Prints one row per (complex, field) with agreement counts and timings; optionally
dumps every trial to JSON.
"""

from __future__ import annotations

import argparse
import json
import random
import time
from dataclasses import asdict, dataclass, field
from typing import List, Optional

from cotangent.linalg import Field
from cotangent.local_systems import (
    build_module_EP,
    hom_complex,
    hom_system,
    random_flat_system,
    twisted_cohomology_oracle,
)
from cotangent.simplicial import BUILTIN, corpus_complex


@dataclass
class SweepConfig:
    trials: int = 5
    seed: int = 0
    max_rank: int = 3
    complexes: List[str] = field(default_factory=lambda: sorted(BUILTIN))
    fields: List[str] = field(default_factory=lambda: ["F3", "F7", "Q"])
    out: Optional[str] = None


def run(cfg: SweepConfig) -> List[dict]:
    rng = random.Random(cfg.seed)
    rows = []
    for name in cfg.complexes:
        k = corpus_complex(name)
        for spec in cfg.fields:
            f = Field.parse(spec)
            for t in range(cfg.trials):
                r0, r1 = rng.randint(1, cfg.max_rank), rng.randint(1, cfg.max_rank)
                p0, p1 = random_flat_system(k, f, r0, rng), random_flat_system(k, f, r1, rng)
                t0 = time.perf_counter()
                got = hom_complex(build_module_EP(p0), build_module_EP(p1)).cohomology()
                t1 = time.perf_counter()
                want = twisted_cohomology_oracle(hom_system(p0, p1))
                t2 = time.perf_counter()
                rows.append({
                    "complex": name, "field": spec, "trial": t, "ranks": [r0, r1],
                    "module": {str(n): d for n, d in sorted(got.items())},
                    "oracle": {str(n): d for n, d in sorted(want.items())},
                    "match": got == want, "module_s": round(t1 - t0, 4), "oracle_s": round(t2 - t1, 4),
                })
    return rows


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-rank", type=int, default=3)
    ap.add_argument("--out", help="write all trials as JSON")
    a = ap.parse_args(argv)
    cfg = SweepConfig(trials=a.trials, seed=a.seed, max_rank=a.max_rank, out=a.out)
    rows = run(cfg)
    print(f"{'complex':<10}{'field':<6}{'match':>8}{'module s':>10}{'oracle s':>10}")
    keys = sorted({(r["complex"], r["field"]) for r in rows})
    for key in keys:
        sel = [r for r in rows if (r["complex"], r["field"]) == key]
        ok = sum(r["match"] for r in sel)
        print(f"{key[0]:<10}{key[1]:<6}{ok:>5}/{len(sel):<2}"
              f"{sum(r['module_s'] for r in sel):>10.3f}{sum(r['oracle_s'] for r in sel):>10.3f}")
    if cfg.out:
        with open(cfg.out, "w") as fh:
            json.dump({"config": asdict(cfg), "trials": rows}, fh, indent=2, sort_keys=True)
    return 0 if all(r["match"] for r in rows) else 1


if __name__ == "__main__":
    raise SystemExit(main())
