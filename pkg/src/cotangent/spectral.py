"""Spectral sequences of finite filtered complexes, by explicit subquotients.

Bigrading: ``p`` is the filtration level, ``q = n - p``; ``d_r`` has bidegree
``(r, 1 - r)``.  Pages start at ``r = 0`` (the associated graded).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .linalg import (
    ChainComplex,
    Echelon,
    GradedDims,
    InvariantError,
    Row,
    clean_dims,
    complex_cohomology,
    kernel,
    sign,
)
from .local_systems import HomComplex, LocalSystem, hom_system, twisted_cohomology_bigraded

Cell = Tuple[int, int]


@dataclass
class FilteredComplex:
    """``levels[n][j]`` is the filtration level of basis vector j in degree n.

    F^p C^n is spanned by the basis vectors of level >= p.
    """

    complex: ChainComplex
    levels: Dict[int, List[int]]

    def check(self) -> None:
        c = self.complex
        c.check()
        for n in c.degrees():
            lv, lv1 = self.levels.get(n, []), self.levels.get(n + 1, [])
            for r, row in enumerate(c.d(n).rows):
                for j in row:
                    if lv1[r] < lv[j]:
                        raise InvariantError("differential lowers filtration", (n, j))

    def level_range(self) -> Tuple[int, int]:
        vals = [x for v in self.levels.values() for x in v]
        return (min(vals), max(vals)) if vals else (0, 0)


@dataclass
class Page:
    r: int
    cells: Dict[Cell, int]
    diffs: Dict[Cell, int]          # rank of d_r leaving the cell

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "cells": {f"{p},{q}": d for (p, q), d in sorted(self.cells.items())},
            "diffs": [[p, q, k] for (p, q), k in sorted(self.diffs.items()) if k],
        }


@dataclass
class SpectralSequence:
    pages: List[Page]
    e_infinity: Dict[Cell, int]
    abutment: GradedDims

    def page(self, r: int) -> Page:
        for pg in self.pages:
            if pg.r == r:
                return pg
        if r > self.pages[-1].r:
            return Page(r, dict(self.e_infinity), {})
        raise KeyError(r)

    def to_json(self) -> dict:
        return {
            "pages": [pg.to_json() for pg in self.pages],
            "e_infinity": {f"{p},{q}": d for (p, q), d in sorted(self.e_infinity.items())},
            "abutment": {str(n): d for n, d in sorted(self.abutment.items())},
        }


class _Subspaces:
    """Subspace bases of C^n used by the subquotient formulas, with caching."""

    def __init__(self, fc: FilteredComplex):
        self.fc = fc
        self.c = fc.complex
        self.f = self.c.field
        self._z: Dict[Tuple[int, int, int], List[Row]] = {}

    def F(self, p: int, n: int) -> List[int]:
        return [j for j, lv in enumerate(self.fc.levels.get(n, [])) if lv >= p]

    def Z(self, r: int, p: int, n: int) -> List[Row]:
        """x in F^p C^n with dx in F^{p+r} C^{n+1}."""
        key = (r, p, n)
        if key in self._z:
            return self._z[key]
        cols = self.F(p, n)
        low_rows = [i for i, lv in enumerate(self.fc.levels.get(n + 1, [])) if lv < p + r]
        if not cols:
            out = []
        else:
            m = self.c.d(n).block(low_rows, cols)
            out = [{cols[j]: x for j, x in v.items()} for v in kernel(m)]
        self._z[key] = out
        return out

    def B(self, r: int, p: int, n: int) -> List[Row]:
        """d(Z_r^{p-r, n-1}), the boundaries entering F^p from r levels down."""
        d = self.c.d(n - 1)
        return [d.apply(v) for v in self.Z(r, p - r, n - 1)]

    def dim_sum(self, *spaces: Sequence[Row]) -> int:
        e = Echelon(self.f)
        for sp in spaces:
            for v in sp:
                if v:
                    e.insert(v)
        return e.rank

    def denominator(self, r: int, p: int, n: int) -> List[Row]:
        return list(self.Z(r - 1, p + 1, n)) + list(self.B(r - 1, p, n))

    def dim_E(self, r: int, p: int, n: int) -> int:
        if r == 0:
            return len(self.F(p, n)) - len(self.F(p + 1, n))
        num = self.Z(r, p, n)
        den = self.denominator(r, p, n)
        return self.dim_sum(num, den) - self.dim_sum(den)

    def rank_d(self, r: int, p: int, n: int) -> int:
        """Rank of d_r : E_r^{p, n} -> E_r^{p+r, n+1}."""
        d = self.c.d(n)
        if r == 0:
            num = [d.apply({j: self.f.one()}) for j in self.F(p, n)]
            den = [{j: self.f.one()} for j in self.F(p + 1, n + 1)]
            return self.dim_sum(num, den) - self.dim_sum(den)
        img = [d.apply(v) for v in self.Z(r, p, n)]
        den = self.denominator(r, p + r, n + 1)
        return self.dim_sum(img, den) - self.dim_sum(den)


def run_spectral_sequence(fc: FilteredComplex) -> SpectralSequence:
    fc.check()
    c = fc.complex
    sub = _Subspaces(fc)
    lo, hi = fc.level_range()
    degs = c.degrees()
    pages: List[Page] = []
    last = hi - lo + 1          # d_r vanishes for r > hi - lo
    for r in range(0, last + 1):
        cells, diffs = {}, {}
        for n in degs:
            for p in range(lo, hi + 1):
                d = sub.dim_E(r, p, n)
                if d:
                    cells[(p, n - p)] = d
                    k = sub.rank_d(r, p, n)
                    if k:
                        diffs[(p, n - p)] = k
        pages.append(Page(r, cells, diffs))
    _check_pages(pages)
    einf = dict(pages[-1].cells)
    abut = complex_cohomology(c, check=False)
    for n in set(abut) | {p + q for p, q in einf}:
        tot = sum(d for (p, q), d in einf.items() if p + q == n)
        if tot != abut.get(n, 0):
            raise InvariantError("spectral sequence does not converge to H(total)", n)
    # drop trailing pages identical to E_infinity with zero differentials
    while len(pages) > 2 and not pages[-1].diffs and not pages[-2].diffs and pages[-1].cells == pages[-2].cells:
        pages.pop()
    return SpectralSequence(pages, einf, abut)


def _check_pages(pages: List[Page]) -> None:
    """dim E_{r+1} = dim E_r - rank(d_r in) - rank(d_r out), cell by cell."""
    for a, b in zip(pages, pages[1:]):
        r = a.r
        for (p, q), d in a.cells.items():
            incoming = a.diffs.get((p - r, q + r - 1), 0)
            outgoing = a.diffs.get((p, q), 0)
            if b.cells.get((p, q), 0) != d - incoming - outgoing:
                raise InvariantError("E_{r+1} != H(E_r, d_r)", (r, p, q))
        for cell in b.cells:
            if cell not in a.cells:
                raise InvariantError("cell appeared from nowhere", (r, cell))


def cech_filtration(h) -> FilteredComplex:
    """Filter a hom complex by how far its maps raise Cech degree."""
    if not isinstance(h, HomComplex):
        raise ValueError("missing Cech bookkeeping: pass the HomComplex from hom_complex")
    return FilteredComplex(h.complex, {k: list(v) for k, v in h.cech_shift.items()})


@dataclass
class E2Report:
    match: bool
    e2: Dict[Cell, int]
    oracle: Dict[Cell, int]
    mismatches: List[Cell]


def compare_E2_twisted(ss: SpectralSequence, p0: LocalSystem, p1: LocalSystem) -> E2Report:
    """dim E_2^{r,s} against dim H^r(Z; Hom^s(P0, P1)) from the direct oracle."""
    if p0.base != p1.base:
        raise ValueError("provenance mismatch: systems on different bases")
    e2 = dict(ss.page(2).cells)
    oracle = twisted_cohomology_bigraded(hom_system(p0, p1))
    oracle = {k: v for k, v in oracle.items() if v}
    bad = sorted(set(e2) ^ set(oracle) | {k for k in e2 if k in oracle and e2[k] != oracle[k]})
    return E2Report(not bad, e2, oracle, bad)


# -- the corner argument ---------------------------------------------------------------


def end_dims(v: Mapping[int, int]) -> GradedDims:
    """Graded dims of End(V): End^s = sum_d dim V_d * dim V_{d+s}."""
    out: Dict[int, int] = {}
    for a, x in v.items():
        for b, y in v.items():
            out[b - a] = out.get(b - a, 0) + x * y
    return clean_dims(out)


@dataclass
class CornerVerdict:
    consistent: bool
    rank_forced: Optional[int]
    corners: List[Cell]
    survival: List[str]
    deduction: List[str]
    euler_characteristic: int
    degree_label: str
    box: Dict[Cell, int]

    def summary(self) -> str:
        if self.consistent:
            return f"consistent: rank {self.rank_forced} forced"
        return "contradiction: " + self.deduction[-1]


def corner_argument(base_dims: Sequence[int], fiber_dims: Mapping[int, int], abutment_h0: int,
                    base_top_degree: Optional[int] = None) -> CornerVerdict:
    """Replay the corner/degree deduction on a box H^*(Z) (x) End(V).

    ``base_dims[r]`` is dim H^r(Z) for r = 0..n.  The abutment is assumed to
    live in total degrees [0, n] with dim H^0 = ``abutment_h0``.
    """
    n = len(base_dims) - 1 if base_top_degree is None else base_top_degree
    base = {r: d for r, d in enumerate(base_dims) if d}
    v = clean_dims(fiber_dims)
    if not v:
        raise ValueError("fiber must be nonzero")
    if base.get(0, 0) != 1 or base.get(n, 0) != 1 or max(base) != n:
        raise ValueError("box is not of product form with one-dimensional H^0 and H^n")
    end = end_dims(v)
    box = {(r, s): a * b for r, a in base.items() for s, b in end.items()}
    s_min, s_max = min(end), max(end)
    corners = [(0, s_min), (n, s_max)]
    survival = []
    for (p, q) in corners:
        for r in range(2, n + 2):
            src_in = (p - r, q + r - 1)
            tgt_out = (p + r, q - r + 1)
            if box.get(src_in, 0) or box.get(tgt_out, 0):
                raise InvariantError("corner is not isolated", (p, q, r))
            survival.append(f"E_{r}: nothing enters ({p},{q}) from {src_in} and nothing leaves to {tgt_out}")
    deduction = []
    chi = sum(sign(d) * x for d, x in v.items())
    label = f"projection degree +-1 = +-chi(V) = {chi:+d}"
    lo_deg, hi_deg = 0 + s_min, n + s_max
    deduction.append(f"corner (0,{s_min}) survives in total degree {lo_deg}; corner ({n},{s_max}) in total degree {hi_deg}")
    if lo_deg < 0:
        deduction.append(f"corner degree s_min={s_min} escapes window [0,{n}] at position (0,{s_min})")
        return CornerVerdict(False, None, corners, survival, deduction, chi, label, box)
    if hi_deg > n:
        deduction.append(f"corner degree s_max={s_max} escapes window [0,{n}] at position ({n},{s_max})")
        return CornerVerdict(False, None, corners, survival, deduction, chi, label, box)
    (deg, dim_v), = v.items()
    deduction.append(f"V is concentrated in degree {deg}")
    corner_dim = box[(0, 0)]
    if corner_dim > abutment_h0:
        deduction.append(f"surviving corner (0,0) has dim {corner_dim} > {abutment_h0} = dim H^0 of the abutment")
        return CornerVerdict(False, None, corners, survival, deduction, chi, label, box)
    deduction.append(f"dim V^2 = {corner_dim} <= {abutment_h0} forces dim V = {dim_v}")
    return CornerVerdict(True, dim_v, corners, survival, deduction, chi, label, box)
