"""Reduced simplicial sets and the cobar construction on their normalized chains.

A simplex is stored as ``(degs, cell)``: the degeneracy word ``s_{i1} .. s_{ik}``
with ``i1 > .. > ik`` applied to a nondegenerate cell.  Normalized chains
discard every degenerate simplex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .linalg import ChainComplex, Field, InvariantError, Matrix, complex_cohomology, sign
from .simplicial import SimplicialComplex

Simp = Tuple[Tuple[int, ...], str]


def normalize_degeneracies(word: Sequence[int]) -> Tuple[int, ...]:
    """Rewrite a composite of degeneracies (outermost first) into strictly decreasing form."""
    w = list(word)
    changed = True
    while changed:
        changed = False
        for t in range(len(w) - 1):
            a, b = w[t], w[t + 1]
            if a <= b:              # s_a s_b = s_{b+1} s_a
                w[t], w[t + 1] = b + 1, a
                changed = True
    return tuple(w)


@dataclass
class ReducedSimplicialSet:
    """One vertex plus nondegenerate cells; ``faces[c][j]`` is d_j of cell c as ``(degs, cell)``."""

    dims: Dict[str, int]
    faces: Dict[str, List[Simp]]
    name: str = ""
    vertex: str = field(init=False)

    def __post_init__(self):
        zero = [c for c, n in self.dims.items() if n == 0]
        if len(zero) != 1:
            raise ValueError(f"not reduced: {len(zero)} vertices")
        self.vertex = zero[0]

    def cells(self, n: int) -> List[str]:
        return sorted(c for c, d in self.dims.items() if d == n)

    @property
    def dimension(self) -> int:
        return max(self.dims.values())

    def simplex_dim(self, s: Simp) -> int:
        return self.dims[s[1]] + len(s[0])

    def face(self, j: int, s: Simp) -> Simp:
        degs, cell = s
        prefix: List[int] = []
        for t, i in enumerate(degs):
            if j < i:
                prefix.append(i - 1)
            elif j in (i, i + 1):
                return normalize_degeneracies(prefix + list(degs[t + 1:])), cell
            else:
                prefix.append(i)
                j -= 1
        if self.dims[cell] == 0:
            raise InvariantError("face of a vertex", cell)
        fdegs, fcell = self.faces[cell][j]
        return normalize_degeneracies(prefix + list(fdegs)), fcell

    def validate(self) -> None:
        for c, n in self.dims.items():
            if n == 0:
                continue
            fs = self.faces.get(c, [])
            if len(fs) != n + 1:
                raise InvariantError("wrong number of faces", c)
            for j, s in enumerate(fs):
                if s[1] not in self.dims or self.simplex_dim(s) != n - 1:
                    raise InvariantError("face has wrong dimension", (c, j))
            x: Simp = ((), c)
            for i in range(n + 1):
                for j in range(i + 1, n + 1):
                    if n >= 2 and self.face(i, self.face(j, x)) != self.face(j - 1, self.face(i, x)):
                        raise InvariantError("simplicial identity d_i d_j = d_{j-1} d_i fails", (c, i, j))

    # -- normalized chains ------------------------------------------------------
    def boundary(self, c: str) -> Dict[str, int]:
        out: Dict[str, int] = {}
        x: Simp = ((), c)
        for j in range(self.dims[c] + 1):
            degs, y = self.face(j, x)
            if not degs and self.dims[y] > 0:
                out[y] = out.get(y, 0) + sign(j)
        return {k: v for k, v in out.items() if v}

    def front(self, c: str, i: int) -> Simp:
        x: Simp = ((), c)
        for j in range(self.dims[c], i, -1):
            x = self.face(j, x)
        return x

    def back(self, c: str, i: int) -> Simp:
        x: Simp = ((), c)
        for _ in range(i):
            x = self.face(0, x)
        return x

    def reduced_coproduct(self, c: str) -> List[Tuple[str, str]]:
        """Alexander-Whitney terms x' (x) x'' with both factors of positive dimension."""
        n = self.dims[c]
        out = []
        for i in range(1, n):
            a, b = self.front(c, i), self.back(c, i)
            if not a[0] and not b[0]:
                out.append((a[1], b[1]))
        return out

    def to_json(self) -> dict:
        cells = []
        for c in sorted(self.dims, key=lambda x: (self.dims[x], x)):
            cells.append({
                "id": c,
                "dim": self.dims[c],
                "faces": [{"deg_word": list(d), "cell": y} for d, y in self.faces.get(c, [])],
            })
        return {"name": self.name, "cells": cells}


def sset_from_json(data) -> ReducedSimplicialSet:
    if isinstance(data, str):
        return builtin_sset(data)
    dims, faces = {}, {}
    for cell in data["cells"]:
        cid = str(cell["id"])
        dims[cid] = int(cell["dim"])
        faces[cid] = [(normalize_degeneracies(f["deg_word"]), str(f["cell"])) for f in cell.get("faces", [])]
    s = ReducedSimplicialSet(dims, faces, data.get("name", ""))
    s.validate()
    return s


def sphere_sset(n: int, copies: int = 1, name: str = "") -> ReducedSimplicialSet:
    """Delta[n]/boundary, or a wedge of several copies."""
    if n < 1:
        raise ValueError("sphere dimension must be >= 1")
    collapsed = tuple(range(n - 2, -1, -1))
    dims = {"v": 0}
    faces: Dict[str, List[Simp]] = {"v": []}
    for k in range(copies):
        c = f"x{k}" if copies > 1 else "x"
        dims[c] = n
        faces[c] = [(collapsed, "v")] * (n + 1)
    s = ReducedSimplicialSet(dims, faces, name)
    s.validate()
    return s


def collapse_skeleton(k: SimplicialComplex, q: int, name: str = "") -> ReducedSimplicialSet:
    """K / K^(q): simplices of dimension > q survive, everything else becomes the base point."""
    dims = {"v": 0}
    faces: Dict[str, List[Simp]] = {"v": []}

    def cid(s) -> str:
        return "-".join(map(str, s))

    for s in k.all_simplices():
        n = len(s) - 1
        if n <= q:
            continue
        dims[cid(s)] = n
        fs = []
        for j in range(n + 1):
            t = s[:j] + s[j + 1:]
            if len(t) - 1 > q:
                fs.append(((), cid(t)))
            else:
                fs.append((tuple(range(n - 2, -1, -1)), "v"))
        faces[cid(s)] = fs
    out = ReducedSimplicialSet(dims, faces, name or f"{k.name}/sk{q}")
    out.validate()
    return out


BUILTIN_SSETS = {
    "sphere2_min": lambda: sphere_sset(2, 1, "sphere2_min"),
    "sphere3_min": lambda: sphere_sset(3, 1, "sphere3_min"),
    "wedge_s2_s2": lambda: sphere_sset(2, 2, "wedge_s2_s2"),
}


def builtin_sset(name: str) -> ReducedSimplicialSet:
    if name not in BUILTIN_SSETS:
        raise KeyError(f"unknown simplicial set {name!r}")
    return BUILTIN_SSETS[name]()


# -- cobar ---------------------------------------------------------------------------


@dataclass
class LoopHomologyTable:
    """H of the cobar construction in cohomological degrees 0 .. -depth."""

    name: str
    depth: int
    dims: Dict[int, int]
    safe: Dict[int, bool]

    def row(self) -> List[int]:
        return [self.dims.get(-k, 0) for k in range(self.depth + 1)]

    def to_json(self) -> dict:
        return {
            "sset": self.name,
            "depth": self.depth,
            "dims": {str(n): self.dims.get(n, 0) for n in range(0, -self.depth - 1, -1)},
            "safe": {str(n): self.safe[n] for n in range(0, -self.depth - 1, -1)},
        }


class Cobar:
    """Omega C: tensor words in desuspended cells of dimension >= 2."""

    def __init__(self, s: ReducedSimplicialSet, f: Field):
        if s.cells(1):
            raise ValueError("cells of dimension 1 make the cobar construction infinite in each degree")
        self.s, self.f = s, f
        self.gens = [c for c in sorted(s.dims, key=lambda x: (s.dims[x], x)) if s.dims[c] >= 2]
        self.gdeg = {c: s.dims[c] - 1 for c in self.gens}

    def degree(self, word: Tuple[str, ...]) -> int:
        return sum(self.gdeg[c] for c in word)

    def words(self, n: int) -> List[Tuple[str, ...]]:
        """Words of homological degree exactly n."""
        out: List[Tuple[str, ...]] = []

        def grow(prefix, left):
            if left == 0:
                out.append(prefix)
                return
            for c in self.gens:
                if self.gdeg[c] <= left:
                    grow(prefix + (c,), left - self.gdeg[c])

        grow((), n)
        return out

    def d_gen(self, c: str) -> Dict[Tuple[str, ...], int]:
        """d(s^-1 x) = -s^-1 dx + sum (-1)^{|x'|} s^-1 x' (x) s^-1 x''."""
        out: Dict[Tuple[str, ...], int] = {}
        for y, v in self.s.boundary(c).items():
            out[(y,)] = out.get((y,), 0) - v
        for a, b in self.s.reduced_coproduct(c):
            k = (a, b)
            out[k] = out.get(k, 0) + sign(self.s.dims[a])
        return {k: v for k, v in out.items() if v}

    def d(self, word: Tuple[str, ...]) -> Dict[Tuple[str, ...], int]:
        out: Dict[Tuple[str, ...], int] = {}
        sign = 1
        for j, c in enumerate(word):
            for k, v in self.d_gen(c).items():
                w2 = word[:j] + k + word[j + 1:]
                out[w2] = out.get(w2, 0) + sign * v
            if self.gdeg[c] % 2:
                sign = -sign
        return {k: v for k, v in out.items() if self.f.norm(v) != 0}

    def complex(self, depth: int) -> ChainComplex:
        """Cohomological grading m = -n, with degrees 0 .. -(depth+1)."""
        f = self.f
        basis = {-n: self.words(n) for n in range(depth + 2)}
        index = {m: {w: j for j, w in enumerate(ws)} for m, ws in basis.items()}
        dims = {m: len(ws) for m, ws in basis.items()}
        diffs = {}
        for m, ws in basis.items():
            if m + 1 not in basis:
                continue
            mat = Matrix(f, dims[m + 1], dims[m])
            for j, w in enumerate(ws):
                for w2, v in self.d(w).items():
                    mat.add_entry(index[m + 1][w2], j, v)
            diffs[m] = mat
        return ChainComplex(f, dims, diffs, labels=basis)


def cobar_of_sset(s: ReducedSimplicialSet, depth: int, f: Optional[Field] = None) -> LoopHomologyTable:
    """Loop-space homology in degrees 0 .. -depth from the cobar construction (exact)."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    f = f or Field()
    s.validate()
    c = Cobar(s, f).complex(depth)
    c.check()
    h = complex_cohomology(c, check=False)
    dims = {-k: h.get(-k, 0) for k in range(depth + 1)}
    # degree -depth-1 lacks its incoming differential, so it is excluded
    return LoopHomologyTable(s.name, depth, dims, {n: True for n in dims})
