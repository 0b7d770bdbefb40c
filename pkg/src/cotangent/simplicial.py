"""Finite simplicial complexes with totally ordered vertices, plus a corpus."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple

from .linalg import Field, GradedDims, Matrix, clean_dims, rank, sign

Simplex = Tuple[int, ...]


@dataclass(frozen=True)
class SimplicialComplex:
    """Face-closed set of simplices, each a sorted tuple of vertex labels."""

    vertices: Tuple
    simplices: frozenset
    name: str = ""
    _by_dim: Dict[int, List[Simplex]] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        by_dim: Dict[int, List[Simplex]] = {}
        for s in self.simplices:
            by_dim.setdefault(len(s) - 1, []).append(s)
        for k in by_dim:
            by_dim[k].sort()
        object.__setattr__(self, "_by_dim", by_dim)

    @property
    def dimension(self) -> int:
        return max(self._by_dim) if self._by_dim else -1

    def cells(self, k: int) -> List[Simplex]:
        return self._by_dim.get(k, [])

    def all_simplices(self) -> List[Simplex]:
        """Every simplex, ordered by dimension then lexicographically."""
        return [s for k in sorted(self._by_dim) for s in self._by_dim[k]]

    def f_vector(self) -> Tuple[int, ...]:
        return tuple(len(self.cells(k)) for k in range(self.dimension + 1))

    def euler_characteristic(self) -> int:
        return sum(sign(k) * n for k, n in enumerate(self.f_vector()))

    def __contains__(self, s) -> bool:
        return tuple(sorted(s)) in self.simplices

    def edges(self) -> List[Simplex]:
        return self.cells(1)

    def components(self) -> List[List]:
        parent = {v: v for v in self.vertices}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for a, b in self.edges():
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
        comps: Dict = {}
        for v in self.vertices:
            comps.setdefault(find(v), []).append(v)
        return [sorted(c) for c in sorted(comps.values())]

    @property
    def is_connected(self) -> bool:
        return len(self.components()) == 1

    def to_json(self) -> dict:
        maximal = [list(s) for s in self.all_simplices() if not any(set(s) < set(t) for t in self.cells(len(s)))]
        return {"vertices": list(self.vertices), "maximal_simplices": maximal}


def build_complex(maximal_simplices: Iterable[Sequence], name: str = "") -> SimplicialComplex:
    """Face closure of the given simplices."""
    tops = [tuple(sorted(set(s))) for s in maximal_simplices]
    if not tops or any(len(s) == 0 for s in tops):
        raise ValueError("need a nonempty list of nonempty simplices")
    faces = set()
    for s in tops:
        for k in range(1, len(s) + 1):
            faces.update(combinations(s, k))
    verts = tuple(sorted({v for s in tops for v in s}))
    return SimplicialComplex(verts, frozenset(faces), name)


def _torus7():
    tris = []
    for i in range(7):
        tris.append((i, (i + 1) % 7, (i + 3) % 7))
        tris.append((i, (i + 2) % 7, (i + 3) % 7))
    return tris


def _grid_surface(n: int, flip: bool):
    """n x n grid of squares, columns glued straight, rows glued straight or flipped."""

    def v(i, j):
        i, j = i % n, j
        if j == n:
            j = 0
            if flip:
                i = (-i) % n
        return (j % n) * n + (i % n)

    tris = []
    for i in range(n):
        for j in range(n):
            a, b, c, d = v(i, j), v(i + 1, j), v(i, j + 1), v(i + 1, j + 1)
            tris.append((a, b, d))
            tris.append((a, c, d))
    return tris


_RP2_6 = [(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 1, 5),
          (1, 2, 4), (2, 3, 5), (1, 3, 4), (2, 4, 5), (1, 3, 5)]

BUILTIN = {
    "circle3": [(0, 1), (1, 2), (0, 2)],
    "sphere2": [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)],
    "torus7": _torus7(),
    "rp2_6": _RP2_6,
    "klein": _grid_surface(3, True),
    "interval": [(0, 1)],
}


def corpus_complex(name: str) -> SimplicialComplex:
    """Built-in complex by id; COTANGENT_CORPUS_DIR/<id>.json overrides."""
    override = os.environ.get("COTANGENT_CORPUS_DIR")
    if override:
        path = Path(override) / f"{name}.json"
        if path.exists():
            return complex_from_json(json.loads(path.read_text()), name)
    if name not in BUILTIN:
        raise KeyError(f"unknown corpus complex {name!r}")
    return build_complex(BUILTIN[name], name)


def complex_from_json(data, name: str = "") -> SimplicialComplex:
    if isinstance(data, str):
        return corpus_complex(data)
    k = build_complex(data["maximal_simplices"], name or data.get("name", ""))
    extra = set(data.get("vertices", [])) - set(k.vertices)
    if extra:
        faces = set(k.simplices) | {(v,) for v in extra}
        k = SimplicialComplex(tuple(sorted(set(k.vertices) | extra)), frozenset(faces), k.name)
    return k


def boundary_matrix(k: SimplicialComplex, n: int, f: Field) -> Matrix:
    """Simplicial boundary C_n -> C_{n-1} with the alternating face signs."""
    rows = {s: i for i, s in enumerate(k.cells(n - 1))}
    m = Matrix(f, len(k.cells(n - 1)), len(k.cells(n)))
    if n == 0:
        return m
    for j, s in enumerate(k.cells(n)):
        for pos in range(len(s)):
            m.add_entry(rows[s[:pos] + s[pos + 1:]], j, sign(pos))
    return m


def simplicial_cohomology_oracle(k: SimplicialComplex, f: Field) -> GradedDims:
    """Betti numbers from boundary-matrix ranks (cohomology = homology over a field)."""
    ranks = {n: rank(boundary_matrix(k, n, f)) for n in range(1, k.dimension + 2)}
    out = {}
    for n in range(k.dimension + 1):
        out[n] = len(k.cells(n)) - ranks.get(n, 0) - ranks.get(n + 1, 0)
    return clean_dims(out)


def spanning_tree(k: SimplicialComplex, root=None) -> List[Simplex]:
    """BFS spanning tree edges of the component of ``root`` (default min vertex)."""
    root = k.vertices[0] if root is None else root
    adj: Dict = {v: [] for v in k.vertices}
    for a, b in k.edges():
        adj[a].append(b)
        adj[b].append(a)
    seen, tree, queue = {root}, [], [root]
    while queue:
        v = queue.pop(0)
        for u in sorted(adj[v]):
            if u not in seen:
                seen.add(u)
                tree.append(tuple(sorted((v, u))))
                queue.append(u)
    return tree


def certify_simply_connected(k: SimplicialComplex) -> bool:
    """True only if the edge-path group is shown trivial by killing generators one relation at a time.

    False means "not certified", which includes every non-simply-connected complex.
    """
    if not k.is_connected:
        return False
    trivial = set(spanning_tree(k))
    rels = [[(a, b), (b, c), (a, c)] for a, b, c in k.cells(2)]
    changed = True
    while changed:
        changed = False
        for rel in rels:
            unknown = [e for e in rel if e not in trivial]
            if len(unknown) == 1:
                trivial.add(unknown[0])
                changed = True
    return all(e in trivial for e in k.edges())
