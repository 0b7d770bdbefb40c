"""Edge-path groups, finite covers killing monodromy, and Ext over group algebras.

Representations are never stored as abstract groups.  A flat system is gauged
along a spanning tree so that every tree edge carries the identity; the
remaining edge matrices generate the monodromy image inside GL(fiber at root).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .linalg import (
    ChainComplex,
    Field,
    GradedDims,
    InvariantError,
    Matrix,
    clean_dims,
    complex_cohomology,
    fmt,
    inverse,
    rank,
    sign,
)
from .local_systems import Edge, LocalSystem, _require_flat, gauge_transform
from .simplicial import SimplicialComplex, build_complex, spanning_tree

DEFAULT_CAP = 10 ** 4

Word = List[Tuple[int, int]]      # (generator index, +-1)


def _key(m: Matrix) -> Tuple:
    return tuple(tuple(m.field.norm(x) for x in row) for row in m.to_dense())


# -- edge paths ----------------------------------------------------------------------------


@dataclass
class EdgePathData:
    base: SimplicialComplex
    root: object
    tree: List[Edge]
    generators: List[Edge]
    relators: List[Word]
    tree_paths: Dict[object, List[Tuple[object, object]]]     # root -> v as a list of oriented steps

    def word_of_edge(self, i, j) -> Word:
        e = (min(i, j), max(i, j))
        if e not in self.generators:
            return []
        return [(self.generators.index(e), 1 if i < j else -1)]


def edge_path_data(k: SimplicialComplex, root=None) -> EdgePathData:
    if not k.is_connected:
        raise ValueError("base must be connected")
    root = k.vertices[0] if root is None else root
    tree = spanning_tree(k, root)
    gens = sorted(e for e in k.edges() if e not in set(tree))
    adj: Dict = {v: [] for v in k.vertices}
    for a, b in tree:
        adj[a].append(b)
        adj[b].append(a)
    paths = {root: []}
    queue = [root]
    while queue:
        v = queue.pop(0)
        for u in sorted(adj[v]):
            if u not in paths:
                paths[u] = paths[v] + [(v, u)]
                queue.append(u)
    data = EdgePathData(k, root, tree, gens, [], paths)
    for a, b, c in k.cells(2):
        w = data.word_of_edge(a, b) + data.word_of_edge(b, c) + data.word_of_edge(c, a)
        data.relators.append(w)
    return data


def tree_gauge(p: LocalSystem, e: Optional[EdgePathData] = None) -> Dict[object, Matrix]:
    """G_v = transport root -> v along the tree."""
    e = e or edge_path_data(p.base)
    out = {}
    for v, steps in e.tree_paths.items():
        m = Matrix.identity(p.field, p.rank(e.root))
        for a, b in steps:
            m = p.T(a, b) @ m
        out[v] = m
    return out


def gauged_edge_monodromy(p: LocalSystem, e: Optional[EdgePathData] = None) -> Dict[Edge, Matrix]:
    """M_ij = G_j^{-1} T_ij G_i, acting on the fiber at the root; identity on tree edges."""
    e = e or edge_path_data(p.base)
    g = tree_gauge(p, e)
    return {(i, j): inverse(g[j]) @ p.T(i, j) @ g[i] for (i, j) in p.base.edges()}


# -- monodromy image -------------------------------------------------------------------------


@dataclass
class MonodromyImage:
    elements: List[Matrix]
    finite: bool
    generators: List[Matrix]
    edge_elements: Dict[Edge, int] = field(default_factory=dict)

    @property
    def order(self) -> Optional[int]:
        return len(self.elements) if self.finite else None

    def index(self, m: Matrix) -> int:
        return self._index[_key(m)]

    def __post_init__(self):
        self._index = {_key(m): i for i, m in enumerate(self.elements)}

    def summary(self) -> dict:
        out = {"finite": self.finite, "order": self.order, "explored": len(self.elements)}
        if all(m.nrows == 1 for m in self.elements):
            out["scalars"] = sorted(fmt(m.to_dense()[0][0]) for m in self.elements)
        return out


def monodromy_image(p: LocalSystem, cap: int = DEFAULT_CAP) -> MonodromyImage:
    """Breadth-first closure of the tree-gauged edge monodromies, halted at ``cap`` elements."""
    _require_flat(p)
    e = edge_path_data(p.base)
    mono = gauged_edge_monodromy(p, e)
    gens = []
    seen_g = set()
    for edge in e.generators:
        m = mono[edge]
        if _key(m) not in seen_g and m != Matrix.identity(p.field, m.nrows):
            seen_g.add(_key(m))
            gens.append(m)
    one = Matrix.identity(p.field, p.rank(e.root))
    elements = [one]
    seen = {_key(one)}
    queue = [one]
    finite = True
    while queue:
        x = queue.pop(0)
        for g in gens:
            y = g @ x
            ky = _key(y)
            if ky in seen:
                continue
            if len(elements) >= cap:
                finite = False
                queue = []
                break
            seen.add(ky)
            elements.append(y)
            queue.append(y)
    img = MonodromyImage(elements, finite, gens)
    if finite:
        img.edge_elements = {edge: img.index(m) for edge, m in mono.items()}
    return img


# -- covers -----------------------------------------------------------------------------------


@dataclass
class CoverMap:
    base: SimplicialComplex
    total: SimplicialComplex
    group: MonodromyImage
    projection: Dict[int, object]
    sheet: Dict[int, int]                   # cover vertex -> group element index
    vertex_of: Dict[Tuple[object, int], int]

    @property
    def degree(self) -> int:
        return len(self.group.elements)

    def deck(self, h: int, v: int) -> int:
        """Right translation by group element h."""
        g = self.group.elements[self.sheet[v]] @ self.group.elements[h]
        return self.vertex_of[(self.projection[v], self.group.index(g))]

    def verify(self) -> None:
        if len(self.total.vertices) != self.degree * len(self.base.vertices):
            raise InvariantError("cover has the wrong number of vertices", len(self.total.vertices))
        for s in self.total.all_simplices():
            img = tuple(self.projection[v] for v in s)
            if len(set(img)) != len(img) or tuple(sorted(img)) not in self.base:
                raise InvariantError("projection is not simplicial", s)
        total = set(self.total.all_simplices())
        for h in range(self.degree):
            for s in total:
                t = tuple(sorted(self.deck(h, v) for v in s))
                if t not in total:
                    raise InvariantError("deck transformation is not simplicial", (h, s))
            if h != 0 and any(self.deck(h, v) == v for v in self.total.vertices):
                raise InvariantError("deck action is not free", h)
        if self.total.euler_characteristic() != self.degree * self.base.euler_characteristic():
            raise InvariantError("Euler characteristic is not multiplicative", self.total.euler_characteristic())

    def summary(self) -> dict:
        return {
            "degree": self.degree,
            "vertices": len(self.total.vertices),
            "f_vector": list(self.total.f_vector()),
            "euler_base": self.base.euler_characteristic(),
            "euler_cover": self.total.euler_characteristic(),
            "connected": self.total.is_connected,
        }


def build_cover(p: LocalSystem, g: Optional[MonodromyImage] = None) -> CoverMap:
    """Galois cover for the kernel of the monodromy: sheets are group elements, and
    crossing edge i -> j moves sheet x to M_ij x."""
    g = g or monodromy_image(p)
    if not g.finite:
        raise ValueError("monodromy image is infinite (or exceeded the cap); no finite cover")
    k = p.base
    order = len(g.elements)
    pos = {v: t for t, v in enumerate(k.vertices)}
    vertex_of = {(v, x): pos[v] * order + x for v in k.vertices for x in range(order)}
    proj = {n: v for (v, x), n in vertex_of.items()}
    sheet = {n: x for (v, x), n in vertex_of.items()}
    mono = {e: g.elements[i] for e, i in g.edge_elements.items()}
    tops = []
    for s in k.all_simplices():
        a = s[0]
        for x in range(order):
            lift = [vertex_of[(a, x)]]
            for v in s[1:]:
                y = g.index(mono[(a, v)] @ g.elements[x])
                lift.append(vertex_of[(v, y)])
            tops.append(tuple(lift))
    total = build_complex(tops, name=f"{k.name}~{order}")
    c = CoverMap(k, total, g, proj, sheet, vertex_of)
    c.verify()
    return c


@dataclass
class PullbackResult:
    system: LocalSystem
    trivial: bool
    gauge: Optional[Dict[object, Matrix]]
    obstruction: Optional[Edge] = None


def pullback_local_system(c: CoverMap, p: LocalSystem) -> PullbackResult:
    """b^*P with transports copied from the base, plus a tree-propagated trivializing gauge if one exists."""
    if p.base != c.base:
        raise ValueError("system does not live on the base of the cover")
    tr = {}
    for (i, j) in c.total.edges():
        bi, bj = c.projection[i], c.projection[j]
        tr[(i, j)] = p.T(bi, bj)
    degs = {v: list(p.degrees[c.projection[v]]) for v in c.total.vertices}
    q = LocalSystem(c.total, p.field, degs, tr)
    _require_flat(q)
    gauge, bad = trivializing_gauge(q)
    return PullbackResult(q, gauge is not None, gauge, bad)


def trivializing_gauge(q: LocalSystem) -> Tuple[Optional[Dict[object, Matrix]], Optional[Edge]]:
    """Propagate H_u = H_v T_vu^{-1} along a spanning forest; succeed iff every transport becomes 1."""
    k = q.base
    h: Dict[object, Matrix] = {}
    for comp in k.components():
        root = min(comp)
        h[root] = Matrix.identity(q.field, q.rank(root))
        for a, b in spanning_tree(k, root):
            # the BFS tree lists edges parent-first when the parent is already gauged
            if a in h and b not in h:
                h[b] = h[a] @ q.T(b, a)
            elif b in h and a not in h:
                h[a] = h[b] @ q.T(a, b)
            else:
                raise InvariantError("spanning tree edge out of order", (a, b))
    g = gauge_transform(q, h)
    for e, m in sorted(g.transport.items()):
        if m != Matrix.identity(q.field, m.nrows):
            return None, e
    return h, None


# -- group modules ---------------------------------------------------------------------------


@dataclass
class GroupModule:
    """A K[Gamma]-module for Gamma = Z^n (n commuting operators) or a finite group (multiplication table)."""

    kind: str                         # "Zn" or "finite"
    field: Field
    dim: int
    action: List[Matrix]              # generators for Zn, one matrix per element for finite groups
    n: int = 0
    table: Optional[List[List[int]]] = None
    degrees: Optional[List[int]] = None

    def group_key(self):
        return (self.kind, self.n) if self.kind == "Zn" else ("finite", tuple(map(tuple, self.table)))

    @property
    def graded(self) -> bool:
        return self.degrees is not None and len(set(self.degrees)) > 1

    def identity_index(self) -> int:
        for e, row in enumerate(self.table):
            if row == list(range(len(row))):
                return e
        raise ValueError("multiplication table has no identity")

    def verify(self) -> None:
        one = Matrix.identity(self.field, self.dim)
        for m in self.action:
            if (m.nrows, m.ncols) != (self.dim, self.dim) or rank(m) != self.dim:
                raise InvariantError("group action matrix is not invertible of the module's size", m.nrows)
        if self.kind == "Zn":
            if len(self.action) != self.n:
                raise ValueError(f"Z^{self.n} needs {self.n} action matrices")
            for a, b in combinations(self.action, 2):
                if a @ b != b @ a:
                    raise InvariantError("Z^n generators do not commute")
        elif self.kind == "finite":
            t = self.table
            size = len(t)
            if any(sorted(row) != list(range(size)) for row in t):
                raise ValueError("multiplication table rows must be permutations")
            for a, b, c in product(range(size), repeat=3):
                if t[t[a][b]][c] != t[a][t[b][c]]:
                    raise ValueError("multiplication table is not associative")
            if len(self.action) != size:
                raise ValueError("finite group modules need one matrix per element")
            if self.action[self.identity_index()] != one:
                raise InvariantError("identity element does not act as 1")
            for a, b in product(range(size), repeat=2):
                if self.action[a] @ self.action[b] != self.action[t[a][b]]:
                    raise InvariantError("action violates the multiplication table", (a, b))
        else:
            raise ValueError(f"unsupported group type {self.kind!r}")


def trivial_group_module(kind: str, f: Field, dim: int = 1, n: int = 0,
                         table: Optional[List[List[int]]] = None) -> GroupModule:
    count = n if kind == "Zn" else len(table)
    gm = GroupModule(kind, f, dim, [Matrix.identity(f, dim) for _ in range(count)], n, table)
    gm.verify()
    return gm


def cyclic_table(order: int) -> List[List[int]]:
    return [[(a + b) % order for b in range(order)] for a in range(order)]


def symmetric3_table() -> List[List[int]]:
    from itertools import permutations
    elems = list(permutations(range(3)))
    idx = {p: i for i, p in enumerate(elems)}
    # (a * b)(x) = a(b(x))
    return [[idx[tuple(a[b[x]] for x in range(3))] for b in elems] for a in elems]


def _hom_action(m0: Matrix, m1: Matrix) -> Matrix:
    """phi -> g1 phi g0^{-1} on Hom(M0, M1), basis E_{ba} at column a * r1 + b."""
    f = m0.field
    r0, r1 = m0.nrows, m1.nrows
    inv0 = inverse(m0)
    out = Matrix(f, r0 * r1, r0 * r1)
    for a in range(r0):
        for b in range(r1):
            for b2, x in m1.column(b).items():
                for a2, y in inv0.rows[a].items():
                    out.add_entry(a2 * r1 + b2, a * r1 + b, x * y)
    return out


def koszul_complex(ops: Sequence[Matrix], dim: int, f: Field) -> ChainComplex:
    """C^r = Lambda^r(K^n) (x) N with d(e_S x) = sum_{i not in S} (-1)^{#(S below i)} e_{S+i} (A_i - 1) x."""
    n = len(ops)
    subsets = {r: list(combinations(range(n), r)) for r in range(n + 1)}
    index = {r: {s: t for t, s in enumerate(ss)} for r, ss in subsets.items()}
    dims = {r: len(ss) * dim for r, ss in subsets.items()}
    one = Matrix.identity(f, dim)
    diffs = {}
    for r in range(n):
        m = Matrix(f, dims[r + 1], dims[r])
        for s in subsets[r]:
            for i in range(n):
                if i in s:
                    continue
                sign = -1 if sum(1 for j in s if j < i) % 2 else 1
                t = tuple(sorted(s + (i,)))
                a = ops[i] - one
                for row, entries in enumerate(a.rows):
                    for col, x in entries.items():
                        m.add_entry(index[r + 1][t] * dim + row, index[r][s] * dim + col, sign * x)
        diffs[r] = m
    return ChainComplex(f, dims, diffs)


def bar_cochains(table: List[List[int]], ops: Sequence[Matrix], dim: int, f: Field, top: int) -> ChainComplex:
    """Inhomogeneous cochains C^r = Maps(G^r, N) for r <= top + 1."""
    size = len(table)
    tuples = {r: list(product(range(size), repeat=r)) for r in range(top + 2)}
    index = {r: {t: i for i, t in enumerate(ts)} for r, ts in tuples.items()}
    dims = {r: len(ts) * dim for r, ts in tuples.items()}
    diffs = {}
    for r in range(top + 1):
        m = Matrix(f, dims[r + 1], dims[r])
        for g in tuples[r + 1]:
            row0 = index[r + 1][g] * dim
            # g_1 . f(g_2..)
            src = index[r][g[1:]] * dim
            for a, entries in enumerate(ops[g[0]].rows):
                for b, x in entries.items():
                    m.add_entry(row0 + a, src + b, x)
            for i in range(1, r + 1):
                merged = g[:i - 1] + (table[g[i - 1]][g[i]],) + g[i + 1:]
                src = index[r][merged] * dim
                for a in range(dim):
                    m.add_entry(row0 + a, src + a, sign(i))
            src = index[r][g[:-1]] * dim
            for a in range(dim):
                m.add_entry(row0 + a, src + a, sign(r + 1))
        diffs[r] = m
    return ChainComplex(f, dims, diffs)


def ext_group_module(gm0: GroupModule, gm1: GroupModule, top: int) -> GradedDims:
    """dim Ext^r_{K[Gamma]}(M0, M1) for 0 <= r <= top, as group cohomology with Hom(M0, M1) coefficients."""
    if gm0.group_key() != gm1.group_key():
        raise ValueError("modules are over different groups")
    if gm0.field != gm1.field:
        raise ValueError("modules are over different fields")
    if top < 0:
        raise ValueError("top must be >= 0")
    gm0.verify()
    gm1.verify()
    f = gm0.field
    ops = [_hom_action(a, b) for a, b in zip(gm0.action, gm1.action)]
    dim = gm0.dim * gm1.dim
    if gm0.kind == "Zn":
        c = koszul_complex(ops, dim, f)
    else:
        c = bar_cochains(gm0.table, ops, dim, f, top)
    c.check()
    h = complex_cohomology(c, check=False)
    return clean_dims({r: h.get(r, 0) for r in range(top + 1)})


@dataclass
class ObstructionReport:
    degrees: List[int]
    dims: Dict[int, int]
    top: int
    complete: bool                    # Ext is known to vanish above top
    note: str

    def summary(self) -> str:
        if not self.degrees:
            return f"no obstructions up to degree {self.top}"
        return "obstruction groups nonzero in degrees " + ", ".join(f"{r} (dim {self.dims[r]})" for r in self.degrees)

    def to_json(self) -> dict:
        return {"degrees": self.degrees, "dims": {str(r): d for r, d in sorted(self.dims.items())},
                "top": self.top, "complete": self.complete, "note": self.note, "summary": self.summary()}


def formality_obstruction_degrees(gm: GroupModule, top: int) -> ObstructionReport:
    """Degrees r in [2, top] where Ext^r(N, N) is nonzero; these house the obstructions to formality."""
    ext = ext_group_module(gm, gm, top)
    degs = [r for r in range(2, top + 1) if ext.get(r, 0)]
    note = "ungraded N: the mod-2 internal shift is trivial"
    if gm.graded:
        note = "graded N flagged: mod-2 folding of internal degrees is not modelled; Ext computed on the underlying ungraded module"
    complete = gm.kind == "Zn" and top >= gm.n
    return ObstructionReport(degs, {r: ext[r] for r in degs}, top, complete, note)


# -- JSON --------------------------------------------------------------------------------------


def group_module_from_json(data: Mapping) -> GroupModule:
    f = Field.parse(str(data.get("field", "Q")))
    g = data["group"]
    dim = int(data.get("dim", 1))
    act = data.get("action", {})
    kind = g["type"]
    if kind == "Zn":
        count = int(g["n"])
        table = None
    elif kind == "finite":
        table = [list(map(int, row)) for row in g["table"]]
        count = len(table)
    else:
        raise ValueError(f"unsupported group type {kind!r}")
    if isinstance(act, Mapping):
        items = [act.get(str(i), act.get(i)) for i in range(count)]
    else:
        items = list(act)
    mats = []
    for i in range(count):
        x = items[i] if i < len(items) else None
        if x is None:
            mats.append(Matrix.identity(f, dim))
        elif isinstance(x, (list, tuple)):
            mats.append(Matrix.from_dense(f, [[f(_scalar(y)) for y in row] for row in x]))
        else:
            mats.append(Matrix.from_dense(f, [[f(_scalar(x))]]))
    gm = GroupModule(kind, f, dim, mats, count if kind == "Zn" else 0, table, data.get("degrees"))
    gm.verify()
    return gm


def _scalar(x):
    from fractions import Fraction
    return Fraction(x) if isinstance(x, str) else x


def group_module_to_json(gm: GroupModule) -> dict:
    group = {"type": "Zn", "n": gm.n} if gm.kind == "Zn" else {"type": "finite", "table": gm.table}
    return {
        "group": group,
        "field": str(gm.field),
        "dim": gm.dim,
        "action": {str(i): [[fmt(x) for x in row] for row in m.to_dense()] for i, m in enumerate(gm.action)},
    }
