"""Complexes of projectives over directed quiver algebras.

Morphisms between indecomposable projectives are paths: Hom(P_i, P_j) is the
span of paths i -> j modulo relations, composed by concatenation ("p then q").
A complex of projectives is a list of vertices per degree with differential
entries in these path spaces, so homs, cones, mutations and Postnikov towers
are all finite linear algebra.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .linalg import (
    ChainComplex,
    CohomologyBasis,
    Field,
    GradedDims,
    InvariantError,
    Matrix,
    clean_dims,
    complex_cohomology,
    fmt,
    rref,
)

Path = Tuple[int, ...]          # arrow indices, first arrow first
PVec = Dict[int, object]        # coordinates in the quotient basis of one path space


class DirectedAlgebra:
    """Path algebra of a quiver with arrows i -> j only for i < j, modulo relations."""

    def __init__(self, n_vertices: int, arrows: Sequence[Tuple[int, int, str]],
                 relations: Sequence[Dict[Path, object]] = (), f: Optional[Field] = None,
                 name: str = ""):
        self.n = n_vertices
        self.arrows = [(int(i), int(j), str(nm)) for i, j, nm in arrows]
        self.f = f or Field()
        self.name = name
        for i, j, nm in self.arrows:
            if not (0 <= i < j < n_vertices):
                raise ValueError(f"arrow {nm} must go from a smaller to a larger vertex")
        self.relations = [dict(r) for r in relations]
        self._paths = self._enumerate_paths()
        self._basis: Dict[Tuple[int, int], List[Path]] = {}
        self._reduce: Dict[Tuple[int, int], tuple] = {}
        for key, paths in self._paths.items():
            self._build_quotient(key, paths)
        self._mul: Dict[Tuple[int, int, int, int, int], PVec] = {}

    # -- paths ------------------------------------------------------------------
    def source(self, p: Path, default: int) -> int:
        return self.arrows[p[0]][0] if p else default

    def target(self, p: Path, default: int) -> int:
        return self.arrows[p[-1]][1] if p else default

    def _enumerate_paths(self) -> Dict[Tuple[int, int], List[Path]]:
        out: Dict[Tuple[int, int], List[Path]] = {(v, v): [()] for v in range(self.n)}
        frontier = [((a,), self.arrows[a][0], self.arrows[a][1]) for a in range(len(self.arrows))]
        while frontier:
            nxt = []
            for p, s, t in frontier:
                out.setdefault((s, t), []).append(p)
                for a, (i, j, _) in enumerate(self.arrows):
                    if i == t:
                        nxt.append((p + (a,), s, j))
            frontier = nxt
        return {k: sorted(v, key=lambda p: (len(p), p)) for k, v in out.items()}

    def _endpoints(self, rel: Dict[Path, object]) -> Tuple[int, int]:
        ends = {(self.source(p, -1), self.target(p, -1)) for p in rel}
        if len(ends) != 1 or any(not p for p in rel):
            raise ValueError("relation terms must be nontrivial paths with common endpoints")
        return ends.pop()

    def _build_quotient(self, key: Tuple[int, int], paths: List[Path]) -> None:
        i, j = key
        pos = {p: k for k, p in enumerate(paths)}
        gens = []
        for rel in self.relations:
            u, v = self._endpoints(rel)
            for alpha in self._paths.get((i, u), []):
                for beta in self._paths.get((v, j), []):
                    row: Dict[int, object] = {}
                    for p, c in rel.items():
                        k = pos[alpha + p + beta]
                        row[k] = row.get(k, 0) + c
                    gens.append({k: self.f.norm(c) for k, c in row.items() if self.f.norm(c) != 0})
        pivots: List[int] = []
        rows: List[dict] = []
        if gens:
            m = Matrix.from_entries(self.f, len(gens), len(paths),
                                    [(r, c, v) for r, g in enumerate(gens) for c, v in g.items()])
            pivots, rows = rref(m)
        free = [k for k in range(len(paths)) if k not in set(pivots)]
        self._basis[key] = [paths[k] for k in free]
        self._reduce[key] = (pivots, rows, {paths[k]: t for t, k in enumerate(free)}, pos)

    def basis(self, i: int, j: int) -> List[Path]:
        """Representative paths forming a basis of Hom(P_i, P_j)."""
        return self._basis.get((i, j), [])

    def dim(self, i: int, j: int) -> int:
        return len(self.basis(i, j))

    def reduce_path(self, i: int, j: int, p: Path) -> PVec:
        pivots, rows, free_pos, pos = self._reduce[(i, j)]
        v = {pos[p]: self.f.one()}
        for c, row in zip(pivots, rows):
            x = v.get(c, 0)
            if x != 0:
                for k, y in row.items():
                    v[k] = v.get(k, 0) - x * y
        out = {}
        for k, x in v.items():
            x = self.f.norm(x)
            if x != 0:
                path = self._paths[(i, j)][k]
                if path not in free_pos:
                    raise InvariantError("path reduction left a pivot", path)
                out[free_pos[path]] = x
        return out

    def compose(self, i: int, j: int, k: int, first: PVec, second: PVec) -> PVec:
        """first: i -> j, then second: j -> k."""
        out: Dict[int, object] = {}
        for a, x in first.items():
            for b, y in second.items():
                key = (i, j, k, a, b)
                if key not in self._mul:
                    p = self.basis(i, j)[a] + self.basis(j, k)[b]
                    self._mul[key] = self.reduce_path(i, k, p)
                for c, z in self._mul[key].items():
                    out[c] = out.get(c, 0) + x * y * z
        return {c: self.f.norm(z) for c, z in out.items() if self.f.norm(z) != 0}

    def identity(self, v: int) -> PVec:
        return {0: self.f.one()}

    def is_iso_entry(self, i: int, j: int, x: PVec) -> bool:
        """Over a directed algebra only nonzero multiples of e_v are invertible."""
        return i == j and bool(x) and set(x) == {0} and self.basis(i, i)[0] == ()

    # -- path expressions ---------------------------------------------------------
    def parse_expr(self, s: str, i: int, j: int) -> PVec:
        """'2*a*b - c', 'e' or '1' for the identity; '0' for zero."""
        names = {nm: k for k, (_, _, nm) in enumerate(self.arrows)}
        out: Dict[int, object] = {}
        s = str(s).replace(" ", "")
        if s in ("", "0"):
            return {}
        for sign, body in re.findall(r"([+-]?)([^+-]+)", s):
            coef = self.f(-1 if sign == "-" else 1)
            factors = body.split("*")
            arrows: List[int] = []
            for fac in factors:
                if re.fullmatch(r"\d+(/\d+)?", fac):
                    coef = coef * self.f(_num(fac))
                elif fac == "e":
                    continue
                elif fac in names:
                    arrows.append(names[fac])
                else:
                    raise ValueError(f"unknown arrow {fac!r}")
            p = tuple(arrows)
            if self.source(p, i) != i or self.target(p, i) != j:
                raise ValueError(f"path {body!r} does not go from {i} to {j}")
            for c, x in self.reduce_path(i, j, p).items():
                out[c] = out.get(c, 0) + coef * x
        return {c: self.f.norm(x) for c, x in out.items() if self.f.norm(x) != 0}

    def format_expr(self, i: int, j: int, v: PVec) -> str:
        return _format_terms([(v[c], self.basis(i, j)[c]) for c in sorted(v)], self)

    def to_json(self) -> dict:
        rels = []
        for r in self.relations:
            rels.append(_format_terms(sorted((c, p) for p, c in r.items()), self))
        return {"vertices": self.n, "arrows": [[i, j, nm] for i, j, nm in self.arrows], "relations": rels}


def _format_terms(terms, alg: "DirectedAlgebra") -> str:
    """'a*b - 2*c'; the empty path prints as 'e'."""
    out = ""
    for x, p in terms:
        word = "*".join(alg.arrows[a][2] for a in p) or "e"
        neg = alg.f.characteristic == 0 and x < 0
        mag = -x if neg else x
        body = word if mag == 1 else f"{fmt(mag)}*{word}"
        if not out:
            out = ("-" if neg else "") + body
        else:
            out += (" - " if neg else " + ") + body
    return out or "0"


def _num(s: str):
    from fractions import Fraction
    return Fraction(s) if "/" in s else int(s)


def algebra_from_json(data, f: Optional[Field] = None) -> DirectedAlgebra:
    arrows = [tuple(a) for a in data["arrows"]]
    probe = DirectedAlgebra(int(data["vertices"]), arrows, (), f)
    names = {nm: k for k, (_, _, nm) in enumerate(probe.arrows)}
    rels = []
    for expr in data.get("relations", []):
        rel: Dict[Path, object] = {}
        for sign, body in re.findall(r"([+-]?)([^+-]+)", expr.replace(" ", "")):
            coef = -1 if sign == "-" else 1
            arrows_ = []
            for fac in body.split("*"):
                if re.fullmatch(r"\d+(/\d+)?", fac):
                    coef *= _num(fac)
                else:
                    arrows_.append(names[fac])
            rel[tuple(arrows_)] = rel.get(tuple(arrows_), 0) + coef
        rels.append(rel)
    return DirectedAlgebra(int(data["vertices"]), arrows, rels, f, data.get("name", ""))


def linear_quiver(n: int, f: Optional[Field] = None, zero_relations: Sequence[int] = ()) -> DirectedAlgebra:
    """A_n: vertices 0..n-1, arrows a_i: i -> i+1; ``zero_relations`` kills a_i a_{i+1}."""
    arrows = [(i, i + 1, f"a{i}") for i in range(n - 1)]
    if any(not 0 <= i < n - 2 for i in zero_relations):
        raise ValueError(f"zero relations of A{n} are indexed 0..{n - 3}")
    rels = [{(i, i + 1): 1} for i in zero_relations]
    return DirectedAlgebra(n, arrows, rels, f, f"A{n}")


def commutative_square(f: Optional[Field] = None) -> DirectedAlgebra:
    arrows = [(0, 1, "a"), (0, 2, "b"), (1, 3, "c"), (2, 3, "d")]
    return DirectedAlgebra(4, arrows, [{(0, 2): 1, (1, 3): -1}], f, "square")


# -- complexes of projectives -------------------------------------------------------

Entry = Dict[Tuple[int, int], PVec]    # (row in degree n+1, column in degree n) -> path vector


@dataclass
class DObject:
    alg: DirectedAlgebra
    terms: Dict[int, List[int]]
    d: Dict[int, Entry] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        self.terms = {n: list(v) for n, v in self.terms.items() if v}
        self.d = {n: {k: v for k, v in e.items() if v} for n, e in self.d.items()
                  if n in self.terms and n + 1 in self.terms}

    @property
    def f(self) -> Field:
        return self.alg.f

    def degrees(self) -> List[int]:
        return sorted(self.terms)

    def size(self) -> int:
        return sum(len(v) for v in self.terms.values())

    def is_zero(self) -> bool:
        return not self.terms

    def entry(self, n: int, r: int, c: int) -> PVec:
        return self.d.get(n, {}).get((r, c), {})

    def verify(self) -> None:
        a = self.alg
        for n in self.degrees():
            src = self.terms[n]
            for (r, c), v in self.d.get(n, {}).items():
                if set(v) - set(range(a.dim(src[c], self.terms[n + 1][r]))):
                    raise InvariantError("differential entry outside its path space", (n, r, c))
            if n + 2 not in self.terms or n + 1 not in self.terms:
                continue
            for c in range(len(src)):
                for r2 in range(len(self.terms[n + 2])):
                    acc: Dict[int, object] = {}
                    for r in range(len(self.terms[n + 1])):
                        x, y = self.entry(n, r, c), self.entry(n + 1, r2, r)
                        if x and y:
                            for k, z in a.compose(src[c], self.terms[n + 1][r], self.terms[n + 2][r2], x, y).items():
                                acc[k] = acc.get(k, 0) + z
                    if any(self.f.norm(z) != 0 for z in acc.values()):
                        raise InvariantError("d^2 != 0 in complex of projectives", (n, c, r2))

    def shift(self, k: int) -> "DObject":
        """X[k]: degree n holds X^{n+k}; differential multiplied by (-1)^k."""
        s = -1 if k % 2 else 1
        d = {n - k: {rc: {i: s * x for i, x in v.items()} for rc, v in e.items()} for n, e in self.d.items()}
        return DObject(self.alg, {n - k: v for n, v in self.terms.items()}, d, self.name)

    def to_json(self) -> dict:
        a = self.alg
        out = []
        for n in self.degrees():
            src = self.terms[n]
            tgt = self.terms.get(n + 1, [])
            mat = [[a.format_expr(src[c], tgt[r], self.entry(n, r, c)) for c in range(len(src))] for r in range(len(tgt))]
            out.append({"degree": n, "summands": src, "d": mat})
        return {"name": self.name, "terms": out}


def object_from_json(alg: DirectedAlgebra, data) -> DObject:
    terms = {int(t["degree"]): list(t["summands"]) for t in data["terms"]}
    d: Dict[int, Entry] = {}
    for t in data["terms"]:
        n = int(t["degree"])
        src, tgt = terms[n], terms.get(n + 1, [])
        e: Entry = {}
        for r, row in enumerate(t.get("d", [])):
            for c, expr in enumerate(row):
                v = alg.parse_expr(expr, src[c], tgt[r])
                if v:
                    e[(r, c)] = v
        d[n] = e
    x = DObject(alg, terms, d, data.get("name", ""))
    x.verify()
    return x


def projective(alg: DirectedAlgebra, v: int, degree: int = 0) -> DObject:
    return DObject(alg, {degree: [v]}, {}, f"P{v}")


def direct_sum(xs: Sequence[DObject], name: str = "") -> DObject:
    alg = xs[0].alg
    terms: Dict[int, List[int]] = {}
    offs: List[Dict[int, int]] = []
    for x in xs:
        off = {}
        for n, vs in x.terms.items():
            off[n] = len(terms.get(n, []))
            terms.setdefault(n, []).extend(vs)
        offs.append(off)
    d: Dict[int, Entry] = {}
    for x, off in zip(xs, offs):
        for n, e in x.d.items():
            for (r, c), v in e.items():
                d.setdefault(n, {})[(r + off[n + 1], c + off[n])] = dict(v)
    return DObject(alg, terms, d, name)


# -- hom complexes ---------------------------------------------------------------------

HomLabel = Tuple[int, int, int, int]      # (source degree n, source summand, target summand, path basis index)
Map = Dict[int, Entry]                     # source degree n -> {(target summand, source summand): path vector}


@dataclass
class HomData:
    x: DObject
    y: DObject
    complex: ChainComplex
    labels: Dict[int, List[HomLabel]]

    def cohomology(self) -> GradedDims:
        return complex_cohomology(self.complex, check=False)

    def to_map(self, k: int, v: Dict[int, object]) -> Map:
        out: Map = {}
        for j, c in v.items():
            n, a, b, t = self.labels[k][j]
            e = out.setdefault(n, {})
            e.setdefault((b, a), {})[t] = c
        return out

    def cocycle_basis(self) -> Dict[int, List[Map]]:
        cb = CohomologyBasis.of(self.complex)
        return {k: [self.to_map(k, z) for z in zs] for k, zs in sorted(cb.reps.items()) if zs}


def hom_objects(x: DObject, y: DObject) -> HomData:
    """Hom^k(X, Y) = prod_n Hom(X^n, Y^{n+k}), with D f = d_Y f - (-1)^k f d_X."""
    if x.alg is not y.alg:
        raise ValueError("objects live over different algebras")
    a, f = x.alg, x.f
    labels: Dict[int, List[HomLabel]] = {}
    for n, xs in x.terms.items():
        for m, ys in y.terms.items():
            k = m - n
            for ai, u in enumerate(xs):
                for bi, v in enumerate(ys):
                    for t in range(a.dim(u, v)):
                        labels.setdefault(k, []).append((n, ai, bi, t))
    labels = {k: labels[k] for k in sorted(labels)}
    index = {k: {lab: j for j, lab in enumerate(ls)} for k, ls in labels.items()}
    dims = {k: len(ls) for k, ls in labels.items()}
    diffs = {}
    for k, ls in labels.items():
        if k + 1 not in labels:
            continue
        m = Matrix(f, dims[k + 1], dims[k])
        sgn = -1 if k % 2 else 1
        for j, (n, ai, bi, t) in enumerate(ls):
            u, v = x.terms[n][ai], y.terms[n + k][bi]
            phi = {t: f.one()}
            # d_Y after phi
            for (r, c), dv in y.d.get(n + k, {}).items():
                if c == bi:
                    w = y.terms[n + k + 1][r]
                    for t2, z in a.compose(u, v, w, phi, dv).items():
                        m.add_entry(index[k + 1][(n, ai, r, t2)], j, z)
            # phi after d_X, from degree n-1
            for (r, c), dv in x.d.get(n - 1, {}).items():
                if r == ai:
                    w = x.terms[n - 1][c]
                    for t2, z in a.compose(w, u, v, dv, phi).items():
                        m.add_entry(index[k + 1][(n - 1, c, bi, t2)], j, -sgn * z)
        diffs[k] = m
    return HomData(x, y, ChainComplex(f, dims, diffs, labels=labels), labels)


def hom_dims(x: DObject, y: DObject) -> GradedDims:
    return hom_objects(x, y).cohomology()


def is_acyclic(x: DObject) -> bool:
    """Bounded complexes of projectives are acyclic iff Hom(P_v, X) is, for every vertex v."""
    return all(not hom_dims(projective(x.alg, v), x) for v in range(x.alg.n))


# -- cones and reduction -------------------------------------------------------------


def cone(x: DObject, y: DObject, f_map: Map, name: str = "") -> DObject:
    """Cone of a degree-0 chain map X -> Y: degree n holds X^{n+1} + Y^n, d = [[-d_X, 0], [f, d_Y]]."""
    terms: Dict[int, List[int]] = {}
    degs = sorted(set(n - 1 for n in x.terms) | set(y.terms))
    for n in degs:
        terms[n] = list(x.terms.get(n + 1, [])) + list(y.terms.get(n, []))
    d: Dict[int, Entry] = {}
    for n in degs:
        nx = len(x.terms.get(n + 1, []))
        nx1 = len(x.terms.get(n + 2, []))
        e: Entry = {}
        for (r, c), v in x.d.get(n + 1, {}).items():
            e[(r, c)] = {i: -z for i, z in v.items()}
        for (r, c), v in f_map.get(n + 1, {}).items():
            e[(nx1 + r, c)] = dict(v)
        for (r, c), v in y.d.get(n, {}).items():
            e[(nx1 + r, nx + c)] = dict(v)
        d[n] = e
    out = DObject(x.alg, terms, d, name)
    out.verify()
    return out


def _drop(e: Entry, row: Optional[int] = None, col: Optional[int] = None) -> Entry:
    out: Entry = {}
    for (r, c), v in e.items():
        if r == row or c == col:
            continue
        out[(r - (row is not None and r > row), c - (col is not None and c > col))] = v
    return out


def reduce_object(x: DObject) -> DObject:
    """Cancel contractible summands (invertible differential entries) by Gaussian elimination."""
    a, f = x.alg, x.f
    terms = {n: list(v) for n, v in x.terms.items()}
    d = {n: {rc: dict(v) for rc, v in e.items()} for n, e in x.d.items()}
    while True:
        hit = None
        for n in sorted(d):
            for (r, c), v in sorted(d[n].items()):
                if a.is_iso_entry(terms[n][c], terms[n + 1][r], v):
                    hit = (n, r, c)
                    break
            if hit:
                break
        if hit is None:
            break
        n, tr, bc = hit
        v = terms[n][bc]
        lam_inv = f.inv(d[n][(tr, bc)][0])
        col_b = {r: e for (r, c), e in d[n].items() if c == bc and r != tr}
        row_t = {c: e for (r, c), e in d[n].items() if r == tr and c != bc}
        new_n = {rc: e for rc, e in d[n].items() if rc[0] != tr and rc[1] != bc}
        for r, er in col_b.items():
            scaled = {i: z * lam_inv for i, z in er.items()}
            for c, ec in row_t.items():
                comp = a.compose(terms[n][c], v, terms[n + 1][r], ec, scaled)
                cur = dict(new_n.get((r, c), {}))
                for i, z in comp.items():
                    cur[i] = f.norm(cur.get(i, 0) - z)
                new_n[(r, c)] = {i: z for i, z in cur.items() if z != 0}
        d[n] = _drop(new_n, tr, bc)
        if n - 1 in d:
            d[n - 1] = _drop(d[n - 1], row=bc)
        if n + 1 in d:
            d[n + 1] = _drop(d[n + 1], col=tr)
        terms[n].pop(bc)
        terms[n + 1].pop(tr)
        d = {k: {rc: e for rc, e in ek.items() if e} for k, ek in d.items()}
    out = DObject(a, terms, d, x.name)
    out.verify()
    return out


# -- mutations ---------------------------------------------------------------------------


def _sum_with_offsets(xs: Sequence[DObject]) -> Tuple[DObject, List[Dict[int, int]]]:
    offs: List[Dict[int, int]] = []
    count: Dict[int, int] = {}
    for x in xs:
        offs.append({n: count.get(n, 0) for n in x.terms})
        for n, vs in x.terms.items():
            count[n] = count.get(n, 0) + len(vs)
    return direct_sum(xs), offs


def evaluation(y: DObject, x: DObject) -> Tuple[Optional[DObject], Map, List[int]]:
    """Hom^*(y, x) (x) y -> x, one copy y[-k] per basis cocycle of degree k."""
    hd = hom_objects(y, x)
    pieces, maps, degs = [], [], []
    for k, phis in hd.cocycle_basis().items():
        for phi in phis:
            pieces.append(y.shift(-k))
            maps.append({n + k: e for n, e in phi.items()})
            degs.append(k)
    if not pieces:
        return None, {}, []
    src, offs = _sum_with_offsets(pieces)
    ev: Map = {}
    for phi, off in zip(maps, offs):
        for n, e in phi.items():
            for (b, a), v in e.items():
                ev.setdefault(n, {})[(b, a + off[n])] = v
    return src, ev, degs


def coevaluation(x: DObject, y: DObject) -> Tuple[Optional[DObject], Map, List[int]]:
    """x -> Hom^*(x, y)^dual (x) y, one copy y[k] per basis cocycle of degree k."""
    hd = hom_objects(x, y)
    pieces, maps, degs = [], [], []
    for k, psis in hd.cocycle_basis().items():
        for psi in psis:
            pieces.append(y.shift(k))
            maps.append(psi)
            degs.append(k)
    if not pieces:
        return None, {}, []
    tgt, offs = _sum_with_offsets(pieces)
    co: Map = {}
    for psi, off in zip(maps, offs):
        for n, e in psi.items():
            for (b, a), v in e.items():
                co.setdefault(n, {})[(b + off[n], a)] = v
    return tgt, co, degs


def mutate_left(y: DObject, x: DObject, reduce: bool = True) -> DObject:
    """L_y x = cone(Hom^*(y, x) (x) y -> x)."""
    src, ev, _ = evaluation(y, x)
    if src is None:
        return x
    out = cone(src, x, ev, name=f"L({y.name},{x.name})")
    return reduce_object(out) if reduce else out


def mutate_right(y: DObject, x: DObject, reduce: bool = True) -> DObject:
    """R_y x = cone(x -> Hom^*(x, y)^dual (x) y)[-1]."""
    tgt, co, _ = coevaluation(x, y)
    if tgt is None:
        return x
    out = cone(x, tgt, co).shift(-1)
    out.name = f"R({y.name},{x.name})"
    return reduce_object(out) if reduce else out


def module_dims(x: DObject) -> Dict[int, GradedDims]:
    """Cohomology of Hom(P_v, X) for each vertex v: the graded dimension vector of H(X)."""
    return {v: hom_dims(projective(x.alg, v), x) for v in range(x.alg.n)}


def braid_check(a: DObject, b: DObject, z: DObject) -> Tuple[bool, Dict[int, GradedDims], Dict[int, GradedDims]]:
    """L_a L_b z against L_{L_a b} L_a z, compared through module_dims."""
    one = mutate_left(a, mutate_left(b, z))
    two = mutate_left(mutate_left(a, b), mutate_left(a, z))
    d1, d2 = module_dims(one), module_dims(two)
    return d1 == d2, d1, d2


# -- exceptional collections -------------------------------------------------------------


@dataclass
class ExceptionalCollectionData:
    objects: List[DObject]
    certificate: Optional[dict] = None

    @property
    def alg(self) -> DirectedAlgebra:
        return self.objects[0].alg

    def __len__(self) -> int:
        return len(self.objects)

    def to_json(self) -> dict:
        return {"objects": [x.to_json() for x in self.objects], "certificate": self.certificate}


def check_exceptional(c: ExceptionalCollectionData) -> dict:
    """Hom^*(Y_j, Y_j) = K in degree 0 and Hom^*(Y_j, Y_k) = 0 for j > k; stops at the first violation."""
    ys = c.objects
    checked = []
    for j, y in enumerate(ys):
        h = hom_dims(y, y)
        if h != {0: 1}:
            cert = {"certified": False, "violation": {"kind": "endomorphisms", "j": j, "dims": h}}
            c.certificate = cert
            return cert
        checked.append([j, j])
    for j in range(len(ys)):
        for k in range(j):
            h = hom_dims(ys[j], ys[k])
            if h:
                cert = {"certified": False, "violation": {"kind": "backward hom", "j": j, "k": k, "dims": h}}
                c.certificate = cert
                return cert
            checked.append([j, k])
    cert = {"certified": True, "pairs_checked": len(checked)}
    c.certificate = cert
    return cert


def projective_collection(alg: DirectedAlgebra) -> ExceptionalCollectionData:
    return ExceptionalCollectionData([projective(alg, v) for v in range(alg.n)])


def simple_object(alg: DirectedAlgebra, v: int) -> DObject:
    """S_v: the object with Hom(P_u, S_v) = K for u = v only, via the dual of the projective collection."""
    duals = koszul_dual_collection(projective_collection(alg))
    s = duals.objects[alg.n - 1 - v]
    return DObject(alg, s.terms, s.d, f"S{v}")


def koszul_dual_collection(c: ExceptionalCollectionData, verify: bool = True) -> ExceptionalCollectionData:
    """(Y_m^!, .., Y_0^!) with Y_k^! = L_{Y_0} .. L_{Y_{k-1}} Y_k, orthogonality certified exactly."""
    ys = c.objects
    m = len(ys) - 1
    duals: List[DObject] = []
    for k in range(m + 1):
        z = ys[k]
        for j in range(k - 1, -1, -1):
            z = mutate_left(ys[j], z)
        z.name = f"{ys[k].name or 'Y' + str(k)}!"
        duals.append(z)
    out = ExceptionalCollectionData(list(reversed(duals)))
    if verify:
        pattern = []
        for j in range(m + 1):
            row = []
            for k in range(m + 1):
                h = hom_dims(ys[j], duals[k])
                want = {0: 1} if j == k else {}
                if h != want:
                    raise InvariantError("dual collection is not orthogonal", (j, k, h))
                row.append(h.get(0, 0))
            pattern.append(row)
        out.certificate = {"orthogonal": True, "pattern": pattern}
    return out


# -- Postnikov towers ----------------------------------------------------------------------


@dataclass
class PostnikovTower:
    """X_m = X, X_{k-1} = cone(Z_k (x) Y_k -> X_k), cones kept unreduced.

    ``origin[n][j]`` records which step k contributed summand j of X_{-1} in
    degree n (``None`` for the summands of X itself).
    """

    collection: ExceptionalCollectionData
    x: DObject
    stages: List[DObject]                 # X_m, X_{m-1}, .., X_{-1}
    z_dims: Dict[int, GradedDims]         # k -> graded dims of Z_k
    z_degrees: Dict[int, List[int]]       # k -> degrees of the chosen cocycles
    origin: Dict[int, List[Optional[int]]]
    full: bool
    dual_check: Optional[Dict[int, Tuple[GradedDims, GradedDims]]] = None

    @property
    def bottom(self) -> DObject:
        return self.stages[-1]

    def summary(self) -> dict:
        return {
            "z_dims": {str(k): {str(n): d for n, d in sorted(v.items())} for k, v in sorted(self.z_dims.items())},
            "full": self.full,
            "stage_sizes": [s.size() for s in self.stages],
            "dual_check": None if self.dual_check is None else {
                str(k): {"z_dual": {str(n): d for n, d in sorted(a.items())},
                         "hom_x_dual": {str(n): d for n, d in sorted(b.items())}}
                for k, (a, b) in sorted(self.dual_check.items())},
        }


def _dual_dims(v: GradedDims) -> GradedDims:
    return clean_dims({-n: d for n, d in v.items()})


def postnikov_tower(c: ExceptionalCollectionData, x: DObject,
                    duals: Optional[ExceptionalCollectionData] = None) -> PostnikovTower:
    ys = c.objects
    m = len(ys) - 1
    cur = x
    origin: Dict[int, List[Optional[int]]] = {n: [None] * len(v) for n, v in x.terms.items()}
    stages = [x]
    z_dims: Dict[int, GradedDims] = {}
    z_degrees: Dict[int, List[int]] = {}
    for k in range(m, -1, -1):
        src, ev, degs = evaluation(ys[k], cur)
        z_degrees[k] = sorted(degs)
        z_dims[k] = clean_dims({d: degs.count(d) for d in set(degs)})
        if src is not None:
            nxt = cone(src, cur, ev, name=f"X{k - 1}")
            new_origin: Dict[int, List[Optional[int]]] = {}
            for n in nxt.terms:
                new_origin[n] = [k] * len(src.terms.get(n + 1, [])) + origin.get(n, [])
            origin, cur = new_origin, nxt
        else:
            cur = DObject(cur.alg, cur.terms, cur.d, f"X{k - 1}")
        stages.append(cur)
    full = reduce_object(cur).is_zero()
    if full != is_acyclic(cur):
        raise InvariantError("Gaussian elimination and Hom(P_v, -) disagree on acyclicity", cur.name)
    check = None
    if duals is not None:
        if len(duals) != len(ys):
            raise ValueError("tower and dual collection have different lengths")
        check = {}
        for k in range(m + 1):
            a = _dual_dims(z_dims[k])
            b = hom_dims(x, duals.objects[m - k])
            check[k] = (a, b)
            if a != b:
                raise InvariantError("Z_k dual does not match Hom(X, Y_k^!)", (k, a, b))
    return PostnikovTower(c, x, stages, z_dims, z_degrees, origin, full, check)


def _quotient_by_x(t: PostnikovTower) -> Tuple[DObject, Dict[int, List[int]]]:
    """Q = X_{-1} / X, with the step k of every surviving summand."""
    xm = t.bottom
    keep = {n: [j for j, o in enumerate(t.origin.get(n, [])) if o is not None] for n in xm.terms}
    pos = {n: {j: i for i, j in enumerate(js)} for n, js in keep.items()}
    terms = {n: [xm.terms[n][j] for j in js] for n, js in keep.items()}
    d: Dict[int, Entry] = {}
    for n, e in xm.d.items():
        for (r, c), v in e.items():
            if c in pos[n] and r in pos.get(n + 1, {}):
                d.setdefault(n, {})[(pos[n + 1][r], pos[n][c])] = v
    q = DObject(xm.alg, terms, d, "Q")
    q.verify()
    steps = {n: [t.origin[n][j] for j in js] for n, js in keep.items() if js}
    return q, steps


@dataclass
class TowerSpectralData:
    ss: object                                # spectral.SpectralSequence
    e1_predicted: Dict[Tuple[int, int], int]
    e1_match: bool
    abutment_match: bool
    hom_xx: GradedDims


def tower_spectral_sequence(t: PostnikovTower, duals: ExceptionalCollectionData) -> TowerSpectralData:
    """Filter Hom(Q, X) ~ Hom(X, X)[-1] by tower step; column r comes from step k = m - r.

    E_1^{r, s} is predicted as (Hom^*(X, Y^!_{m-r}) (x) Hom^*(Y_{m-r}, X))^{r+s}.
    """
    from .spectral import FilteredComplex, run_spectral_sequence

    if not t.full:
        raise ValueError("tower is not complete: X_{-1} is not acyclic")
    ys = t.collection.objects
    m = len(ys) - 1
    if len(duals) != len(ys):
        raise ValueError("mismatch between tower and duals")
    x = t.x
    q, steps = _quotient_by_x(t)
    hd = hom_objects(q, x)
    c = hd.complex
    # total degree of Hom(X, X) is one less than that of Hom(Q, X)
    dims = {n - 1: d for n, d in c.dims.items()}
    diffs = {n - 1: c.d(n) for n in c.dims if n + 1 in c.dims}
    labels = {n - 1: ls for n, ls in hd.labels.items()}
    shifted = ChainComplex(c.field, dims, diffs, labels=labels)
    levels = {n - 1: [m - steps[src_deg][a] for (src_deg, a, b, i) in ls] for n, ls in hd.labels.items()}
    ss = run_spectral_sequence(FilteredComplex(shifted, levels))
    predicted: Dict[Tuple[int, int], int] = {}
    for r in range(m + 1):
        k = m - r
        left = hom_dims(x, duals.objects[r])             # duals are ordered (Y_m^!, .., Y_0^!)
        right = hom_dims(ys[k], x)
        for a, da in left.items():
            for b, db in right.items():
                n = a + b
                predicted[(r, n - r)] = predicted.get((r, n - r), 0) + da * db
    predicted = {k: v for k, v in predicted.items() if v}
    e1 = dict(ss.page(1).cells)
    hom_xx = hom_dims(x, x)
    return TowerSpectralData(ss, predicted, e1 == predicted, clean_dims(ss.abutment) == hom_xx, hom_xx)


def random_object(alg: DirectedAlgebra, rng, steps: int = 3, shifts: Sequence[int] = (-1, 0, 1)) -> DObject:
    """Iterated cones of random degree-0 maps from shifted projectives; d^2 = 0 by construction."""
    f = alg.f
    x = projective(alg, rng.randrange(alg.n), rng.choice(list(shifts)))
    for _ in range(steps):
        p = projective(alg, rng.randrange(alg.n), rng.choice(list(shifts)))
        hd = hom_objects(p, x)
        zs = hd.cocycle_basis().get(0, [])
        combo: Map = {}
        for z in zs:
            c = f(rng.randrange(-2, 3))
            if f.norm(c) == 0:
                continue
            for n, e in z.items():
                for rc, v in e.items():
                    cur = combo.setdefault(n, {}).setdefault(rc, {})
                    for i, y in v.items():
                        cur[i] = f.norm(cur.get(i, 0) + c * y)
        combo = {n: {rc: {i: y for i, y in v.items() if y != 0} for rc, v in e.items()} for n, e in combo.items()}
        x = cone(p, x, combo) if rng.random() < 0.7 else direct_sum([x, p])
    x.name = "random"
    return x
