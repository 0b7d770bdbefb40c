"""Flat local systems, presheaf-type dg modules over the Cech algebra, hom complexes.

Module conventions (fixed once, checked by ``PresheafModule.verify``):

* the stalk over a simplex ``I`` is the fiber at its last vertex;
* an element of stalk ``I`` sits in total degree ``stalk degree + |I| - 1``;
* ``g_J`` acts on the left, sending stalk ``I`` to stalk ``J u I`` whenever the
  last vertex of ``J`` is the first vertex of ``I`` (front acts on back, no
  transport needed), so ``1 = sum g_v`` acts on stalk ``I`` through ``g_{i_0}``;
* module maps of degree ``k`` satisfy ``phi(g m) = (-1)^{k |g|} g phi(m)`` and
  ``del phi = d_1 phi - (-1)^k phi d_0``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .cech import CechDga, build_cech_dga
from .linalg import (
    ChainComplex,
    Field,
    GradedDims,
    InvariantError,
    Matrix,
    Row,
    clean_dims,
    complex_cohomology,
    inverse,
    kernel,
    rank,
    sign,
    solve,
    vec_add,
)
from .simplicial import Simplex, SimplicialComplex, corpus_complex, complex_from_json

Edge = Tuple[object, object]


# -- local systems -------------------------------------------------------------


@dataclass
class LocalSystem:
    """Transport ``transport[(i, j)]`` (``i < j``) maps fiber(i) to fiber(j)."""

    base: SimplicialComplex
    field: Field
    degrees: Dict[object, List[int]]
    transport: Dict[Edge, Matrix]

    def rank(self, v) -> int:
        return len(self.degrees[v])

    def T(self, i, j) -> Matrix:
        """Transport fiber(i) -> fiber(j) along the edge {i, j}."""
        if i == j:
            return Matrix.identity(self.field, self.rank(i))
        if i < j:
            return self.transport[(i, j)]
        return inverse(self.transport[(j, i)])

    def graded_dims(self, v) -> GradedDims:
        out: Dict[int, int] = {}
        for s in self.degrees[v]:
            out[s] = out.get(s, 0) + 1
        return clean_dims(out)

    def restrict_degree(self, s: int) -> "LocalSystem":
        """Sub-system spanned by fiber basis vectors of degree s."""
        idx = {v: [a for a, d in enumerate(self.degrees[v]) if d == s] for v in self.base.vertices}
        tr = {e: m.block(idx[e[1]], idx[e[0]]) for e, m in self.transport.items()}
        return LocalSystem(self.base, self.field, {v: [s] * len(idx[v]) for v in idx}, tr)

    def fiber_degrees(self) -> List[int]:
        return sorted({s for v in self.base.vertices for s in self.degrees[v]})


def trivial_system(k: SimplicialComplex, f: Field, rank_: int = 1, degrees: Optional[Sequence[int]] = None) -> LocalSystem:
    degs = list(degrees) if degrees is not None else [0] * rank_
    return LocalSystem(
        k, f, {v: list(degs) for v in k.vertices},
        {e: Matrix.identity(f, len(degs)) for e in k.edges()},
    )


def system_from_edges(k: SimplicialComplex, f: Field, edges: Mapping[Edge, Sequence[Sequence]], rank_: int = 1,
                      degrees: Optional[Sequence[int]] = None) -> LocalSystem:
    """Identity transport except on the listed edges (given as dense matrices)."""
    p = trivial_system(k, f, rank_, degrees)
    for (i, j), rows in edges.items():
        m = Matrix.from_dense(f, rows)
        if i > j:
            i, j, m = j, i, inverse(m)
        if (i, j) not in p.transport:
            raise ValueError(f"{(i, j)} is not an edge")
        p.transport[(i, j)] = m
    return p


def circle_system(f: Field, monodromy) -> LocalSystem:
    """circle3 with transport ``monodromy`` on edge (0,1) and identity elsewhere."""
    m = monodromy if isinstance(monodromy, (list, tuple)) else [[monodromy]]
    return system_from_edges(corpus_complex("circle3"), f, {(0, 1): m}, rank_=len(m))


def _torus7_lattice_classes() -> Dict[Edge, Tuple[int, int]]:
    """Homology class (in a basis of pi_1 = Z^2) of the loop through each edge.

    Vertex i of torus7 lifts to the triangular lattice via a + 2b = i (mod 7);
    steps 1, 2, 3 lift to (1,0), (0,1), (1,1).  The deck lattice has basis
    u1 = (-2, 1), u2 = (1, 3).  Vertex lifts use the path 0 -> 1 -> ... -> 6.
    """
    lift = {i: (i, 0) for i in range(7)}
    step = {1: (1, 0), 2: (0, 1), 3: (1, 1)}
    out = {}
    for i in range(7):
        for s, vec in step.items():
            j = (i + s) % 7
            x = lift[i][0] + vec[0] - lift[j][0]
            y = lift[i][1] + vec[1] - lift[j][1]
            # solve (x, y) = m*(-2, 1) + n*(1, 3)
            det = -7
            m = Fraction(3 * x - y, det)
            n = Fraction(-x - 2 * y, det)
            assert m.denominator == 1 and n.denominator == 1
            a, b = (i, j) if i < j else (j, i)
            cls = (int(m), int(n)) if i < j else (-int(m), -int(n))
            out[(a, b)] = cls
    return out


def _power(f: Field, m: Matrix, k: int) -> Matrix:
    if k < 0:
        m, k = inverse(m), -k
    out = Matrix.identity(f, m.nrows)
    for _ in range(k):
        out = out @ m
    return out


def torus_system(f: Field, a, b) -> LocalSystem:
    """torus7 with commuting monodromies a, b (scalars or dense matrices) on the two loops."""
    A = Matrix.from_dense(f, a if isinstance(a, (list, tuple)) else [[a]])
    B = Matrix.from_dense(f, b if isinstance(b, (list, tuple)) else [[b]])
    if A @ B != B @ A:
        raise ValueError("torus monodromies must commute")
    k = corpus_complex("torus7")
    classes = _torus7_lattice_classes()
    tr = {e: _power(f, A, classes[e][0]) @ _power(f, B, classes[e][1]) for e in k.edges()}
    return LocalSystem(k, f, {v: [0] * A.nrows for v in k.vertices}, tr)


def gauge_transform(p: LocalSystem, gauge: Mapping[object, Matrix]) -> LocalSystem:
    """T'_{ji} = G_j T_{ji} G_i^{-1}; flatness and monodromy classes are preserved."""
    tr = {(i, j): gauge[j] @ m @ inverse(gauge[i]) for (i, j), m in p.transport.items()}
    return LocalSystem(p.base, p.field, dict(p.degrees), tr)


def hom_system(p0: LocalSystem, p1: LocalSystem) -> LocalSystem:
    """Hom(P0, P1): basis (a, b) = matrix unit sending basis a of P0 to basis b of P1."""
    if p0.base != p1.base or p0.field != p1.field:
        raise ValueError("local systems live on different bases or fields")
    f = p0.field
    degs = {}
    for v in p0.base.vertices:
        degs[v] = [d1 - d0 for d0 in p0.degrees[v] for d1 in p1.degrees[v]]
    tr = {}
    for (i, j) in p0.base.edges():
        t0inv = inverse(p0.T(i, j))
        t1 = p1.T(i, j)
        r0, r1 = p0.rank(i), p1.rank(i)
        m = Matrix(f, len(degs[j]), len(degs[i]))
        # phi -> T1 phi T0^{-1}; column (a, b) is E_{b a}
        for a in range(r0):
            for b in range(r1):
                col = a * r1 + b
                for b2, x in t1.column(b).items():
                    for a2, y in t0inv.rows[a].items():
                        m.add_entry(a2 * p1.rank(j) + b2, col, x * y)
        tr[(i, j)] = m
    return LocalSystem(p0.base, f, degs, tr)


@dataclass
class ValidationReport:
    non_invertible: List[Edge]
    violations: List[Simplex]
    degree_errors: List[Edge]

    @property
    def flat(self) -> bool:
        return not (self.non_invertible or self.violations or self.degree_errors)


def validate_local_system(p: LocalSystem) -> ValidationReport:
    bad_inv, bad_deg = [], []
    for (i, j), m in sorted(p.transport.items()):
        if (m.nrows, m.ncols) != (p.rank(j), p.rank(i)) or rank(m) != m.nrows or m.nrows != m.ncols:
            bad_inv.append((i, j))
            continue
        for r, row in enumerate(m.rows):
            if any(p.degrees[j][r] != p.degrees[i][c] for c in row):
                bad_deg.append((i, j))
                break
    viol = []
    if not bad_inv:
        for (i, j, k) in p.base.cells(2):
            if p.transport[(i, k)] != p.transport[(j, k)] @ p.transport[(i, j)]:
                viol.append((i, j, k))
    return ValidationReport(bad_inv, viol, bad_deg)


def _require_flat(p: LocalSystem) -> None:
    rep = validate_local_system(p)
    if not rep.flat:
        raise InvariantError("local system is not flat", rep.violations or rep.non_invertible or rep.degree_errors)


# -- the direct oracle -------------------------------------------------------------


def twisted_cochain_complex(p: LocalSystem) -> ChainComplex:
    """C^n = sum over n-simplices of the fiber at the FIRST vertex.

    (dc)(v_0..v_n) = T_{v_1 -> v_0} c(v_1..v_n) + sum_{j>=1} (-1)^j c(..^v_j..).
    Written independently of the dg-module machinery; fibers must be ungraded.
    """
    f = p.field
    k = p.base
    offs: Dict[int, Dict[Simplex, int]] = {}
    dims = {}
    for n in range(k.dimension + 1):
        o, pos = {}, 0
        for s in k.cells(n):
            o[s] = pos
            pos += p.rank(s[0])
        offs[n], dims[n] = o, pos
    diffs = {}
    for n in range(k.dimension):
        m = Matrix(f, dims[n + 1], dims[n])
        for t in k.cells(n + 1):
            row0 = offs[n + 1][t]
            for j in range(len(t)):
                face = t[:j] + t[j + 1:]
                col0 = offs[n][face]
                if j == 0:
                    tm = p.T(t[1], t[0])
                    for r, row in enumerate(tm.rows):
                        for c, v in row.items():
                            m.add_entry(row0 + r, col0 + c, v)
                else:
                    for a in range(p.rank(t[0])):
                        m.add_entry(row0 + a, col0 + a, sign(j))
        diffs[n] = m
    return ChainComplex(f, dims, diffs)


def twisted_cohomology_bigraded(p: LocalSystem) -> Dict[Tuple[int, int], int]:
    """{(r, s): dim H^r(Z; P^s)} using the degree-s sub-systems."""
    _require_flat(p)
    out = {}
    for s in p.fiber_degrees():
        for r, d in complex_cohomology(twisted_cochain_complex(p.restrict_degree(s))).items():
            out[(r, s)] = d
    return out


def twisted_cohomology_oracle(p: LocalSystem) -> GradedDims:
    """Total-degree dims of H^*(Z; P), fiber degree added to cochain degree."""
    out: Dict[int, int] = {}
    for (r, s), d in twisted_cohomology_bigraded(p).items():
        out[r + s] = out.get(r + s, 0) + d
    return clean_dims(out)


# -- presheaf-type modules -------------------------------------------------------


@dataclass
class PresheafModule:
    """Left dg module over a Cech algebra split into simplex-indexed stalks.

    ``stalk_degrees[I]`` lists stalk basis degrees (I a global simplex index);
    ``diff`` is the total differential on the flattened basis; ``action[(J, I)]``
    maps stalk I to stalk J u I.
    """

    dga: CechDga
    stalk_degrees: Dict[int, List[int]]
    diff: Matrix
    action: Dict[Tuple[int, int], Matrix]
    basis: List[Tuple[int, int]] = field(init=False)
    offset: Dict[int, int] = field(init=False)

    def __post_init__(self):
        self.basis, self.offset = [], {}
        for I in range(self.dga.dim):
            self.offset[I] = len(self.basis)
            self.basis.extend((I, a) for a in range(len(self.stalk_degrees.get(I, []))))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def field(self) -> Field:
        return self.dga.field

    def cech_degree(self, I: int) -> int:
        return self.dga.degree(I)

    def degree_of(self, b: int) -> int:
        I, a = self.basis[b]
        return self.stalk_degrees[I][a] + self.dga.degree(I)

    def stalk_indices(self, I: int) -> List[int]:
        o = self.offset[I]
        return list(range(o, o + len(self.stalk_degrees.get(I, []))))

    def total_complex(self) -> ChainComplex:
        f = self.field
        by_deg: Dict[int, List[int]] = {}
        for b in range(self.dim):
            by_deg.setdefault(self.degree_of(b), []).append(b)
        diffs = {}
        for n, src in by_deg.items():
            tgt = by_deg.get(n + 1, [])
            diffs[n] = self.diff.block(tgt, src)
        for n, src in by_deg.items():
            stray = set()
            for b in src:
                for r, row in enumerate(self.diff.rows):
                    if b in row and self.degree_of(r) != n + 1:
                        stray.add(r)
            if stray:
                raise InvariantError("differential is not of degree +1", n)
        return ChainComplex(f, {n: len(v) for n, v in by_deg.items()}, diffs,
                            {n: v for n, v in by_deg.items()})

    def act(self, J: int, vec: Mapping[int, object]) -> Row:
        """g_J . vec for a sparse vector on the flattened basis."""
        f = self.field
        out: Row = {}
        by_stalk: Dict[int, Dict[int, object]] = {}
        for b, x in vec.items():
            I, a = self.basis[b]
            by_stalk.setdefault(I, {})[a] = x
        for I, local in by_stalk.items():
            m = self.action.get((J, I))
            if m is None:
                continue
            o = self.offset[self.dga.mul_basis(J, I)]
            for r, x in m.apply(local).items():
                out[o + r] = f.norm(out.get(o + r, 0) + x)
        return {k: v for k, v in out.items() if v != 0}

    def act_element(self, a: Mapping[int, object], vec: Mapping[int, object]) -> Row:
        out: Row = {}
        for J, x in a.items():
            out = vec_add(self.field, out, self.act(J, vec), x)
        return out

    def d(self, vec: Mapping[int, object]) -> Row:
        return self.diff.apply(vec)

    def stalk_complex(self, I: int) -> ChainComplex:
        """The stalk at I with the internal (I -> I) component of the differential."""
        idx = self.stalk_indices(I)
        degs = self.stalk_degrees.get(I, [])
        by_deg: Dict[int, List[int]] = {}
        for j, s in enumerate(degs):
            by_deg.setdefault(s, []).append(j)
        block = self.diff.block(idx, idx)
        diffs = {n: block.block(by_deg.get(n + 1, []), src) for n, src in by_deg.items()}
        return ChainComplex(self.field, {n: len(v) for n, v in by_deg.items()}, diffs)

    def verify(self) -> None:
        """d^2 = 0, Leibniz, associativity, unit rule and support condition, exactly."""
        f = self.field
        c = self.dga
        if not (self.diff @ self.diff).is_zero():
            for b in range(self.dim):
                if (self.diff @ self.diff).column(b):
                    raise InvariantError("d^2 != 0", c.simplices[self.basis[b][0]])
        self.total_complex()
        for (J, I), m in self.action.items():
            K = c.mul_basis(J, I)
            if K is None:
                raise InvariantError("action component outside the support condition", (c.simplices[J], c.simplices[I]))
            if (m.nrows, m.ncols) != (len(self.stalk_degrees.get(K, [])), len(self.stalk_degrees.get(I, []))):
                raise InvariantError("action component has wrong shape", (c.simplices[J], c.simplices[I]))
        for I in range(c.dim):
            for b in self.stalk_indices(I):
                e = {b: f.one()}
                for v in c.base.vertices:
                    gv = c.index[(v,)]
                    expect = e if c.simplices[I][0] == v else {}
                    if self.act(gv, e) != expect:
                        raise InvariantError("unit rule fails", (v, c.simplices[I]))
                de = self.d(e)
                for J in range(c.dim):
                    gJ = {J: f.one()}
                    ge = self.act(J, e)
                    lhs = self.d(ge)
                    rhs = vec_add(f, self.act_element(c.d(gJ), e), self.act(J, de), sign(c.degree(J)))
                    if lhs != rhs:
                        raise InvariantError("Leibniz fails", (c.simplices[J], c.simplices[I]))
                for K in range(c.dim):
                    ke = self.act(K, e)
                    if not ke:
                        continue
                    for J in range(c.dim):
                        jk = c.mul({J: f.one()}, {K: f.one()})
                        if self.act(J, ke) != self.act_element(jk, e):
                            raise InvariantError("action not associative", (c.simplices[J], c.simplices[K], c.simplices[I]))

    # -- freeness -------------------------------------------------------------------
    def generators(self) -> List[int]:
        """Flattened indices of the vertex stalks."""
        out = []
        for v in self.dga.base.vertices:
            out.extend(self.stalk_indices(self.dga.index[(v,)]))
        return out

    def free_decomposition(self) -> Dict[int, Matrix]:
        """For each simplex J, the inverse of g_J acting on the stalk of last(J).

        Raises InvariantError unless the generator-per-vertex map is a bijection
        onto a basis (freeness ignoring the differential).
        """
        c = self.dga
        out = {}
        for J in range(c.dim):
            last = c.index[(c.simplices[J][-1],)]
            n_last = len(self.stalk_degrees.get(last, []))
            n_J = len(self.stalk_degrees.get(J, []))
            if n_last != n_J:
                raise InvariantError("not free on vertex generators", c.simplices[J])
            if n_J == 0:
                out[J] = Matrix(self.field, 0, 0)
                continue
            m = self.action.get((J, last))
            if m is None or rank(m) != n_J:
                raise InvariantError("not free on vertex generators", c.simplices[J])
            out[J] = inverse(m)
        return out


def _identity_action(c: CechDga, stalk_sizes: Mapping[int, int]) -> Dict[Tuple[int, int], Matrix]:
    f = c.field
    act = {}
    for J in range(c.dim):
        for I in c.right_factors(J):
            K = c.mul_basis(J, I)
            if K is None:
                continue
            n = stalk_sizes.get(I, 0)
            if stalk_sizes.get(K, 0) != n:
                raise ValueError("stalk sizes incompatible with the identity action")
            if n:
                act[(J, I)] = Matrix.identity(f, n)
    return act


@dataclass
class HomotopyLocalSystem:
    """Per-vertex stalk complexes plus operators on every simplex of dim e >= 1.

    ``stalk_degrees[v]`` lists stalk basis degrees, ``stalk_diff[v]`` is the
    (degree +1) differential.  ``operators[s]`` for a simplex ``s = (i_0..i_e)``
    maps stalk(i_0) to stalk(i_e) and has degree 1 - e.
    """

    base: SimplicialComplex
    field: Field
    stalk_degrees: Dict[object, List[int]]
    stalk_diff: Dict[object, Matrix]
    operators: Dict[Simplex, Matrix]

    @classmethod
    def from_local_system(cls, p: LocalSystem) -> "HomotopyLocalSystem":
        f = p.field
        return cls(p.base, f, {v: list(p.degrees[v]) for v in p.base.vertices},
                   {v: Matrix(f, p.rank(v), p.rank(v)) for v in p.base.vertices},
                   dict(p.transport))


def build_module_Einf(h: HomotopyLocalSystem, dga: Optional[CechDga] = None) -> PresheafModule:
    """Stalk at last vertex; D = (-1)^k d_V + restriction + (-1)^{k+e} F_sigma terms."""
    f = h.field
    c = dga if dga is not None else build_cech_dga(h.base, f)
    stalk_deg = {I: list(h.stalk_degrees[s[-1]]) for I, s in enumerate(c.simplices)}
    sizes = {I: len(v) for I, v in stalk_deg.items()}
    offs, pos = {}, 0
    for I in range(c.dim):
        offs[I] = pos
        pos += sizes[I]
    D = Matrix(f, pos, pos)

    def put(tgt: int, src: int, m: Matrix, sign: int):
        for r, row in enumerate(m.rows):
            for col, v in row.items():
                D.add_entry(offs[tgt] + r, offs[src] + col, sign * v)

    for I, s in enumerate(c.simplices):
        k = len(s) - 1
        last = s[-1]
        n = sizes[I]
        put(I, I, h.stalk_diff[last], sign(k))
        for t, sg in c.d_basis(I):
            ts = c.simplices[t]
            new = (set(ts) - set(s)).pop()
            if new < last:
                put(t, I, Matrix.identity(f, n), sg)
        for sigma, op in h.operators.items():
            if sigma[0] != last or len(sigma) < 2:
                continue
            tgt = c.index.get(s + sigma[1:])
            if tgt is None:
                continue
            e = len(sigma) - 1
            put(tgt, I, op, sign(k + e))
    m = PresheafModule(c, stalk_deg, D, _identity_action(c, sizes))
    _check_square(m, h)
    return m


def _check_square(m: PresheafModule, h: HomotopyLocalSystem) -> None:
    sq = m.diff @ m.diff
    if sq.is_zero():
        return
    c = m.dga
    worst = None
    for r, row in enumerate(sq.rows):
        if row:
            tgt = c.simplices[m.basis[r][0]]
            src = c.simplices[m.basis[min(row)][0]]
            cand = (len(tgt), tgt, src)
            if worst is None or cand < worst:
                worst = cand
    raise InvariantError("generalized flatness fails (d^2 != 0)", worst[1])


def build_module_EP(p: LocalSystem, dga: Optional[CechDga] = None) -> PresheafModule:
    _require_flat(p)
    return build_module_Einf(HomotopyLocalSystem.from_local_system(p), dga)


# -- module maps, cones -------------------------------------------------------------


def shift_module(m: PresheafModule, k: int = 1) -> PresheafModule:
    """M[k]: stalk degrees drop by k, d -> (-1)^k d, g.(s x) = (-1)^{k|g|} s(g.x)."""
    c = m.dga
    stalk = {I: [s - k for s in v] for I, v in m.stalk_degrees.items()}
    act = {(J, I): a.scale(sign(k * c.degree(J))) for (J, I), a in m.action.items()}
    return PresheafModule(c, stalk, m.diff.scale(sign(k)), act)


def cone(f_map: Matrix, src: PresheafModule, tgt: PresheafModule) -> PresheafModule:
    """cone(f: src -> tgt) = tgt + src[1] with D(t, s) = (d t + f s, -d s), stalkwise."""
    c = src.dga
    fld = c.field
    s1 = shift_module(src, 1)
    stalk = {I: list(tgt.stalk_degrees.get(I, [])) + list(s1.stalk_degrees.get(I, [])) for I in range(c.dim)}
    out = PresheafModule(c, stalk, Matrix(fld, 0, 0), {})
    # flattened positions: stalk I of tgt first, then of src
    pos_t = {b: out.offset[I] + a for b, (I, a) in enumerate(tgt.basis)}
    pos_s = {b: out.offset[I] + len(tgt.stalk_degrees.get(I, [])) + a for b, (I, a) in enumerate(src.basis)}
    D = Matrix(fld, out.dim, out.dim)
    for r, row in enumerate(tgt.diff.rows):
        for col, v in row.items():
            D.add_entry(pos_t[r], pos_t[col], v)
    for r, row in enumerate(s1.diff.rows):
        for col, v in row.items():
            D.add_entry(pos_s[r], pos_s[col], v)
    for r, row in enumerate(f_map.rows):
        for col, v in row.items():
            D.add_entry(pos_t[r], pos_s[col], v)
    act = {}
    keys = set(tgt.action) | set(s1.action)
    for (J, I) in keys:
        K = c.mul_basis(J, I)
        nt_I, nt_K = len(tgt.stalk_degrees.get(I, [])), len(tgt.stalk_degrees.get(K, []))
        ns_I, ns_K = len(src.stalk_degrees.get(I, [])), len(src.stalk_degrees.get(K, []))
        m = Matrix(fld, nt_K + ns_K, nt_I + ns_I)
        a = tgt.action.get((J, I))
        if a is not None:
            for r, row in enumerate(a.rows):
                for col, v in row.items():
                    m.add_entry(r, col, v)
        a = s1.action.get((J, I))
        if a is not None:
            for r, row in enumerate(a.rows):
                for col, v in row.items():
                    m.add_entry(nt_K + r, nt_I + col, v)
        act[(J, I)] = m
    out.diff = D
    out.action = act
    return out


def cone_of_identity_module(m: PresheafModule) -> PresheafModule:
    return cone(Matrix.identity(m.field, m.dim), m, m)


# -- hom complexes -------------------------------------------------------------------


@dataclass
class HomComplex:
    """Hom complex with Cech bookkeeping: basis pairs (generator of M0, element of M1)."""

    complex: ChainComplex
    pairs: Dict[int, List[Tuple[int, int]]]
    cech_shift: Dict[int, List[int]]
    stalk_shift: Dict[int, List[int]]
    m0: PresheafModule
    m1: PresheafModule

    def cohomology(self) -> GradedDims:
        return complex_cohomology(self.complex)


def _hom_pairs(m0: PresheafModule, m1: PresheafModule) -> Dict[int, List[Tuple[int, int]]]:
    c = m0.dga
    by_first: Dict[object, List[int]] = {}
    for b, (I, _) in enumerate(m1.basis):
        by_first.setdefault(c.simplices[I][0], []).append(b)
    pairs: Dict[int, List[Tuple[int, int]]] = {}
    for s in m0.generators():
        v = c.simplices[m0.basis[s][0]][0]
        for t in by_first.get(v, []):
            k = m1.degree_of(t) - m0.degree_of(s)
            pairs.setdefault(k, []).append((s, t))
    return pairs


def hom_complex(m0: PresheafModule, m1: PresheafModule) -> HomComplex:
    """Module maps determined by images of vertex generators.

    phi(s) for a generator s over vertex v must lie in g_v M1, i.e. in stalks
    whose first vertex is v.  The differential is expanded through the free
    decomposition b = g_J . (A_J^{-1} b) of M0.
    """
    if m0.dga is not m1.dga and (m0.dga.base != m1.dga.base or m0.dga.field != m1.dga.field):
        raise ValueError("modules over different Cech algebras")
    c = m0.dga
    f = c.field
    dec = m0.free_decomposition()
    pairs = _hom_pairs(m0, m1)
    index = {k: {pq: j for j, pq in enumerate(v)} for k, v in pairs.items()}
    gens = set(m0.generators())
    # D0 of every generator, decomposed as sum of coeff * g_J . s''
    d0_terms: Dict[int, List[Tuple[int, int, object]]] = {}
    for s in gens:
        terms = []
        by_stalk: Dict[int, Dict[int, object]] = {}
        for b, x in m0.d({s: f.one()}).items():
            I, a = m0.basis[b]
            by_stalk.setdefault(I, {})[a] = x
        for J, local in by_stalk.items():
            last = c.index[(c.simplices[J][-1],)]
            o = m0.offset[last]
            for a, x in dec[J].apply(local).items():
                terms.append((J, o + a, x))
        d0_terms[s] = terms
    # targets grouped by generator for the second half of the differential
    by_source: Dict[int, Dict[int, List[int]]] = {}
    for k, v in pairs.items():
        for j, (s, t) in enumerate(v):
            by_source.setdefault(k, {}).setdefault(s, []).append(j)
    diffs = {}
    for k, v in pairs.items():
        tgt_index = index.get(k + 1, {})
        cols: List[Dict[Tuple[int, int], object]] = [dict() for _ in v]

        def put(col, s_out, vec, sign):
            acc = cols[col]
            for t2, x in vec.items():
                key = (s_out, t2)
                acc[key] = f.norm(acc.get(key, 0) + sign * x)

        for col, (s, t) in enumerate(v):
            put(col, s, m1.d({t: f.one()}), 1)
        sk = sign(k)
        for s_out in gens:
            for J, s2, x in d0_terms[s_out]:
                for col in by_source.get(k, {}).get(s2, []):
                    t = v[col][1]
                    gt = m1.act(J, {t: f.one()})
                    put(col, s_out, gt, -sk * x * sign(c.degree(J) * k))
        m = Matrix(f, len(pairs.get(k + 1, [])), len(v))
        for col, acc in enumerate(cols):
            for key, x in acc.items():
                if x == 0:
                    continue
                row = tgt_index.get(key)
                if row is None:
                    raise InvariantError("hom differential leaves g_v M1",
                                         (c.simplices[m0.basis[key[0]][0]], c.simplices[m1.basis[key[1]][0]]))
                m.add_entry(row, col, x)
        diffs[k] = m
    cx = ChainComplex(f, {k: len(v) for k, v in pairs.items()}, diffs, pairs)
    shift = {k: [c.degree(m1.basis[t][0]) for (s, t) in v] for k, v in pairs.items()}
    sshift = {k: [k - sh for sh in shift[k]] for k in pairs}
    return HomComplex(cx, pairs, shift, sshift, m0, m1)


def hom_complex_bruteforce(m0: PresheafModule, m1: PresheafModule) -> ChainComplex:
    """Hom complex from an exact solve of the linearity constraints on all maps.

    Degree-k maps are matrices (b0 -> b1) with deg b1 - deg b0 = k subject to
    phi(g_J b) = (-1)^{k|J|} g_J phi(b).  Independent of the free decomposition.
    """
    c = m0.dga
    f = c.field
    deg0 = [m0.degree_of(b) for b in range(m0.dim)]
    deg1 = [m1.degree_of(b) for b in range(m1.dim)]
    ks = sorted({b - a for a in set(deg0) for b in set(deg1)})
    spaces = {}
    for k in ks:
        unknowns = [(a, b) for a in range(m0.dim) for b in range(m1.dim) if deg1[b] - deg0[a] == k]
        uidx = {u: j for j, u in enumerate(unknowns)}
        rows: List[Row] = []
        for J in range(c.dim):
            sg = sign(k * c.degree(J))
            for a in range(m0.dim):
                # phi(g_J a) - sg * g_J phi(a), coordinate by coordinate
                ga = m0.act(J, {a: f.one()})
                eqs: Dict[int, Row] = {}
                for a2, x in ga.items():
                    for b in range(m1.dim):
                        j = uidx.get((a2, b))
                        if j is not None:
                            eqs.setdefault(b, {})
                            eqs[b][j] = f.norm(eqs[b].get(j, 0) + x)
                for b in range(m1.dim):
                    j = uidx.get((a, b))
                    if j is None:
                        continue
                    for b2, x in m1.act(J, {b: f.one()}).items():
                        eqs.setdefault(b2, {})
                        eqs[b2][j] = f.norm(eqs[b2].get(j, 0) - sg * x)
                rows.extend({j: x for j, x in r.items() if x} for r in eqs.values())
        cons = Matrix(f, len(rows), len(unknowns), [r for r in rows] or [])
        spaces[k] = (unknowns, kernel(cons))
    diffs = {}
    for k in ks:
        unknowns, basis = spaces[k]
        if k + 1 not in spaces:
            continue
        unk1, basis1 = spaces[k + 1]
        u1 = {u: j for j, u in enumerate(unk1)}
        coords = Matrix.from_columns(f, len(unk1), basis1)
        cols = []
        for vec in basis:
            phi = Matrix(f, m1.dim, m0.dim)
            for j, x in vec.items():
                a, b = unknowns[j]
                phi.add_entry(b, a, x)
            dphi = m1.diff @ phi - (phi @ m0.diff).scale(sign(k))
            target = {}
            for b, row in enumerate(dphi.rows):
                for a, x in row.items():
                    target[u1[(a, b)]] = x
            sol = solve(coords, target)
            if sol is None:
                raise InvariantError("differential of a module map is not a module map", k)
            cols.append(sol)
        diffs[k] = Matrix.from_columns(f, len(basis1), cols)
    return ChainComplex(f, {k: len(spaces[k][1]) for k in ks}, diffs)


# -- the presheaf lemma -------------------------------------------------------------


@dataclass
class HomotopyResult:
    found: bool
    homotopy: Optional[Matrix] = None
    failing_simplex: Optional[Simplex] = None


def contracting_homotopy(m: PresheafModule) -> HomotopyResult:
    """A degree -1 module endomorphism h with dh + hd = id, when every stalk is acyclic."""
    c = m.dga
    f = c.field
    for I in range(c.dim):
        if complex_cohomology(m.stalk_complex(I)):
            return HomotopyResult(False, failing_simplex=c.simplices[I])
    hc = hom_complex(m, m)
    pairs0 = hc.pairs.get(0, [])
    ident = {}
    for j, (s, t) in enumerate(pairs0):
        if s == t:
            ident[j] = f.one()
    dm = hc.complex.d(-1)
    sol = solve(dm, ident) if hc.pairs.get(-1) else (None if ident else {})
    if sol is None:
        raise InvariantError("stalks are acyclic but no contracting homotopy was found", None)
    dec = m.free_decomposition()
    H = Matrix(f, m.dim, m.dim)
    gen_image: Dict[int, Row] = {}
    for j, x in sol.items():
        s, t = hc.pairs[-1][j]
        gen_image[s] = vec_add(f, gen_image.get(s, {}), {t: x})
    for b, (J, a) in enumerate(m.basis):
        last = c.index[(c.simplices[J][-1],)]
        o = m.offset[last]
        src = dec[J].apply({a: f.one()})
        img: Row = {}
        for a2, x in src.items():
            img = vec_add(f, img, gen_image.get(o + a2, {}), x)
        img = m.act(J, img)
        for r, x in img.items():
            H.add_entry(r, b, x * sign(c.degree(J)))
    check = m.diff @ H + H @ m.diff
    if check != Matrix.identity(f, m.dim):
        raise InvariantError("dh + hd != id", None)
    return HomotopyResult(True, H)


# -- random systems for property suites ---------------------------------------------------


def random_invertible(f: Field, n: int, rng: random.Random) -> Matrix:
    while True:
        m = Matrix.from_dense(f, [[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)])
        if rank(m) == n:
            return m


def _integer_cocycles(k: SimplicialComplex) -> List[Dict[Edge, int]]:
    """Z-valued 1-cocycles spanning H^1(K; Q) (plus nothing else)."""
    q = Field()
    from .cech import build_cech_dga as _b
    c = _b(k, q)
    _, reps = None, c.cohomology_basis().reps.get(1, [])
    out = []
    for z in reps:
        den = 1
        for v in z.values():
            den = den * v.denominator // _gcd(den, v.denominator)
        out.append({k.cells(1)[j]: int(v * den) for j, v in z.items()})
    return out


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _mod2_cocycles(k: SimplicialComplex) -> List[Dict[Edge, int]]:
    f2 = Field(2)
    c = build_cech_dga(k, f2)
    return [{k.cells(1)[j]: int(v) for j, v in z.items()} for z in c.cohomology_basis().reps.get(1, [])]


def random_flat_system(k: SimplicialComplex, f: Field, rank_: int, rng: random.Random) -> LocalSystem:
    """A random gauge of a system whose monodromy factors through H_1.

    Integer 1-cocycles w give T_e = M^{w(e)} for a random invertible M; mod-2
    cocycles give T_e = S^{w(e)} for an involution S.  Both are flat.
    """
    tr = {e: Matrix.identity(f, rank_) for e in k.edges()}
    ints = _integer_cocycles(k)
    if ints:
        M = random_invertible(f, rank_, rng)
        w = {e: 0 for e in k.edges()}
        for z in ints:
            a = rng.randint(-1, 1)
            for e, x in z.items():
                w[e] += a * x
        tr = {e: _power(f, M, w[e]) for e in k.edges()}
    else:
        mods = _mod2_cocycles(k) if f.p != 2 else []
        if mods and rng.random() < 0.7:
            G = random_invertible(f, rank_, rng)
            D = Matrix.from_dense(f, [[(-1 if (i == j and rng.random() < 0.5) else int(i == j)) for j in range(rank_)] for i in range(rank_)])
            S = G @ D @ inverse(G)
            w = {e: 0 for e in k.edges()}
            for z in mods:
                if rng.random() < 0.8:
                    for e, x in z.items():
                        w[e] = (w[e] + x) % 2
            tr = {e: (S if w[e] else Matrix.identity(f, rank_)) for e in k.edges()}
    p = LocalSystem(k, f, {v: [0] * rank_ for v in k.vertices}, tr)
    gauge = {v: random_invertible(f, rank_, rng) for v in k.vertices}
    return gauge_transform(p, gauge)


# -- JSON -------------------------------------------------------------------------------


def local_system_from_json(data: Mapping) -> LocalSystem:
    k = complex_from_json(data["complex"])
    f = Field.parse(data.get("field", "Q"))
    r = int(data.get("rank", 1))
    degrees = None
    if "degrees" in data:
        dd = {int(v): list(ds) for v, ds in data["degrees"].items()}
        first = dd[k.vertices[0]]
        degrees = first
        r = len(first)
    edges = {}
    for key, rows in data.get("edges", {}).items():
        i, j = (int(x) for x in key.strip("[]() ").split(","))
        edges[(i, j)] = [[f(_parse_scalar(x)) for x in row] for row in rows]
    return system_from_edges(k, f, edges, r, degrees)


def _parse_scalar(x):
    if isinstance(x, str):
        return Fraction(x)
    return x


def local_system_to_json(p: LocalSystem) -> dict:
    from .linalg import fmt
    return {
        "complex": p.base.name or p.base.to_json(),
        "field": str(p.field),
        "rank": p.rank(p.base.vertices[0]),
        "degrees": {str(v): list(p.degrees[v]) for v in p.base.vertices},
        "edges": {f"[{i},{j}]": [[fmt(x) for x in row] for row in m.to_dense()] for (i, j), m in sorted(p.transport.items())},
    }
