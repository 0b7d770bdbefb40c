"""The Cech dg algebra of the open-star cover of a triangulation.

One generator ``g_I`` of degree ``|I| - 1`` per simplex ``I``.  The product
``g_A * g_B`` is ``g_{A u B}`` when the last vertex of ``A`` is the first
vertex of ``B`` and ``A u B`` is a simplex (front/back splitting), else 0.
The differential is the ordered coboundary
``d g_I = sum_j (-1)^{pos(j)} g_{I u {j}}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple

from .linalg import (
    ChainComplex,
    CohomologyBasis,
    Field,
    GradedDims,
    InvariantError,
    Matrix,
    Row,
    sign,
    vec_add,
)
from .simplicial import Simplex, SimplicialComplex

Cochain = Dict[int, object]   # global simplex index -> coefficient


@dataclass
class CechDga:
    base: SimplicialComplex
    field: Field
    base_vertex: object
    simplices: List[Simplex] = field(init=False)
    index: Dict[Simplex, int] = field(init=False)
    _complex: ChainComplex = field(init=False, repr=False)
    _cohomology: Optional[CohomologyBasis] = field(default=None, init=False, repr=False)

    def __post_init__(self):
        self.simplices = self.base.all_simplices()
        self.index = {s: i for i, s in enumerate(self.simplices)}
        # position of each simplex inside its own degree
        self._local = {}
        for k in range(self.base.dimension + 1):
            for j, s in enumerate(self.base.cells(k)):
                self._local[s] = j
        self._cofaces: Dict[int, List[Tuple[int, int]]] = {}
        for s in self.simplices:
            out = []
            for v in self.base.vertices:
                if v in s:
                    continue
                t = tuple(sorted(s + (v,)))
                if t in self.index:
                    out.append((self.index[t], sign(t.index(v))))
            self._cofaces[self.index[s]] = out
        f = self.field
        dims = {k: len(self.base.cells(k)) for k in range(self.base.dimension + 1)}
        diffs = {}
        for k in range(self.base.dimension):
            m = Matrix(f, dims[k + 1], dims[k])
            for j, s in enumerate(self.base.cells(k)):
                for t, sg in self._cofaces[self.index[s]]:
                    m.add_entry(self._local[self.simplices[t]], j, sg)
            diffs[k] = m
        self._complex = ChainComplex(f, dims, diffs)
        # products keyed by (front index, back index)
        self._first: Dict[object, List[int]] = {}
        for s in self.simplices:
            self._first.setdefault(s[0], []).append(self.index[s])

    # -- basic structure ------------------------------------------------------
    def degree(self, i: int) -> int:
        return len(self.simplices[i]) - 1

    @property
    def dim(self) -> int:
        return len(self.simplices)

    @property
    def complex(self) -> ChainComplex:
        return self._complex

    def generator_counts(self) -> GradedDims:
        return dict(self._complex.dims)

    def mul_basis(self, a: int, b: int) -> Optional[int]:
        """Index of g_a * g_b (coefficient +1), or None if the product vanishes."""
        sa, sb = self.simplices[a], self.simplices[b]
        if sa[-1] != sb[0]:
            return None
        return self.index.get(sa + sb[1:])

    def right_factors(self, a: int) -> List[int]:
        """Indices b with g_a * g_b possibly nonzero (first vertex of b = last of a)."""
        return self._first.get(self.simplices[a][-1], [])

    def d_basis(self, i: int) -> List[Tuple[int, int]]:
        return self._cofaces[i]

    def d(self, x: Mapping[int, object]) -> Cochain:
        f = self.field
        out: Cochain = {}
        for i, v in x.items():
            for t, s in self._cofaces[i]:
                out[t] = out.get(t, 0) + s * v
        return {k: f.norm(v) for k, v in out.items() if f.norm(v) != 0}

    def mul(self, x: Mapping[int, object], y: Mapping[int, object]) -> Cochain:
        f = self.field
        out: Cochain = {}
        for a, u in x.items():
            for b, w in y.items():
                c = self.mul_basis(a, b)
                if c is not None:
                    out[c] = out.get(c, 0) + u * w
        return {k: f.norm(v) for k, v in out.items() if f.norm(v) != 0}

    def unit(self) -> Cochain:
        return {self.index[(v,)]: self.field.one() for v in self.base.vertices}

    def augmentation(self, x: Mapping[int, object]):
        return self.field.norm(x.get(self.index[(self.base_vertex,)], 0))

    def ideal_basis(self) -> List[int]:
        """Basis of ker(augmentation): every generator except the base vertex."""
        b = self.index[(self.base_vertex,)]
        return [i for i in range(self.dim) if i != b]

    def is_homogeneous(self, x: Mapping[int, object]) -> Optional[int]:
        degs = {self.degree(i) for i in x}
        return degs.pop() if len(degs) == 1 else None

    # -- degree-local coordinates --------------------------------------------
    def to_local(self, x: Mapping[int, object]) -> Tuple[int, Row]:
        if not x:
            raise ValueError("zero cochain has no degree")
        n = self.is_homogeneous(x)
        if n is None:
            raise ValueError("cochain is not homogeneous")
        return n, {self._local[self.simplices[i]]: v for i, v in x.items()}

    def from_local(self, n: int, v: Mapping[int, object]) -> Cochain:
        cells = self.base.cells(n)
        return {self.index[cells[j]]: x for j, x in v.items()}

    # -- verification -----------------------------------------------------------
    def verify(self) -> None:
        """d^2 = 0, Leibniz, associativity, two-sided unit, augmentation; exact."""
        f = self.field
        self._complex.check()
        one = self.unit()
        for a in range(self.dim):
            ga = {a: f.one()}
            if self.mul(one, ga) != ga or self.mul(ga, one) != ga:
                raise InvariantError("unit fails", self.simplices[a])
            da = self.d(ga)
            for b in range(self.dim):
                gb = {b: f.one()}
                ab = self.mul(ga, gb)
                lhs = self.d(ab)
                rhs = vec_add(f, self.mul(da, gb), self.mul(ga, self.d(gb)), sign(self.degree(a)))
                if lhs != rhs:
                    raise InvariantError("Leibniz fails", (self.simplices[a], self.simplices[b]))
                if self.augmentation(ab) != f.norm(self.augmentation(ga) * self.augmentation(gb)):
                    raise InvariantError("augmentation not multiplicative", (self.simplices[a], self.simplices[b]))
                if not ab:
                    continue
                for c in self.right_factors(b):
                    gc = {c: f.one()}
                    if self.mul(ab, gc) != self.mul(ga, self.mul(gb, gc)):
                        raise InvariantError("associativity fails", (self.simplices[a], self.simplices[b], self.simplices[c]))
            if self.augmentation(da) != 0:
                raise InvariantError("augmentation does not kill d", self.simplices[a])

    # -- cohomology -------------------------------------------------------------
    def cohomology_basis(self) -> CohomologyBasis:
        if self._cohomology is None:
            self._cohomology = CohomologyBasis.of(self._complex)
        return self._cohomology


def build_cech_dga(k: SimplicialComplex, f: Field, base_vertex=None) -> CechDga:
    if base_vertex is None:
        if not k.is_connected:
            raise ValueError("disconnected complex: pass an explicit base vertex for the augmentation")
        base_vertex = k.vertices[0]
    if (base_vertex,) not in k.simplices:
        raise ValueError(f"base vertex {base_vertex!r} not in complex")
    return CechDga(k, f, base_vertex)


def dga_cohomology(c: CechDga) -> Tuple[GradedDims, Dict[int, List[Cochain]]]:
    """Dimensions of H(C) and representative cocycles (as global cochains)."""
    cb = c.cohomology_basis()
    reps = {n: [c.from_local(n, z) for z in zs] for n, zs in cb.reps.items() if zs}
    return cb.dims(), reps


@dataclass
class CohomologyClass:
    degree: int
    coordinates: List

    @property
    def is_zero(self) -> bool:
        return all(x == 0 for x in self.coordinates)


def cohomology_class(c: CechDga, x: Mapping[int, object], degree: Optional[int] = None) -> CohomologyClass:
    if not x:
        return CohomologyClass(degree if degree is not None else 0, [c.field.zero()] * len(c.cohomology_basis().reps.get(degree or 0, [])))
    n, v = c.to_local(x)
    return CohomologyClass(n, c.cohomology_basis().coordinates(n, v))


def cup_product_classes(c: CechDga, a: Mapping[int, object], b: Mapping[int, object]) -> CohomologyClass:
    """The class of a*b for cocycles a, b."""
    for x in (a, b):
        if c.d(x):
            raise ValueError("input is not a cocycle")
    deg = (c.is_homogeneous(a) or 0) + (c.is_homogeneous(b) or 0) if a and b else None
    return cohomology_class(c, c.mul(a, b), deg)
