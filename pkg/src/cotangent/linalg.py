"""Exact linear algebra over prime fields and the rationals.

Matrices are stored as sparse rows (``dict`` column -> nonzero entry).  Prime
field elements are plain ``int`` in ``range(p)``; rationals are
``fractions.Fraction``.  Nothing here ever touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple


class InvariantError(Exception):
    """A mathematical identity (d^2 = 0, Leibniz, ...) failed.

    ``where`` locates the failure (a degree, a simplex, a pair of objects).
    """

    def __init__(self, message: str, where=None):
        super().__init__(message if where is None else f"{message} at {where}")
        self.where = where


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def sign(n: int) -> int:
    """(-1)^n as an int, for any integer n (``(-1) ** n`` is a float when n < 0)."""
    return -1 if n % 2 else 1


@dataclass(frozen=True)
class Field:
    """Either F_p (``p`` prime, at most 2**31) or Q (``p is None``)."""

    p: Optional[int] = None

    def __post_init__(self):
        if self.p is not None and (not _is_prime(self.p) or self.p > 2**31):
            raise ValueError(f"not a supported prime: {self.p}")

    @classmethod
    def parse(cls, spec: str) -> "Field":
        s = str(spec).strip().upper()
        if s in ("Q", "QQ"):
            return cls(None)
        if s.startswith("F") or s.startswith("GF"):
            return cls(int(s.lstrip("GF")))
        raise ValueError(f"cannot parse field spec {spec!r}")

    @property
    def characteristic(self) -> int:
        return 0 if self.p is None else self.p

    def __str__(self) -> str:
        return "Q" if self.p is None else f"F{self.p}"

    def __call__(self, x):
        """Coerce an int (or Fraction, for Q) into the field."""
        if self.p is None:
            return Fraction(x)
        if isinstance(x, Fraction):
            return (x.numerator * pow(x.denominator, -1, self.p)) % self.p
        return int(x) % self.p

    def zero(self):
        return self(0)

    def one(self):
        return self(1)

    def inv(self, x):
        if self.p is None:
            if x == 0:
                raise ZeroDivisionError("inverse of zero")
            return 1 / Fraction(x)
        if x % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(int(x), -1, self.p)

    def norm(self, x):
        if isinstance(x, float):
            raise TypeError("floating-point value in exact arithmetic")
        return x if self.p is None else x % self.p

    def elements(self):
        if self.p is None:
            raise ValueError("Q is infinite")
        return range(self.p)


def fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return str(x)


Row = Dict[int, object]


@dataclass
class Matrix:
    """Sparse matrix over ``field``; ``rows[r]`` maps column -> nonzero entry."""

    field: Field
    nrows: int
    ncols: int
    rows: List[Row] = None

    def __post_init__(self):
        if self.rows is None:
            self.rows = [dict() for _ in range(self.nrows)]
        if len(self.rows) != self.nrows:
            raise ValueError("row count does not match nrows")

    # construction -------------------------------------------------------
    @classmethod
    def zeros(cls, f: Field, nrows: int, ncols: int) -> "Matrix":
        return cls(f, nrows, ncols)

    @classmethod
    def identity(cls, f: Field, n: int) -> "Matrix":
        return cls(f, n, n, [{i: f.one()} for i in range(n)])

    @classmethod
    def from_dense(cls, f: Field, data: Sequence[Sequence], ncols: Optional[int] = None) -> "Matrix":
        data = [list(r) for r in data]
        if ncols is None:
            ncols = len(data[0]) if data else 0
        rows = []
        for r in data:
            if len(r) != ncols:
                raise ValueError("ragged matrix")
            rows.append({c: f(v) for c, v in enumerate(r) if f(v) != 0})
        return cls(f, len(data), ncols, rows)

    @classmethod
    def from_entries(cls, f: Field, nrows: int, ncols: int, entries: Iterable[Tuple[int, int, object]]) -> "Matrix":
        m = cls(f, nrows, ncols)
        for r, c, v in entries:
            m.add_entry(r, c, v)
        return m

    @classmethod
    def from_columns(cls, f: Field, nrows: int, columns: Sequence[Mapping[int, object]]) -> "Matrix":
        m = cls(f, nrows, len(columns))
        for c, col in enumerate(columns):
            for r, v in col.items():
                m.add_entry(r, c, v)
        return m

    def add_entry(self, r: int, c: int, v) -> None:
        row = self.rows[r]
        x = self.field.norm(row.get(c, 0) + v)
        if x == 0:
            row.pop(c, None)
        else:
            row[c] = x

    def copy(self) -> "Matrix":
        return Matrix(self.field, self.nrows, self.ncols, [dict(r) for r in self.rows])

    # access ---------------------------------------------------------------
    def __getitem__(self, rc):
        r, c = rc
        return self.rows[r].get(c, self.field.zero())

    def to_dense(self) -> List[list]:
        z = self.field.zero()
        return [[row.get(c, z) for c in range(self.ncols)] for row in self.rows]

    def nnz(self) -> int:
        return sum(len(r) for r in self.rows)

    def is_zero(self) -> bool:
        return all(not r for r in self.rows)

    def column(self, c: int) -> Row:
        return {r: row[c] for r, row in enumerate(self.rows) if c in row}

    def columns(self) -> List[Row]:
        cols: List[Row] = [dict() for _ in range(self.ncols)]
        for r, row in enumerate(self.rows):
            for c, v in row.items():
                cols[c][r] = v
        return cols

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return (self.nrows, self.ncols) == (other.nrows, other.ncols) and self.rows == other.rows

    def __repr__(self) -> str:
        return f"Matrix({self.field}, {self.nrows}x{self.ncols}, nnz={self.nnz()})"

    # arithmetic -------------------------------------------------------------
    def transpose(self) -> "Matrix":
        t = Matrix(self.field, self.ncols, self.nrows)
        for r, row in enumerate(self.rows):
            for c, v in row.items():
                t.rows[c][r] = v
        return t

    def __add__(self, other: "Matrix") -> "Matrix":
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValueError("shape mismatch in addition")
        out = self.copy()
        for r, row in enumerate(other.rows):
            for c, v in row.items():
                out.add_entry(r, c, v)
        return out

    def __neg__(self) -> "Matrix":
        return self.scale(-1)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def scale(self, s) -> "Matrix":
        f = self.field
        s = f(s)
        if s == 0:
            return Matrix(f, self.nrows, self.ncols)
        return Matrix(f, self.nrows, self.ncols, [{c: f.norm(v * s) for c, v in row.items()} for row in self.rows])

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.nrows}x{self.ncols} @ {other.nrows}x{other.ncols}")
        f = self.field
        out = []
        orows = other.rows
        for row in self.rows:
            acc: Row = {}
            for k, a in row.items():
                for c, b in orows[k].items():
                    acc[c] = acc.get(c, 0) + a * b
            out.append({c: f.norm(v) for c, v in acc.items() if f.norm(v) != 0})
        return Matrix(f, self.nrows, other.ncols, out)

    def apply(self, vec: Mapping[int, object]) -> Row:
        """Matrix times a sparse column vector."""
        f = self.field
        out: Row = {}
        for r, row in enumerate(self.rows):
            s = 0
            for c, v in row.items():
                x = vec.get(c)
                if x is not None:
                    s += v * x
            s = f.norm(s)
            if s != 0:
                out[r] = s
        return out

    def block(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "Matrix":
        cpos = {c: j for j, c in enumerate(col_idx)}
        rows = []
        for r in row_idx:
            rows.append({cpos[c]: v for c, v in self.rows[r].items() if c in cpos})
        return Matrix(self.field, len(row_idx), len(col_idx), rows)


def vec_add(f: Field, a: Row, b: Mapping[int, object], s=1) -> Row:
    """a + s*b, returned as a new sparse vector."""
    out = dict(a)
    for k, v in b.items():
        x = f.norm(out.get(k, 0) + s * v)
        if x == 0:
            out.pop(k, None)
        else:
            out[k] = x
    return out


# -- elimination ------------------------------------------------------------


class Echelon:
    """Incremental row echelon form with deterministic pivots.

    Rows are reduced against existing pivots in insertion order; the pivot of
    a new row is its first nonzero column.  Optionally tracks, for every pivot
    row, its expression in terms of the inserted rows.
    """

    def __init__(self, f: Field, track: bool = False):
        self.f = f
        self.pivots: Dict[int, Row] = {}
        self.track = track
        self.combos: Dict[int, Row] = {}
        self.count = 0

    def reduce(self, row: Mapping[int, object], combo: Optional[Row] = None) -> Tuple[Row, Optional[Row]]:
        f = self.f
        row = {c: f.norm(v) for c, v in row.items() if f.norm(v) != 0}
        if not self.pivots:
            return row, combo
        changed = True
        while row and changed:
            changed = False
            for c in sorted(row):
                if c in self.pivots:
                    s = row[c]
                    row = vec_add(f, row, self.pivots[c], -s)
                    if combo is not None:
                        combo = vec_add(f, combo, self.combos[c], -s)
                    changed = True
                    break
        return row, combo

    def insert(self, row: Mapping[int, object]) -> bool:
        """Add a row; returns True if it increased the rank."""
        idx = self.count
        self.count += 1
        combo = {idx: self.f.one()} if self.track else None
        red, combo = self.reduce(row, combo)
        if not red:
            return False
        c = min(red)
        s = self.f.inv(red[c])
        red = {k: self.f.norm(v * s) for k, v in red.items()}
        self.pivots[c] = red
        if self.track:
            self.combos[c] = {k: self.f.norm(v * s) for k, v in combo.items()}
        return True

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def contains(self, row: Mapping[int, object]) -> bool:
        red, _ = self.reduce(row)
        return not red

    def express(self, row: Mapping[int, object]) -> Optional[Row]:
        """Coefficients of ``row`` in terms of the inserted rows, or None."""
        if not self.track:
            raise ValueError("echelon built without tracking")
        red, combo = self.reduce(row, {})
        if red:
            return None
        return {k: self.f.norm(-v) for k, v in combo.items() if self.f.norm(v) != 0}


def rank(m: Matrix) -> int:
    """Rank over the matrix's field."""
    if m.nrows > m.ncols:
        m = m.transpose()
    e = Echelon(m.field)
    for row in m.rows:
        if row:
            e.insert(row)
    return e.rank


def rref(m: Matrix) -> Tuple[List[int], List[Row]]:
    """Reduced row echelon form: (pivot columns ascending, reduced rows)."""
    f = m.field
    e = Echelon(f)
    for row in m.rows:
        if row:
            e.insert(row)
    piv = sorted(e.pivots)
    rows = {c: dict(e.pivots[c]) for c in piv}
    for c in reversed(piv):
        rc = rows[c]
        for c2 in piv:
            if c2 < c and c in rows[c2]:
                rows[c2] = vec_add(f, rows[c2], rc, -rows[c2][c])
    return piv, [rows[c] for c in piv]


def kernel(m: Matrix) -> List[Row]:
    """Basis of {x : m x = 0} as sparse vectors of length m.ncols."""
    f = m.field
    piv, rows = rref(m)
    pivset = set(piv)
    basis = []
    for free in range(m.ncols):
        if free in pivset:
            continue
        v = {free: f.one()}
        for c, row in zip(piv, rows):
            if free in row:
                v[c] = f.norm(-row[free])
        basis.append(v)
    return basis


def solve(a: Matrix, b: Mapping[int, object]) -> Optional[Row]:
    """Some x with a x = b, or None if the system is inconsistent."""
    f = a.field
    if any(k >= a.nrows or k < 0 for k in b):
        raise ValueError("right-hand side does not match the row count")
    aug = a.copy()
    aug.ncols += 1
    for r, v in b.items():
        aug.add_entry(r, a.ncols, f(v))
    piv, rows = rref(aug)
    if piv and piv[-1] == a.ncols:
        return None
    x: Row = {}
    for c, row in zip(piv, rows):
        v = row.get(a.ncols)
        if v:
            x[c] = v
    return x


def inverse(m: Matrix) -> Matrix:
    if m.nrows != m.ncols:
        raise ValueError("inverse of non-square matrix")
    n = m.nrows
    e = Echelon(m.field, track=True)
    for row in m.transpose().rows:
        e.insert(row)
    if e.rank != n:
        raise ZeroDivisionError("matrix is singular")
    # rows of m^T are the columns of m, so each expression x solves m x = e_j
    cols = [e.express({j: m.field.one()}) for j in range(n)]
    return Matrix.from_columns(m.field, n, cols)


# -- graded data and complexes ------------------------------------------------


GradedDims = Dict[int, int]


def clean_dims(d: Mapping[int, int]) -> GradedDims:
    return {k: v for k, v in sorted(d.items()) if v}


@dataclass
class ChainComplex:
    """Cohomologically graded complex: ``diffs[n]`` maps degree n to n+1.

    ``diffs[n]`` has shape ``(dims[n+1], dims[n])``; missing entries are zero.
    ``labels`` optionally names the basis of each degree.
    """

    field: Field
    dims: Dict[int, int]
    diffs: Dict[int, Matrix] = field(default_factory=dict)
    labels: Dict[int, list] = field(default_factory=dict)

    def dim(self, n: int) -> int:
        return self.dims.get(n, 0)

    def d(self, n: int) -> Matrix:
        m = self.diffs.get(n)
        if m is None:
            return Matrix(self.field, self.dim(n + 1), self.dim(n))
        return m

    def degrees(self) -> List[int]:
        return sorted(k for k, v in self.dims.items() if v)

    def check(self) -> None:
        for n, m in self.diffs.items():
            if (m.nrows, m.ncols) != (self.dim(n + 1), self.dim(n)):
                raise InvariantError(f"differential has shape {m.nrows}x{m.ncols}", n)
        for n in self.degrees():
            if not (self.d(n + 1) @ self.d(n)).is_zero():
                raise InvariantError("d^2 != 0", n)

    def euler(self) -> int:
        return sum(sign(n) * v for n, v in self.dims.items())

    def shift(self, k: int) -> "ChainComplex":
        """C[k]: degree n of the result is degree n+k of C; d picks up (-1)^k."""
        s = -1 if k % 2 else 1
        return ChainComplex(
            self.field,
            {n - k: v for n, v in self.dims.items()},
            {n - k: m.scale(s) for n, m in self.diffs.items()},
            {n - k: v for n, v in self.labels.items()},
        )


def complex_cohomology(c: ChainComplex, check: bool = True) -> GradedDims:
    """dim H^n = dim ker d_n - rank d_{n-1}; raises InvariantError if d^2 != 0."""
    if check:
        c.check()
    out = {}
    ranks = {n: rank(c.d(n)) for n in c.degrees()}
    for n in c.degrees():
        h = c.dim(n) - ranks.get(n, 0) - ranks.get(n - 1, 0)
        if h:
            out[n] = h
    return out


def cone_of_identity(c: ChainComplex) -> ChainComplex:
    """cone(id_C) = C[1] + C with d(x, y) = (-dx, x + dy)."""
    f = c.field
    degs = set(c.degrees()) | {n - 1 for n in c.degrees()}
    dims = {n: c.dim(n + 1) + c.dim(n) for n in degs}
    diffs = {}
    for n in sorted(degs):
        a, b = c.dim(n + 1), c.dim(n)          # source: C^{n+1} + C^n
        a2, b2 = c.dim(n + 2), c.dim(n + 1)    # target: C^{n+2} + C^{n+1}
        m = Matrix(f, a2 + b2, a + b)
        for r, row in enumerate(c.d(n + 1).rows):
            for col, v in row.items():
                m.add_entry(r, col, -v)
        for i in range(a):
            m.add_entry(a2 + i, i, f.one())
        for r, row in enumerate(c.d(n).rows):
            for col, v in row.items():
                m.add_entry(a2 + r, a + col, v)
        diffs[n] = m
    return ChainComplex(f, clean_dims(dims), diffs)


@dataclass
class CohomologyBasis:
    """Representative cocycles per degree plus a solver for class coordinates."""

    complex: ChainComplex
    reps: Dict[int, List[Row]]

    @classmethod
    def of(cls, c: ChainComplex) -> "CohomologyBasis":
        reps = {}
        for n in c.degrees():
            e = Echelon(c.field)
            for col in c.d(n - 1).columns():
                e.insert(col)
            reps[n] = [z for z in kernel(c.d(n)) if e.insert(z)]
        return cls(c, reps)

    def dims(self) -> GradedDims:
        return clean_dims({n: len(v) for n, v in self.reps.items()})

    def is_cocycle(self, n: int, z: Mapping[int, object]) -> bool:
        return not self.complex.d(n).apply(z)

    def coordinates(self, n: int, z: Mapping[int, object]) -> List:
        """Coordinates of the class [z] in the chosen basis of H^n."""
        f = self.complex.field
        if not self.is_cocycle(n, z):
            raise ValueError(f"not a cocycle in degree {n}")
        reps = self.reps.get(n, [])
        if not reps:
            return []
        e = Echelon(f, track=True)
        boundaries = self.complex.d(n - 1).columns()
        for col in boundaries:
            e.insert(col)
        for r in reps:
            e.insert(r)
        combo = e.express(z)
        nb = len(boundaries)
        return [combo.get(nb + j, f.zero()) for j in range(len(reps))]


@dataclass
class Retract:
    """Strong deformation retract of a complex onto its cohomology.

    ``i`` embeds H into C, ``p`` projects, ``h`` has degree -1 and
    ``d h + h d = 1 - i p`` with ``h i = 0``, ``p h = 0``, ``h h = 0``.
    All maps are dicts degree -> Matrix.
    """

    complex: ChainComplex
    hdims: GradedDims
    i: Dict[int, Matrix]
    p: Dict[int, Matrix]
    h: Dict[int, Matrix]

    @classmethod
    def of(cls, c: ChainComplex) -> "Retract":
        f = c.field
        degs = c.degrees()
        lift: Dict[int, List[int]] = {}      # columns of d_n chosen as complement to ker
        for n in degs:
            e = Echelon(f)
            chosen = []
            for j, col in enumerate(c.d(n).columns()):
                if col and e.insert(col):
                    chosen.append(j)
            lift[n] = chosen
        i_maps, p_maps, h_maps, hdims = {}, {}, {}, {}
        for n in degs:
            dim = c.dim(n)
            bvecs = [c.d(n - 1).column(j) for j in lift.get(n - 1, [])]
            e = Echelon(f)
            for b in bvecs:
                e.insert(b)
            hreps = [z for z in kernel(c.d(n)) if e.insert(z)]
            lvecs = [{j: f.one()} for j in lift[n]]
            basis = bvecs + hreps + lvecs
            if len(basis) != dim:
                raise InvariantError("retract basis has wrong size", n)
            m = Matrix.from_columns(f, dim, basis)
            minv = inverse(m)
            nb, nh = len(bvecs), len(hreps)
            hdims[n] = nh
            i_maps[n] = Matrix.from_columns(f, dim, hreps)
            p_maps[n] = minv.block(list(range(nb, nb + nh)), list(range(dim)))
            # h sends the boundary d(e_j) to e_j in degree n-1
            src_lift = lift.get(n - 1, [])
            hm = Matrix(f, c.dim(n - 1), dim)
            for k, j in enumerate(src_lift):
                for col, v in minv.rows[k].items():
                    hm.add_entry(j, col, v)
            h_maps[n] = hm
        return cls(c, clean_dims(hdims), i_maps, p_maps, h_maps)

    def check(self) -> None:
        c = self.complex
        f = c.field
        for n in c.degrees():
            ip = self.i[n] @ self.p[n]
            lhs = Matrix(f, c.dim(n), c.dim(n))
            if n in self.h:
                lhs = lhs + c.d(n - 1) @ self.h[n]
            if n + 1 in self.h:
                lhs = lhs + self.h[n + 1] @ c.d(n)
            if lhs + ip != Matrix.identity(f, c.dim(n)):
                raise InvariantError("dh + hd != 1 - ip", n)
