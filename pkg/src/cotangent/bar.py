"""Bar construction on an augmented dga, the standard resolution R and the dual dga B.

Words ``[a1|...|an]`` have letters in the augmentation ideal I, shifted down
by one: a letter of dga degree k has bar degree k - 1.  The differential is

    d[a1|..|an]c = sum_i (-1)^{e(i-1)+1} [..|d a_i|..]c + (-1)^{e(n)} [..]dc
                 + sum_i (-1)^{e(i)+1} [..|a_i a_{i+1}|..]c
                 + (-1)^{e(n-1)} [a1|..|a_{n-1}] a_n c

with ``e(i) = sum_{j<=i} (|a_j| - 1)``; the last two sums shorten words, so
truncating at word length W gives a subcomplex.  Cohomology is computed by
homological perturbation: the tensor retract of the word-length graded
pieces onto words in H(sI) is perturbed by the shortening terms, which is
nilpotent.  Small cases are also built explicitly as a cross-check.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import product
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .cech import CechDga
from .linalg import (
    ChainComplex,
    Field,
    GradedDims,
    InvariantError,
    Matrix,
    Retract,
    clean_dims,
    complex_cohomology,
)
from .simplicial import certify_simply_connected

Key = Tuple[int, ...]
Vec = Dict[Key, object]


class NotSimplyConnectedWarning(UserWarning):
    """The base is not certified simply connected; bar/cobar dims need not be loop homology."""


def _sign(n: int) -> int:
    return -1 if n % 2 else 1


def _clean(f: Field, v: dict) -> dict:
    out = {}
    for k, x in v.items():
        x = f.norm(x)
        if x != 0:
            out[k] = x
    return out


def _lin(f: Field, v: dict, fn: Callable[[object], dict]) -> dict:
    out: dict = {}
    for k, c in v.items():
        for k2, c2 in fn(k).items():
            out[k2] = out.get(k2, 0) + c * c2
    return _clean(f, out)


def _add_into(out: dict, v: dict, s=1) -> None:
    for k, x in v.items():
        out[k] = out.get(k, 0) + s * x


@dataclass
class AugmentedDga:
    """A dga with augmentation; the ideal is spanned by a subset of the basis."""

    dga: CechDga
    ideal: List[int]

    @classmethod
    def of(cls, c: CechDga) -> "AugmentedDga":
        return cls(c, c.ideal_basis())

    @property
    def field(self) -> Field:
        return self.dga.field

    def verify(self) -> None:
        c = self.dga
        c.verify()
        ideal = set(self.ideal)
        for a in self.ideal:
            if any(t not in ideal for t, _ in c.d_basis(a)):
                raise InvariantError("ideal not closed under d", c.simplices[a])
            for b in c.right_factors(a):
                if b in ideal:
                    ab = c.mul_basis(a, b)
                    if ab is not None and ab not in ideal:
                        raise InvariantError("ideal not closed under products", (c.simplices[a], c.simplices[b]))

    def reduced_cohomology(self) -> GradedDims:
        return _Factor.shifted_ideal(self).hdims(shift=1)


class _Factor:
    """A finite complex on labelled basis ids with a strong deformation retract onto H."""

    def __init__(self, f: Field, degree: Dict[int, int], diff: Dict[int, Dict[int, object]]):
        self.f = f
        self.degree = degree
        self.diff = diff
        by_deg: Dict[int, List[int]] = {}
        for x in sorted(degree):
            by_deg.setdefault(degree[x], []).append(x)
        local = {x: j for xs in by_deg.values() for j, x in enumerate(xs)}
        dims = {n: len(xs) for n, xs in by_deg.items()}
        diffs = {}
        for n, xs in by_deg.items():
            if n + 1 not in by_deg:
                continue
            m = Matrix(f, dims[n + 1], dims[n])
            for x in xs:
                for t, s in diff.get(x, {}).items():
                    m.add_entry(local[t], local[x], s)
            diffs[n] = m
        cc = ChainComplex(f, dims, diffs)
        r = Retract.of(cc)
        self.small_deg: List[int] = []
        self.i: List[Dict[int, object]] = []
        self.p: Dict[int, Dict[int, object]] = {}
        self.h: Dict[int, Dict[int, object]] = {}
        for n in sorted(by_deg):
            xs = by_deg[n]
            base = len(self.small_deg)
            im = r.i[n]
            for col in im.columns():
                self.small_deg.append(n)
                self.i.append({xs[j]: v for j, v in col.items()})
            for s_local, row in enumerate(r.p[n].rows):
                for j, v in row.items():
                    self.p.setdefault(xs[j], {})[base + s_local] = v
            if n in r.h and n - 1 in by_deg:
                hm, tgt = r.h[n], by_deg[n - 1]
                for t_local, row in enumerate(hm.rows):
                    for j, v in row.items():
                        self.h.setdefault(xs[j], {})[tgt[t_local]] = v
        self._ip: Dict[int, Dict[int, object]] = {}

    def ip(self, x: int) -> Dict[int, object]:
        if x not in self._ip:
            out: Dict[int, object] = {}
            for s, v in self.p.get(x, {}).items():
                for y, w in self.i[s].items():
                    out[y] = out.get(y, 0) + v * w
            self._ip[x] = _clean(self.f, out)
        return self._ip[x]

    def hdims(self, shift: int = 0) -> GradedDims:
        out: Dict[int, int] = {}
        for n in self.small_deg:
            out[n + shift] = out.get(n + shift, 0) + 1
        return clean_dims(out)

    @classmethod
    def shifted_ideal(cls, a: AugmentedDga) -> "_Factor":
        """sI: degrees lowered by one, differential negated."""
        c = a.dga
        deg = {x: c.degree(x) - 1 for x in a.ideal}
        diff = {x: {t: -s for t, s in c.d_basis(x)} for x in a.ideal}
        return cls(a.field, deg, diff)

    @classmethod
    def algebra(cls, a: AugmentedDga) -> "_Factor":
        c = a.dga
        deg = {x: c.degree(x) for x in range(c.dim)}
        diff = {x: dict(c.d_basis(x)) for x in range(c.dim)}
        return cls(a.field, deg, diff)


class TensorModel:
    """Words of length <= w in sI, optionally followed by one dga factor (the resolution R_w)."""

    def __init__(self, a: AugmentedDga, w: int, with_c: bool):
        if w < 0:
            raise ValueError("word bound must be >= 0")
        self.a, self.w, self.with_c = a, w, with_c
        self.f = a.field
        self.V = _Factor.shifted_ideal(a)
        self.C = _Factor.algebra(a) if with_c else None
        self._h: Dict[Key, Vec] = {}
        self._delta: Dict[Key, Vec] = {}
        self._p: Dict[Key, Vec] = {}
        self._iinf: Dict[Key, Vec] = {}
        self._pinf: Dict[Key, Vec] = {}
        self._hinf: Dict[Key, Vec] = {}
        self._small: Optional[Tuple[ChainComplex, Dict[int, List[Key]]]] = None

    # -- big complex ------------------------------------------------------------
    def _factors(self, key: Key) -> List[_Factor]:
        n = len(key) - (1 if self.with_c else 0)
        return [self.V] * n + ([self.C] if self.with_c else [])

    def letters(self, key: Key) -> Key:
        return key[:-1] if self.with_c else key

    def degree(self, key: Key) -> int:
        return sum(fa.degree[x] for fa, x in zip(self._factors(key), key))

    def d0(self, key: Key) -> Vec:
        out: Vec = {}
        sign = 1
        for j, (fa, x) in enumerate(zip(self._factors(key), key)):
            for t, s in fa.diff.get(x, {}).items():
                k2 = key[:j] + (t,) + key[j + 1:]
                out[k2] = out.get(k2, 0) + sign * s
            if fa.degree[x] % 2:
                sign = -sign
        return _clean(self.f, out)

    def delta(self, key: Key) -> Vec:
        """Merge and last-letter terms; both shorten the word by one."""
        if key in self._delta:
            return self._delta[key]
        c = self.a.dga
        word = self.letters(key)
        tail = key[len(word):]
        out: Vec = {}
        eps = 0
        for i in range(len(word) - 1):
            eps += self.V.degree[word[i]]
            m = c.mul_basis(word[i], word[i + 1])
            if m is not None:
                k2 = word[:i] + (m,) + word[i + 2:] + tail
                out[k2] = out.get(k2, 0) - _sign(eps)
        if self.with_c and word:
            eps = sum(self.V.degree[x] for x in word[:-1])
            m = c.mul_basis(word[-1], tail[0])
            if m is not None:
                k2 = word[:-1] + (m,)
                out[k2] = out.get(k2, 0) + _sign(eps)
        out = _clean(self.f, out)
        self._delta[key] = out
        return out

    def d(self, key: Key) -> Vec:
        out = dict(self.d0(key))
        _add_into(out, self.delta(key))
        return _clean(self.f, out)

    def basis(self) -> Dict[int, List[Key]]:
        """Every big basis key, grouped by degree (only sensible for small cases)."""
        words: List[Key] = [()]
        layer: List[Key] = [()]
        for _ in range(self.w):
            layer = [x + (a,) for x in layer for a in self.a.ideal]
            words.extend(layer)
        tails = [(x,) for x in range(self.a.dga.dim)] if self.with_c else [()]
        out: Dict[int, List[Key]] = {}
        for wd in words:
            for t in tails:
                k = wd + t
                out.setdefault(self.degree(k), []).append(k)
        return {n: sorted(ks) for n, ks in sorted(out.items())}

    def size(self) -> int:
        n = len(self.a.ideal)
        words = sum(n ** L for L in range(self.w + 1))
        return words * (self.a.dga.dim if self.with_c else 1)

    def explicit_complex(self) -> Tuple[ChainComplex, Dict[int, List[Key]]]:
        basis = self.basis()
        index = {n: {k: j for j, k in enumerate(ks)} for n, ks in basis.items()}
        dims = {n: len(ks) for n, ks in basis.items()}
        diffs = {}
        for n, ks in basis.items():
            if n + 1 not in basis:
                continue
            m = Matrix(self.f, dims[n + 1], dims[n])
            for j, k in enumerate(ks):
                for k2, v in self.d(k).items():
                    m.add_entry(index[n + 1][k2], j, v)
            diffs[n] = m
        return ChainComplex(self.f, dims, diffs, labels=basis), basis

    # -- tensor retract ---------------------------------------------------------
    def small_keys(self) -> List[Key]:
        vs = range(len(self.V.small_deg))
        words: List[Key] = []
        for L in range(self.w + 1):
            words.extend(product(vs, repeat=L))
        if self.with_c:
            return [wd + (c,) for wd in words for c in range(len(self.C.small_deg))]
        return list(words)

    def small_degree(self, skey: Key) -> int:
        return sum(fa.small_deg[x] for fa, x in zip(self._factors(skey), skey))

    def i(self, skey: Key) -> Vec:
        out: Vec = {(): self.f.one()}
        for fa, x in zip(self._factors(skey), skey):
            nxt: Vec = {}
            for k, c in out.items():
                for y, v in fa.i[x].items():
                    nxt[k + (y,)] = c * v
            out = nxt
        return _clean(self.f, out)

    def p(self, key: Key) -> Vec:
        if key in self._p:
            return self._p[key]
        out: Vec = {(): self.f.one()}
        for fa, x in zip(self._factors(key), key):
            px = fa.p.get(x)
            if not px:
                out = {}
                break
            out = {k + (s,): c * v for k, c in out.items() for s, v in px.items()}
        out = _clean(self.f, out)
        self._p[key] = out
        return out

    def h(self, key: Key) -> Vec:
        """sum_j (-1)^{|x_1..x_{j-1}|} ip x_1 (x) .. (x) ip x_{j-1} (x) h x_j (x) x_{j+1} .."""
        if key in self._h:
            return self._h[key]
        f = self.f
        out: Vec = {}
        prefix: Vec = {(): f.one()}
        sign = 1
        for j, (fa, x) in enumerate(zip(self._factors(key), key)):
            hx = fa.h.get(x)
            if hx:
                rest = key[j + 1:]
                for k, c in prefix.items():
                    for y, v in hx.items():
                        k2 = k + (y,) + rest
                        out[k2] = out.get(k2, 0) + sign * c * v
            ipx = fa.ip(x)
            if not ipx:
                break
            prefix = {k + (y,): c * v for k, c in prefix.items() for y, v in ipx.items()}
            if fa.degree[x] % 2:
                sign = -sign
        out = _clean(f, out)
        self._h[key] = out
        return out

    # -- perturbation ----------------------------------------------------------
    def transferred_d(self, skey: Key) -> Vec:
        """p delta sum_k (h delta)^k i, the differential on the small model."""
        f = self.f
        acc: Vec = {}
        v = self.i(skey)
        while v:
            u = _lin(f, v, self.delta)
            if not u:
                break
            _add_into(acc, _lin(f, u, self.p))
            v = _lin(f, u, self.h)
        return _clean(f, acc)

    def i_inf(self, skey: Key) -> Vec:
        if skey in self._iinf:
            return self._iinf[skey]
        acc: Vec = {}
        v = self.i(skey)
        while v:
            _add_into(acc, v)
            v = _lin(self.f, _lin(self.f, v, self.delta), self.h)
        self._iinf[skey] = _clean(self.f, acc)
        return self._iinf[skey]

    def p_inf(self, key: Key) -> Vec:
        if key in self._pinf:
            return self._pinf[key]
        acc: Vec = {}
        v: Vec = {key: self.f.one()}
        while v:
            _add_into(acc, _lin(self.f, v, self.p))
            v = _lin(self.f, _lin(self.f, v, self.h), self.delta)
        self._pinf[key] = _clean(self.f, acc)
        return self._pinf[key]

    def h_inf(self, key: Key) -> Vec:
        if key in self._hinf:
            return self._hinf[key]
        acc: Vec = {}
        v = self.h(key)
        while v:
            _add_into(acc, v)
            v = _lin(self.f, _lin(self.f, v, self.delta), self.h)
        self._hinf[key] = _clean(self.f, acc)
        return self._hinf[key]

    def small_complex(self) -> Tuple[ChainComplex, Dict[int, List[Key]]]:
        if self._small is None:
            self._small = self._build_small()
        return self._small

    def _build_small(self) -> Tuple[ChainComplex, Dict[int, List[Key]]]:
        basis: Dict[int, List[Key]] = {}
        for sk in self.small_keys():
            basis.setdefault(self.small_degree(sk), []).append(sk)
        basis = {n: sorted(ks) for n, ks in sorted(basis.items())}
        index = {n: {k: j for j, k in enumerate(ks)} for n, ks in basis.items()}
        dims = {n: len(ks) for n, ks in basis.items()}
        diffs = {}
        for n, ks in basis.items():
            m = Matrix(self.f, dims.get(n + 1, 0), dims[n])
            for j, k in enumerate(ks):
                for k2, v in self.transferred_d(k).items():
                    if k2 not in index.get(n + 1, {}):
                        raise InvariantError("transferred differential has wrong degree", (k, k2))
                    m.add_entry(index[n + 1][k2], j, v)
            if n + 1 in basis:
                diffs[n] = m
        return ChainComplex(self.f, dims, diffs, labels=basis), basis

    def check_d_squared(self, keys: Sequence[Key]) -> None:
        for k in keys:
            if _lin(self.f, self.d(k), self.d):
                raise InvariantError("bar differential does not square to zero", k)


# -- certified windows -------------------------------------------------------------


def _reduced_range(a: AugmentedDga) -> Tuple[Optional[int], Optional[int]]:
    red = a.reduced_cohomology()
    if not red:
        return None, None
    return min(red), max(red)


def resolution_window(a: AugmentedDga, w: int) -> Optional[int]:
    """Largest degree n such that H^m(R_w) = H^m(R) for all m <= n; None means all degrees.

    Words of length > w contribute cohomology only in degrees >= (w+1)(c-1),
    where c is the lowest degree of reduced cohomology of the base.  Degree 0
    is always certified: the unit word survives and nothing lies below it.
    """
    c, _ = _reduced_range(a)
    if c is None:
        return None
    return max(0, (w + 1) * (c - 1) - 1)


def bar_window(a: AugmentedDga, w: int) -> Optional[int]:
    """Same bound for the bar complex B_w, without the degree-0 exception.

    When c = 1 the long words already reach degree 0 (H^0 of the full bar
    complex is then infinite), so nothing at or above degree 0 is certified.
    """
    c, _ = _reduced_range(a)
    if c is None:
        return None
    return (w + 1) * (c - 1) - 1


def end_window(a: AugmentedDga, w: int) -> Optional[int]:
    """Largest degree where End(R_w) is certified to agree with Hom(R_w, K) = B_w dual."""
    c, t = _reduced_range(a)
    if c is None:
        return None
    return (w + 1) * (c - 1) - w * max(t - 1, 0) - 1


@dataclass
class BarData:
    adga: AugmentedDga
    w: int
    with_c: bool
    model: TensorModel
    small: ChainComplex
    cohomology: GradedDims
    window_hi: Optional[int]
    route: str
    direct: Optional[GradedDims] = None

    def certified(self, n: int) -> bool:
        return self.window_hi is None or n <= self.window_hi

    def window_dims(self) -> Dict[int, int]:
        """Cohomology in the certified degrees that the truncated complex occupies."""
        degs = set(self.small.dims) | set(self.cohomology)
        return {n: self.cohomology.get(n, 0) for n in sorted(degs) if self.certified(n)}

    @property
    def window_empty(self) -> bool:
        return not self.window_dims()

    def table(self) -> List[Tuple[int, int, bool]]:
        degs = sorted(set(self.small.dims) | set(self.cohomology))
        return [(n, self.cohomology.get(n, 0), self.certified(n)) for n in degs]


def _bar_data(a: AugmentedDga, w: int, with_c: bool, route: str) -> BarData:
    if route not in ("hpl", "direct", "both"):
        raise ValueError(f"unknown route {route!r}")
    model = TensorModel(a, w, with_c)
    small, _ = model.small_complex()
    small.check()
    hdims = complex_cohomology(small, check=False)
    direct = None
    if route in ("direct", "both"):
        big, _ = model.explicit_complex()
        big.check()
        direct = complex_cohomology(big, check=False)
        if direct != hdims:
            raise InvariantError("perturbation route disagrees with the explicit complex", (direct, hdims))
    win = resolution_window(a, w) if with_c else bar_window(a, w)
    return BarData(a, w, with_c, model, small, hdims, win, route, direct)


def bar_resolution(a: AugmentedDga, w: int, route: str = "hpl") -> BarData:
    """The truncated standard resolution R_w = T(sI)_{<=w} (x) C and its cohomology."""
    return _bar_data(a, w, True, route)


def bar_complex(a: AugmentedDga, w: int, route: str = "hpl") -> BarData:
    """The truncated bar complex T(sI)_{<=w}."""
    return _bar_data(a, w, False, route)


def resolution_is_simple(b: BarData) -> bool:
    """H(R_w) is K in degree 0 and zero elsewhere, inside the certified window."""
    return all(d == (1 if n == 0 else 0) for n, d in b.window_dims().items())


# -- the dual dga B_w ----------------------------------------------------------------


@dataclass
class DualBarDga:
    """B_w = (T(sI)_{<=w})^dual with concatenation product; degrees are negated bar degrees."""

    adga: AugmentedDga
    w: int
    bar: BarData
    simply_connected: bool

    @property
    def field(self) -> Field:
        return self.adga.field

    @property
    def cohomology(self) -> GradedDims:
        return clean_dims({-n: d for n, d in self.bar.cohomology.items()})

    @property
    def window_lo(self) -> Optional[int]:
        """Lowest certified degree (None: every degree)."""
        hi = self.bar.window_hi
        return None if hi is None else -hi

    def certified(self, n: int) -> bool:
        return self.window_lo is None or n >= self.window_lo

    def window_dims(self) -> Dict[int, int]:
        return {-n: d for n, d in self.bar.window_dims().items()}

    def degree(self, word: Key) -> int:
        return -self.bar.model.degree(word)

    def mul(self, u: Key, v: Key) -> Vec:
        """u* . v* = (-1)^{|u||v|} (uv)*, zero past the word bound."""
        if len(u) + len(v) > self.w:
            return {}
        return {u + v: _sign(self.degree(u) * self.degree(v))}

    def d(self, word: Key, basis: Dict[int, List[Key]]) -> Vec:
        """(d f)(x) = -(-1)^{|f|} f(dx), evaluated against an explicit basis."""
        m = self.bar.model
        n = -self.degree(word) - 1
        s = -_sign(self.degree(word))
        out: Vec = {}
        for x in basis.get(n, []):
            c = m.d(x).get(word)
            if c:
                out[x] = s * c
        return _clean(self.field, out)

    def verify(self) -> None:
        """d^2 = 0, Leibniz and associativity on the explicit basis (small cases only)."""
        f = self.field
        m = self.bar.model
        basis = m.basis()
        words = [x for xs in basis.values() for x in xs]

        def dv(v: Vec) -> Vec:
            return _lin(f, v, lambda x: self.d(x, basis))

        for u in words:
            if dv(dv({u: f.one()})):
                raise InvariantError("dual differential does not square to zero", u)
            du = self.d(u, basis)
            for v in words:
                uv = self.mul(u, v)
                lhs = dv(uv)
                rhs = _lin(f, du, lambda x: self.mul(x, v))
                _add_into(rhs, _lin(f, self.d(v, basis), lambda y: self.mul(u, y)), _sign(self.degree(u)))
                if lhs != _clean(f, rhs):
                    raise InvariantError("Leibniz fails in the dual dga", (u, v))
                for t in words[:8]:
                    a = _lin(f, uv, lambda x: self.mul(x, t))
                    b = _lin(f, self.mul(v, t), lambda y: self.mul(u, y))
                    if a != b:
                        raise InvariantError("dual product not associative", (u, v, t))


def dual_dga_B(a: AugmentedDga, w: int, route: str = "hpl") -> DualBarDga:
    """The dual dga of the truncated bar construction, with its certified cohomology.

    Warns when the base is not certified simply connected: the bar dual then
    need not compute loop-space homology.
    """
    if w < 1:
        raise ValueError("word bound must be >= 1")
    sc = certify_simply_connected(a.dga.base)
    if not sc:
        warnings.warn(
            f"base {a.dga.base.name or '?'} is not certified simply connected; "
            "H(B) is not claimed to be loop-space homology",
            NotSimplyConnectedWarning,
            stacklevel=2,
        )
    return DualBarDga(a, w, bar_complex(a, w, route), sc)


# -- endomorphisms of R_w ------------------------------------------------------------


@dataclass
class EndData:
    """Hom_C(R_w, R_w) reduced by perturbation to maps between the small models."""

    w: int
    small: ChainComplex
    cohomology: GradedDims
    window_hi: Optional[int]
    dual: DualBarDga
    direct: Optional[GradedDims] = None

    def comparison(self) -> Dict[int, Tuple[int, int]]:
        """Degree -> (dim H End, dim H B_w) on the joint certified window."""
        degs = set(self.cohomology) | set(self.dual.cohomology) | set(self.small.dims)
        out = {}
        for n in sorted(degs):
            if (self.window_hi is None or n <= self.window_hi) and self.dual.certified(n):
                out[n] = (self.cohomology.get(n, 0), self.dual.cohomology.get(n, 0))
        return out

    @property
    def agree(self) -> bool:
        return all(x == y for x, y in self.comparison().values())

    @property
    def window_empty(self) -> bool:
        return not self.comparison()


class _HomModel:
    """Maps phi: B_w -> R_w stored as dicts word -> vector of R_w keys."""

    def __init__(self, b: BarData):
        self.a, self.w = b.adga, b.w
        self.f = b.adga.field
        self.Y = b.model
        self.X = TensorModel(b.adga, b.w, False)
        self.xbasis = [x for xs in self.X.basis().values() for x in xs]

    def dY(self, v: Vec) -> Vec:
        return _lin(self.f, v, self.Y.d)

    def act(self, v: Vec, letter: int) -> Vec:
        """Right action of a dga generator on R_w."""
        out: Vec = {}
        c = self.a.dga
        for y, s in v.items():
            m = c.mul_basis(y[-1], letter)
            if m is not None:
                k = y[:-1] + (m,)
                out[k] = out.get(k, 0) + s
        return _clean(self.f, out)

    def compose(self, phi: Dict[Key, Vec], v: Vec) -> Vec:
        out: Vec = {}
        for x, c in v.items():
            if x in phi:
                _add_into(out, phi[x], c)
        return _clean(self.f, out)

    def twist(self, phi: Dict[Key, Vec], k: int) -> Dict[Key, Vec]:
        """(delta phi)(x) = -(-1)^k (-1)^{e(n-1)} phi(x') a_n for x = x'[a_n]."""
        out = {}
        for x in self.xbasis:
            if not x:
                continue
            prev = phi.get(x[:-1])
            if not prev:
                continue
            eps = sum(self.X.V.degree[y] for y in x[:-1])
            v = self.act(prev, x[-1])
            if v:
                s = -_sign(k) * _sign(eps)
                out[x] = {y: s * c for y, c in v.items()}
        return out

    def homotopy(self, phi: Dict[Key, Vec], k: int) -> Dict[Key, Vec]:
        """H phi = h_Y phi + (-1)^k i_Y p_Y phi h_X."""
        f = self.f
        out: Dict[Key, Vec] = {}
        for x in self.xbasis:
            v: Vec = {}
            if x in phi:
                _add_into(v, _lin(f, phi[x], self.Y.h_inf))
            hx = self.X.h_inf(x)
            if hx:
                w = self.compose(phi, hx)
                w = _lin(f, _lin(f, w, self.Y.p_inf), self.Y.i_inf)
                _add_into(v, w, _sign(k))
            v = _clean(f, v)
            if v:
                out[x] = v
        return out

    def project(self, phi: Dict[Key, Vec], xs_small: List[Key]) -> Dict[Tuple[Key, Key], object]:
        """P phi = p_Y phi i_X on the small basis."""
        out = {}
        for sx in xs_small:
            v = _lin(self.f, self.compose(phi, self.X.i_inf(sx)), self.Y.p_inf)
            for sy, c in v.items():
                out[(sx, sy)] = c
        return out

    def include(self, sx: Key, sy: Key) -> Dict[Key, Vec]:
        """I e_{sx,sy} = i_Y e p_X."""
        iy = self.Y.i_inf(sy)
        out = {}
        for x in self.xbasis:
            c = self.X.p_inf(x).get(sx)
            if c:
                out[x] = {y: c * v for y, v in iy.items()}
        return out


def endomorphism_dga_of_R(b: BarData, route: str = "hpl") -> EndData:
    """Cohomology of End_C(R_w), compared with H(B_w) where both are certified."""
    if not b.with_c:
        raise ValueError("need the resolution R_w, not the bar complex")
    f = b.adga.field
    hm = _HomModel(b)
    mx, bx = hm.X.small_complex()
    my, by = hm.Y.small_complex()
    sx_deg = {k: n for n, ks in bx.items() for k in ks}
    sy_deg = {k: n for n, ks in by.items() for k in ks}
    xs_small = sorted(sx_deg)
    DX = {k: hm.X.transferred_d(k) for k in sx_deg}
    DY = {k: hm.Y.transferred_d(k) for k in sy_deg}
    pairs: Dict[int, List[Tuple[Key, Key]]] = {}
    for sx, nx in sx_deg.items():
        for sy, ny in sy_deg.items():
            pairs.setdefault(ny - nx, []).append((sx, sy))
    pairs = {n: sorted(ps) for n, ps in sorted(pairs.items())}
    index = {n: {p: j for j, p in enumerate(ps)} for n, ps in pairs.items()}
    dims = {n: len(ps) for n, ps in pairs.items()}
    diffs = {}
    for k, ps in pairs.items():
        m = Matrix(f, dims.get(k + 1, 0), dims[k])
        for j, (sx, sy) in enumerate(ps):
            col: Dict[Tuple[Key, Key], object] = {}
            # D_Y e - (-1)^k e D_X
            for sy2, c in DY[sy].items():
                col[(sx, sy2)] = col.get((sx, sy2), 0) + c
            for sx0 in xs_small:
                c = DX[sx0].get(sx)
                if c:
                    col[(sx0, sy)] = col.get((sx0, sy), 0) - _sign(k) * c
            # p delta sum (H delta)^j i
            phi = hm.include(sx, sy)
            deg = k
            while phi:
                t = hm.twist(phi, deg)
                if not t:
                    break
                _add_into(col, hm.project(t, xs_small))
                phi = hm.homotopy(t, deg + 1)
            for pr, c in _clean(f, col).items():
                if pr not in index.get(k + 1, {}):
                    raise InvariantError("endomorphism differential has wrong degree", pr)
                m.add_entry(index[k + 1][pr], j, c)
        if k + 1 in pairs:
            diffs[k] = m
    small = ChainComplex(f, dims, diffs, labels=pairs)
    small.check()
    coh = complex_cohomology(small, check=False)
    direct = None
    if route in ("direct", "both"):
        direct = complex_cohomology(_explicit_end(hm), check=True)
        if direct != coh:
            raise InvariantError("perturbation route disagrees with explicit endomorphisms", (direct, coh))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NotSimplyConnectedWarning)
        dual = dual_dga_B(b.adga, b.w) if b.w >= 1 else None
    return EndData(b.w, small, coh, end_window(b.adga, b.w), dual, direct)


def _explicit_end(hm: _HomModel) -> ChainComplex:
    """Hom_K(B_w, R_w) with the twisted differential, built entry by entry."""
    f = hm.f
    X, Y = hm.X, hm.Y
    xb, yb = X.basis(), Y.basis()
    xdeg = {x: n for n, xs in xb.items() for x in xs}
    pairs: Dict[int, List[Tuple[Key, Key]]] = {}
    for x, nx in xdeg.items():
        for ny, ys in yb.items():
            for y in ys:
                pairs.setdefault(ny - nx, []).append((x, y))
    index = {n: {p: j for j, p in enumerate(ps)} for n, ps in pairs.items()}
    # predecessors: x2 with x appearing in d_X(x2)
    pre: Dict[Key, List[Tuple[Key, object]]] = {}
    for x2 in xdeg:
        for x, c in X.d(x2).items():
            pre.setdefault(x, []).append((x2, c))
    dims = {n: len(ps) for n, ps in pairs.items()}
    diffs = {}
    for k, ps in pairs.items():
        if k + 1 not in pairs:
            continue
        m = Matrix(f, dims[k + 1], dims[k])
        for j, (x, y) in enumerate(ps):
            phi = {x: {y: f.one()}}
            col: Dict[Tuple[Key, Key], object] = {}
            for y2, c in Y.d(y).items():
                col[(x, y2)] = col.get((x, y2), 0) + c
            for x2, c in pre.get(x, []):
                col[(x2, y)] = col.get((x2, y), 0) - _sign(k) * c
            for x2, v in hm.twist(phi, k).items():
                for y2, c in v.items():
                    col[(x2, y2)] = col.get((x2, y2), 0) + c
            for pr, c in _clean(f, col).items():
                m.add_entry(index[k + 1][pr], j, c)
        diffs[k] = m
    return ChainComplex(f, dims, diffs)
