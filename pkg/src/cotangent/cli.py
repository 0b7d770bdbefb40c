"""Command-line front door.

Every command builds a JSON-able result dict; ``--format table`` renders a
plain-text view of the same dict.  Exit status: 0 on success, 2 for bad input,
3 when an exact invariant check fails.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

from . import SCHEMA_VERSION
from .linalg import Field, InvariantError, fmt

EXIT_OK, EXIT_INPUT, EXIT_INVARIANT = 0, 2, 3


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    inputs: Dict[str, str] = field(default_factory=dict)
    field: str = "Q"
    w: int = 2
    depth: int = 4
    top: int = 3
    cap: int = 10 ** 4
    fmt: str = "table"
    seed: int = 0

    def check(self) -> None:
        for name in ("w", "depth", "top", "cap"):
            if getattr(self, name) < 0:
                raise InputError(f"--{name} must be non-negative")
        try:
            Field.parse(self.field)
        except (ValueError, KeyError) as exc:
            raise InputError(f"bad field spec {self.field!r}: {exc}")
        if self.fmt not in ("table", "json"):
            raise InputError("--format must be table or json")


# -- input helpers ----------------------------------------------------------------------


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}")


def _is_path(s: str) -> bool:
    return s.endswith(".json") or os.sep in s


def _complex(spec: str):
    from .simplicial import complex_from_json, corpus_complex
    if _is_path(spec):
        return complex_from_json(_load_json(spec), os.path.splitext(os.path.basename(spec))[0])
    try:
        return corpus_complex(spec)
    except KeyError as exc:
        raise InputError(str(exc))


def _scalars(s: Optional[str], f: Field) -> List:
    if not s:
        return []
    from fractions import Fraction
    try:
        return [f(Fraction(x)) for x in s.split(",")]
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad scalar list {s!r}: {exc}")


def _system(cfg: RunConfig, key: str = "system", mono_key: str = "monodromy"):
    """A local system from a JSON file, or from --complex plus --monodromy scalars."""
    from .local_systems import circle_system, local_system_from_json, torus_system, trivial_system
    f = Field.parse(cfg.field)
    if cfg.inputs.get(key):
        data = _load_json(cfg.inputs[key])
        data.setdefault("field", cfg.field)
        return local_system_from_json(data)
    name = cfg.inputs.get("complex") or "circle3"
    mono = _scalars(cfg.inputs.get(mono_key), f)
    if not mono:
        return trivial_system(_complex(name), f)
    if any(f.norm(x) == 0 for x in mono):
        raise InputError("monodromy must be invertible")
    if name == "circle3" and len(mono) == 1:
        return circle_system(f, mono[0])
    if name == "torus7" and len(mono) == 2:
        return torus_system(f, mono[0], mono[1])
    raise InputError("--monodromy takes one scalar on circle3 or two on torus7; use --system for anything else")


def _dims(d: Dict[int, int]) -> Dict[str, int]:
    return {str(n): v for n, v in sorted(d.items())}


def _graded_line(d: Dict[int, int]) -> str:
    nz = {n: v for n, v in sorted(d.items()) if v}
    return ", ".join(f"dim {v} in degree {n}" for n, v in nz.items()) or "0"


def _dims_line(d: Dict[int, int]) -> str:
    nz = {n: v for n, v in sorted(d.items()) if v}
    if not nz:
        return "all zero"
    return "  ".join(f"H^{n}={v}" for n, v in nz.items())


# -- commands ----------------------------------------------------------------------------


def cmd_cohomology(cfg: RunConfig):
    from .cech import build_cech_dga, dga_cohomology
    from .simplicial import simplicial_cohomology_oracle
    k = _complex(cfg.inputs.get("complex") or "circle3")
    f = Field.parse(cfg.field)
    c = build_cech_dga(k, f)
    c.verify()
    h, _ = dga_cohomology(c)
    oracle = simplicial_cohomology_oracle(k, f)
    if h != oracle:
        raise InvariantError("Cech dga cohomology disagrees with the simplicial oracle", (h, oracle))
    res = {"complex": k.name, "field": str(f), "generators": _dims(c.generator_counts()),
           "cech": _dims(h), "oracle": _dims(oracle), "match": True}
    lines = [f"complex {k.name} over {f}", f"generators: {_dims_line(c.generator_counts()).replace('H^', 'C^')}",
             f"H(cech dga): {_dims_line(h)}", f"H(oracle):   {_dims_line(oracle)}"]
    return res, lines


def cmd_twisted(cfg: RunConfig):
    from .linalg import complex_cohomology
    from .local_systems import build_module_EP, twisted_cohomology_oracle, validate_local_system
    p = _system(cfg)
    rep = validate_local_system(p)
    if not rep.flat:
        raise InvariantError("local system is not flat", rep.violations or rep.non_invertible or rep.degree_errors)
    m = build_module_EP(p)
    m.verify()
    h_mod = complex_cohomology(m.total_complex())
    h_or = twisted_cohomology_oracle(p)
    if h_mod != h_or:
        raise InvariantError("module route disagrees with the twisted oracle", (h_mod, h_or))
    res = {"complex": p.base.name, "field": str(p.field), "module": _dims(h_mod), "oracle": _dims(h_or), "match": True}
    lines = [f"twisted cohomology on {p.base.name} over {p.field}",
             f"H (module route): {_dims_line(h_mod)}", f"H (oracle):       {_dims_line(h_or)}"]
    return res, lines


def cmd_homss(cfg: RunConfig):
    from .local_systems import build_module_EP, hom_complex
    from .spectral import cech_filtration, compare_E2_twisted, run_spectral_sequence
    p0 = _system(cfg, "system", "monodromy")
    p1 = _system(cfg, "system1", "monodromy1") if (cfg.inputs.get("system1") or cfg.inputs.get("monodromy1")) else p0
    h = hom_complex(build_module_EP(p0), build_module_EP(p1))
    ss = run_spectral_sequence(cech_filtration(h))
    rep = compare_E2_twisted(ss, p0, p1)
    if not rep.match:
        raise InvariantError("E_2 differs from H(Z; Hom(P0, P1))", rep.mismatches)
    res = {"complex": p0.base.name, "field": str(p0.field), "spectral_sequence": ss.to_json(),
           "e2_oracle": {f"{p},{q}": d for (p, q), d in sorted(rep.oracle.items())}, "e2_match": rep.match}
    lines = [f"hom spectral sequence on {p0.base.name} over {p0.field}"]
    for pg in ss.pages:
        cells = "  ".join(f"({p},{q}):{d}" for (p, q), d in sorted(pg.cells.items())) or "empty"
        lines.append(f"E_{pg.r}: {cells}")
        for (p, q), k in sorted(pg.diffs.items()):
            lines.append(f"    d_{pg.r}: ({p},{q}) -> ({p + pg.r},{q - pg.r + 1}) rank {k}")
    lines.append(f"E_2 vs H(Z; Hom): {'match' if rep.match else 'MISMATCH'}")
    lines.append(f"abutment: {_dims_line(ss.abutment)}")
    return res, lines


def _int_list(s: str, what: str) -> List[int]:
    try:
        return [int(x) for x in s.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"bad {what} {s!r}")


def _graded(s: str) -> Dict[int, int]:
    out = {}
    try:
        for part in s.split(","):
            deg, dim = part.split(":")
            out[int(deg)] = out.get(int(deg), 0) + int(dim)
    except ValueError:
        raise InputError(f"bad graded dims {s!r}; expected deg:dim,deg:dim")
    return out


def cmd_corner(cfg: RunConfig):
    from .spectral import corner_argument
    base = _int_list(cfg.inputs.get("base_dims") or "", "base dims")
    fiber = _graded(cfg.inputs.get("fiber_dims") or "")
    try:
        h0 = int(cfg.inputs.get("h0") or 1)
        v = corner_argument(base, fiber, h0)
    except ValueError as exc:
        raise InputError(str(exc))
    res = {"consistent": v.consistent, "rank_forced": v.rank_forced, "corners": [list(c) for c in v.corners],
           "survival": v.survival, "deduction": v.deduction, "degree_label": v.degree_label,
           "summary": v.summary()}
    lines = v.survival + v.deduction + [v.degree_label, v.summary()]
    return res, lines


def _adga(cfg: RunConfig):
    from .bar import AugmentedDga
    from .cech import build_cech_dga
    k = _complex(cfg.inputs.get("complex") or "sphere2")
    if not k.is_connected:
        raise InputError(f"{k.name} is not connected")
    return AugmentedDga.of(build_cech_dga(k, Field.parse(cfg.field)))


def _window_rows(table) -> List[str]:
    return [f"  H^{n} = {d}{'' if ok else '   (outside certified window)'}" for n, d, ok in table]


def cmd_barres(cfg: RunConfig):
    from .bar import bar_resolution, resolution_is_simple
    if cfg.w < 1:
        raise InputError("--w must be >= 1")
    a = _adga(cfg)
    b = bar_resolution(a, cfg.w)
    simple = resolution_is_simple(b)
    if not simple:
        raise InvariantError("H(R_w) is not K in degree 0 inside the certified window", b.window_dims())
    res = {"complex": a.dga.base.name, "field": str(a.field), "w": cfg.w, "window_hi": b.window_hi,
           "cohomology": _dims(b.cohomology), "window": _dims(b.window_dims()), "simple_in_window": simple}
    hi = "unbounded" if b.window_hi is None else f"n <= {b.window_hi}"
    lines = [f"standard resolution R_{cfg.w} over {a.dga.base.name}/{a.field}; certified window {hi}"]
    lines += _window_rows(b.table())
    lines.append("H(R_w) = K in degree 0 within the window")
    return res, lines


def cmd_dualdga(cfg: RunConfig):
    from .bar import NotSimplyConnectedWarning, dual_dga_B
    if cfg.w < 1:
        raise InputError("--w must be >= 1")
    a = _adga(cfg)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NotSimplyConnectedWarning)
        d = dual_dga_B(a, cfg.w)
    d.verify()
    warned = [str(x.message) for x in caught if issubclass(x.category, NotSimplyConnectedWarning)]
    lo = d.window_lo
    res = {"complex": a.dga.base.name, "field": str(a.field), "w": cfg.w, "simply_connected": d.simply_connected,
           "window_lo": lo, "cohomology": _dims(d.cohomology), "window": _dims(d.window_dims()),
           "warnings": warned}
    lines = [f"dual dga B_{cfg.w} over {a.dga.base.name}/{a.field}; certified for "
             + ("all degrees" if lo is None else f"n >= {lo}")]
    for n, v in sorted(d.cohomology.items()):
        lines.append(f"  H^{n} = {v}{'' if d.certified(n) else '   (outside certified window)'}")
    lines += [f"warning: {w}" for w in warned]
    return res, lines


def cmd_loopspace(cfg: RunConfig):
    from .cobar import builtin_sset, cobar_of_sset, sset_from_json
    spec = cfg.inputs.get("sset") or "sphere2_min"
    try:
        s = sset_from_json(_load_json(spec)) if _is_path(spec) else builtin_sset(spec)
    except KeyError as exc:
        raise InputError(str(exc))
    try:
        t = cobar_of_sset(s, cfg.depth, Field.parse(cfg.field))
    except ValueError as exc:
        raise InputError(str(exc))
    res = dict(t.to_json(), field=cfg.field.upper())
    lines = [f"loop-space homology of {s.name} over {cfg.field.upper()} (cohomological degrees 0..-{cfg.depth})"]
    lines.append("degree: " + " ".join(f"{-k:>3}" for k in range(cfg.depth + 1)))
    lines.append("dim:    " + " ".join(f"{d:>3}" for d in t.row()))
    return res, lines


def _quiver(cfg: RunConfig):
    from .exceptional import algebra_from_json, commutative_square, linear_quiver
    spec = cfg.inputs.get("quiver") or "A2"
    f = Field.parse(cfg.field)
    if _is_path(spec):
        return algebra_from_json(_load_json(spec), f)
    if spec.upper().startswith("A") and spec[1:].isdigit() and int(spec[1:]) >= 1:
        return linear_quiver(int(spec[1:]), f)
    if spec == "square":
        return commutative_square(f)
    raise InputError(f"unknown quiver {spec!r}: use A<n>, square, or a JSON file")


def _object(alg, spec: str):
    """P<v>, S<v>, P<v>[k] / S<v>[k], or a JSON file."""
    import re
    from .exceptional import object_from_json, projective, simple_object
    if _is_path(spec):
        return object_from_json(alg, _load_json(spec))
    m = re.fullmatch(r"([PS])(\d+)(?:\[(-?\d+)\])?", spec)
    if not m or int(m.group(2)) >= alg.n:
        raise InputError(f"bad object {spec!r}: use P<v>, S<v>, optionally with a shift [k], or a JSON file")
    v, k = int(m.group(2)), int(m.group(3) or 0)
    x = projective(alg, v) if m.group(1) == "P" else simple_object(alg, v)
    x = x.shift(k) if k else x
    x.name = spec
    return x


def _object_lines(x) -> List[str]:
    a = x.alg
    if x.is_zero():
        return ["  0 (zero complex)"]
    out = []
    for n in x.degrees():
        src = x.terms[n]
        out.append(f"  degree {n}: " + " + ".join(f"P{v}" for v in src))
        tgt = x.terms.get(n + 1, [])
        for r in range(len(tgt)):
            for c in range(len(src)):
                e = x.entry(n, r, c)
                if e:
                    out.append(f"      d[{r},{c}] = {a.format_expr(src[c], tgt[r], e)}")
    return out


def _module_dims_json(x) -> Dict[str, Dict[str, int]]:
    from .exceptional import module_dims
    return {f"P{v}": _dims(d) for v, d in module_dims(x).items()}


def cmd_mutate(cfg: RunConfig):
    from .exceptional import mutate_left, mutate_right
    alg = _quiver(cfg)
    x = _object(alg, cfg.inputs.get("object") or "P1")
    y = _object(alg, cfg.inputs.get("by") or "P0")
    side = cfg.inputs.get("side") or "left"
    if side not in ("left", "right"):
        raise InputError("--side must be left or right")
    out = mutate_left(y, x) if side == "left" else mutate_right(y, x)
    res = {"quiver": alg.name, "side": side, "object": x.name, "by": y.name,
           "result": out.to_json(), "hom_p_dims": _module_dims_json(out), "zero": out.is_zero()}
    lines = [f"{'L' if side == 'left' else 'R'}_{y.name} {x.name} over {alg.name} (reduced):"]
    lines += _object_lines(out)
    lines.append("H(Hom(P_v, -)): " + "; ".join(f"{k}: {_dims_line({int(n): d for n, d in v.items()})}"
                                           for k, v in res["hom_p_dims"].items()))
    return res, lines


def _collection(alg):
    from .exceptional import check_exceptional, projective_collection
    c = projective_collection(alg)
    cert = check_exceptional(c)
    if not cert["certified"]:
        raise InvariantError("projective collection is not exceptional", cert["violation"])
    return c


def cmd_dualize(cfg: RunConfig):
    from .exceptional import koszul_dual_collection
    alg = _quiver(cfg)
    c = _collection(alg)
    d = koszul_dual_collection(c)
    m = len(c) - 1
    res = {"quiver": alg.name, "exceptional": c.certificate, "duals": [y.to_json() for y in d.objects],
           "orthogonality": d.certificate}
    lines = [f"Koszul dual of the projective collection of {alg.name}: exceptional certified "
             f"({c.certificate['pairs_checked']} pairs)"]
    for i, y in enumerate(d.objects):
        lines.append(f"Y_{m - i}^!:")
        lines += _object_lines(y)
    lines.append("orthogonality dim Hom^0(Y_j, Y_k^!):")
    lines += ["  " + " ".join(str(x) for x in row) for row in d.certificate["pattern"]]
    return res, lines


def _tower(cfg: RunConfig):
    from .exceptional import koszul_dual_collection, postnikov_tower
    alg = _quiver(cfg)
    c = _collection(alg)
    d = koszul_dual_collection(c)
    x = _object(alg, cfg.inputs.get("object") or "S1")
    return alg, c, d, x, postnikov_tower(c, x, d)


def cmd_tower(cfg: RunConfig):
    alg, c, d, x, t = _tower(cfg)
    if not t.full:
        raise InvariantError("X_{-1} is not acyclic", x.name)
    res = dict(t.summary(), quiver=alg.name, object=x.name)
    lines = [f"Postnikov tower of {x.name} against the projectives of {alg.name}"]
    for k in sorted(t.z_dims, reverse=True):
        a, b = t.dual_check[k]
        lines.append(f"  Z_{k}: {_graded_line(t.z_dims[k])}   dual check Hom(X, Y_{k}^!): {_graded_line(b)}")
    lines.append(f"stage sizes: {' '.join(str(s) for s in res['stage_sizes'])}")
    lines.append("X_{-1} acyclic: " + ("yes" if t.full else "no"))
    return res, lines


def cmd_towerss(cfg: RunConfig):
    from .exceptional import tower_spectral_sequence
    alg, c, d, x, t = _tower(cfg)
    ts = tower_spectral_sequence(t, d)
    if not (ts.e1_match and ts.abutment_match):
        raise InvariantError("tower spectral sequence check failed",
                             {"e1": ts.e1_match, "abutment": ts.abutment_match})
    res = {"quiver": alg.name, "object": x.name, "spectral_sequence": ts.ss.to_json(),
           "e1_predicted": {f"{p},{q}": v for (p, q), v in sorted(ts.e1_predicted.items())},
           "e1_match": ts.e1_match, "abutment_match": ts.abutment_match, "hom_xx": _dims(ts.hom_xx)}
    lines = [f"tower spectral sequence for Hom(X, X), X = {x.name} over {alg.name}"]
    for pg in ts.ss.pages:
        cells = "  ".join(f"({p},{q}):{v}" for (p, q), v in sorted(pg.cells.items())) or "empty"
        lines.append(f"E_{pg.r}: {cells}")
        for (p, q), k in sorted(pg.diffs.items()):
            lines.append(f"    d_{pg.r}: ({p},{q}) -> ({p + pg.r},{q - pg.r + 1}) rank {k}")
    lines.append("E_1 from Hom(X, Y^!) (x) Hom(Y, X): match")
    lines.append(f"abutment = Hom(X, X): {_dims_line(ts.hom_xx)}")
    return res, lines


def cmd_cover(cfg: RunConfig):
    from .covers import build_cover, monodromy_image, pullback_local_system
    p = _system(cfg)
    g = monodromy_image(p, cfg.cap)
    res = {"complex": p.base.name, "field": str(p.field), "monodromy": g.summary()}
    lines = [f"monodromy image on {p.base.name} over {p.field}: "
             + (f"finite, order {g.order}" if g.finite else f"not finite within cap {cfg.cap}")]
    if "scalars" in res["monodromy"]:
        lines.append("  elements: {" + ", ".join(res["monodromy"]["scalars"]) + "}")
    if not g.finite:
        res["cover"] = None
        return res, lines
    c = build_cover(p, g)
    pb = pullback_local_system(c, p)
    if not pb.trivial:
        raise InvariantError("pullback along the generated cover is not trivial", pb.obstruction)
    other = None
    if cfg.inputs.get("other") or cfg.inputs.get("other_monodromy"):
        q = _system(cfg, "other", "other_monodromy")
        po = pullback_local_system(c, q)
        other = {"trivial": po.trivial, "obstruction": list(po.obstruction) if po.obstruction else None}
    res.update(cover=c.summary(), pullback_trivial=True,
               gauge={str(v): [[fmt(x) for x in row] for row in m.to_dense()] for v, m in sorted(pb.gauge.items())},
               other=other)
    s = c.summary()
    lines += [f"cover: {s['vertices']} vertices, f-vector {tuple(s['f_vector'])}, "
              f"chi {s['euler_cover']} = {s['degree']} x {s['euler_base']}, connected: {'yes' if s['connected'] else 'no'}",
              f"pullback: trivialized by an explicit gauge on {len(pb.gauge)} vertices"]
    if other is not None:
        lines.append("other system after pullback: " + ("trivial" if other["trivial"]
                                                         else f"monodromy persists (edge {tuple(other['obstruction'])})"))
    return res, lines


def _group_module(cfg: RunConfig, key: str):
    """Z<n>[:a1,..,an] (Z^n acting by scalars), C<n> or S3 (trivial action), or a JSON file."""
    import re
    from .covers import (GroupModule, cyclic_table, group_module_from_json, symmetric3_table,
                         trivial_group_module)
    from .linalg import Matrix
    spec = cfg.inputs.get(key) or "Z2"
    f = Field.parse(cfg.field)
    if _is_path(spec):
        data = _load_json(spec)
        data.setdefault("field", cfg.field)
        return group_module_from_json(data)
    m = re.fullmatch(r"Z(\d+)(?::(.+))?", spec)
    if m:
        n = int(m.group(1))
        acts = _scalars(m.group(2), f) if m.group(2) else [f(1)] * n
        if len(acts) != n:
            raise InputError(f"{spec!r}: need {n} scalars")
        gm = GroupModule("Zn", f, 1, [Matrix.from_dense(f, [[a]]) for a in acts], n)
        gm.verify()
        return gm
    m = re.fullmatch(r"C(\d+)", spec)
    if m and int(m.group(1)) >= 1:
        return trivial_group_module("finite", f, table=cyclic_table(int(m.group(1))))
    if spec == "S3":
        return trivial_group_module("finite", f, table=symmetric3_table())
    raise InputError(f"bad group module {spec!r}")


def cmd_ext(cfg: RunConfig):
    from .covers import ext_group_module
    m0 = _group_module(cfg, "module")
    m1 = _group_module(cfg, "module2") if cfg.inputs.get("module2") else m0
    try:
        e = ext_group_module(m0, m1, cfg.top)
    except ValueError as exc:
        raise InputError(str(exc))
    full = {r: e.get(r, 0) for r in range(cfg.top + 1)}
    res = {"field": cfg.field.upper(), "top": cfg.top, "ext": _dims(full)}
    lines = [f"Ext^r over the group algebra, r = 0..{cfg.top}:",
             "r:   " + " ".join(f"{r:>3}" for r in full), "dim: " + " ".join(f"{d:>3}" for d in full.values())]
    return res, lines


def cmd_obstructions(cfg: RunConfig):
    from .covers import formality_obstruction_degrees
    gm = _group_module(cfg, "module")
    r = formality_obstruction_degrees(gm, cfg.top)
    return r.to_json(), [r.summary(), f"note: {r.note}",
                         "Ext vanishes above top: " + ("certified" if r.complete else "not certified")]


COMMANDS: Dict[str, Callable] = {
    "cohomology": cmd_cohomology,
    "twisted": cmd_twisted,
    "homss": cmd_homss,
    "corner": cmd_corner,
    "barres": cmd_barres,
    "loopspace": cmd_loopspace,
    "dualdga": cmd_dualdga,
    "mutate": cmd_mutate,
    "dualize": cmd_dualize,
    "tower": cmd_tower,
    "towerss": cmd_towerss,
    "cover": cmd_cover,
    "ext": cmd_ext,
    "obstructions": cmd_obstructions,
}


def cmd_selftest(cfg: RunConfig):
    from .selftest import run_selftest
    results = run_selftest(cfg.seed)
    res = {"seed": cfg.seed, "results": [{"suite": n, "ok": ok, "detail": d} for n, ok, d in results],
           "ok": all(ok for _, ok, _ in results)}
    lines = [f"{'PASS' if ok else 'FAIL'}  {n:<16} {d}" for n, ok, d in results]
    if not res["ok"]:
        raise _SelftestFailure(res, lines)
    return res, lines


class _SelftestFailure(Exception):
    def __init__(self, res, lines):
        super().__init__("selftest failed")
        self.res, self.lines = res, lines


COMMANDS["selftest"] = cmd_selftest


# -- argument parsing and output ------------------------------------------------------------

_INPUTS = {
    "complex": "corpus complex id or JSON file",
    "system": "local system JSON file",
    "system1": "second local system JSON file (homss)",
    "monodromy": "comma-separated scalars: one for circle3, two for torus7",
    "monodromy1": "monodromy of the second system (homss)",
    "other": "a further local system JSON file to pull back (cover)",
    "other_monodromy": "monodromy of a further system to pull back (cover)",
    "base_dims": "dims of H^r(Z), r = 0..n, comma-separated",
    "fiber_dims": "graded dims of V as deg:dim,deg:dim",
    "h0": "dim H^0 of the abutment",
    "sset": "reduced simplicial set id or JSON file",
    "quiver": "A<n>, square, or quiver JSON",
    "object": "P<v>, S<v>, optional shift [k], or object JSON",
    "by": "object to mutate by",
    "side": "left or right",
    "module": "Z<n>[:a1,..], C<n>, S3, or group-module JSON",
    "module2": "second group module (ext)",
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cotangent", description="Exact homological algebra toolkit.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    for name, help_ in _INPUTS.items():
        ap.add_argument("--" + name.replace("_", "-"), dest=name, help=help_)
    ap.add_argument("--field", default="Q", help="F<p> or Q")
    ap.add_argument("--w", type=int, default=2, help="bar word-length bound")
    ap.add_argument("--depth", type=int, default=4, help="cobar depth")
    ap.add_argument("--top", type=int, default=3, help="top Ext degree")
    ap.add_argument("--cap", type=int, default=10 ** 4, help="group closure cap")
    ap.add_argument("--format", dest="fmt", choices=["table", "json"], default="table")
    ap.add_argument("--seed", type=int, default=0, help="seed for randomized suites")
    return ap


def config_from_args(argv: Optional[List[str]] = None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    inputs = {k: getattr(ns, k) for k in _INPUTS if getattr(ns, k) is not None}
    return RunConfig(ns.command, inputs, ns.field, ns.w, ns.depth, ns.top, ns.cap, ns.fmt, ns.seed)


def _emit(cfg: RunConfig, res: dict, lines: List[str], out) -> None:
    if cfg.fmt == "json":
        doc = {"schema_version": SCHEMA_VERSION, "command": cfg.command, "result": res}
        out.write(json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n")
    else:
        out.write("\n".join(lines) + "\n")


def run(cfg: RunConfig, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        cfg.check()
        res, lines = COMMANDS[cfg.command](cfg)
    except _SelftestFailure as exc:
        _emit(cfg, exc.res, exc.lines, out)
        return EXIT_INVARIANT
    except InvariantError as exc:
        err.write(f"invariant violated: {exc}\n")
        return EXIT_INVARIANT
    except (InputError, KeyError, ValueError) as exc:
        err.write(f"input error: {exc}\n")
        return EXIT_INPUT
    _emit(cfg, res, lines, out)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    return run(config_from_args(argv))


if __name__ == "__main__":
    sys.exit(main())
