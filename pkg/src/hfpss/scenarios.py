"""Scenario data: built-in spectral sequence inputs and a JSON loader.

A scenario is one of three kinds:

* ``endomorphism``: a coefficient family, run through the spectral sequence
  and compared stem by stem with an expected abutment;
* ``picard``: Picard coefficients built from an endomorphism family, with a
  lower bound for the Picard group;
* ``ring``: a weighted ring presentation whose weight-zero line is compared
  with an expected sequence of groups.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .abgroup import FgAbGroup, IntMatrix
from .c2cohomology import C2Module
from .errors import HfpssError, ParseError, UnknownScenario
from .gradedring import RewriteRule, RingGenerator, RingPresentation, rule
from .picard import ImportRule, PicInput, units_model
from .specseq import DEFAULT_WINDOW, CoefficientFamily, Window

MODES = ("endomorphism", "picard", "ring")


@dataclass(frozen=True)
class Scenario:
    name: str
    mode: str
    window: Window = DEFAULT_WINDOW
    coefficients: CoefficientFamily | PicInput | None = None
    presentation: RingPresentation | None = None
    seeded_differentials: tuple[tuple[int, str, str], ...] = ()
    permanent_cycles: tuple[str, ...] = ()
    expected_abutment: tuple[tuple[int, FgAbGroup], ...] = ()
    lower_bound: FgAbGroup | None = None
    description: str = ""

    @property
    def expected(self) -> dict[int, FgAbGroup]:
        return dict(self.expected_abutment)


# ---------------------------------------------------------------------------
# built-ins


def _zp(name: str = "x") -> FgAbGroup:
    return FgAbGroup.integers(name, pro2=True)


def ku_family() -> CoefficientFamily:
    """Homotopy of connective complex K-theory with conjugation: ``σ = (-1)^k`` on degree ``2k``."""
    return CoefficientFamily.periodic(
        4, {0: C2Module.trivial(_zp("b2")), 2: C2Module.sign(_zp("b"))}, t_min=0
    )


def KU_family() -> CoefficientFamily:
    """Periodic version: the Bott class is invertible."""
    return CoefficientFamily.periodic(
        4, {0: C2Module.trivial(_zp("b2")), 2: C2Module.sign(_zp("b"))}, t_min=None
    )


def ku_e2_ring() -> RingPresentation:
    return RingPresentation(
        (
            RingGenerator("h1", 2, 1, order=2),
            RingGenerator("a", 4, 0),
            RingGenerator("z", 0, 2),
        ),
        (rule("a*z", "h1^2"),),
    )


def KU_e2_ring() -> RingPresentation:
    return RingPresentation(
        (RingGenerator("h1", 2, 1, order=2), RingGenerator("v", 4, 0)),
        (),
        ("v",),
    )


def kq_ring() -> RingPresentation:
    return RingPresentation(
        (
            RingGenerator("tau", 0, 0, weight=-1),
            RingGenerator("h1", 1, 0, weight=1, order=2),
            RingGenerator("a", 4, 0, weight=2),
            RingGenerator("b", 8, 0, weight=4),
        ),
        (rule("tau*h1^3"), rule("a^2", "4*b"), rule("h1*a")),
        ("b",),
    )


def _ko_pattern() -> tuple[tuple[int, FgAbGroup], ...]:
    z2, c2 = _zp(), FgAbGroup.cyclic(2)
    zero = FgAbGroup()
    return tuple(enumerate((z2, c2, c2, zero, z2, zero, zero, zero, z2)))


def _ko_endo() -> Scenario:
    return Scenario(
        name="ko-endo",
        mode="endomorphism",
        coefficients=ku_family(),
        presentation=ku_e2_ring(),
        seeded_differentials=((3, "a", "h1^3"),),
        permanent_cycles=("h1",),
        expected_abutment=_ko_pattern(),
        description="C2 homotopy fixed points of connective complex K-theory under conjugation.",
    )


def _pic_kgl() -> Scenario:
    return Scenario(
        name="pic-kgl-2adic",
        mode="picard",
        coefficients=PicInput(
            pic0=C2Module.trivial(FgAbGroup.integers("S1")),
            pic1=units_model(),
            endo=ku_family(),
        ),
        presentation=ku_e2_ring(),
        seeded_differentials=((3, "a", "h1^3"),),
        permanent_cycles=("h1",),
        lower_bound=FgAbGroup.from_orders([4, 0], ["x", "S1"]),
        description=(
            "Picard group of 2-complete cellular modules over KGL descended along C2. "
            "The involution on the 2-adic units is assumed trivial."
        ),
    )


def _pic_ko() -> Scenario:
    return Scenario(
        name="pic-ko-classical",
        mode="picard",
        coefficients=PicInput(
            pic0=C2Module.trivial(FgAbGroup.cyclic(2, "S1")),
            pic1=units_model(),
            endo=KU_family(),
        ),
        presentation=KU_e2_ring(),
        seeded_differentials=((3, "v", "h1^3"),),
        permanent_cycles=("h1",),
        lower_bound=FgAbGroup.cyclic(8, "S1"),
        description=(
            "Classical check: Picard group of KO from Galois descent along KU. "
            "The involution on the 2-adic units is assumed trivial."
        ),
    )


def _kq_weight0() -> Scenario:
    return Scenario(
        name="kq-weight0",
        mode="ring",
        presentation=kq_ring(),
        expected_abutment=_ko_pattern(),
        description="Weight-zero line of the 2-complete Hermitian K-theory ring over C.",
    )


_BUILTINS = {
    "ko-endo": _ko_endo,
    "pic-kgl-2adic": _pic_kgl,
    "pic-ko-classical": _pic_ko,
    "kq-weight0": _kq_weight0,
}


def builtin_names() -> list[str]:
    return list(_BUILTINS)


def builtin(name: str) -> Scenario:
    try:
        return _BUILTINS[name]()
    except KeyError:
        raise UnknownScenario(f"unknown scenario {name!r}; known: {', '.join(_BUILTINS)}") from None


# ---------------------------------------------------------------------------
# validation


def _seed_violations(p: RingPresentation, seeds, where: str) -> list[str]:
    out = []
    for i, (r, gen, target) in enumerate(seeds):
        loc = f"{where}[{i}]"
        if r < 2:
            out.append(f"{loc}: page {r} < 2")
        if gen not in p.index:
            out.append(f"{loc}: unknown generator {gen!r}")
            continue
        try:
            poly = p.parse(target)
        except (HfpssError, KeyError, ValueError) as e:
            out.append(f"{loc}: cannot parse target {target!r}: {e}")
            continue
        g = p.gen(gen)
        gt, gs, gw = p.degree(g)
        for m in poly:
            mt, ms, mw = p.degree(m)
            if (mt, ms) != (gt + r - 1, gs + r) or (p.has_weights and mw != gw):
                out.append(
                    f"{loc}: bidegree shift: d_{r}({gen}) must land in (s,t)=({gs + r},{gt + r - 1}), "
                    f"{p.render(m)} lies in ({ms},{mt})"
                )
                break
    return out


def _module_violations(M: C2Module, where: str) -> list[str]:
    return [f"{where}: {v}" for v in M.violations()]


def _family_violations(fam: CoefficientFamily, where: str) -> list[str]:
    out = []
    for t, M in fam.explicit:
        out.extend(_module_violations(M, f"{where}.t={t}"))
    for t, M in fam.groups:
        out.extend(_module_violations(M, f"{where}.periodic.t={t}"))
        if fam.period is not None and not 0 <= t < fam.period:
            out.append(f"{where}.periodic.t={t}: residue outside [0, {fam.period})")
    if fam.period is not None and fam.period <= 0:
        out.append(f"{where}.periodic: period must be positive")
    return out


def validate(sc: Scenario) -> list[str]:
    """Every semantic problem with a scenario, each prefixed by its location."""
    out = []
    w = sc.window
    if sc.mode not in MODES:
        out.append(f"mode: {sc.mode!r} is not one of {', '.join(MODES)}")
    if w.stem_min > w.stem_max:
        out.append("window: stem_min exceeds stem_max")
    if w.filtration_max < 0:
        out.append("window: filtration_max is negative")
    if sc.mode == "endomorphism":
        if not isinstance(sc.coefficients, CoefficientFamily):
            out.append("coefficients: endomorphism mode needs a coefficient family")
    elif sc.mode == "picard":
        if not isinstance(sc.coefficients, PicInput):
            out.append("coefficients: picard mode needs pic0, pic1 and endo")
        if sc.lower_bound is None:
            out.append("lower_bound: picard mode needs a lower bound")
    elif sc.mode == "ring":
        if sc.presentation is None or not sc.presentation.has_weights:
            out.append("presentation: ring mode needs a weighted presentation")
    if isinstance(sc.coefficients, CoefficientFamily):
        out.extend(_family_violations(sc.coefficients, "coefficients"))
    elif isinstance(sc.coefficients, PicInput):
        out.extend(_module_violations(sc.coefficients.pic0, "coefficients.pic0"))
        out.extend(_module_violations(sc.coefficients.pic1, "coefficients.pic1"))
        out.extend(_family_violations(sc.coefficients.endo, "coefficients.endo"))
    p = sc.presentation
    if p is not None:
        try:
            issues = p.order_violations() + p.degree_violations()
            if not issues:
                issues += p.sign_ambiguities() + p.confluence_failures()
        except HfpssError as e:
            issues = [f"non-terminating rewrite order: {e}"]
        out.extend(f"presentation: {v}" for v in issues)
        out.extend(_seed_violations(p, sc.seeded_differentials, "differentials"))
        for name in sc.permanent_cycles:
            if name not in p.index:
                out.append(f"permanent: unknown generator {name!r}")
        for r, gen, target in sc.seeded_differentials:
            if gen in sc.permanent_cycles and target.strip() != "0":
                out.append(f"differentials: {gen} is declared permanent but seeded with d_{r}({gen}) = {target}")
    elif sc.seeded_differentials or sc.permanent_cycles:
        out.append("differentials: seeds and permanent cycles need a presentation")
    if sc.mode != "ring":
        for n, _ in sc.expected_abutment:
            if not w.stem_min <= n <= w.stem_max:
                out.append(f"expected_abutment: stem {n} outside the window")
    return out


# ---------------------------------------------------------------------------
# JSON


def _module_to_json(M: C2Module) -> dict:
    g = M.underlying
    return {
        "orders": list(g.orders),
        "names": list(g.generator_names),
        "pro2": M.pro2_flags,
        "action": M.involution.tolist(),
    }


def _family_to_json(fam: CoefficientFamily) -> Any:
    if fam.period is None:
        return [{"t": t, **_module_to_json(M)} for t, M in fam.explicit]
    return {
        "periodic": {
            "period": fam.period,
            "t_min": fam.t_min,
            "groups": [{"t": t, **_module_to_json(M)} for t, M in fam.groups],
        }
    }


def _group_to_json(g: FgAbGroup, stem: int | None = None) -> dict:
    out = {} if stem is None else {"stem": stem}
    out.update({"orders": list(g.torsion), "rank": g.free_rank, "names": list(g.generator_names), "pro2": list(g.pro2)})
    return out


def to_json(sc: Scenario) -> dict:
    doc: dict[str, Any] = {
        "name": sc.name,
        "mode": sc.mode,
        "description": sc.description,
        "window": {
            "stem_min": sc.window.stem_min,
            "stem_max": sc.window.stem_max,
            "filtration_max": sc.window.filtration_max,
        },
    }
    c = sc.coefficients
    if isinstance(c, CoefficientFamily):
        doc["coefficients"] = _family_to_json(c)
    elif isinstance(c, PicInput):
        doc["coefficients"] = {
            "pic0": _module_to_json(c.pic0),
            "pic1": _module_to_json(c.pic1),
            "endo": _family_to_json(c.endo),
            "import_rule": {
                "offset": c.import_rule.offset,
                "pages": list(c.import_rule.pages) if c.import_rule.pages is not None else None,
            },
        }
    else:
        doc["coefficients"] = None
    p = sc.presentation
    if p is not None:
        gens = []
        for g in p.generators:
            entry = {"name": g.name, "t": g.t, "s": g.s, "order": g.order}
            if g.weight is not None:
                entry["weight"] = g.weight
            gens.append(entry)
        doc["presentation"] = {
            "generators": gens,
            "relations": [dict(zip(("lhs", "rhs"), r.text())) for r in p.relations],
            "invertible": list(p.invertible),
        }
    else:
        doc["presentation"] = None
    doc["differentials"] = [{"page": r, "source": g, "target": t} for r, g, t in sc.seeded_differentials]
    doc["permanent"] = list(sc.permanent_cycles)
    doc["expected_abutment"] = [_group_to_json(g, n) for n, g in sc.expected_abutment]
    doc["lower_bound"] = _group_to_json(sc.lower_bound) if sc.lower_bound is not None else None
    return doc


def serialize(sc: Scenario) -> str:
    return json.dumps(to_json(sc), indent=2, ensure_ascii=False) + "\n"


def _check_keys(obj: Any, allowed: set[str], required: set[str], where: str) -> dict:
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object")
    unknown = set(obj) - allowed
    if unknown:
        raise ParseError(f"{where}: unknown field(s) {', '.join(sorted(unknown))}")
    missing = required - set(obj)
    if missing:
        raise ParseError(f"{where}: missing field(s) {', '.join(sorted(missing))}")
    return obj


def _int_list(x: Any, where: str) -> list[int]:
    if not isinstance(x, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in x):
        raise ParseError(f"{where}: expected a list of integers")
    return x


def _group_from_parts(orders: list[int], rank: int, names, pro2, where: str) -> FgAbGroup:
    torsion = [d for d in orders if d]
    if any(d < 0 for d in orders):
        raise ParseError(f"{where}: negative order")
    if names is None:
        names = [f"g{i}" for i in range(len(torsion) + rank)]
    if pro2 is None:
        pro2 = [False] * rank
    if len(names) != len(torsion) + rank or len(pro2) != rank:
        raise ParseError(f"{where}: names/pro2 do not match the orders")
    try:
        return FgAbGroup(rank, tuple(torsion), tuple(names), tuple(pro2))
    except ValueError as e:
        raise ParseError(f"{where}: {e}") from None


def _module_from_json(obj: Any, where: str, extra: set[str] = frozenset()) -> C2Module:
    obj = _check_keys(obj, {"orders", "names", "pro2", "action"} | extra, {"orders", "action"}, where)
    orders = _int_list(obj["orders"], f"{where}.orders")
    if any(d < 0 or d == 1 for d in orders):
        raise ParseError(f"{where}.orders: orders must be 0 (free) or at least 2")
    # the module keeps the listed order of summands, so torsion must come first
    if any(a == 0 and b != 0 for a, b in zip(orders, orders[1:])):
        raise ParseError(f"{where}.orders: list torsion summands before free ones")
    names = obj.get("names") or [f"g{i}" for i in range(len(orders))]
    flags = obj.get("pro2")
    if flags is None:
        flags = [False] * len(orders)
    if len(names) != len(orders) or len(flags) != len(orders):
        raise ParseError(f"{where}: names/pro2 length differs from orders")
    rank = sum(1 for d in orders if d == 0)
    group = FgAbGroup(rank, tuple(d for d in orders if d), tuple(names), tuple(bool(f) for f, d in zip(flags, orders) if d == 0))
    action = obj["action"]
    if not isinstance(action, list) or not all(isinstance(row, list) for row in action):
        raise ParseError(f"{where}.action: expected a list of rows")
    cols = len(action[0]) if action else 0
    if any(len(row) != cols for row in action):
        raise ParseError(f"{where}.action: rows have different lengths")
    for row in action:
        _int_list(row, f"{where}.action")
    return C2Module.unchecked(group, IntMatrix.from_rows(action, cols))


def _family_from_json(obj: Any, where: str) -> CoefficientFamily:
    if isinstance(obj, list):
        table = {}
        for i, entry in enumerate(obj):
            loc = f"{where}[{i}]"
            if not isinstance(entry, dict) or not isinstance(entry.get("t"), int):
                raise ParseError(f"{loc}: needs an integer t")
            if entry["t"] in table:
                raise ParseError(f"{loc}: t={entry['t']} listed twice")
            table[entry["t"]] = _module_from_json(entry, loc, {"t"})
        return CoefficientFamily.table(table)
    obj = _check_keys(obj, {"periodic"}, {"periodic"}, where)
    per = _check_keys(obj["periodic"], {"period", "t_min", "groups"}, {"period", "groups"}, f"{where}.periodic")
    if not isinstance(per["period"], int):
        raise ParseError(f"{where}.periodic.period: expected an integer")
    t_min = per.get("t_min", 0)
    if t_min is not None and not isinstance(t_min, int):
        raise ParseError(f"{where}.periodic.t_min: expected an integer or null")
    groups = {}
    for i, entry in enumerate(per["groups"]):
        loc = f"{where}.periodic.groups[{i}]"
        if not isinstance(entry, dict) or not isinstance(entry.get("t"), int):
            raise ParseError(f"{loc}: needs an integer t")
        groups[entry["t"]] = _module_from_json(entry, loc, {"t"})
    return CoefficientFamily(period=per["period"], groups=tuple(sorted(groups.items())), t_min=t_min)


def _presentation_from_json(obj: Any) -> RingPresentation:
    obj = _check_keys(obj, {"generators", "relations", "invertible"}, {"generators"}, "presentation")
    gens = []
    for i, g in enumerate(obj["generators"]):
        loc = f"presentation.generators[{i}]"
        g = _check_keys(g, {"name", "t", "s", "weight", "order"}, {"name", "t"}, loc)
        gens.append(RingGenerator(g["name"], g["t"], g.get("s", 0), g.get("weight"), g.get("order", 0)))
    rels = []
    for i, r in enumerate(obj.get("relations", [])):
        r = _check_keys(r, {"lhs", "rhs"}, {"lhs"}, f"presentation.relations[{i}]")
        rels.append(rule(r["lhs"], r.get("rhs", "0")))
    try:
        p = RingPresentation(tuple(gens), tuple(rels), tuple(obj.get("invertible", [])))
        for r in rels:
            for name, _ in r.lhs + tuple(x for _, m in r.rhs for x in m):
                if name not in p.index:
                    raise ParseError(f"presentation.relations: unknown generator {name!r}")
    except ValueError as e:
        raise ParseError(f"presentation: {e}") from None
    return p


def _expected_group(obj: Any, where: str, extra: set[str] = frozenset()) -> FgAbGroup:
    obj = _check_keys(obj, {"orders", "rank", "names", "pro2"} | extra, {"orders"}, where)
    orders = _int_list(obj["orders"], f"{where}.orders")
    rank = obj.get("rank", 0)
    if not isinstance(rank, int) or rank < 0:
        raise ParseError(f"{where}.rank: expected a nonnegative integer")
    if obj.get("names") is None and obj.get("pro2") is None:
        return FgAbGroup.from_orders([d for d in orders if d] + [0] * rank)
    return _group_from_parts(orders, rank, obj.get("names"), obj.get("pro2"), where)


TOP_LEVEL = {
    "name", "mode", "description", "window", "coefficients", "presentation",
    "differentials", "permanent", "expected_abutment", "lower_bound",
}


def from_json(doc: Any) -> Scenario:
    doc = _check_keys(doc, TOP_LEVEL, {"name", "mode"}, "scenario")
    mode = doc["mode"]
    win = doc.get("window") or {}
    win = _check_keys(win, {"stem_min", "stem_max", "filtration_max"}, set(), "window")
    window = Window(
        win.get("stem_min", DEFAULT_WINDOW.stem_min),
        win.get("stem_max", DEFAULT_WINDOW.stem_max),
        win.get("filtration_max", DEFAULT_WINDOW.filtration_max),
    )
    coeffs = doc.get("coefficients")
    if coeffs is None:
        coefficients = None
    elif mode == "picard":
        c = _check_keys(coeffs, {"pic0", "pic1", "endo", "import_rule"}, {"pic0", "pic1", "endo"}, "coefficients")
        ir = _check_keys(c.get("import_rule") or {}, {"offset", "pages"}, set(), "coefficients.import_rule")
        pages = ir.get("pages")
        coefficients = PicInput(
            _module_from_json(c["pic0"], "coefficients.pic0"),
            _module_from_json(c["pic1"], "coefficients.pic1"),
            _family_from_json(c["endo"], "coefficients.endo"),
            ImportRule(ir.get("offset", 1), tuple(pages) if pages is not None else None),
        )
    else:
        coefficients = _family_from_json(coeffs, "coefficients")
    pres = _presentation_from_json(doc["presentation"]) if doc.get("presentation") else None
    seeds = []
    for i, d in enumerate(doc.get("differentials", [])):
        d = _check_keys(d, {"page", "source", "target"}, {"page", "source", "target"}, f"differentials[{i}]")
        seeds.append((d["page"], d["source"], d["target"]))
    expected = []
    for i, e in enumerate(doc.get("expected_abutment", [])):
        if not isinstance(e, dict) or not isinstance(e.get("stem"), int):
            raise ParseError(f"expected_abutment[{i}]: needs an integer stem")
        expected.append((e["stem"], _expected_group(e, f"expected_abutment[{i}]", {"stem"})))
    lb = doc.get("lower_bound")
    return Scenario(
        name=doc["name"],
        mode=mode,
        window=window,
        coefficients=coefficients,
        presentation=pres,
        seeded_differentials=tuple(seeds),
        permanent_cycles=tuple(doc.get("permanent", [])),
        expected_abutment=tuple(expected),
        lower_bound=_expected_group(lb, "lower_bound") if lb is not None else None,
        description=doc.get("description", ""),
    )


def loads(text: str) -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e}") from None
    try:
        return from_json(doc)
    except (TypeError, AttributeError, KeyError) as e:
        raise ParseError(f"malformed scenario: {e}") from None


def load(path: str | Path) -> Scenario:
    return loads(Path(path).read_text(encoding="utf-8"))


def resolve_ref(ref: str) -> Scenario:
    """A built-in name or a path to a scenario file."""
    if ref in _BUILTINS:
        return builtin(ref)
    path = Path(ref)
    if path.exists():
        return load(path)
    raise UnknownScenario(f"{ref!r} is neither a built-in scenario nor a file")
