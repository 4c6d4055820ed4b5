"""Run a scenario end to end and collect a deterministic report."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .abgroup import FgAbGroup
from .gradedring import weight_zero_line
from .picard import BoundVerdict, PicardRun, resolve, run_picard, upper_bound_stem0
from .scenarios import Scenario, validate
from .specseq import (
    Page,
    PageDifferential,
    SpectralSequenceRun,
    StemVerdict,
    VerdictKind,
    check_abutment,
    run_endomorphism,
    stem_assoc_graded,
)
from .errors import HfpssError


class InvalidScenario(HfpssError):
    pass


@dataclass
class RunResult:
    scenario: Scenario
    run: SpectralSequenceRun | None = None
    picard: PicardRun | None = None
    gr: dict[int, list[tuple[int, FgAbGroup]]] = field(default_factory=dict)
    verdicts: dict[int, StemVerdict] = field(default_factory=dict)
    bound: BoundVerdict | None = None
    weight_line: dict[int, FgAbGroup] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        if any(not v.ok for v in self.verdicts.values()):
            return False
        return self.bound is None or self.bound.conclusive

    @property
    def pages(self) -> list[Page]:
        return self.run.pages if self.run else []

    @property
    def differentials(self) -> list[PageDifferential]:
        return self.run.differentials if self.run else []

    @property
    def stable_page(self) -> int | None:
        return self.run.stable_page if self.run else None


def run_scenario(sc: Scenario, max_page: int | None = None) -> RunResult:
    problems = validate(sc)
    if problems:
        raise InvalidScenario("scenario is invalid:\n  " + "\n  ".join(problems))
    res = RunResult(sc)
    seeds = sc.seeded_differentials
    if sc.mode == "ring":
        expected = sc.expected
        ts = sorted(expected) or list(range(sc.window.stem_min, sc.window.stem_max + 1))
        res.weight_line = weight_zero_line(sc.presentation, ts)
        for t in ts:
            exp = expected.get(t)
            if exp is None:
                continue
            got = res.weight_line[t]
            if got.is_isomorphic(exp):
                res.verdicts[t] = StemVerdict(t, VerdictKind.EXACT)
            else:
                res.verdicts[t] = StemVerdict(t, VerdictKind.MISMATCH, f"expected {exp.label()}, found {got.label()}")
        return res
    if sc.mode == "picard":
        res.picard = run_picard(
            sc.coefficients, sc.window, sc.presentation, seeds, sc.permanent_cycles, max_page
        )
        res.run = res.picard.run
        if res.picard.endo.match is not None:
            res.notes.extend(res.picard.endo.match.notes)
        res.bound = resolve(upper_bound_stem0(res.run.e_infinity), sc.lower_bound)
    else:
        res.run = run_endomorphism(
            sc.coefficients, sc.window, sc.presentation, seeds, sc.permanent_cycles, max_page
        )
        if res.run.match is not None:
            res.notes.extend(res.run.match.notes)
    e_inf = res.run.e_infinity
    for n in range(sc.window.stem_min, sc.window.stem_max + 1):
        res.gr[n] = stem_assoc_graded(e_inf, n)
    if sc.expected_abutment:
        res.verdicts = check_abutment(res.gr, sc.expected)
    return res


# ---------------------------------------------------------------------------
# report


def _group_json(g: FgAbGroup) -> dict[str, Any]:
    return {
        "label": g.label(),
        "rank": g.free_rank,
        "orders": list(g.torsion),
        "generators": list(g.generator_names),
    }


def _page_json(page: Page, label: str | int) -> dict[str, Any]:
    cells = []
    for cell in page.displayed():
        if cell.group.is_trivial():
            continue
        entry = {"s": cell.s, "t": cell.t, "stem": cell.stem, **_group_json(cell.group)}
        flags = sorted(page.flags.get((cell.s, cell.t), ()))
        if flags:
            entry["flags"] = flags
        cells.append(entry)
    return {"page": label, "cells": cells}


def _touches(window, m) -> bool:
    return window.contains(*m.source) or window.contains(*m.target)


def report(res: RunResult) -> dict[str, Any]:
    """RunReport as plain data; a pure function of the scenario."""
    sc = res.scenario
    out: dict[str, Any] = {"scenario": sc.name, "mode": sc.mode, "notes": list(res.notes)}
    if res.run is not None:
        w = sc.window
        out["stable_page"] = res.stable_page
        last = res.stable_page
        out["pages"] = [_page_json(res.run.page(r), r) for r in range(2, last)]
        out["pages"].append(_page_json(res.run.e_infinity, "infinity"))
        diffs = []
        for d in res.differentials:
            page = res.run.page(d.r)
            for src, m in sorted(d.maps.items()):
                if not _touches(w, m):
                    continue
                zero = m.is_zero(page.group(*m.target).orders)
                if zero and m.provenance.value != "AssumedZeroUnknown":
                    continue
                diffs.append(
                    {
                        "r": d.r,
                        "source": list(m.source),
                        "target": list(m.target),
                        "source_stem": m.source[1] - m.source[0],
                        "matrix": m.matrix.tolist(),
                        "zero": zero,
                        "provenance": m.provenance.value,
                    }
                )
        out["differentials"] = diffs
        out["associated_graded"] = [
            {"stem": n, "pieces": [{"s": s, **_group_json(g)} for s, g in pieces]}
            for n, pieces in sorted(res.gr.items())
        ]
    if res.weight_line:
        out["weight_zero_line"] = [{"t": t, **_group_json(g)} for t, g in sorted(res.weight_line.items())]
    if res.verdicts:
        exp = sc.expected
        out["abutment"] = [
            {"stem": n, "expected": exp[n].label(), "verdict": v.kind.value, "detail": v.detail}
            for n, v in sorted(res.verdicts.items())
        ]
    if res.bound is not None:
        b = res.bound
        out["picard"] = {
            "free_rank_upper": b.free_rank_upper,
            "torsion_order_upper": b.torsion_order_upper,
            "gr": [{"s": s, **_group_json(g)} for s, g in b.gr_list],
            "lower_bound": b.lower_bound.label(),
            "conclusion": "Conclusive" if b.conclusive else "Inconclusive",
            "group": b.conclusion.label(),
        }
    out["status"] = "ok" if res.ok else "mismatch"
    return out
