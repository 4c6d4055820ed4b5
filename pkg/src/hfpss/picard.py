"""Picard spectral sequence assembled from an endomorphism spectral sequence.

The coefficients are ``pic0`` at ``t = 0``, the units ``pic1`` at ``t = 1``
and the endomorphism coefficients shifted by one for ``t >= 2``.  In a
stable range the Picard differentials agree with the endomorphism ones;
elsewhere they are unknown and assumed zero, which can only enlarge the
surviving classes.  The 0-stem then gives an upper bound for the Picard
group that is compared with a lower bound supplied by the scenario.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

from .abgroup import FgAbGroup, IntMatrix
from .c2cohomology import C2Module
from .errors import LeibnizInconsistent
from .gradedring import RingPresentation
from .specseq import (
    DEFAULT_WINDOW,
    Bidegree,
    Cell,
    CoefficientFamily,
    DiffMap,
    Page,
    PageDifferential,
    Provenance,
    SpectralSequenceRun,
    Window,
    build_e2,
    computation_window,
    e2_group,
    run_endomorphism,
    run_pages,
    stem_assoc_graded,
)


@dataclass(frozen=True)
class ImportRule:
    """``d_r`` from Picard origin ``(s, t)`` is imported when ``t >= r + offset``.

    ``pages`` restricts importing to the listed ``r`` (``None`` = every page).
    """

    offset: int = 1
    pages: tuple[int, ...] | None = None

    def allows(self, r: int, t: int) -> bool:
        if self.pages is not None and r not in self.pages:
            return False
        return t >= r + self.offset


@dataclass(frozen=True)
class PicInput:
    pic0: C2Module
    pic1: C2Module
    endo: CoefficientFamily
    import_rule: ImportRule = field(default_factory=ImportRule)


def units_model() -> C2Module:
    """The 2-adic units ``Z/2 ⊕ Z_2`` with trivial involution."""
    return C2Module.trivial(FgAbGroup.from_orders([2, 0], ["-1", "u"], [False, True]))


@dataclass(frozen=True)
class _ShiftedFamily:
    inp: PicInput

    def __call__(self, t: int) -> C2Module:
        if t == 0:
            return self.inp.pic0
        if t == 1:
            return self.inp.pic1
        if t >= 2:
            return self.inp.endo(t - 1)
        return C2Module.zero()


def pic_coefficients(inp: PicInput, ts: Iterable[int]) -> CoefficientFamily:
    """Picard coefficients on the given degrees as an explicit family."""
    shifted = _ShiftedFamily(inp)
    return CoefficientFamily.table({t: shifted(t) for t in ts})


def endo_window(window: Window) -> Window:
    """Endomorphism window whose cells cover the Picard window after the shift."""
    return Window(window.stem_min - 1, window.stem_max - 1, window.filtration_max)


# ---------------------------------------------------------------------------
# comparing cells of the two spectral sequences


def transition(a: Cell, b: Cell) -> IntMatrix | None:
    """Matrix taking ``a``'s generators to ``b``'s, if both are the same subquotient of E2."""
    if a.e2_orders != b.e2_orders or a.group.invariants() != b.group.invariants():
        return None
    try:
        ab = [b.from_e2(x) for x in a.e2_lifts]
        ba = [a.from_e2(x) for x in b.e2_lifts]
    except ValueError:
        return None
    n = a.group.ngens
    m_ab = IntMatrix.from_columns(ab, b.group.ngens)
    m_ba = IntMatrix.from_columns(ba, n)
    for M, orders in ((m_ba @ m_ab, a.group.orders), (m_ab @ m_ba, b.group.orders)):
        for i, d in enumerate(orders):
            for j in range(len(orders)):
                x = M[i, j] - int(i == j)
                if (x % d) if d else x:
                    return None
    return m_ab


def import_differentials(
    page: Page,
    endo_page: Page,
    endo_d: PageDifferential,
    rule: ImportRule,
) -> PageDifferential:
    """Picard ``d_r``: copied from the endomorphism ``d_r`` where legal, unknown zero elsewhere."""
    r = page.r
    d = PageDifferential(r)
    for (s, t), cell in sorted(page.cells.items()):
        tgt = (s + r, t + r - 1)
        if cell.group.is_trivial() or not page.nonzero(*tgt):
            continue
        tcell = page.cells[tgt]
        zero = IntMatrix.zeros(tcell.group.ngens, cell.group.ngens)
        imported = None
        if rule.allows(r, t) and t >= 2:
            esrc, etgt = endo_page.cells.get((s, t - 1)), endo_page.cells.get((tgt[0], tgt[1] - 1))
            if esrc is not None and etgt is not None:
                into = transition(cell, esrc)
                back = transition(etgt, tcell)
                if into is not None and back is not None:
                    emap = endo_d.maps.get((s, t - 1))
                    if emap is None:
                        imported = DiffMap((s, t), tgt, zero, Provenance.IMPORTED)
                    elif emap.provenance != Provenance.UNKNOWN:
                        mat = back @ emap.matrix @ into
                        imported = DiffMap((s, t), tgt, mat, Provenance.IMPORTED)
        d.add(imported or DiffMap((s, t), tgt, zero, Provenance.UNKNOWN))
    return d


# ---------------------------------------------------------------------------
# running


@dataclass
class PicardRun:
    run: SpectralSequenceRun
    endo: SpectralSequenceRun

    @property
    def e_infinity(self) -> Page:
        return self.run.e_infinity


Override = Mapping[tuple[int, Bidegree], IntMatrix]


def run_picard(
    inp: PicInput,
    window: Window = DEFAULT_WINDOW,
    presentation: RingPresentation | None = None,
    seeds: Sequence[tuple[int, str, str]] = (),
    permanent: Iterable[str] = (),
    max_page: int | None = None,
    overrides: Override | None = None,
) -> PicardRun:
    """Run the Picard spectral sequence.

    ``overrides`` replaces the value on unknown slots, keyed by
    ``(r, source)``; it exists to probe how the upper bound responds to
    differentials the import rule cannot see.
    """
    max_page = max_page if max_page is not None else window.filtration_max
    endo = run_endomorphism(inp.endo, endo_window(window), presentation, seeds, permanent, max_page)
    comp = computation_window(window, max_page)
    shifted = _ShiftedFamily(inp)
    e2_endo = endo.page(2)

    generic = build_e2(CoefficientFamily.table({t: shifted(t) for t in (0, 1)}), comp)
    cells = {}
    for s, t in comp.bidegrees():
        if t >= 2:
            ec = e2_endo.cells.get((s, t - 1))
            if ec is None:
                raise LeibnizInconsistent(f"endomorphism page does not cover (s,t)=({s},{t - 1})")
            cells[(s, t)] = replace(ec, t=t)
        else:
            cells[(s, t)] = generic.cells[(s, t)]
    e2 = Page(2, cells, window)
    overrides = dict(overrides or {})

    def differential_for(page: Page, previous: list[PageDifferential]) -> PageDifferential:
        r = page.r
        if r - 2 < len(endo.differentials):
            d = import_differentials(page, endo.page(r), endo.differentials[r - 2], inp.import_rule)
        else:
            d = import_differentials(page, page, PageDifferential(r), ImportRule(pages=()))
        for (rr, src), mat in overrides.items():
            if rr == r and src in d.maps and d.maps[src].provenance == Provenance.UNKNOWN:
                m = d.maps[src]
                d.maps[src] = DiffMap(src, m.target, mat, Provenance.UNKNOWN)
        return d

    def probe(s: int, t: int) -> bool:
        return not e2_group(CoefficientFamily.table({t: shifted(t)}), s, t).is_trivial()

    return PicardRun(run_pages(e2, differential_for, max_page, probe), endo)


# ---------------------------------------------------------------------------
# bounds


def upper_bound_stem0(e_inf: Page) -> tuple[int, int, list[tuple[int, FgAbGroup]]]:
    """``(free rank, torsion order, associated graded)`` of the 0-stem.

    Unknown slots were taken to be zero, so these classes can only be too
    many: the result bounds the Picard group from above.
    """
    gr = stem_assoc_graded(e_inf, 0)
    rank = sum(g.free_rank for _, g in gr)
    tors = 1
    for _, g in gr:
        tors *= g.torsion_order
    return rank, tors, gr


@dataclass(frozen=True)
class Conclusive:
    group: FgAbGroup

    def label(self) -> str:
        return self.group.label()


@dataclass(frozen=True)
class Inconclusive:
    reasons: tuple[str, ...]

    def label(self) -> str:
        return "Inconclusive: " + "; ".join(self.reasons)


@dataclass(frozen=True)
class BoundVerdict:
    free_rank_upper: int
    torsion_order_upper: int
    gr_list: tuple[tuple[int, FgAbGroup], ...]
    lower_bound: FgAbGroup
    conclusion: Conclusive | Inconclusive

    @property
    def conclusive(self) -> bool:
        return isinstance(self.conclusion, Conclusive)


def resolve(
    upper: tuple[int, int, Sequence[tuple[int, FgAbGroup]]] | tuple[int, int],
    lower: FgAbGroup,
) -> BoundVerdict:
    """The Picard group equals ``lower`` when it has the rank and torsion order of the upper bound."""
    rank, tors = upper[0], upper[1]
    gr = tuple(upper[2]) if len(upper) > 2 else ()
    reasons = []
    if lower.free_rank != rank:
        reasons.append(f"free rank: upper bound {rank}, lower bound {lower.free_rank}")
    if lower.torsion_order != tors:
        reasons.append(f"torsion order: upper bound {tors}, lower bound {lower.torsion_order}")
    conclusion = Inconclusive(tuple(reasons)) if reasons else Conclusive(lower)
    return BoundVerdict(rank, tors, gr, lower, conclusion)
