"""Spectral sequence pages, differentials and page turning.

Cells are indexed by ``(s, t)``: cohomological degree and internal degree.
Charts use Adams coordinates ``(stem, filtration) = (t - s, s)`` and ``d_r``
maps ``(s, t)`` to ``(s + r, t + r - 1)``.

Every cell remembers the chain of subquotients that produced it from its E2
group, so classes on later pages can be written in E2 basis names (``2a``)
and E2 representatives can be pushed forward to later pages.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property, lru_cache
from itertools import product
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .abgroup import (
    FgAbGroup,
    IntMatrix,
    Subquotient,
    extension_consistent,
    format_combination,
    subquotient_in,
)
from .c2cohomology import C2Module, cohomology_periodic_sq
from .errors import (
    AmbiguousAssignment,
    LeibnizInconsistent,
    NoConsistentAssignment,
    WindowExceeded,
)
from .gradedring import (
    DegreeBox,
    Monomial,
    Poly,
    RingGenerator,
    RingPresentation,
    RewriteRule,
    apply_derivation,
    basis_in_bidegree,
)

log = logging.getLogger(__name__)

Bidegree = tuple[int, int]  # (s, t)

# coefficient magnitude searched for free targets when solving differentials
FREE_SEARCH = 2


@dataclass(frozen=True)
class Window:
    """Chart window: stems ``stem_min..stem_max`` and filtrations ``0..filtration_max``."""

    stem_min: int = -4
    stem_max: int = 12
    filtration_max: int = 14

    def contains(self, s: int, t: int) -> bool:
        return 0 <= s <= self.filtration_max and self.stem_min <= t - s <= self.stem_max

    def expanded(self, stem_margin: int, filtration_margin: int) -> "Window":
        return Window(
            self.stem_min - stem_margin,
            self.stem_max + stem_margin,
            self.filtration_max + filtration_margin,
        )

    def bidegrees(self) -> Iterator[Bidegree]:
        for s in range(self.filtration_max + 1):
            for n in range(self.stem_min, self.stem_max + 1):
                yield s, n + s

    def t_range(self) -> range:
        return range(self.stem_min, self.stem_max + self.filtration_max + 1)

    def degree_box(self) -> DegreeBox:
        return _box(self.stem_min, self.stem_max + self.filtration_max, 0, self.filtration_max)


def _box(t_min: int, t_max: int, s_min: int, s_max: int) -> DegreeBox:
    # large enough for a power of a generator in degree (1, 1) or (2, 0) to fill the box
    bound = max(24, s_max + max(abs(t_min), abs(t_max)))
    return DegreeBox(t_min, t_max, s_min, s_max, exponent_bound=bound)


def _box_for_cells(cells: Iterable[Bidegree]) -> DegreeBox:
    cells = list(cells)
    ss = [s for s, _ in cells]
    ts = [t for _, t in cells]
    return _box(min(ts), max(ts), min(ss), max(ss))


DEFAULT_WINDOW = Window()
STEM_MARGIN = 2
FILTRATION_MARGIN = 6


def computation_window(window: Window, max_page: int) -> Window:
    """Region computed so that displayed cells see every ``d_r`` up to ``max_page``."""
    return window.expanded(STEM_MARGIN, max_page + FILTRATION_MARGIN)


class Provenance(str, Enum):
    SEEDED = "Seeded"
    LEIBNIZ = "Leibniz"
    IMPORTED = "ImportedStable"
    UNKNOWN = "AssumedZeroUnknown"


# ---------------------------------------------------------------------------
# coefficients


@dataclass(frozen=True)
class CoefficientFamily:
    """``t -> C2Module``.

    Either an explicit table (missing ``t`` is the zero module) or a periodic
    pattern: ``groups[t mod period]`` for ``t >= t_min`` (``t_min=None`` means
    all ``t``), zero below.
    """

    explicit: tuple[tuple[int, C2Module], ...] = ()
    period: int | None = None
    groups: tuple[tuple[int, C2Module], ...] = ()
    t_min: int | None = 0

    @classmethod
    def periodic(cls, period: int, groups: Mapping[int, C2Module], t_min: int | None = 0) -> "CoefficientFamily":
        for t in groups:
            if not 0 <= t < period:
                raise ValueError("periodic group residues must lie in [0, period)")
        return cls(period=period, groups=tuple(sorted(groups.items())), t_min=t_min)

    @classmethod
    def table(cls, modules: Mapping[int, C2Module]) -> "CoefficientFamily":
        return cls(explicit=tuple(sorted(modules.items())))

    @cached_property
    def _explicit(self) -> dict[int, C2Module]:
        return dict(self.explicit)

    @cached_property
    def _groups(self) -> dict[int, C2Module]:
        return dict(self.groups)

    def __call__(self, t: int) -> C2Module:
        if self.period is None:
            return self._explicit.get(t, _ZERO)
        if self.t_min is not None and t < self.t_min:
            return _ZERO
        return self._groups.get(t % self.period, _ZERO)

    def expanded(self, ts: Iterable[int]) -> dict[int, C2Module]:
        return {t: self(t) for t in ts}


_ZERO = C2Module.zero()


@lru_cache(maxsize=4096)
def _cohomology_cached(M: C2Module, s: int) -> Subquotient:
    # the periodic resolution repeats with period 2 above degree 0
    key = s if s == 0 else 2 - (s % 2)
    return cohomology_periodic_sq(M, key)


def e2_group(family: CoefficientFamily, s: int, t: int) -> FgAbGroup:
    if s < 0:
        return FgAbGroup()
    return _cohomology_cached(family(t), s).group


# ---------------------------------------------------------------------------
# pages


@dataclass(frozen=True)
class Cell:
    """One ``E_r^{s,t}``: an E2 basis plus the subquotients taken since E2."""

    s: int
    t: int
    e2_names: tuple[str, ...]
    e2_orders: tuple[int, ...]
    chain: tuple[Subquotient, ...]
    e2_monomials: tuple[Monomial, ...] | None = None

    @classmethod
    def from_basis(
        cls,
        s: int,
        t: int,
        orders: Sequence[int],
        names: Sequence[str],
        pro2: Sequence[bool] | None = None,
        monomials: Sequence[Monomial] | None = None,
    ) -> "Cell":
        sq = subquotient_in([], [], list(orders), [], list(names), list(pro2) if pro2 else None)
        return cls(s, t, tuple(names), tuple(orders), (sq,), tuple(monomials) if monomials is not None else None)

    @property
    def group(self) -> FgAbGroup:
        return self.chain[-1].group

    @property
    def stem(self) -> int:
        return self.t - self.s

    @cached_property
    def e2_lifts(self) -> tuple[tuple[int, ...], ...]:
        lifts = [tuple(v) for v in (self.chain[0].group.lifts or ())]
        for sq in self.chain[1:]:
            new = []
            for v in sq.group.lifts or ():
                acc = [0] * len(self.e2_orders)
                for c, base in zip(v, lifts):
                    if c:
                        for k, x in enumerate(base):
                            acc[k] += c * x
                new.append(tuple(x % d if d else x for x, d in zip(acc, self.e2_orders)))
            lifts = new
        return tuple(lifts)

    def from_e2(self, x: Sequence[int]) -> tuple[int, ...]:
        """Coordinates, in this page's generators, of an E2 representative."""
        y = self.chain[0].coordinates(x)
        for sq in self.chain[1:]:
            y = sq.coordinates(y)
        return y

    def advance(self, sq: Subquotient) -> "Cell":
        cell = Cell(self.s, self.t, self.e2_names, self.e2_orders, self.chain + (sq,), self.e2_monomials)
        names = tuple(format_combination(v, self.e2_names) for v in cell.e2_lifts)
        g = sq.group
        renamed = FgAbGroup(g.free_rank, g.torsion, names, g.pro2, g.lifts)
        sq2 = Subquotient(renamed, sq.ambient_orders, sq._kernel_v, sq._kernel_d, sq._pres_v, sq._keep)
        return Cell(self.s, self.t, self.e2_names, self.e2_orders, self.chain + (sq2,), self.e2_monomials)


@dataclass
class Page:
    """All cells of ``E_r`` on a computation window; ``window`` is the displayed part."""

    r: int
    cells: dict[Bidegree, Cell]
    window: Window
    flags: dict[Bidegree, set[str]] = field(default_factory=dict)

    def group(self, s: int, t: int) -> FgAbGroup:
        cell = self.cells.get((s, t))
        return cell.group if cell else FgAbGroup()

    def nonzero(self, s: int, t: int) -> bool:
        cell = self.cells.get((s, t))
        return cell is not None and not cell.group.is_trivial()

    def displayed(self) -> list[Cell]:
        return [c for (s, t), c in sorted(self.cells.items()) if self.window.contains(s, t)]

    def flag(self, bideg: Bidegree, reason: str) -> None:
        self.flags.setdefault(bideg, set()).add(reason)

    def same_groups(self, other: "Page") -> bool:
        keys = set(self.cells) | set(other.cells)
        return all(self.group(*k).invariants() == other.group(*k).invariants() for k in keys)


@dataclass(frozen=True)
class DiffMap:
    source: Bidegree
    target: Bidegree
    matrix: IntMatrix
    provenance: Provenance

    def is_zero(self, target_orders: Sequence[int]) -> bool:
        return all(
            (x % d == 0) if d else x == 0
            for row, d in zip(self.matrix.entries, target_orders)
            for x in row
        )


@dataclass
class PageDifferential:
    """``d_r`` on one page; only slots with nonzero source and target are stored."""

    r: int
    maps: dict[Bidegree, DiffMap] = field(default_factory=dict)

    def add(self, m: DiffMap) -> None:
        s, t = m.source
        if m.target != (s + self.r, t + self.r - 1):
            raise ValueError(f"d_{self.r} from {m.source} must land in {(s + self.r, t + self.r - 1)}, not {m.target}")
        self.maps[m.source] = m

    def incoming(self, s: int, t: int) -> DiffMap | None:
        return self.maps.get((s - self.r, t - self.r + 1))

    def is_zero(self, page: Page) -> bool:
        return all(m.is_zero(page.group(*m.target).orders) for m in self.maps.values())

    def nonzero_maps(self, page: Page) -> list[DiffMap]:
        return [m for m in self.maps.values() if not m.is_zero(page.group(*m.target).orders)]

    def square_zero_failures(self, page: Page) -> list[Bidegree]:
        bad = []
        for src, m in self.maps.items():
            nxt = self.maps.get(m.target)
            if nxt is None:
                continue
            comp = nxt.matrix @ m.matrix
            orders = page.group(*nxt.target).orders
            if any((x % d) if d else x for row, d in zip(comp.entries, orders) for x in row):
                bad.append(src)
        return bad


def build_e2(family: CoefficientFamily, window: Window) -> Page:
    """E2 page with ``cell(s, t) = H^s(C2; family(t))`` on ``window``."""
    cells = {}
    for s, t in window.bidegrees():
        sq = _cohomology_cached(family(t), s)
        g = sq.group
        pro2 = [False] * len(g.torsion) + list(g.pro2)
        cells[(s, t)] = Cell.from_basis(s, t, g.orders, g.generator_names, pro2)
    return Page(2, cells, window)


# ---------------------------------------------------------------------------
# presentations versus computed pages


@dataclass
class MatchReport:
    verdicts: dict[Bidegree, bool]
    mismatches: list[tuple[Bidegree, FgAbGroup, FgAbGroup]]
    notes: list[str]
    matching: dict[Bidegree, list[tuple[str, int]]]
    presentation: RingPresentation

    @property
    def isomorphic(self) -> bool:
        return not self.mismatches


def _amend_with_orders(p: RingPresentation, extra: Mapping[str, int]) -> RingPresentation:
    if not extra:
        return p
    rules = tuple(p.relations) + tuple(
        RewriteRule(lhs=((name, 1),), rhs=(), lhs_coefficient=d) for name, d in extra.items()
    )
    return RingPresentation(p.generators, rules, p.invertible)


def match_presentation(page: Page, p: RingPresentation) -> MatchReport:
    """Compare every computed cell against the monomial basis of ``p``.

    A generator the presentation leaves free but whose own cell is finite
    cyclic gets that order added, with a note; everything else is compared
    as given.
    """
    if not page.cells:
        return MatchReport({}, [], [], {}, p)
    if not p.generators and not p.relations:
        # the empty presentation presents nothing, not the ground ring
        verdicts = {k: c.group.is_trivial() for k, c in sorted(page.cells.items())}
        bad = [(k, c.group, FgAbGroup()) for k, c in sorted(page.cells.items()) if not verdicts[k]]
        return MatchReport(verdicts, bad, [], {k: [] for k in verdicts}, p)
    box = _box_for_cells(page.cells)

    notes = []
    implied: dict[str, int] = {}
    for g in p.generators:
        if p.monomial_order(p.gen(g.name)) != 0 or g.name in p.invertible:
            continue
        key = (g.s, g.t)
        if key not in page.cells:
            continue
        computed = page.cells[key].group
        basis = basis_in_bidegree(p, g.t, g.s, box)
        if (
            computed.free_rank == 0
            and len(computed.torsion) == 1
            and [m for m, _ in basis] == [p.gen(g.name)]
        ):
            d = computed.torsion[0]
            implied[g.name] = d
            notes.append(
                f"{g.name} has order {d} in E2 (computed cell at (s,t)=({g.s},{g.t}) is Z/{d}); "
                f"the presentation lists no relation {d}{g.name} = 0"
            )
    amended = _amend_with_orders(p, implied)
    verdicts = {}
    mismatches = []
    matching = {}
    for (s, t), cell in sorted(page.cells.items()):
        basis = basis_in_bidegree(amended, t, s, box)
        presented = FgAbGroup.from_orders(
            [o for _, o in basis],
            [amended.render(m) for m, _ in basis],
            [o == 0 for _, o in basis],
        )
        ok = presented.is_isomorphic(cell.group)
        verdicts[(s, t)] = ok
        matching[(s, t)] = [(amended.render(m), o) for m, o in basis]
        if not ok:
            mismatches.append(((s, t), cell.group, presented))
    return MatchReport(verdicts, mismatches, notes, matching, amended)


def relabel_with_presentation(page: Page, report: MatchReport) -> Page:
    """E2 page whose cells are spanned by the presentation's normal monomials."""
    if not report.isomorphic:
        raise ValueError("cannot relabel: presentation does not match the computed page")
    p = report.presentation
    box = _box_for_cells(page.cells)
    cells = {}
    for (s, t), cell in page.cells.items():
        basis = basis_in_bidegree(p, t, s, box)
        pro2_cell = list(cell.group.pro2)
        pro2 = [o == 0 and (any(pro2_cell) if pro2_cell else False) for _, o in basis]
        cells[(s, t)] = Cell.from_basis(
            s, t, [o for _, o in basis], [p.render(m) for m, _ in basis], pro2, [m for m, _ in basis]
        )
    return Page(page.r, cells, page.window, {k: set(v) for k, v in page.flags.items()})


# ---------------------------------------------------------------------------
# differentials from generators


def _target(bideg: Bidegree, r: int) -> Bidegree:
    s, t = bideg
    return s + r, t + r - 1


def _poly_sub(a: Poly, b: Poly) -> Poly:
    out = dict(a)
    for m, c in b.items():
        out[m] = out.get(m, 0) - c
    return {m: c for m, c in out.items() if c}


def derivation_failures(p: RingPresentation, diffs: Mapping[str, Poly]) -> list[str]:
    """Relations (and ``d∘d = 0`` on generators) violated by a candidate derivation."""
    out = []
    for lhs, rhs in p.rewrite_rules:
        left = apply_derivation(p, {lhs: 1}, diffs)
        right = apply_derivation(p, rhs, diffs) if rhs else {}
        if p.normalize(_poly_sub(left, right)):
            out.append(f"d({p.render(lhs)}) != d({p.render_poly(rhs)})")
    for c, m in p.coefficient_rules:
        dm = apply_derivation(p, {m: 1}, diffs)
        if p.normalize({k: c * v for k, v in dm.items()}):
            out.append(f"d({c}{p.render(m)}) != 0")
    for g in p.generators:
        dg = diffs.get(g.name)
        if dg and apply_derivation(p, dg, diffs):
            out.append(f"d(d({g.name})) != 0")
    return out


def _candidates(p: RingPresentation, basis: list[tuple[Monomial, int]]) -> list[Poly]:
    ranges = [range(o) if o else range(-FREE_SEARCH, FREE_SEARCH + 1) for _, o in basis]
    out = []
    for coeffs in product(*ranges):
        poly = {m: c for (m, _), c in zip(basis, coeffs) if c}
        out.append(p.normalize(poly))
    # drop duplicates that normalize alike
    seen, uniq = set(), []
    for poly in out:
        key = tuple(sorted(poly.items()))
        if key not in seen:
            seen.add(key)
            uniq.append(poly)
    return uniq


def solve_generator_differentials(
    p: RingPresentation,
    seeds: Mapping[str, Poly],
    permanent: Iterable[str],
    r: int,
    box: DegreeBox,
) -> dict[str, Poly]:
    """Values of ``d_r`` on every generator, forced by relations under Leibniz.

    Seeds are taken as given (and checked); permanent generators map to zero;
    every other generator ranges over all classes in its target bidegree.
    Raises :class:`AmbiguousAssignment` (with the candidate sets) when more
    than one assignment survives and :class:`NoConsistentAssignment` when
    none does.
    """
    permanent = set(permanent)
    fixed: dict[str, Poly] = {}
    free_gens: list[str] = []
    options: dict[str, list[Poly]] = {}
    for g in p.generators:
        if g.name in seeds:
            val = p.normalize(seeds[g.name])
            for m in val:
                if p.degree(m)[:2] != (g.t + r - 1, g.s + r):
                    raise ValueError(f"seed d_{r}({g.name}) = {p.render_poly(val)} has the wrong bidegree")
            fixed[g.name] = val
        elif g.name in permanent:
            fixed[g.name] = {}
        else:
            tt, ts = g.t + r - 1, g.s + r
            if box.contains(tt, ts):
                basis = basis_in_bidegree(p, tt, ts, box)
            elif ts > box.s_max or tt > box.t_max:
                raise WindowExceeded(f"target of d_{r}({g.name}) lies outside the enumeration window")
            else:
                basis = []
            options[g.name] = _candidates(p, basis) if basis else [{}]
            free_gens.append(g.name)

    solutions = []
    for choice in product(*(options[n] for n in free_gens)):
        diffs = dict(fixed)
        diffs.update({n: v for n, v in zip(free_gens, choice)})
        if not derivation_failures(p, diffs):
            solutions.append(diffs)
    if not solutions:
        raise NoConsistentAssignment(f"no d_{r} on generators is consistent with the relations")
    if len(solutions) > 1:
        cands: dict[str, list[str]] = {}
        for n in free_gens:
            vals = []
            for sol in solutions:
                txt = p.render_poly(sol[n])
                if txt not in vals:
                    vals.append(txt)
            if len(vals) > 1:
                cands[n] = vals
        raise AmbiguousAssignment(
            "several assignments survive: " + "; ".join(f"d_{r}({n}) in {{{', '.join(v)}}}" for n, v in cands.items()),
            cands,
        )
    return solutions[0]


def propagate_leibniz(
    page: Page,
    p: RingPresentation,
    gen_diffs: Mapping[str, Poly],
    r: int,
    seeded: Iterable[str] = (),
) -> PageDifferential:
    """Extend generator values to every cell of ``page`` by the Leibniz rule.

    ``page`` must carry E2 monomial bases and agree with E2 as a ring.
    """
    seeded = set(seeded)
    seeded_monos = {p.gen(n) for n in seeded}
    d = PageDifferential(r)
    for src, cell in sorted(page.cells.items()):
        if cell.group.is_trivial() or cell.e2_monomials is None:
            continue
        tgt = _target(src, r)
        tcell = page.cells.get(tgt)
        if tcell is None:
            continue
        index = {m: i for i, m in enumerate(tcell.e2_monomials or ())}
        cols_e2 = []
        for m in cell.e2_monomials:
            dm = apply_derivation(p, {m: 1}, gen_diffs)
            vec = [0] * len(tcell.e2_orders)
            for mm, c in dm.items():
                if mm not in index:
                    raise LeibnizInconsistent(
                        f"d_{r}({p.render(m)}) = {p.render_poly(dm)} leaves the basis of {tgt}"
                    )
                vec[index[mm]] += c
            cols_e2.append(vec)
        if tcell.group.is_trivial():
            continue
        cols = []
        for lift in cell.e2_lifts:
            y = [0] * len(tcell.e2_orders)
            for c, col in zip(lift, cols_e2):
                if c:
                    for k, x in enumerate(col):
                        y[k] += c * x
            cols.append(tcell.from_e2(y))
        mat = IntMatrix.from_columns(cols, tcell.group.ngens)
        prov = Provenance.SEEDED if seeded_monos & set(cell.e2_monomials) else Provenance.LEIBNIZ
        d.add(DiffMap(src, tgt, mat, prov))
    bad = d.square_zero_failures(page)
    if bad:
        raise LeibnizInconsistent(f"d_{r}∘d_{r} != 0 starting at {bad}")
    return d


def unknown_slots(page: Page, r: int, known_cycle: Callable[[Cell], bool] | None = None) -> PageDifferential:
    """Zero ``d_r`` on every slot with nonzero source and target.

    Slots whose source consists of known permanent cycles are exact zeros;
    all others are marked unknown.
    """
    d = PageDifferential(r)
    for src, cell in sorted(page.cells.items()):
        tgt = _target(src, r)
        if cell.group.is_trivial() or not page.nonzero(*tgt):
            continue
        mat = IntMatrix.zeros(page.group(*tgt).ngens, cell.group.ngens)
        prov = Provenance.LEIBNIZ if known_cycle and known_cycle(cell) else Provenance.UNKNOWN
        d.add(DiffMap(src, tgt, mat, prov))
    return d


def permanent_cycle_test(p: RingPresentation, permanent: Iterable[str]) -> Callable[[Cell], bool]:
    """Whether every class of a cell is a combination of products of permanent generators."""
    allowed = {p.index[n] for n in permanent}

    def test(cell: Cell) -> bool:
        if cell.e2_monomials is None:
            return False
        for lift in cell.e2_lifts:
            for c, m in zip(lift, cell.e2_monomials):
                if c and any(e and i not in allowed for i, e in enumerate(m)):
                    return False
        return True

    return test


# ---------------------------------------------------------------------------
# page turning


def turn_page(page: Page, d: PageDifferential) -> Page:
    """``E_{r+1} = ker d_r / im d_r`` cell by cell."""
    if d.r != page.r:
        raise ValueError(f"d_{d.r} does not act on E_{page.r}")
    r = page.r
    cells = {}
    flags = {k: set(v) for k, v in page.flags.items()}
    for key, cell in page.cells.items():
        s, t = key
        inc = d.incoming(s, t)
        out = d.maps.get(key)
        if inc is None and out is None:
            cells[key] = cell
            continue
        f_images = [inc.matrix.column(j) for j in range(inc.matrix.cols)] if inc else []
        g_rows = out.matrix.tolist() if out else []
        c_orders = page.group(*out.target).orders if out else ()
        g = cell.group
        pro2 = [False] * len(g.torsion) + list(g.pro2)
        sq = subquotient_in(f_images, g_rows, g.orders, c_orders, g.generator_names, pro2)
        cells[key] = cell.advance(sq)
        for m in (inc, out):
            if m is not None and m.provenance == Provenance.UNKNOWN:
                flags.setdefault(key, set()).add("unknown")
            partner = None if m is None else (m.source if m is inc else m.target)
            if partner is not None and "edge" in page.flags.get(partner, ()):
                flags.setdefault(key, set()).add("edge")
    return Page(r + 1, cells, page.window, flags)


def flag_edges(page: Page, r: int, probe: Callable[[int, int], bool], into: Page | None = None) -> None:
    """Flag displayed cells whose ``d_r`` partner lies outside the computed
    region but may be nonzero there."""
    into = into or page
    for (s, t), cell in page.cells.items():
        if cell.group.is_trivial() or not page.window.contains(s, t):
            continue
        for partner in ((s + r, t + r - 1), (s - r, t - r + 1)):
            if partner[0] < 0 or partner in page.cells:
                continue
            if probe(*partner):
                into.flag((s, t), "edge")


@dataclass
class SpectralSequenceRun:
    pages: list[Page]
    differentials: list[PageDifferential]
    stable_page: int
    match: MatchReport | None = None
    generator_differentials: dict[int, dict[str, Poly]] = field(default_factory=dict)

    @property
    def e_infinity(self) -> Page:
        return self.pages[-1]

    def page(self, r: int) -> Page:
        return self.pages[r - 2]

    def unknown_slots(self) -> list[tuple[int, DiffMap]]:
        return [
            (d.r, m)
            for d in self.differentials
            for m in d.maps.values()
            if m.provenance == Provenance.UNKNOWN
        ]


def run_pages(
    e2: Page,
    differential_for: Callable[[Page, list[PageDifferential]], PageDifferential],
    max_page: int,
    probe: Callable[[int, int], bool] | None = None,
) -> SpectralSequenceRun:
    """Turn pages from E2 through ``E_{max_page + 1}``."""
    if max_page < 2:
        raise ValueError("max_page must be at least 2")
    pages = [e2]
    diffs: list[PageDifferential] = []
    page = e2
    for r in range(2, max_page + 1):
        d = differential_for(page, diffs)
        bad = d.square_zero_failures(page)
        if bad:
            raise LeibnizInconsistent(f"d_{r}∘d_{r} != 0 starting at {bad}")
        diffs.append(d)
        page = turn_page(page, d)
        pages.append(page)
    stable = max_page + 1
    for d in reversed(diffs):
        if d.is_zero(pages[d.r - 2]):
            stable = d.r
        else:
            break
    if probe is not None:
        # only pages that did something can be distorted by the window edge
        for r in range(2, stable):
            flag_edges(pages[r - 2], r, probe, pages[-1])
    return SpectralSequenceRun(pages, diffs, stable)


def run_endomorphism(
    family: CoefficientFamily,
    window: Window = DEFAULT_WINDOW,
    presentation: RingPresentation | None = None,
    seeds: Sequence[tuple[int, str, str]] = (),
    permanent: Iterable[str] = (),
    max_page: int | None = None,
) -> SpectralSequenceRun:
    """Run the homotopy fixed point spectral sequence of ``family`` to E∞.

    While every earlier differential vanishes, ``d_r`` is determined on the
    presentation's generators (seeds, permanent cycles, Leibniz forcing) and
    extended multiplicatively.  Later pages only carry seeded-free slots,
    which are recorded as unknown zeros.
    """
    max_page = max_page if max_page is not None else window.filtration_max
    comp = computation_window(window, max_page)
    e2 = build_e2(family, comp)
    e2.window = window
    match = None
    if presentation is not None:
        match = match_presentation(e2, presentation)
        if not match.isomorphic:
            bad = ", ".join(f"(s,t)={k}" for k, _, _ in match.mismatches[:5])
            raise LeibnizInconsistent(f"E2 presentation does not match the computed page at {bad}")
        e2 = relabel_with_presentation(e2, match)
        p = match.presentation
    permanent = set(permanent)
    seeds_by_page: dict[int, dict[str, Poly]] = {}
    for r, gen, target in seeds:
        if presentation is None:
            raise ValueError("seeded differentials need an E2 presentation")
        seeds_by_page.setdefault(r, {})[gen] = p.parse(target)
    box = comp.degree_box()
    known_cycle = permanent_cycle_test(p, permanent) if presentation is not None else None
    gen_diffs: dict[int, dict[str, Poly]] = {}

    def differential_for(page: Page, previous: list[PageDifferential]) -> PageDifferential:
        r = page.r
        ring_valid = presentation is not None and all(d.is_zero(q) for d, q in zip(previous, pages_seen))
        if ring_valid:
            vals = solve_generator_differentials(p, seeds_by_page.get(r, {}), permanent, r, box)
            gen_diffs[r] = vals
            d = propagate_leibniz(page, p, vals, r, seeds_by_page.get(r, {}).keys())
        else:
            if seeds_by_page.get(r):
                raise ValueError(f"seeds on page {r} need E_{r} to agree with E2 as a ring")
            d = unknown_slots(page, r, known_cycle)
        pages_seen.append(page)
        return d

    pages_seen: list[Page] = []

    def probe(s: int, t: int) -> bool:
        return not e2_group(family, s, t).is_trivial()

    result = run_pages(e2, differential_for, max_page, probe)
    result.match = match
    result.generator_differentials = gen_diffs
    return result


# ---------------------------------------------------------------------------
# reading off the abutment


def stem_assoc_graded(e_inf: Page, n: int) -> list[tuple[int, FgAbGroup]]:
    """Nonzero cells on the line ``t - s = n`` in ascending filtration."""
    if not e_inf.window.stem_min <= n <= e_inf.window.stem_max:
        raise WindowExceeded(f"stem {n} outside the window")
    out = []
    for s in range(e_inf.window.filtration_max + 1):
        g = e_inf.group(s, n + s)
        if not g.is_trivial():
            out.append((s, g))
    return out


class VerdictKind(str, Enum):
    EXACT = "ExactMatch"
    MISMATCH = "Mismatch"


@dataclass(frozen=True)
class StemVerdict:
    stem: int
    kind: VerdictKind
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.kind is VerdictKind.EXACT


def check_abutment(
    gr: Mapping[int, Sequence[tuple[int, FgAbGroup]] | Sequence[FgAbGroup]],
    expected: Mapping[int, FgAbGroup],
) -> dict[int, StemVerdict]:
    """Compare associated graded pieces with expected groups, stem by stem.

    A stem matches when ranks add up, torsion orders multiply out, and some
    filtration of the expected group has the given subquotients.
    """
    out = {}
    for n, exp in sorted(expected.items()):
        pieces = [x[1] if isinstance(x, tuple) else x for x in gr.get(n, ())]
        rank = sum(g.free_rank for g in pieces)
        tors = 1
        for g in pieces:
            tors *= g.torsion_order
        if extension_consistent(exp, pieces):
            out[n] = StemVerdict(n, VerdictKind.EXACT)
        else:
            got = ", ".join(g.label() for g in pieces) or "0"
            out[n] = StemVerdict(
                n,
                VerdictKind.MISMATCH,
                f"expected {exp.label()} (rank {exp.free_rank}, torsion order {exp.torsion_order}); "
                f"associated graded [{got}] has rank {rank}, torsion order {tors}",
            )
    return out
