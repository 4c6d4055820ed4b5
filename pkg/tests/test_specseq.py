import pytest
from hypothesis import given, settings, strategies as st

from hfpss.abgroup import FgAbGroup
from hfpss.errors import AmbiguousAssignment, NoConsistentAssignment
from hfpss.gradedring import RingPresentation
from hfpss.scenarios import ku_e2_ring, ku_family
from hfpss.specseq import (
    DEFAULT_WINDOW,
    CoefficientFamily,
    Page,
    Provenance,
    VerdictKind,
    Window,
    build_e2,
    check_abutment,
    match_presentation,
    propagate_leibniz,
    relabel_with_presentation,
    run_endomorphism,
    solve_generator_differentials,
    stem_assoc_graded,
    turn_page,
)

KU = ku_family()
P = ku_e2_ring()
BOX = DEFAULT_WINDOW.expanded(2, 6).degree_box()


@pytest.fixture(scope="module")
def e2():
    return build_e2(KU, DEFAULT_WINDOW)


@pytest.fixture(scope="module")
def named_e2(e2):
    return relabel_with_presentation(e2, match_presentation(e2, P))


def gens(poly_by_name):
    return {k: P.parse(v) for k, v in poly_by_name.items()}


def test_e2_cells(e2):
    a = e2.group(0, 4)
    assert a.invariants() == (1, ()) and a.pro2 == (True,)
    assert e2.group(3, 6).invariants() == (0, (2,))
    for s in range(10):
        for t in (1, 3, 5, 7, 9):
            assert e2.group(s, t).is_trivial()
    assert e2.group(-1, 0).is_trivial()


def test_presentation_matches(e2):
    rep = match_presentation(e2, P)
    assert rep.isomorphic
    assert len(rep.verdicts) == sum(1 for _ in DEFAULT_WINDOW.bidegrees())
    assert len(rep.notes) == 1 and rep.notes[0].startswith("z has order 2")


def test_dropping_relation_gives_mismatch(e2):
    no_rel = RingPresentation(P.generators, ())
    rep = match_presentation(e2, no_rel)
    assert not rep.isomorphic
    assert (2, 4) in [k for k, _, _ in rep.mismatches]


def test_empty_presentation_on_zero_page():
    zero = build_e2(CoefficientFamily.table({}), Window(0, 2, 2))
    assert match_presentation(zero, RingPresentation(())).isomorphic


def test_forced_d3_on_z():
    sol = solve_generator_differentials(P, gens({"a": "h1^3"}), {"h1"}, 3, BOX)
    assert P.render_poly(sol["z"]) == "h1*z^2"
    assert sol["h1"] == {}


def test_zero_seeds_give_zero():
    sol = solve_generator_differentials(P, gens({"a": "0", "z": "0"}), {"h1"}, 3, BOX)
    assert all(v == {} for v in sol.values())


def test_ambiguous_without_relation():
    bare = RingPresentation(P.generators, ())
    with pytest.raises(AmbiguousAssignment) as info:
        solve_generator_differentials(bare, gens({"a": "h1^3"}), {"h1"}, 3, BOX)
    assert set(info.value.candidates["z"]) == {"0", "h1*z^2"}


def test_inconsistent_seed():
    # d3(z) = 0 contradicts d3(az) = d3(h1^2) = 0 once d3(a) = h1^3
    with pytest.raises(NoConsistentAssignment):
        solve_generator_differentials(P, gens({"a": "h1^3", "z": "0"}), {"h1"}, 3, BOX)


def test_leibniz_examples(named_e2):
    page = Page(3, named_e2.cells, named_e2.window)
    d = propagate_leibniz(page, P, gens({"a": "h1^3", "z": "h1*z^2"}), 3, seeded={"a"})
    # d3(a^2) = 2a h1^3 = 0
    assert d.maps[(0, 8)].is_zero(page.group(3, 10).orders)
    # d3(h1 a) = h1^4 is nonzero
    assert not d.maps[(1, 6)].is_zero(page.group(4, 8).orders)
    assert d.maps[(1, 6)].provenance == Provenance.LEIBNIZ
    assert d.maps[(0, 4)].provenance == Provenance.SEEDED
    # the unit is a cycle
    assert d.maps[(0, 0)].is_zero(page.group(3, 2).orders)
    assert d.square_zero_failures(page) == []


def test_turn_page_examples(named_e2):
    page = Page(3, named_e2.cells, named_e2.window)
    d = propagate_leibniz(page, P, gens({"a": "h1^3", "z": "h1*z^2"}), 3)
    e4 = turn_page(page, d)
    assert e4.r == 4
    assert e4.group(0, 4).invariants() == (1, ())
    assert e4.group(0, 4).generator_names == ("2a",)
    assert e4.group(3, 6).is_trivial()
    # (0, 2) has no d3 in or out: untouched
    untouched = [k for k in page.cells if k not in d.maps and d.incoming(*k) is None]
    assert untouched and all(e4.cells[k] is page.cells[k] for k in untouched)


def test_ko_run_stabilizes_at_4(ko_run):
    run = ko_run.run
    assert run.stable_page == 4
    d2 = run.differentials[0]
    assert d2.is_zero(run.page(2))
    e4 = run.page(4)
    for r in range(5, len(run.pages) + 2):
        assert run.page(r).same_groups(e4)


def test_ko_stems(ko_run):
    e_inf = ko_run.run.e_infinity
    assert [(s, g.label()) for s, g in stem_assoc_graded(e_inf, 1)] == [(1, "Z/2")]
    assert stem_assoc_graded(e_inf, 3) == []
    four = stem_assoc_graded(e_inf, 4)
    assert [(s, g.invariants(), g.generator_names) for s, g in four] == [(0, (1, ()), ("2a",))]


def test_zero_differential_scenario():
    run = run_endomorphism(KU, Window(-2, 6, 6), P, [(3, "a", "0"), (3, "z", "0")], ["h1"], max_page=5)
    e2, e_inf = run.page(2), run.e_infinity
    assert e_inf.same_groups(e2)


def test_check_abutment_examples():
    z2, c2, c4 = FgAbGroup.integers(pro2=True), FgAbGroup.cyclic(2), FgAbGroup.cyclic(4)
    v = check_abutment({0: [(0, c2), (1, c2)], 1: [(0, c2), (1, c2)]}, {0: c4, 1: c2})
    assert v[0].kind == VerdictKind.EXACT
    assert v[1].kind == VerdictKind.MISMATCH
    assert "torsion order" in v[1].detail
    assert check_abutment({3: []}, {3: FgAbGroup()})[3].ok


def test_ko_abutment(ko_run):
    assert all(v.ok for v in ko_run.verdicts.values())
    assert sorted(ko_run.verdicts) == list(range(9))


# properties --------------------------------------------------------------


def test_square_zero_on_every_page(ko_run, pic_run):
    for res in (ko_run, pic_run):
        for d in res.run.differentials:
            assert d.square_zero_failures(res.run.page(d.r)) == []


def test_page_turn_shrinks(ko_run, pic_run):
    for res in (ko_run, pic_run):
        pages = res.run.pages
        for before, after in zip(pages, pages[1:]):
            for key, cell in after.cells.items():
                g0, g1 = before.group(*key), cell.group
                assert g1.free_rank <= g0.free_rank
                if g0.free_rank == 0:
                    assert g0.torsion_order % g1.torsion_order == 0


def test_checkerboard(e2):
    assert all(e2.group(s, t).is_trivial() for s, t in e2.cells if t % 2)


@given(st.integers(0, 30), st.integers(-10, 40))
@settings(max_examples=60, deadline=None)
def test_checkerboard_any_bidegree(s, t):
    from hfpss.specseq import e2_group

    if t % 2:
        assert e2_group(KU, s, t).is_trivial()
    else:
        # 2-periodic in s above degree zero
        if s >= 1:
            assert e2_group(KU, s, t).invariants() == e2_group(KU, s + 2, t).invariants()


def test_basis_names_are_normal(named_e2):
    for cell in named_e2.cells.values():
        for name in cell.group.generator_names:
            poly = P.parse(name)
            assert P.normalize(poly) == poly
