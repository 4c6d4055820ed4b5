"""Acceptance gate: one line per criterion, printed in the terminal summary.

Time limits are wall-clock seconds measured around the computation only.
"""
import json
import time

from hfpss.abgroup import FgAbGroup
from hfpss.c2cohomology import cohomology_bar, cohomology_periodic
from hfpss.cli import main
from hfpss.gradedring import weight_zero_line
from hfpss.runner import report, run_scenario
from hfpss.scenarios import builtin, kq_ring, ku_e2_ring, ku_family
from hfpss.specseq import DEFAULT_WINDOW, build_e2, match_presentation, solve_generator_differentials, stem_assoc_graded

from corpus import module_corpus

LIMIT_SCENARIO = 5.0
LIMIT_ORACLE = 10.0
LIMIT_PROPERTIES = 30.0

RESULTS: list[str] = []


def record(n: int, title: str, ok: bool, detail: str) -> None:
    line = f"criterion {n} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
    print(line)
    RESULTS.append(line)
    assert ok, line


def timed(fn):
    start = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - start


KO_PATTERN = ["Z_2", "Z/2", "Z/2", "0", "Z_2", "0", "0", "0", "Z_2"]


def test_1_ko_abutment():
    res, dt = timed(lambda: run_scenario(builtin("ko-endo")))
    verdicts = [res.verdicts[n].ok for n in range(9)]
    stem1 = [(s, g.label()) for s, g in res.gr[1]]
    stem3 = res.gr[3]
    ok = all(verdicts) and stem1 == [(1, "Z/2")] and stem3 == [] and dt < LIMIT_SCENARIO
    record(
        1, "ko abutment",
        ok,
        f"stems 0..8 ExactMatch={all(verdicts)}, stem 1 gr={stem1}, stem 3 gr={stem3 or '[]'}, "
        f"{dt:.2f} s (limit {LIMIT_SCENARIO:.0f} s)",
    )


def test_2_picard_result():
    res, dt = timed(lambda: run_scenario(builtin("pic-kgl-2adic")))
    b = res.bound
    gr = [(s, g.label()) for s, g in b.gr_list]
    ok = (
        b.conclusive
        and b.conclusion.group.is_isomorphic(FgAbGroup.from_orders([4, 0]))
        and [s for s, _ in gr] == [0, 1, 3]
        and [g.invariants() for _, g in b.gr_list] == [(1, ()), (0, (2,)), (0, (2,))]
        and dt < LIMIT_SCENARIO
    )
    record(2, "Picard group", ok, f"{b.conclusion.label()}, stem-0 gr {gr}, {dt:.2f} s (limit {LIMIT_SCENARIO:.0f} s)")


def test_3_classical_cross_check():
    res, dt = timed(lambda: run_scenario(builtin("pic-ko-classical")))
    b = res.bound
    ok = b.conclusive and b.conclusion.group.is_isomorphic(FgAbGroup.cyclic(8)) and dt < LIMIT_SCENARIO
    record(3, "classical pic(KO)", ok, f"{b.conclusion.label()}, {dt:.2f} s (limit {LIMIT_SCENARIO:.0f} s)")


def test_4_e2_ring():
    e2 = build_e2(ku_family(), DEFAULT_WINDOW)
    rep = match_presentation(e2, ku_e2_ring())
    checked = len(rep.verdicts)
    ok = rep.isomorphic and checked == sum(1 for _ in DEFAULT_WINDOW.bidegrees()) and len(rep.notes) == 1 and rep.notes[0].startswith("z has order 2")
    record(4, "E2 ring", ok, f"{checked} bidegrees, {len(rep.mismatches)} mismatches, notes={rep.notes}")


def test_5_forced_differential():
    p = ku_e2_ring()
    box = DEFAULT_WINDOW.expanded(2, 6).degree_box()
    sol = solve_generator_differentials(p, {"a": p.parse("h1^3")}, {"h1"}, 3, box)
    value = p.render_poly(sol["z"])
    record(5, "forced d3(z)", value == "h1*z^2", f"unique solution d3(z) = {value}")


def test_6_oracle_equivalence():
    corpus = module_corpus()

    def compare():
        bad = []
        for name, M in corpus:
            for s in range(7):
                if cohomology_periodic(M, s).invariants() != cohomology_bar(M, s).invariants():
                    bad.append((name, s))
        return bad

    bad, dt = timed(compare)
    total = len(corpus) * 7
    ok = not bad and dt < LIMIT_ORACLE
    record(6, "oracle equivalence", ok, f"{total - len(bad)}/{total} agree, {dt:.2f} s (limit {LIMIT_ORACLE:.0f} s)")


def test_7_kq_weight_zero():
    line = weight_zero_line(kq_ring(), range(9))
    labels = [line[t].label() for t in range(9)]
    record(7, "KQ weight-zero line", labels == KO_PATTERN, f"t=0..8: {', '.join(labels)}")


def test_8_property_suites(ko_run, pic_run, tmp_path):
    import test_abgroup as ab
    import test_c2cohomology as c2
    import test_gradedring as gr
    import test_picard as pc
    import test_specseq as ss

    start = time.perf_counter()
    ss.test_square_zero_on_every_page(ko_run, pic_run)
    gr.test_derivation_squares_to_zero_and_is_leibniz()
    ss.test_page_turn_shrinks(ko_run, pic_run)
    ab.test_subquotient_order_divides()
    c2.test_periodicity()
    ss.test_checkerboard(build_e2(ku_family(), DEFAULT_WINDOW))
    ss.test_checkerboard_any_bidegree()
    assert ko_run.run.differentials[0].is_zero(ko_run.run.page(2))
    pc.test_monotone_under_extra_differentials()
    outs = []
    for i in range(2):
        path = tmp_path / f"r{i}.json"
        main(["run", "pic-kgl-2adic", "--out", str(path)])
        outs.append(path.read_bytes())
    identical = outs[0] == outs[1] and json.loads(outs[0]) == report(run_scenario(builtin("pic-kgl-2adic")))
    dt = time.perf_counter() - start
    record(
        8, "property suites",
        identical and dt < LIMIT_PROPERTIES,
        f"d∘d=0, order division, periodicity, checkerboard, monotonicity, byte-identical reruns; "
        f"{dt:.2f} s (limit {LIMIT_PROPERTIES:.0f} s)",
    )
