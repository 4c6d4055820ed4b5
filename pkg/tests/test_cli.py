import json
import re

import pytest

from hfpss.chart import render_chart
from hfpss.cli import main, parse_module
from hfpss.errors import ParseError
from hfpss.scenarios import builtin, to_json
from hfpss.specseq import Page, Window


def run_cli(capsys, *args):
    code = main(list(args))
    out, err = capsys.readouterr()
    return code, out, err


def test_list(capsys):
    code, out, _ = run_cli(capsys, "list")
    assert code == 0
    assert out.split() == ["ko-endo", "pic-kgl-2adic", "pic-ko-classical", "kq-weight0"]


def test_cohomology_sign(capsys):
    code, out, _ = run_cli(capsys, "cohomology", "--module", "Z sign", "--range", "0..4")
    assert code == 0
    assert [line.split(" = ")[1] for line in out.splitlines()] == ["0", "Z/2", "0", "Z/2", "0"]


def test_cohomology_trivial(capsys):
    _, out, _ = run_cli(capsys, "cohomology", "--module", "Z trivial", "--range", "0..2")
    assert [line.split(" = ")[1] for line in out.splitlines()] == ["Z", "0", "Z/2"]


def test_module_spec_forms():
    assert parse_module("Z+Z swap").underlying.free_rank == 2
    assert parse_module("Z/4 [[-1]]").underlying.torsion == (4,)
    with pytest.raises(ParseError):
        parse_module("Q trivial")
    with pytest.raises(ParseError):
        parse_module("Z swap")


def test_bad_module_exit_code(capsys):
    code, _, err = run_cli(capsys, "cohomology", "--module", "Z+Z [[0,1],[1,1]]")
    assert code == 1 and "error" in err


def test_run_pic(capsys):
    code, out, _ = run_cli(capsys, "run", "pic-kgl-2adic")
    rep = json.loads(out)
    assert code == 0
    assert rep["picard"]["conclusion"] == "Conclusive"
    assert rep["picard"]["group"] == "Z ⊕ Z/4"


def test_run_ko(capsys):
    code, out, _ = run_cli(capsys, "run", "ko-endo")
    rep = json.loads(out)
    assert code == 0
    assert [a["verdict"] for a in rep["abutment"]] == ["ExactMatch"] * 9
    assert rep["stable_page"] == 4


def test_wrong_expectation_exits_2(capsys, tmp_path):
    doc = to_json(builtin("ko-endo"))
    for e in doc["expected_abutment"]:
        if e["stem"] == 3:
            e.update(orders=[2], rank=0, names=["x"], pro2=[])
    path = tmp_path / "wrong.json"
    path.write_text(json.dumps(doc))
    code, out, err = run_cli(capsys, "run", str(path))
    assert code == 2
    rep = json.loads(out)
    bad = [a for a in rep["abutment"] if a["verdict"] == "Mismatch"]
    assert [a["stem"] for a in bad] == [3]
    assert "stem 3: Mismatch" in err


def test_missing_scenario_exits_1(capsys):
    code, _, err = run_cli(capsys, "run", "no-such-thing")
    assert code == 1 and "error" in err


def test_invalid_scenario_exits_1(capsys, tmp_path):
    doc = to_json(builtin("ko-endo"))
    doc["differentials"][0]["target"] = "h1^2"
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, _, err = run_cli(capsys, "run", str(path))
    assert code == 1 and "bidegree shift" in err


@pytest.mark.parametrize("fmt", ["report", "chart-ascii", "chart-svg"])
def test_byte_identical(capsys, tmp_path, fmt):
    outs = []
    for i in range(2):
        path = tmp_path / f"out{i}"
        assert main(["run", "pic-kgl-2adic", "--format", fmt, "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    capsys.readouterr()
    assert outs[0] == outs[1]


def _column(chart: str, stem: int) -> dict[int, str]:
    lines = chart.splitlines()
    axis = next(i for i, l in enumerate(lines) if set(l.strip()) == {"-"})
    labels = lines[axis + 1]
    m = re.search(rf"(?<![-\d]){stem}(?!\d)", labels)
    width = 3
    out = {}
    for line in lines[:axis]:
        if "|" not in line:
            continue
        s = int(line.split("|")[0])
        cell = line[m.start() - 1: m.start() + width].strip()
        if cell and cell != ".":
            out[s] = cell
    return out


def test_pic_chart_stem0(pic_run):
    from hfpss.cli import _chart

    chart = _chart(pic_run, "chart-ascii", "infinity")
    assert _column(chart, 0) == {0: "□", 1: "•", 3: "•"}
    assert "╌╌>" in chart
    assert chart.splitlines()[0] == "pic-kgl-2adic: E_infinity"


def test_ko_e2_stem1(ko_run):
    from hfpss.cli import _chart

    # h1^(2k+1) z^k all sit in stem 1 on E2; only h1 survives
    chart = _chart(ko_run, "chart-ascii", "2")
    assert _column(chart, 1) == {1: "•", 5: "•", 9: "•", 13: "•"}
    chart = _chart(ko_run, "chart-ascii", "infinity")
    assert _column(chart, 1) == {1: "•"}


def test_empty_page_chart():
    page = Page(2, {}, Window(0, 3, 2))
    text = render_chart(page, "ascii")
    assert "□ Z" in text
    assert text.splitlines()[4].split() == ["0", "1", "2", "3"]
    assert all(set(line.split("|")[1].split()) == {"."} for line in text.splitlines()[:3])
    svg = render_chart(page, "svg")
    assert svg.startswith("<svg") and "<circle" not in svg.split("</defs>")[1]


def test_svg_self_contained(pic_run):
    from hfpss.cli import _chart

    svg = _chart(pic_run, "chart-svg", "infinity")
    assert "xlink:href" not in svg and "http://www.w3.org/2000/svg" in svg
    assert "<link" not in svg and "<script" not in svg
    assert "stroke-dasharray" in svg
