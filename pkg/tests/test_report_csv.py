from fractions import Fraction

import pytest

from app.models import AccuracyReport, ImprovementReport, ParseError
from app.services import report_csv


def _accuracy():
    return AccuracyReport(k=2, K=3, seed=7, config_digest="d", histograms={1: (1, 2), 2: (1, 1, 1)})


def test_accuracy_rows():
    rows = report_csv.accuracy_rows("base", _accuracy())
    pmf = [r for r in rows if r.metric == "pmf"]
    assert [r.i_or_bin for r in pmf] == [0, 1, 2]
    assert pmf[0].value == pytest.approx(1 / 3)
    assert pmf[0].stderr == pytest.approx((2 / 9 / 3) ** 0.5)
    assert {(r.metric, r.i_or_bin) for r in rows if r.metric != "pmf"} == {("E", 1), ("E", 2), ("Var", 1), ("Var", 2)}
    assert all(r.K == 3 and r.seed == 7 for r in rows)


def test_write_and_read_back(tmp_path):
    comments = report_csv.comments_for({"command": "simulate", "scenario": {"k": 2, "n": 3}})
    report = report_csv.build_report(comments, report_csv.accuracy_rows("base", _accuracy()))
    path = report_csv.write_report(report, str(tmp_path / "out" / "r.csv"))

    loaded = report_csv.read_report(path)
    assert loaded.comments == ('command=simulate', 'scenario={"k":2,"n":3}')
    assert len(loaded.rows) == len(report.rows)
    for original, read in zip(report.rows, loaded.rows):
        assert (read.scenario, read.metric, read.i_or_bin, read.K, read.seed) == \
               (original.scenario, original.metric, original.i_or_bin, original.K, original.seed)
        assert read.value == pytest.approx(original.value, rel=1e-11)
        if original.stderr is None:
            assert read.stderr is None
        else:
            assert read.stderr == pytest.approx(original.stderr, rel=1e-11)


def test_render_is_stable():
    report = report_csv.build_report(("a=1",), report_csv.exact_rows("exact", (0.25, 0.75), (0.75, 0.1875), 1e-17))
    text = report_csv.render(report)
    assert text.splitlines()[0] == "# a=1"
    assert text.splitlines()[1] == "scenario,metric,i_or_bin,value,stderr,K,seed"
    assert "exact,pmf,0,0.25,,0,0" in text
    assert "exact,oracle_max_dev,1,1e-17,,0,0" in text
    assert report_csv.render(report) == text


def test_improvement_rows():
    report = ImprovementReport(
        delta_e={30: 4.0}, ratio={30: 0.3}, workloads=(600, 600), e_hom={30: 13.0}, e_het={30: 17.0},
        stderr_hom={30: 0.01}, stderr_het={30: 0.02}, K=10, seed=1,
    )
    rows = {(r.metric, r.i_or_bin): r for r in report_csv.improvement_rows("n=3", report)}
    assert rows[("delta_E", 30)].value == 4.0
    assert rows[("delta_E", 30)].stderr == pytest.approx(0.03)
    assert rows[("W_hom", 0)].value == rows[("W_het", 0)].value == 600.0


def test_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("# x=1\na,b,c\n1,2,3\n", encoding="utf-8")
    with pytest.raises(ParseError):
        report_csv.read_report(str(path))


def test_comments_render_fractions_as_text():
    assert report_csv.comments_for({"eta": Fraction(1, 2)}) == ("eta=1/2",)
