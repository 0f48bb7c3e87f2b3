import json
from decimal import Decimal

import pytest

from revseq import catalog
from revseq.gatelib import HwComplexity
from revseq.metrics import (MetricsReport, UndefinedBaselineError, compare, compute_metrics,
                            divergences, format_percent, hc_verdict, improvement,
                            improvement_exact, load_references, printed_places, references_for,
                            render_table, table_csv)
from revseq.netlist import parse


def test_compute_metrics_sums_attributes():
    c = parse(".name x\n.vars a b c d\n.constants ---0\n.outputs oogg\n"
              ".begin\npk4 a b c d\nfr3 a b c\nn1 d\n.end\n")
    m = compute_metrics(c)
    assert m == MetricsReport(3, 2, 1, 13, HwComplexity(5, 6, 3))


def test_report_addition_and_dict():
    a = MetricsReport(1, 2, 1, 7, HwComplexity(3, 2, 1))
    assert (a + a).as_dict() == {"gc": 2, "go": 4, "ci": 2, "qc": 14,
                                 "hc": {"a": 6, "b": 4, "d": 2}}
    assert MetricsReport.from_dict(a.as_dict()) == a
    assert a.row() == ("1", "2", "1", "7", "3a+2b+1d")


@pytest.mark.parametrize("p, e, places, want", [
    (1, 5, 1, "80.0"), (7, 8, 1, "12.5"), (1, 11, 0, "91"), (2, 3, 1, "33.3"),
    (7, 13, 0, "46"), (1, 12, 1, "91.7"), (1, 1, 0, "0"), (3, 2, 1, "-50.0"),
])
def test_improvement(p, e, places, want):
    assert improvement(p, e, places) == Decimal(want)


def test_undefined_baseline():
    with pytest.raises(UndefinedBaselineError):
        improvement_exact(1, 0)


def test_formatting():
    assert format_percent(Decimal("80.0")) == "80%"
    assert format_percent(Decimal("33.3")) == "33.3%"
    assert printed_places("83.3%") == 1 and printed_places("91%") == 0
    assert printed_places("12.5") == 1


def test_hc_verdict():
    ours = HwComplexity(3, 2, 1)
    assert hc_verdict(ours, HwComplexity(4, 4, 1)) == "Improved"
    assert hc_verdict(ours, ours) == "Equal"
    assert hc_verdict(ours, HwComplexity(2, 9, 9)) == "Not improved"


def test_references_bundle_is_consistent():
    refs = load_references()
    names = set(catalog.names())
    for key, rs in refs.items():
        assert rs.catalog in names, key
        for row in rs.rows:
            for k in ("gc", "go", "ci", "qc"):
                assert row.metrics.value(k) > 0
    assert {r.design for r in references_for("d_ff_pos", refs)} == {"d_ff", "ft_d_ff_pos"}


def test_compare_uses_printed_precision():
    rs = load_references()["d_ff"]
    cmp_ = compare(catalog.build("d_ff_pos").metrics, rs.rows)
    assert cmp_[0].cells()[0] == "91%"     # printed with no decimals
    assert cmp_[0].cells()[1] == "83.3%"
    assert [c.hc for c in cmp_] == ["Improved"] * 4
    forced = compare(catalog.build("d_ff_pos").metrics, rs.rows, places=2)
    assert forced[0].percent["gc"] == Decimal("90.91")


def test_load_references_from_file(tmp_path):
    data = {"version": 1, "designs": {"mine": {
        "catalog": "t_ff", "published": {"gc": 2, "go": 2, "ci": 1, "qc": 8,
                                         "hc": {"a": 4, "b": 2, "d": 1}},
        "references": [{"citation": "[x]", "gc": 4, "go": 4, "ci": 2, "qc": 16,
                        "hc": {"a": 8, "b": 4, "d": 2}}]}}}
    p = tmp_path / "refs.json"
    p.write_text(json.dumps(data))
    rs = load_references(p)["mine"]
    (c,) = compare(catalog.build("t_ff").metrics, rs.rows)
    assert c.cells() == ("50%", "50%", "50%", "50%", "Improved")


def test_divergences():
    a = MetricsReport(2, 2, 1, 14, HwComplexity(5, 3, 2))
    b = MetricsReport(2, 2, 1, 13, HwComplexity(5, 3, 1))
    assert [d["field"] for d in divergences(a, b)] == ["qc", "hc"]
    assert divergences(a, a) == []


def test_table_rendering():
    rows = [("ours", ("1", "2", "1", "7", "3a+2b+1d"))]
    text = render_table(rows)
    assert text.splitlines()[0].split()[:2] == ["Gate", "Count"]
    assert table_csv(rows).splitlines()[1] == "ours,1,2,1,7,3a+2b+1d"
