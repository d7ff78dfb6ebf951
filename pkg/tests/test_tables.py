import pytest

from entbroadcast import tables as tb


@pytest.fixture(scope="module")
def werner_cells():
    return tb.compute_cells(["1", "3", "A1", "A3"])


def test_reference_layout():
    ref = tb.load_reference()
    assert tuple(ref) == tb.TABLE_IDS
    for tid, t in ref.items():
        assert t["family"] in ("werner", "belldiag")
        assert t["variable"] not in t["fixed"]
        for row in t["rows"]:
            assert len(row["fixed"]) == len(t["fixed"])
            for n, cell in row["cells"].items():
                assert 2 <= int(n) <= 5
                r = cell.get("range")
                assert r is None or r[0] <= r[1]


def test_unknown_table():
    with pytest.raises(ValueError):
        tb.compute_cells(["7"])


def test_table_rows(werner_cells):
    rows = tb.table_rows("1", werner_cells)
    assert len(rows) == 5
    assert [r["fixed_param_value"] for r in rows] == ["0.2", "0.4", "0.5", "0.6", "0.8"]
    assert all(r["range_match"] for r in rows)
    mid = rows[2]
    assert mid["range"] == "(0.75, 1]"
    assert mid["paper_sum_tf"] == 1.099 and mid["paper_sum_dc"] == 2.244
    assert set(rows[0]) == set(tb.TABLE_COLUMNS)


def test_na_cells(werner_cells):
    rows = tb.table_rows("A1", werner_cells)
    na = [r for r in rows if r["fixed_param_value"] in ("0.2", "0.8") and r["n_copies"] == 5]
    assert len(na) == 2
    for r in na:
        assert r["range_lo"] is None and r["paper_range_lo"] is None
        assert r["sum_tf_max"] is None and r["range_match"]


def test_twin_tables_flagged(werner_cells):
    rows = tb.table_rows("A1", werner_cells)
    cell = next(r for r in rows if r["fixed_param_value"] == "0.5" and r["n_copies"] == 5)
    assert "differs from table A3" in cell["note"]
    assert not cell["range_match"]
    assert abs(cell["range_lo"] - 0.92) < 0.01


def test_calibration_rows(werner_cells):
    rows = tb.calibration_rows(werner_cells)
    assert {r["statistic"] for r in rows} == set(tb.STATISTICS)
    assert {r["fb_convention"] for r in rows} == {"root", "squared"}
    dc = [r for r in rows if r["quantity"] == "dc"]
    assert {r["dc_formula"] for r in dc} == {"unclamped", "clamped"}
    summary = tb.calibration_summary(rows)
    best = {s["quantity"]: s for s in summary if s["best"]}
    assert set(best) == {"tf", "dc"}
    assert best["tf"]["fb_convention"] == "squared" and best["tf"]["statistic"] == "max"


def test_unmatched_filter(werner_cells):
    rows = tb.calibration_rows(werner_cells)
    miss = tb.unmatched(rows, "tf", "root", tables={"1"})
    assert all(r["table"] == "1" and not r["matched"] for r in miss)
    assert tb.unmatched(rows, "tf", "squared", tables={"1", "3"}) == []
