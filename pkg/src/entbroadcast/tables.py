"""Regenerate the published tables and compare against the bundled reference values.

Reference numbers live in ``data/paper_tables.json`` keyed by table id
(``"1"``..``"6"``, ``"A1"``..``"A6"``), row and number of copies.  A missing
range or sum is stored as ``null`` and written out as ``NA``.
"""

import json
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from importlib import resources

from .broadcast import SUM_KEYS, max_workers, sweep_row
from .measures import DC_FORMULAS, FB_CONVENTIONS

TABLE_IDS = ("1", "2", "3", "4", "5", "6", "A1", "A2", "A3", "A4", "A5", "A6")
RANGE_TOL = 0.01
SUM_TOL = 0.05
STATISTICS = ("max", "min", "lo", "hi")
# appendix tables that print the same ranges twice (once next to each sum)
TWINS = {"A1": "A3", "A3": "A1", "A2": "A4", "A4": "A2", "A5": "A6", "A6": "A5"}

TABLE_COLUMNS = (
    "family",
    "fixed_param_name",
    "fixed_param_value",
    "n_copies",
    "cloner",
    "range_lo",
    "range_hi",
    "paper_range_lo",
    "paper_range_hi",
    "sum_tf_max",
    "sum_dc_max",
    "paper_sum_tf",
    "paper_sum_dc",
    "dc_variant",
    # diagnostics
    "table",
    "variable",
    "range",
    "analytic_lo",
    "analytic_hi",
    "range_match",
    "fb_convention",
    "sum_tf_min",
    "sum_tf_lo",
    "sum_tf_hi",
    "sum_dc_min",
    "sum_dc_lo",
    "sum_dc_hi",
    "note",
)

CALIBRATION_COLUMNS = (
    "table",
    "fixed_param_name",
    "fixed_param_value",
    "n_copies",
    "quantity",
    "fb_convention",
    "dc_formula",
    "statistic",
    "recomputed",
    "paper",
    "residual",
    "matched",
)

SUMMARY_COLUMNS = (
    "quantity",
    "fb_convention",
    "dc_formula",
    "statistic",
    "cells",
    "matched",
    "mean_abs_residual",
    "max_abs_residual",
    "best",
)


@lru_cache(maxsize=1)
def load_reference():
    """Published table values as a dict keyed by table id."""
    text = resources.files("entbroadcast").joinpath("data/paper_tables.json").read_text()
    return json.loads(text)


def _check_ids(which):
    bad = [w for w in which if w not in TABLE_IDS]
    if bad:
        raise ValueError(f"unknown table id(s) {bad}; expected a subset of {list(TABLE_IDS)}")


def _jobs(which):
    ref = load_reference()
    jobs = []
    for tid in which:
        t = ref[tid]
        for row in t["rows"]:
            fixed = tuple(zip(t["fixed"], row["fixed"]))
            for n in sorted(row["cells"], key=int):
                jobs.append((tid, t["family"], fixed, t["variable"], t["cloner"], int(n)))
    return jobs


@lru_cache(maxsize=None)
def _cached_row(family, fixed, variable, cloner, n_copies, grid):
    return sweep_row(family, dict(fixed), variable, cloner, n_copies, grid=grid)


def compute_cells(which=TABLE_IDS, grid=1000):
    """Sweep every cell of the requested tables.

    Returns a list of ``(table_id, fixed, n_copies, SweepRow)`` in table/row
    order.  Identical sweeps shared between tables are computed once.
    """
    which = list(which)
    _check_ids(which)
    jobs = _jobs(which)
    unique = list(dict.fromkeys(j[1:] for j in jobs))
    run = lambda key: _cached_row(*key, grid)  # noqa: E731
    workers = min(max_workers(), len(unique)) or 1
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            list(pool.map(run, unique))
    return [(j[0], j[2], j[5], run(j[1:])) for j in jobs]


def paper_cell(tid, fixed, n):
    """Published cell dict for ``fixed`` = ((name, value), ...) and ``n`` copies."""
    for row in load_reference()[tid]["rows"]:
        if tuple(row["fixed"]) == tuple(v for _, v in fixed):
            return row["cells"][str(n)]
    raise KeyError((tid, fixed, n))


def range_matches(sweep, paper_range, tol=RANGE_TOL):
    """True when both are empty, or both endpoints agree within ``tol``."""
    if paper_range is None or sweep.range.empty:
        return paper_range is None and sweep.range.empty
    return abs(sweep.range.lo - paper_range[0]) <= tol and abs(sweep.range.hi - paper_range[1]) <= tol


def _note(tid, fixed, n, sweep, paper_range):
    notes = []
    twin = TWINS.get(tid)
    if twin:
        other = paper_cell(twin, fixed, n).get("range")
        if (other is None) != (paper_range is None) or (
            other is not None and max(abs(a - b) for a, b in zip(other, paper_range)) > RANGE_TOL
        ):
            notes.append(f"published range differs from table {twin}")
    if len(sweep.range.intervals) > 1:
        notes.append("broadcastable set is not a single interval")
    return "; ".join(notes)


def table_rows(tid, cells, dc_formula="unclamped", fb_convention="root"):
    """Raw (unformatted) row dicts for one table, in :data:`TABLE_COLUMNS` order."""
    if dc_formula not in DC_FORMULAS or fb_convention not in FB_CONVENTIONS:
        raise ValueError("unknown dc formula or fidelity convention")
    t = load_reference()[tid]
    tf_key = f"sum_tf/{fb_convention}"
    dc_key = f"sum_dc/{fb_convention}/{dc_formula}"
    out = []
    for cid, fixed, n, sw in cells:
        if cid != tid:
            continue
        paper = paper_cell(tid, fixed, n)
        pr = paper.get("range")
        an = sw.analytic
        out.append(
            {
                "family": t["family"],
                "fixed_param_name": ";".join(k for k, _ in fixed),
                "fixed_param_value": ";".join(f"{v:.6g}" for _, v in fixed),
                "n_copies": n,
                "cloner": t["cloner"],
                "range_lo": sw.range.lo,
                "range_hi": sw.range.hi,
                "paper_range_lo": pr[0] if pr else None,
                "paper_range_hi": pr[1] if pr else None,
                "sum_tf_max": sw.stat(tf_key),
                "sum_dc_max": sw.stat(dc_key),
                "paper_sum_tf": paper.get("sum_tf"),
                "paper_sum_dc": paper.get("sum_dc"),
                "dc_variant": dc_formula,
                "table": tid,
                "variable": t["variable"],
                "range": str(sw.range),
                "analytic_lo": an.lo if an is not None else None,
                "analytic_hi": an.hi if an is not None else None,
                "range_match": range_matches(sw, pr),
                "fb_convention": fb_convention,
                "sum_tf_min": sw.stat(tf_key, "min"),
                "sum_tf_lo": sw.stat(tf_key, "lo"),
                "sum_tf_hi": sw.stat(tf_key, "hi"),
                "sum_dc_min": sw.stat(dc_key, "min"),
                "sum_dc_lo": sw.stat(dc_key, "lo"),
                "sum_dc_hi": sw.stat(dc_key, "hi"),
                "note": _note(tid, fixed, n, sw, pr),
            }
        )
    return out


def calibration_rows(cells):
    """One row per (published sum, convention, statistic) with its residual."""
    rows = []
    for tid, fixed, n, sw in cells:
        paper = paper_cell(tid, fixed, n)
        for quantity in ("tf", "dc"):
            ref = paper.get(f"sum_{quantity}")
            if ref is None:
                continue
            for key in SUM_KEYS:
                parts = key.split("/")
                if parts[0] != f"sum_{quantity}":
                    continue
                for stat in STATISTICS:
                    v = sw.stat(key, stat)
                    res = None if v is None else v - ref
                    rows.append(
                        {
                            "table": tid,
                            "fixed_param_name": ";".join(k for k, _ in fixed),
                            "fixed_param_value": ";".join(f"{x:.6g}" for _, x in fixed),
                            "n_copies": n,
                            "quantity": quantity,
                            "fb_convention": parts[1],
                            "dc_formula": parts[2] if quantity == "dc" else None,
                            "statistic": stat,
                            "recomputed": v,
                            "paper": ref,
                            "residual": res,
                            "matched": res is not None and abs(res) <= SUM_TOL,
                        }
                    )
    return rows


def calibration_summary(rows):
    """Aggregate residuals per convention; flags the best one per quantity."""
    groups = {}
    for r in rows:
        k = (r["quantity"], r["fb_convention"], r["dc_formula"], r["statistic"])
        groups.setdefault(k, []).append(r)
    out = []
    for (q, conv, form, stat), rs in groups.items():
        res = [abs(r["residual"]) for r in rs if r["residual"] is not None]
        out.append(
            {
                "quantity": q,
                "fb_convention": conv,
                "dc_formula": form,
                "statistic": stat,
                "cells": len(rs),
                "matched": sum(r["matched"] for r in rs),
                "mean_abs_residual": sum(res) / len(res) if res else None,
                "max_abs_residual": max(res) if res else None,
                "best": False,
            }
        )
    for q in ("tf", "dc"):
        cand = [s for s in out if s["quantity"] == q and s["mean_abs_residual"] is not None]
        if cand:
            # most matched cells first, then smallest mean residual
            min(cand, key=lambda s: (-s["matched"], s["mean_abs_residual"]))["best"] = True
    return out


def unmatched(rows, quantity, fb_convention, statistic="max", dc_formula=None, tables=None):
    """Calibration rows that miss the tolerance for one convention."""
    return [
        r
        for r in rows
        if r["quantity"] == quantity
        and r["fb_convention"] == fb_convention
        and r["statistic"] == statistic
        and r["dc_formula"] == dc_formula
        and (tables is None or r["table"] in tables)
        and not r["matched"]
    ]
