"""Command-line front end.

Subcommands: ``state``, ``range``, ``report``, ``tables``, ``scatter``,
``surface``.  Every flag may also come from a JSON config file given with
``--config``; flags on the command line win.  Validation errors exit with
status 2 and a one-line message on stderr.
"""

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import tables as tb
from .broadcast import (
    analytic_range,
    broadcast_report,
    scatter_dataset,
    surface_dataset,
    sweep_row,
)
from .cloners import SUPPORTED_COPIES
from .measures import dense_coding_capacity, ppt_verdict, teleportation_fidelity
from .states import (
    SAMPLERS,
    BellDiagonalParams,
    WernerLikeParams,
    bell_diagonal,
    purity,
    sample_random_state,
    werner_like,
)

PROG = "entbroadcast"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# output helpers


def fmt(v):
    """Format one cell: 6 significant digits, ``NA`` for missing values."""
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return "NA"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.6g}"
    return str(v)


def _json_value(v):
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return None
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (float, np.floating)):
        return float(f"{float(v):.6g}")
    if isinstance(v, (int, np.integer)):
        return int(v)
    return v


def render(rows, columns, fmt_name="csv"):
    """Rows as CSV text (header first) or a JSON array of flat objects."""
    if fmt_name == "json":
        data = [{c: _json_value(r.get(c)) for c in columns} for r in rows]
        return json.dumps(data, indent=1) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(r.get(c)) for c in columns])
    return buf.getvalue()


def write_files(files):
    """Write ``{path: text}`` only once everything is computed; atomic per file."""
    for path, text in files.items():
        d = os.path.dirname(path)
        if d:
            os.makedirs(d, exist_ok=True)
        tmp = path + ".tmp"
        with open(tmp, "w", newline="") as f:
            f.write(text)
        os.replace(tmp, path)


# ---------------------------------------------------------------------------
# plot scripts

_SCATTER_PLOT = """\
# Scatter of complementarity sums against purity.
import csv
import os

import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
with open(os.path.join(here, {csv_name!r})) as f:
    rows = list(csv.DictReader(f))

purity = [float(r["purity"]) for r in rows]
fig, axes = plt.subplots(1, 2, figsize=(10, 4))
for ax, key, bound in zip(axes, ("sum_tf", "sum_dc"), (2, 3)):
    ax.scatter(purity, [float(r[key]) for r in rows], s=3)
    ax.axhline(bound, color="k", lw=0.8, ls="--")
    ax.set_xlabel("Tr[rho^2]")
    ax.set_ylabel(key)
fig.tight_layout()
fig.savefig(os.path.join(here, {png_name!r}), dpi=150)
"""

_SURFACE_PLOT = """\
# Complementarity sums over (alpha^2, p) for Werner-like inputs.
import csv
import os

import matplotlib.pyplot as plt
import numpy as np

here = os.path.dirname(os.path.abspath(__file__))
with open(os.path.join(here, {csv_name!r})) as f:
    rows = list(csv.DictReader(f))

a2 = np.array([float(r["alpha2"]) for r in rows])
p = np.array([float(r["p"]) for r in rows])
n = int(round(len(rows) ** 0.5))
fig = plt.figure(figsize=(11, 4.5))
for k, key in enumerate(("sum_tf", "sum_dc")):
    z = np.array([float(r[key]) for r in rows])
    ax = fig.add_subplot(1, 2, k + 1, projection="3d")
    ax.plot_surface(a2.reshape(n, n), p.reshape(n, n), z.reshape(n, n), cmap="viridis")
    ax.set_xlabel("alpha^2")
    ax.set_ylabel("p")
    ax.set_zlabel(key)
fig.tight_layout()
fig.savefig(os.path.join(here, {png_name!r}), dpi=150)
"""


def plot_script(kind, csv_path):
    base = os.path.basename(csv_path)
    stem = os.path.splitext(base)[0]
    template = _SCATTER_PLOT if kind == "scatter" else _SURFACE_PLOT
    text = template.format(csv_name=base, png_name=stem + ".png")
    return os.path.join(os.path.dirname(csv_path), stem + "_plot.py"), text


# ---------------------------------------------------------------------------
# argument handling


def _float(name, lo, hi):
    def conv(text):
        try:
            v = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a number, got {text!r}")
        if not lo <= v <= hi:
            raise argparse.ArgumentTypeError(f"parameter out of range: {name}={v} not in [{lo:g}, {hi:g}]")
        return v

    return conv


def _triple(text):
    parts = [t.strip() for t in str(text).split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("--c expects three comma-separated values c1,c2,c3")
    out = []
    for t in parts:
        if t in ("_", "?"):
            out.append(None)
            continue
        try:
            v = float(t)
        except ValueError:
            raise argparse.ArgumentTypeError(f"--c value {t!r} is not a number")
        if not -1.0 <= v <= 1.0:
            raise argparse.ArgumentTypeError(f"parameter out of range: c={v} not in [-1, 1]")
        out.append(v)
    return tuple(out)


def _positive(name, minimum=1):
    def conv(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer, got {text!r}")
        if v < minimum:
            raise argparse.ArgumentTypeError(f"{name} must be at least {minimum}")
        return v

    return conv


def _add_state_flags(p, families=("werner", "belldiag", "random")):
    p.add_argument("--family", choices=families, default=families[0])
    p.add_argument("--p", type=_float("p", 0.0, 1.0))
    p.add_argument("--alpha2", type=_float("alpha2", 0.0, 1.0))
    p.add_argument("--c", type=_triple, metavar="C1,C2,C3")


def _add_cloner_flags(p):
    p.add_argument("--cloner", choices=("local", "nonlocal"), default="nonlocal")
    p.add_argument("--copies", type=_positive("--copies", 2), default=2)


def _add_common(p):
    p.add_argument("--config", help="JSON file whose keys mirror the long flags")
    p.add_argument("--out", help="output path")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--dc-formula", choices=("unclamped", "clamped"), default="unclamped")
    p.add_argument("--fb-convention", choices=("root", "squared"), default="root")


def build_parser():
    parser = _Parser(prog=PROG, description="Broadcasting of two-qubit entanglement via cloning.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("state", help="Bloch form and resource measures of one state")
    _add_state_flags(p)
    p.add_argument("--sampler", choices=SAMPLERS, default="hs")
    p.add_argument("--seed", type=int, default=0)
    _add_common(p)

    p = sub.add_parser("range", help="broadcasting range along one parameter")
    _add_state_flags(p, ("werner", "belldiag"))
    p.add_argument("--vary", choices=("p", "alpha2", "c1", "c2", "c3"))
    _add_cloner_flags(p)
    p.add_argument("--grid", type=_positive("--grid", 100), default=1000)
    _add_common(p)

    p = sub.add_parser("report", help="broadcasting verdict and complementarity sums")
    _add_state_flags(p)
    p.add_argument("--sampler", choices=SAMPLERS, default="hs")
    p.add_argument("--seed", type=int, default=0)
    _add_cloner_flags(p)
    _add_common(p)

    p = sub.add_parser("tables", help="regenerate the published tables and the calibration report")
    p.add_argument("--which", nargs="+", choices=tb.TABLE_IDS, default=list(tb.TABLE_IDS))
    p.add_argument("--grid", type=_positive("--grid", 100), default=1000)
    _add_common(p)

    p = sub.add_parser("scatter", help="sums against purity for random states")
    p.add_argument("--samples", type=_positive("--samples"), default=5000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sampler", choices=SAMPLERS, default="hs")
    _add_cloner_flags(p)
    p.add_argument("--emit-plot", action="store_true")
    _add_common(p)

    p = sub.add_parser("surface", help="sums over the (alpha2, p) plane for Werner-like states")
    p.add_argument("--grid", type=_positive("--grid", 2), default=100)
    _add_cloner_flags(p)
    p.add_argument("--emit-plot", action="store_true")
    _add_common(p)
    return parser, sub


def _load_config(path, subparser):
    try:
        with open(path) as f:
            cfg = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}")
    if not isinstance(cfg, dict):
        raise UsageError("config file must hold a JSON object")
    known = {a.dest: a for a in subparser._actions if a.dest not in ("help", "config")}
    out = {}
    for key, value in cfg.items():
        dest = key.lstrip("-").replace("-", "_")
        if dest not in known:
            raise UsageError(f"unknown config key {key!r}")
        action = known[dest]
        if action.type is not None and value is not None:
            items = value if action.nargs in ("+", "*") else [value]
            try:
                items = [action.type(str(v)) for v in items]
            except argparse.ArgumentTypeError as exc:
                raise UsageError(str(exc))
            value = items if action.nargs in ("+", "*") else items[0]
        if action.choices is not None:
            vals = value if isinstance(value, list) else [value]
            if any(v not in action.choices for v in vals):
                raise UsageError(f"config value {value!r} for {key!r} not in {list(action.choices)}")
        out[dest] = value
    return out


def parse_args(argv):
    parser, sub = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        sp = sub.choices[args.command]
        sp.set_defaults(**_load_config(args.config, sp))
        args = parser.parse_args(argv)
    return args


# ---------------------------------------------------------------------------
# commands


def _input_state(args):
    if args.family == "werner":
        if args.p is None or args.alpha2 is None:
            raise UsageError("werner family needs --p and --alpha2")
        return werner_like(WernerLikeParams(args.p, args.alpha2)), {"p": args.p, "alpha2": args.alpha2}
    if args.family == "belldiag":
        if args.c is None or None in args.c:
            raise UsageError("belldiag family needs --c c1,c2,c3")
        c = BellDiagonalParams(*args.c)
        lam = c.eigenvalues()
        if lam.min() < -1e-12:
            raise UsageError(f"parameter out of range: Bell weights must be non-negative (min {lam.min():.3g})")
        return bell_diagonal(c), {"c1": c.c1, "c2": c.c2, "c3": c.c3}
    return sample_random_state(args.seed, args.sampler), {"seed": args.seed, "sampler": args.sampler}


def _check_copies(args):
    if args.cloner == "local" and args.copies != 2:
        raise UsageError("local cloning only supports --copies 2")
    if args.copies not in SUPPORTED_COPIES:
        raise UsageError(f"--copies must be one of {list(SUPPORTED_COPIES)}")


def _emit(args, rows, columns, text):
    """Print ``text``; with ``--out`` also write the rows as CSV/JSON."""
    if args.out:
        write_files({args.out: render(rows, columns, args.format)})
    elif args.format == "json":
        text = render(rows, columns, "json")
    sys.stdout.write(text)


def cmd_state(args):
    s, params = _input_state(args)
    v = ppt_verdict(s)
    row = {
        **{f"x{i + 1}": s.x[i] for i in range(3)},
        **{f"y{i + 1}": s.y[i] for i in range(3)},
        **{f"t{i + 1}{j + 1}": s.T[i, j] for i in range(3) for j in range(3)},
        "purity": purity(s),
        "min_pt_eigenvalue": v.min_pt_eigenvalue,
        "inseparable": v.inseparable,
        "tf": teleportation_fidelity(s),
        "dc_unclamped": dense_coding_capacity(s.density(), "unclamped"),
        "dc_clamped": dense_coding_capacity(s.density(), "clamped"),
    }
    columns = list(row)
    lines = [f"{args.family} {' '.join(f'{k}={fmt(x)}' for k, x in params.items())}"]
    lines.append("x = " + " ".join(fmt(a) for a in s.x))
    lines.append("y = " + " ".join(fmt(a) for a in s.y))
    for i in range(3):
        lines.append(("T = " if i == 0 else "    ") + " ".join(fmt(a) for a in s.T[i]))
    lines.append(f"purity = {fmt(row['purity'])}")
    lines.append(f"PPT min eigenvalue = {fmt(v.min_pt_eigenvalue)} -> {'inseparable' if v.inseparable else 'separable'}")
    lines.append(f"TF = {fmt(row['tf'])}")
    lines.append(f"DC = {fmt(row['dc_unclamped'])} (unclamped), {fmt(row['dc_clamped'])} (clamped)")
    _emit(args, [row], columns, "\n".join(lines) + "\n")


def _range_setup(args):
    if args.family == "werner":
        given = {k: getattr(args, k) for k in ("p", "alpha2") if getattr(args, k) is not None}
        vary = args.vary
        if vary is None and len(given) == 1:
            vary = "alpha2" if "p" in given else "p"
        if vary not in ("p", "alpha2"):
            raise UsageError("werner range needs exactly one of --p, --alpha2 (or --vary p|alpha2)")
        fixed = {k: v for k, v in given.items() if k != vary}
        if len(fixed) != 1:
            raise UsageError("werner range needs the non-varied parameter")
        return fixed, vary
    if args.c is None:
        raise UsageError("belldiag range needs --c c1,c2,c3 with the varied entry as _")
    names = ("c1", "c2", "c3")
    vary = args.vary or (names[args.c.index(None)] if args.c.count(None) == 1 else None)
    if vary not in names:
        raise UsageError("belldiag range needs --vary c1|c2|c3 (or one entry of --c given as _)")
    fixed = {n: c for n, c in zip(names, args.c) if n != vary}
    if None in fixed.values():
        raise UsageError("belldiag range needs the two non-varied components of --c")
    return fixed, vary


def cmd_range(args):
    _check_copies(args)
    fixed, vary = _range_setup(args)
    row = sweep_row(args.family, fixed, vary, args.cloner, args.copies, grid=args.grid)
    an = analytic_range(args.family, fixed, vary, args.cloner, args.copies)
    tf_key = f"sum_tf/{args.fb_convention}"
    dc_key = f"sum_dc/{args.fb_convention}/{args.dc_formula}"
    out = {
        "family": args.family,
        "fixed_param_name": ";".join(fixed),
        "fixed_param_value": ";".join(fmt(v) for v in fixed.values()),
        "variable": vary,
        "n_copies": args.copies,
        "cloner": args.cloner,
        "range": str(row.range),
        "range_lo": row.range.lo,
        "range_hi": row.range.hi,
        "analytic_range": "NA" if an is None else str(an),
        "sum_tf_max": row.stat(tf_key),
        "sum_tf_min": row.stat(tf_key, "min"),
        "sum_dc_max": row.stat(dc_key),
        "sum_dc_min": row.stat(dc_key, "min"),
        "dc_variant": args.dc_formula,
        "fb_convention": args.fb_convention,
    }
    label = ", ".join(f"{k}={fmt(v)}" for k, v in fixed.items())
    text = f"{args.family} {args.cloner} 1->{args.copies}, {label}: {vary} in {row.range}\n"
    if an is not None:
        text += f"analytic: {an}\n"
    _emit(args, [out], list(out), text)


def cmd_report(args):
    _check_copies(args)
    s, params = _input_state(args)
    r = broadcast_report(s, args.cloner, args.copies, args.dc_formula, args.fb_convention)
    row = {
        **params,
        "cloner": r.cloner,
        "n_copies": r.n_copies,
        "desired_pair_inseparable": r.desired_pair_inseparable,
        "side_pair_separable": r.side_pair_separable,
        "broadcast_ok": r.broadcast_ok,
        "fb": r.fb,
        "dtf": r.dtf,
        "ddc": r.ddc,
        "sum_tf": r.sum_tf,
        "sum_dc": r.sum_dc,
        "purity": r.purity,
        "min_pt_desired": r.min_pt_desired,
        "min_pt_side": r.min_pt_side,
        "dc_variant": r.dc_formula,
        "fb_convention": r.fb_convention,
    }
    text = "".join(f"{k} = {fmt(v)}\n" for k, v in row.items())
    _emit(args, [row], list(row), text)


def cmd_tables(args):
    out_dir = args.out or "tables"
    ext = args.format
    cells = tb.compute_cells(args.which, grid=args.grid)
    files, lines = {}, []
    for tid in args.which:
        rows = tb.table_rows(tid, cells, args.dc_formula, args.fb_convention)
        files[os.path.join(out_dir, f"table_{tid}.{ext}")] = render(rows, tb.TABLE_COLUMNS, ext)
        bad = sum(not r["range_match"] for r in rows)
        lines.append(f"table {tid}: {len(rows)} cells, {len(rows) - bad} ranges match")
    cal = tb.calibration_rows(cells)
    summary = tb.calibration_summary(cal)
    files[os.path.join(out_dir, f"calibration.{ext}")] = render(cal, tb.CALIBRATION_COLUMNS, ext)
    files[os.path.join(out_dir, f"calibration_summary.{ext}")] = render(summary, tb.SUMMARY_COLUMNS, ext)
    for s in summary:
        if s["best"]:
            form = f"/{s['dc_formula']}" if s["dc_formula"] else ""
            lines.append(
                f"best {s['quantity']} convention: {s['fb_convention']}{form} {s['statistic']}"
                f" ({s['matched']}/{s['cells']} within {tb.SUM_TOL})"
            )
    write_files(files)
    sys.stdout.write("\n".join(lines) + "\n")


def _dataset(args, kind, rows, columns):
    path = args.out or f"{kind}.{args.format}"
    files = {path: render(rows, columns, args.format)}
    if args.emit_plot:
        if args.format != "csv":
            raise UsageError("--emit-plot needs --format csv")
        script, text = plot_script(kind, path)
        files[script] = text
    write_files(files)
    ok = sum(bool(r["broadcast_ok"]) for r in rows)
    sys.stdout.write(f"{len(rows)} rows ({ok} broadcast) -> {', '.join(files)}\n")


def cmd_scatter(args):
    _check_copies(args)
    rows = scatter_dataset(
        args.samples, args.seed, args.cloner, args.copies, args.sampler, args.dc_formula, args.fb_convention
    )
    _dataset(args, "scatter", rows, ("purity", "sum_tf", "sum_dc", "fb", "dtf", "ddc", "broadcast_ok"))


def cmd_surface(args):
    _check_copies(args)
    rows = surface_dataset(args.cloner, args.copies, args.grid, args.dc_formula, args.fb_convention)
    _dataset(args, "surface", rows, ("alpha2", "p", "sum_tf", "sum_dc", "broadcast_ok"))


COMMANDS = {
    "state": cmd_state,
    "range": cmd_range,
    "report": cmd_report,
    "tables": cmd_tables,
    "scatter": cmd_scatter,
    "surface": cmd_surface,
}


def main(argv=None):
    try:
        args = parse_args(sys.argv[1:] if argv is None else argv)
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        # invalid parameters caught past argparse (e.g. Bell weights)
        print(f"{PROG}: error: {str(exc).splitlines()[0]}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
