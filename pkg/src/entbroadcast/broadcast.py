"""Broadcasting verdicts, closed-form ranges and parameter sweeps.

A state is *broadcast* by a cloner when both desired (cross) pairs come out
inseparable while both side pairs stay separable.  For every broadcast we
also record the complementarity sums ``dTF + FB`` and ``dDC + FB`` where
``FB`` is the Uhlmann fidelity between the input and a desired pair.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import sqrt

import numpy as np

from .cloners import clone, clone_pairs_batch, copy_shrink
from .measures import (
    DC_FORMULAS,
    PPT_TOL,
    FB_CONVENTIONS,
    dense_coding_capacity,
    ppt_verdict,
    teleportation_fidelity,
    uhlmann_fidelity,
)
from .qmat import CLAMP_TOL, InvalidStateError
from .states import (
    BellDiagonalParams,
    bell_diagonal,
    bell_weights,
    _BASIS,
    bloch_to_density,
    purity,
    sample_random_states,
    werner_like,
)

LOCAL_T_SHRINK = 4.0 / 9.0
TF_SUM_BOUND = 2.0
DC_SUM_BOUND = 3.0
BOUND_SLACK = 1e-9


class ComplementarityViolation(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True, eq=False)
class BroadcastReport:
    input: object
    cloner: str
    n_copies: int
    desired_pair_inseparable: bool
    side_pair_separable: bool
    broadcast_ok: bool
    fb: float
    dtf: float
    ddc: float
    sum_tf: float
    sum_dc: float
    purity: float
    dc_formula: str = "unclamped"
    fb_convention: str = "root"
    min_pt_desired: float = float("nan")
    min_pt_side: float = float("nan")
    input_inseparable: bool = False
    anomaly: bool = False


def _pair_verdicts(out):
    desired = [ppt_verdict(p) for p in (out.desired_pair, out.desired_pair_b)]
    side = [ppt_verdict(p) for p in (out.side_pair, out.side_pair_b)]
    return (
        all(v.inseparable for v in desired),
        all(v.separable for v in side),
        min(v.min_pt_eigenvalue for v in desired),
        min(v.min_pt_eigenvalue for v in side),
    )


def broadcast_report(s, cloner="nonlocal", n_copies=2, dc_formula="unclamped", fb_convention="root"):
    """Clone ``s`` and evaluate the broadcasting verdict and complementarity sums."""
    if cloner == "local" and n_copies != 2:
        raise ValueError("local cloning broadcasts into exactly 2 copies")
    out = clone(s, cloner, n_copies)
    ins, sep, pt_d, pt_s = _pair_verdicts(out)
    rho_in = bloch_to_density(s)
    sigma = bloch_to_density(out.desired_pair)
    fb = uhlmann_fidelity(rho_in, sigma, fb_convention)
    dtf = teleportation_fidelity(s) - teleportation_fidelity(out.desired_pair)
    ddc = dense_coding_capacity(rho_in, dc_formula) - dense_coding_capacity(sigma, dc_formula)
    return BroadcastReport(
        input=s,
        cloner=cloner,
        n_copies=n_copies,
        desired_pair_inseparable=ins,
        side_pair_separable=sep,
        broadcast_ok=ins and sep,
        fb=fb,
        dtf=dtf,
        ddc=ddc,
        sum_tf=dtf + fb,
        sum_dc=ddc + fb,
        purity=purity(s),
        dc_formula=dc_formula,
        fb_convention=fb_convention,
        min_pt_desired=pt_d,
        min_pt_side=pt_s,
        input_inseparable=ppt_verdict(rho_in).inseparable,
        anomaly=dtf < -1e-12,
    )


def _pt_min_eigs(m):
    """Smallest partial-transpose eigenvalue for a stack of 4x4 matrices."""
    shape = m.shape[:-2]
    t = m.reshape(*shape, 2, 2, 2, 2)
    t = np.swapaxes(t, -3, -1).reshape(*shape, 4, 4)
    return np.linalg.eigvalsh(t)[..., 0]


def _entropies(w):
    w = np.where(w > CLAMP_TOL, w, 1.0)
    return -np.sum(w * np.log2(w), axis=-1) + 0.0


def _dc_unclamped(rho):
    rho_b = np.einsum("...ajak->...jk", rho.reshape(*rho.shape[:-2], 2, 2, 2, 2))
    return 1.0 + _entropies(np.linalg.eigvalsh(rho_b)) - _entropies(np.linalg.eigvalsh(rho))


def _tf(rho):
    c = (rho.reshape(-1, 16) @ _BASIS.conj().T).real
    return 0.5 * (1.0 + np.linalg.svd(c[:, 7:].reshape(-1, 3, 3), compute_uv=False).sum(axis=1) / 3.0)


def _sqrtm(m):
    w, v = np.linalg.eigh(m)
    return (v * np.sqrt(np.clip(w, 0.0, None))[..., None, :]) @ np.swapaxes(v.conj(), -1, -2)


def _fb_root(rho, sigma):
    f = np.linalg.svd(_sqrtm(rho) @ _sqrtm(sigma), compute_uv=False).sum(axis=-1)
    return np.minimum(f, 1.0)


def batch_metrics(rhos, cloner, n_copies, sums=True):
    """Verdict and every sum variant for a stack of input density matrices.

    Vectorised twin of :func:`broadcast_report`; no validation is done, so
    callers pass valid states.  Returns a dict of arrays with keys ``ok``,
    ``min_pt_desired``, ``min_pt_side`` and (if ``sums``) :data:`SUM_KEYS`.
    """
    rhos = np.asarray(rhos, dtype=complex).reshape(-1, 4, 4)
    pairs = clone_pairs_batch(rhos, cloner, n_copies)
    pts = _pt_min_eigs(pairs)
    pt_d, pt_s = pts[:, :2].min(axis=1), pts[:, 2:].min(axis=1)
    m = {"ok": (pt_d < -PPT_TOL) & (pt_s >= -PPT_TOL), "min_pt_desired": pt_d, "min_pt_side": pt_s}
    if not sums:
        return m
    sigma = pairs[:, 0]
    fb = _fb_root(rhos, sigma)
    dtf = _tf(rhos) - _tf(sigma)
    dc_in, dc_out = _dc_unclamped(rhos), _dc_unclamped(sigma)
    ddc = {"unclamped": dc_in - dc_out, "clamped": np.maximum(1.0, dc_in) - np.maximum(1.0, dc_out)}
    m["dtf"] = dtf
    for form in DC_FORMULAS:
        m[f"ddc/{form}"] = ddc[form]
    for conv, f in (("root", fb), ("squared", fb * fb)):
        m[f"sum_tf/{conv}"] = dtf + f
        for form in DC_FORMULAS:
            m[f"sum_dc/{conv}/{form}"] = ddc[form] + f
    return m


SUM_KEYS = tuple(
    [f"sum_tf/{c}" for c in FB_CONVENTIONS]
    + [f"sum_dc/{c}/{f}" for c in FB_CONVENTIONS for f in DC_FORMULAS]
)


# ---------------------------------------------------------------------------
# ranges


def _endpoint(v):
    # two decimals as in the published tables; whole numbers print bare
    text = f"{v:.2f}"
    return text[:-3] if text.endswith(".00") else text


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    lo_open: bool = True
    hi_open: bool = False

    def __str__(self):
        if self.lo == self.hi:
            return f"[{_endpoint(self.lo)}]"
        left = "(" if self.lo_open else "["
        right = ")" if self.hi_open else "]"
        return f"{left}{_endpoint(self.lo)}, {_endpoint(self.hi)}{right}"

    def contains(self, v):
        above = v > self.lo if self.lo_open else v >= self.lo
        below = v < self.hi if self.hi_open else v <= self.hi
        return above and below


@dataclass(frozen=True)
class RangeResult:
    variable: str
    intervals: tuple = ()

    @property
    def empty(self):
        return not self.intervals

    @property
    def lo(self):
        return self.intervals[0].lo if self.intervals else None

    @property
    def hi(self):
        return self.intervals[-1].hi if self.intervals else None

    def __str__(self):
        if self.empty:
            return "NA"
        return " U ".join(str(iv) for iv in self.intervals)


def _shrinks(cloner, n_copies):
    """Single-copy shrink of the correlation matrix for the given cloner."""
    if cloner == "local":
        return LOCAL_T_SHRINK
    return copy_shrink(n_copies)


def werner_p_threshold(alpha2, t_shrink):
    """Smallest ``p`` at which the shrunk Werner-like pair is entangled."""
    ab = sqrt(alpha2 * (1.0 - alpha2))
    if ab == 0.0:
        return float("inf")
    return 1.0 / (t_shrink * (1.0 + 4.0 * ab))


def werner_alpha2_halfwidth(p, t_shrink):
    """Half-width ``h`` of the entangled window ``1/2 - h < alpha2 < 1/2 + h``.

    Returns ``None`` when no ``alpha2`` works.  For the local cloner this is
    ``sqrt(48 - 81/p^2 + 72/p) / 16``; for the nonlocal 1->2 cloner it is
    ``sqrt((27 p^2 + 30 p - 25) / (144 p^2))``.
    """
    q = t_shrink * p
    if q <= 1.0 / 3.0:
        return None
    b = (1.0 - q) / (4.0 * q)
    return sqrt(0.25 - b * b)


def werner_local_range(alpha2):
    """Closed-form ``p`` range for local broadcasting of a Werner-like state."""
    return _werner_p_range(alpha2, LOCAL_T_SHRINK)


def werner_local_range_p(p):
    """Closed-form ``alpha2`` range ``N- < alpha2 < N+`` for local broadcasting."""
    if p <= 0.75:
        return RangeResult("alpha2")
    n = sqrt(max(0.0, 48.0 - 81.0 / p**2 + 72.0 / p)) / 16.0
    if n == 0.0:
        return RangeResult("alpha2")
    return RangeResult("alpha2", (Interval(0.5 - n, 0.5 + n, True, True),))


def werner_nonlocal_range(alpha2=None, p=None, n_copies=2):
    """Closed-form range for nonlocal broadcasting; give exactly one of ``alpha2``, ``p``.

    Only the desired-pair entanglement is modelled; side-pair separability is
    checked by :func:`sweep_row`.
    """
    eta = copy_shrink(n_copies)
    if (alpha2 is None) == (p is None):
        raise ValueError("give exactly one of alpha2 or p")
    if alpha2 is not None:
        return _werner_p_range(alpha2, eta)
    h = werner_alpha2_halfwidth(p, eta)
    if not h:
        return RangeResult("alpha2")
    return RangeResult("alpha2", (Interval(0.5 - h, 0.5 + h, True, True),))


def _werner_p_range(alpha2, t_shrink):
    lo = werner_p_threshold(alpha2, t_shrink)
    if lo >= 1.0:
        return RangeResult("p")
    return RangeResult("p", (Interval(lo, 1.0, True, False),))


def _check_bell(c1, c2, c3):
    params = BellDiagonalParams(c1, c2, c3)
    if np.min(bell_weights(c1, c2, c3)) < -1e-12:
        raise InvalidStateError(f"Bell-diagonal parameters {params} are not a valid state")


def bell_local_inseparable(c1, c2, c3):
    """Closed-form test: cross pairs of a locally cloned Bell-diagonal state are entangled."""
    _check_bell(c1, c2, c3)
    neg = -1 <= c1 < -0.25 and (c1 + c2 + c3 < -9 / 4 or c1 - c3 + 9 / 4 < c2 <= 1)
    pos = 0.25 < c1 <= 1 and (9 / 4 - c1 + c3 < c2 <= 1 or -1 <= c2 < c1 + c3 - 9 / 4)
    return bool(neg or pos)


def bell_nonlocal_inseparable(c1, c2, c3):
    """Closed-form test: a copy of a nonlocally 1->2 cloned Bell-diagonal state is entangled."""
    _check_bell(c1, c2, c3)
    g = c1 + c2 + c3
    first = (6 * c1 - 3 * g + 5) * (3 * g - 6 * c3 - 5) * (3 * g - 6 * c2 - 5) * (3 * g + 5) < 0
    second = (3 * c3 + 5) * ((5 - 3 * c3) ** 2 - 9 * (c1 - c2) ** 2) < 0
    return bool(first or second)


# ---------------------------------------------------------------------------
# sweeps

FAMILIES = ("werner", "belldiag")
SWEEP_VARIABLES = {"werner": ("p", "alpha2"), "belldiag": ("c1", "c2", "c3")}
DEFAULT_DOMAIN = {"p": (0.0, 1.0), "alpha2": (0.0, 1.0), "c1": (-1.0, 1.0), "c2": (-1.0, 1.0), "c3": (-1.0, 1.0)}


def family_state(family, params):
    """Build a :class:`BlochState` from a family name and a parameter dict.

    Returns ``None`` for parameters that do not describe a valid state.
    """
    if family == "werner":
        return werner_like(p=params["p"], alpha2=params["alpha2"])
    if family == "belldiag":
        try:
            return bell_diagonal(c=(params["c1"], params["c2"], params["c3"]))
        except InvalidStateError:
            return None
    raise ValueError(f"unknown family {family!r}")


def analytic_range(family, fixed, variable, cloner, n_copies):
    """Closed-form broadcasting range where one is known, else ``None``."""
    if family != "werner":
        return None
    t = _shrinks(cloner, n_copies)
    if variable == "p":
        return _werner_p_range(fixed["alpha2"], t)
    if cloner == "local":
        return werner_local_range_p(fixed["p"])
    return werner_nonlocal_range(p=fixed["p"], n_copies=n_copies)


@dataclass(frozen=True, eq=False)
class SweepRow:
    family: str
    fixed: dict
    variable: str
    cloner: str
    n_copies: int
    range: RangeResult
    analytic: object = None
    extrema: dict = field(default_factory=dict)
    boundary: dict = field(default_factory=dict)

    def stat(self, key, kind="max"):
        """``kind`` in {max, min, lo, hi}; ``None`` when the range is empty."""
        if self.range.empty:
            return None
        if kind in ("max", "min"):
            return self.extrema[key][kind]
        return self.boundary[key][kind]

    @property
    def sum_tf_max(self):
        return self.stat("sum_tf/root")

    @property
    def sum_tf_min(self):
        return self.stat("sum_tf/root", "min")

    def sum_dc_max(self, dc_formula="unclamped", fb_convention="root"):
        return self.stat(f"sum_dc/{fb_convention}/{dc_formula}")

    def sum_dc_min(self, dc_formula="unclamped", fb_convention="root"):
        return self.stat(f"sum_dc/{fb_convention}/{dc_formula}", "min")


def _evaluator(family, fixed, variable, cloner, n_copies):
    rhos, cache = {}, {}

    def density(v):
        if v not in rhos:
            st = family_state(family, {**fixed, variable: v})
            rhos[v] = None if st is None else bloch_to_density(st, validate=False)
        return rhos[v]

    def verdicts(vs):
        vs = [float(v) for v in vs]
        todo = [v for v in dict.fromkeys(vs) if v not in cache and density(v) is not None]
        if todo:
            m = batch_metrics(np.array([density(v) for v in todo]), cloner, n_copies, sums=False)
            for k, v in enumerate(todo):
                cache[v] = (bool(m["ok"][k]), float(m["min_pt_desired"][k]))
        return [cache.get(v, (False, float("nan"))) for v in vs]

    def ok(v):
        return verdicts([v])[0][0]

    def min_pt(v):
        return verdicts([v])[0][1]

    def metrics(vs):
        m = batch_metrics(np.array([density(float(v)) for v in vs]), cloner, n_copies)
        return [{k: float(m[k][i]) for k in SUM_KEYS} for i in range(len(vs))]

    return verdicts, ok, min_pt, metrics


def _refine(ok, inside, outside, tol):
    """Bisect between a broadcastable point and a non-broadcastable one."""
    while abs(outside - inside) > tol:
        mid = 0.5 * (inside + outside)
        if ok(mid):
            inside = mid
        else:
            outside = mid
    return inside


def sweep_row(family, fixed, variable, cloner="nonlocal", n_copies=2, grid=1000, tol=1e-6, domain=None):
    """Find the broadcastable set along one variable and the sum extrema on it."""
    if grid < 100:
        raise ValueError("grid resolution must be at least 100 points")
    if family not in FAMILIES or variable not in SWEEP_VARIABLES[family]:
        raise ValueError(f"cannot sweep {variable!r} for family {family!r}")
    lo_d, hi_d = domain or DEFAULT_DOMAIN[variable]
    xs = np.linspace(lo_d, hi_d, grid + 1)
    verdicts, ok, min_pt, metrics = _evaluator(family, fixed, variable, cloner, n_copies)
    flags = [f for f, _ in verdicts(xs)]

    intervals, points = [], []
    k = 0
    while k < len(xs):
        if not flags[k]:
            k += 1
            continue
        start = k
        while k + 1 < len(xs) and flags[k + 1]:
            k += 1
        stop = k
        lo = xs[start] if start == 0 else _refine(ok, xs[start], xs[start - 1], tol)
        hi = xs[stop] if stop == len(xs) - 1 else _refine(ok, xs[stop], xs[stop + 1], tol)
        # an endpoint is open when it sits on an entanglement boundary
        lo_open = start > 0 and abs(min_pt(lo)) < 1e-4
        hi_open = stop < len(xs) - 1 and abs(min_pt(hi)) < 1e-4
        intervals.append(Interval(float(lo), float(hi), bool(lo_open), bool(hi_open)))
        points.extend([lo, *xs[start : stop + 1], hi])
        k += 1

    extrema, boundary = {}, {}
    if points:
        ms = metrics(points)
        first, last = metrics([intervals[0].lo, intervals[-1].hi])
        for key in SUM_KEYS:
            vals = [m[key] for m in ms]
            extrema[key] = {"max": max(vals), "min": min(vals)}
            boundary[key] = {"lo": first[key], "hi": last[key]}
    return SweepRow(
        family=family,
        fixed=dict(fixed),
        variable=variable,
        cloner=cloner,
        n_copies=n_copies,
        range=RangeResult(variable, tuple(intervals)),
        analytic=analytic_range(family, fixed, variable, cloner, n_copies),
        extrema=extrema,
        boundary=boundary,
    )


def max_workers():
    cap = os.environ.get("ENTBROADCAST_THREADS")
    n = os.cpu_count() or 1
    if cap:
        n = min(n, max(1, int(cap)))
    return n


def sweep(family, fixed_list, variable, cloner="nonlocal", n_copies=2, grid=1000, tol=1e-6):
    """Run :func:`sweep_row` for each fixed-parameter dict, in input order."""
    jobs = [dict(f) for f in fixed_list]
    workers = min(max_workers(), len(jobs)) or 1
    run = lambda f: sweep_row(family, f, variable, cloner, n_copies, grid, tol)  # noqa: E731
    if workers == 1:
        return [run(f) for f in jobs]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(run, jobs))


# ---------------------------------------------------------------------------
# figure data


def check_bounds(sum_tf, sum_dc):
    if sum_tf > TF_SUM_BOUND + BOUND_SLACK or sum_dc > DC_SUM_BOUND + BOUND_SLACK:
        raise ComplementarityViolation(f"sum_tf={sum_tf}, sum_dc={sum_dc} exceed the bounds 2 and 3")


def _dataset_rows(states, cloner, n_copies, dc_formula, fb_convention):
    if cloner == "local" and n_copies != 2:
        raise ValueError("local cloning broadcasts into exactly 2 copies")
    if dc_formula not in DC_FORMULAS or fb_convention not in FB_CONVENTIONS:
        raise ValueError("unknown dc formula or fidelity convention")
    m = batch_metrics(np.array([bloch_to_density(s, validate=False) for s in states]), cloner, n_copies)
    tf = m[f"sum_tf/{fb_convention}"]
    dc = m[f"sum_dc/{fb_convention}/{dc_formula}"]
    for a, b in zip(tf, dc):
        check_bounds(a, b)
    return m, tf, dc


def scatter_dataset(n_samples, seed=0, cloner="local", n_copies=2, sampler="hs", dc_formula="unclamped", fb_convention="root"):
    """Complementarity sums for random states, one row per sample.

    Raises :class:`ComplementarityViolation` if any sum exceeds its bound.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    states = sample_random_states(n_samples, seed, sampler)
    m, tf, dc = _dataset_rows(states, cloner, n_copies, dc_formula, fb_convention)
    fb = m["sum_tf/root"] - m["dtf"]
    if fb_convention == "squared":
        fb = fb * fb
    return [
        {
            "purity": float(purity(s)),
            "sum_tf": float(tf[i]),
            "sum_dc": float(dc[i]),
            "fb": float(fb[i]),
            "dtf": float(m["dtf"][i]),
            "ddc": float(m[f"ddc/{dc_formula}"][i]),
            "broadcast_ok": bool(m["ok"][i]),
        }
        for i, s in enumerate(states)
    ]


def surface_dataset(cloner="local", n_copies=2, grid=100, dc_formula="unclamped", fb_convention="root"):
    """Sums on a ``grid x grid`` lattice over ``(alpha2, p)`` for Werner-like states."""
    axis = np.linspace(0.0, 1.0, grid)
    pts = [(float(a2), float(p)) for a2 in axis for p in axis]
    states = [werner_like(p=p, alpha2=a2) for a2, p in pts]
    m, tf, dc = _dataset_rows(states, cloner, n_copies, dc_formula, fb_convention)
    return [
        {"alpha2": a2, "p": p, "sum_tf": float(tf[i]), "sum_dc": float(dc[i]), "broadcast_ok": bool(m["ok"][i])}
        for i, (a2, p) in enumerate(pts)
    ]
