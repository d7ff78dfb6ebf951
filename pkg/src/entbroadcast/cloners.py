"""Optimal universal cloning machines used for broadcasting.

Qubit labels follow the broadcasting literature:

* local cloning: qubits 1 (A) and 2 (B) are the originals, 3 (A) and 4 (B)
  the copies.  Each party clones its own qubit with the 1->2 Gisin-Massar
  (Buzek-Hillery) machine.  The desired pairs are 1-4 and 3-2 (one qubit on
  each side), the side pairs are 1-3 (all on A) and 2-4 (all on B).
* nonlocal cloning: the whole pair 12 is cloned as one 4-level system into
  ``n`` copies.  Copy ``k`` holds a qubit of A and a qubit of B.  The desired
  pair is one complete copy (12 = 34 = ...); the side pairs join the A
  qubits (13) or the B qubits (24) of two different copies.

The nonlocal machine is stored in an occupation-number basis: the ``n``
copies live in the symmetric subspace, indexed by how many copies sit in
each of the four two-qubit basis states 00, 01, 10, 11, and the machine
register holds ``n - 1`` such particles.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement, permutations
from math import comb, factorial, sqrt

import numpy as np

from .qmat import partial_trace
from .states import BlochState, bloch_to_density, density_to_bloch

SUPPORTED_COPIES = (2, 3, 4, 5)


class UnsupportedCopiesError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CloneOutput:
    """Reduced two-qubit states produced by one cloning run."""

    input: BlochState
    cloner: str
    n_copies: int
    desired_pair: BlochState
    desired_pair_b: BlochState
    side_pair: BlochState
    side_pair_b: BlochState

    @property
    def shrink(self):
        return shrink_factors(self, self.input)


# ---------------------------------------------------------------------------
# local 1 -> 2 cloner


@lru_cache(maxsize=None)
def local_isometry(n_copies=2):
    """Isometry ``C^2 -> copy1 (x) copy2 (x) machine`` (8 x 2).

    Only ``n_copies=2`` is provided: local cloning into more copies leaves
    the cross pairs separable, so it cannot broadcast.
    """
    if n_copies != 2:
        raise UnsupportedCopiesError("local cloning is only defined for n_copies=2")
    a0, a1 = sqrt(2 / 3), sqrt(1 / 3)
    e = np.eye(2)
    up_up, dn_dn = np.kron(e[0], e[0]), np.kron(e[1], e[1])
    up_dn = (np.kron(e[0], e[1]) + np.kron(e[1], e[0])) / sqrt(2)
    m0, m1 = e[0], e[1]
    col_up = a0 * np.kron(up_up, m0) + a1 * np.kron(up_dn, m1)
    col_dn = a1 * np.kron(up_dn, m0) + a0 * np.kron(dn_dn, m1)
    return np.stack([col_up, col_dn], axis=1).astype(complex)


@lru_cache(maxsize=None)
def _local_transfer():
    # joint isometry on (1, 3, mA, 2, 4, mB); maps E_ik -> reduced pairs
    v = np.kron(local_isometry(), local_isometry())
    dims = [2] * 6
    keeps = ([0, 4], [1, 3], [0, 1], [3, 4])
    maps = np.zeros((len(keeps), 4, 4, 4, 4), dtype=complex)
    for i in range(4):
        for k in range(4):
            out = np.outer(v[:, i], v[:, k].conj())
            for p, keep in enumerate(keeps):
                maps[p, i, k] = partial_trace(out, dims, keep)
    return maps


def _apply(maps, rho):
    return np.einsum("ik,pikab->pab", rho, maps)


def local_clone(rho, n_copies=2):
    """Clone each qubit of ``rho`` locally with the 1->2 optimal machine."""
    if n_copies != 2:
        raise UnsupportedCopiesError("local cloning is only defined for n_copies=2")
    s = rho if isinstance(rho, BlochState) else density_to_bloch(rho)
    pairs = _apply(_local_transfer(), bloch_to_density(s))
    d14, d32, s13, s24 = (density_to_bloch(m, validate=False) for m in pairs)
    return CloneOutput(s, "local", 2, d14, d32, s13, s24)


# ---------------------------------------------------------------------------
# nonlocal 1 -> N cloner


def occupations(particles, modes=4):
    """All occupation vectors of ``particles`` bosons in ``modes`` modes, sorted."""
    out = []
    for combo in combinations_with_replacement(range(modes), particles):
        occ = [0] * modes
        for c in combo:
            occ[c] += 1
        out.append(tuple(occ))
    return sorted(out, reverse=True)


def _error_patterns(j, i, branches):
    others = [l for l in range(4) if l != i]
    if j == 0:
        return [()]
    if branches == "multiset":
        return list(combinations_with_replacement(others, j))
    if branches == "single":
        return [(l,) * j for l in others]
    raise ValueError(f"unknown branch enumeration {branches!r}")


@dataclass(frozen=True, eq=False)
class NonlocalIsometry:
    """Columns ``V|psi_i>`` of the nonlocal cloner in occupation basis.

    ``columns[i]`` is a ``(len(copy_basis), len(machine_basis))`` array of
    amplitudes.
    """

    n_copies: int
    copy_basis: tuple
    machine_basis: tuple
    columns: np.ndarray
    branch_weights: tuple

    def gram(self):
        flat = self.columns.reshape(4, -1)
        return flat.conj() @ flat.T


@lru_cache(maxsize=None)
def build_nonlocal_isometry(n_copies, branches="multiset"):
    """Nonlocal 1 -> N cloner acting on the 4 basis states 00, 01, 10, 11.

    For input ``psi_i`` the output is a superposition over the number ``j``
    of copies that come out wrong: ``N - j`` copies in ``psi_i`` and ``j``
    copies in other basis states, with the machine holding ``N - 1 - j``
    particles in ``psi_i`` and the same ``j`` wrong states.  The total
    probability of ``j`` errors is ``(N - j) n_j / sum_j (N - j) n_j`` and is
    shared equally among the ``n_j`` error patterns.

    ``branches="multiset"`` takes every multiset of ``j`` states from the
    three others (``n_j = C(j + 2, 2)``); this is the universal,
    unitarily covariant machine.  ``branches="single"`` puts all ``j`` errors
    in one state (``n_j = 3``); it coincides with the former for ``N = 2``
    and is kept for comparison only.
    """
    if n_copies not in SUPPORTED_COPIES:
        raise UnsupportedCopiesError(f"nonlocal cloning supports n_copies in {SUPPORTED_COPIES}")
    n = n_copies
    copy_basis = occupations(n)
    machine_basis = occupations(n - 1)
    cidx = {o: k for k, o in enumerate(copy_basis)}
    midx = {o: k for k, o in enumerate(machine_basis)}

    # n_j does not depend on i
    counts = [len(_error_patterns(j, 0, branches)) for j in range(n)]
    norm = sum((n - j) * counts[j] for j in range(n))
    weights = tuple((n - j) * counts[j] / norm for j in range(n))

    cols = np.zeros((4, len(copy_basis), len(machine_basis)), dtype=complex)
    for i in range(4):
        for j in range(n):
            pats = _error_patterns(j, i, branches)
            amp = sqrt(weights[j] / len(pats))
            for pat in pats:
                err = [0] * 4
                for l in pat:
                    err[l] += 1
                c_occ = list(err)
                c_occ[i] += n - j
                m_occ = list(err)
                m_occ[i] += n - 1 - j
                cols[i, cidx[tuple(c_occ)], midx[tuple(m_occ)]] += amp
    cols.setflags(write=False)
    return NonlocalIsometry(n, tuple(copy_basis), tuple(machine_basis), cols, weights)


def _annihilators(basis_hi, basis_lo):
    """Matrices of ``a_k`` mapping the ``basis_hi`` sector into ``basis_lo``."""
    lo = {o: r for r, o in enumerate(basis_lo)}
    ops = np.zeros((4, len(basis_lo), len(basis_hi)))
    for c, occ in enumerate(basis_hi):
        for k in range(4):
            if occ[k]:
                m = list(occ)
                m[k] -= 1
                ops[k, lo[tuple(m)], c] = sqrt(occ[k])
    return ops


@lru_cache(maxsize=None)
def marginal_maps(n_copies):
    """Operators extracting one- and two-copy marginals from the symmetric sector.

    Returns ``(A1, K2)`` with ``A1[a]`` = ``a_a`` and ``K2[a, b]`` = ``a_b a_a``
    so that, for a symmetric state ``R`` of ``n`` copies,

        <a|rho_1|c>       = Tr(A1[a] R A1[c]^H) / n
        <a b|rho_2|c d>   = Tr(K2[a,b] R K2[c,d]^H) / (n (n - 1))
    """
    n = n_copies
    b_n, b_n1 = occupations(n), occupations(n - 1)
    a_hi = _annihilators(b_n, b_n1)
    if n >= 2:
        a_lo = _annihilators(b_n1, occupations(n - 2))
        k2 = np.einsum("bxy,ayz->abxz", a_lo, a_hi)
    else:
        k2 = None
    return a_hi, k2


@lru_cache(maxsize=None)
def _nonlocal_transfer(n_copies, branches="multiset"):
    iso = build_nonlocal_isometry(n_copies, branches)
    a1, k2 = marginal_maps(n_copies)
    n = n_copies
    one = np.zeros((4, 4, 4, 4), dtype=complex)
    two = np.zeros((4, 4, 16, 16), dtype=complex)
    for i in range(4):
        for k in range(4):
            # copies-only block of V|i><k|V^H, machine traced column by column
            r = iso.columns[i] @ iso.columns[k].conj().T
            one[i, k] = np.einsum("axy,yz,czx->ac", a1, r, a1.conj().transpose(0, 2, 1)) / n
            kr = np.einsum("abxy,yz->abxz", k2, r)
            two[i, k] = np.einsum("abxz,cdxz->abcd", kr, k2.conj()).reshape(16, 16) / (n * (n - 1))
    return one, two


def nonlocal_pair_states(rho, n_copies, branches="multiset"):
    """``(one_copy, two_copy)`` reduced density matrices after nonlocal cloning.

    ``two_copy`` is 16 x 16 over qubits (1, 2 | 3, 4) of copies 1 and 2.
    """
    one, two = _nonlocal_transfer(n_copies, branches)
    rho = np.asarray(rho)
    return np.einsum("ik,ikab->ab", rho, one), np.einsum("ik,ikab->ab", rho, two)


def nonlocal_clone(rho, n_copies=2, branches="multiset"):
    """Clone the pair ``rho`` as a single 4-level system into ``n_copies``."""
    if n_copies not in SUPPORTED_COPIES:
        raise UnsupportedCopiesError(f"nonlocal cloning supports n_copies in {SUPPORTED_COPIES}")
    s = rho if isinstance(rho, BlochState) else density_to_bloch(rho)
    one, two = nonlocal_pair_states(bloch_to_density(s), n_copies, branches)
    dims = [2, 2, 2, 2]
    desired = density_to_bloch(one, validate=False)
    desired_b = density_to_bloch(partial_trace(two, dims, [2, 3]), validate=False)
    s13 = density_to_bloch(partial_trace(two, dims, [0, 2]), validate=False)
    s24 = density_to_bloch(partial_trace(two, dims, [1, 3]), validate=False)
    return CloneOutput(s, "nonlocal", n_copies, desired, desired_b, s13, s24)


@lru_cache(maxsize=None)
def pair_maps(cloner, n_copies, branches="multiset"):
    """Linear maps ``E_ik -> (desired, desired_b, side, side_b)`` as one array.

    Shape ``(4, 4, 4, 4, 4)``: pair index, input row, input column, then the
    4x4 output.  Used for batched evaluation over many inputs.
    """
    if cloner == "local":
        if n_copies != 2:
            raise UnsupportedCopiesError("local cloning is only defined for n_copies=2")
        return _local_transfer()
    if cloner != "nonlocal":
        raise ValueError(f"unknown cloner {cloner!r}")
    if n_copies not in SUPPORTED_COPIES:
        raise UnsupportedCopiesError(f"nonlocal cloning supports n_copies in {SUPPORTED_COPIES}")
    one, two = _nonlocal_transfer(n_copies, branches)
    dims = [2, 2, 2, 2]
    maps = np.zeros((4, 4, 4, 4, 4), dtype=complex)
    for i in range(4):
        for k in range(4):
            maps[0, i, k] = one[i, k]
            for p, keep in enumerate(([2, 3], [0, 2], [1, 3]), start=1):
                maps[p, i, k] = partial_trace(two[i, k], dims, keep)
    return maps


def clone_pairs_batch(rhos, cloner="nonlocal", n_copies=2):
    """Pair density matrices for a stack of inputs, shape ``(B, 4, 4, 4)``.

    No validation; the caller supplies valid 4x4 density matrices.
    """
    return np.einsum("bik,pikxy->bpxy", np.asarray(rhos), pair_maps(cloner, n_copies))


def clone(rho, cloner="nonlocal", n_copies=2):
    if cloner == "local":
        return local_clone(rho, n_copies)
    if cloner == "nonlocal":
        return nonlocal_clone(rho, n_copies)
    raise ValueError(f"unknown cloner {cloner!r}")


def copy_shrink(n_copies):
    """Closed-form single-copy shrink of the universal d=4 cloner, ``(n + 4) / (5 n)``."""
    return (n_copies + 4) / (5 * n_copies)


# ---------------------------------------------------------------------------
# reference implementation in the full tensor space


def _symmetrizer(n, d=4):
    dim = d**n
    proj = np.zeros((dim, dim))
    idx = np.arange(dim).reshape((d,) * n)
    for perm in permutations(range(n)):
        proj[idx.transpose(perm).ravel(), idx.ravel()] += 1.0
    return proj / factorial(n)


def brute_force_isometry(n_copies, d=4):
    """``V|psi> = sqrt(d / d[N]) sum_e (P_sym |psi> (x) |e>) (x) |e>`` as a dense matrix.

    Copies occupy ``d**n`` dimensions (qubit order 1, 2, 3, 4, ...) and the
    machine ``d**(n - 1)``.  Independent of the occupation-basis construction;
    only practical for ``n <= 3``.
    """
    n = n_copies
    sym = _symmetrizer(n, d)
    dn = comb(d + n - 1, n)
    m = d ** (n - 1)
    v = np.zeros((d**n * m, d), dtype=complex)
    for i in range(d):
        for e in range(m):
            ket = np.zeros(d**n)
            ket[i * m + e] = 1.0
            v[:, i] += np.kron(sym @ ket, np.eye(m)[e])
    return v * sqrt(d / dn)


def brute_force_pairs(rho, n_copies):
    """Reduced states of the full output ``V rho V^H`` for copies 1 and 2.

    Returns a dict keyed by qubit pair labels ``"12"``, ``"34"``, ``"13"``,
    ``"24"``, ``"14"``, ``"23"``.
    """
    v = brute_force_isometry(n_copies)
    out = v @ np.asarray(rho) @ v.conj().T
    dims = [2] * (2 * n_copies) + [4 ** (n_copies - 1)]
    labels = {"12": [0, 1], "34": [2, 3], "13": [0, 2], "24": [1, 3], "14": [0, 3], "23": [1, 2]}
    return {k: partial_trace(out, dims, keep) for k, keep in labels.items()}


# ---------------------------------------------------------------------------


def shrink_factors(out, input_state):
    """Least-squares ratios ``(eta_x, eta_T)`` of output to input Bloch data.

    ``eta_x`` pools both local Bloch vectors.  A component with zero input
    norm gives ``nan``; if both are zero ``ValueError`` is raised.
    """
    pair = out.desired_pair if isinstance(out, CloneOutput) else out
    vin = np.concatenate([input_state.x, input_state.y])
    vout = np.concatenate([pair.x, pair.y])
    nx = vin @ vin
    nt = np.sum(input_state.T**2)
    if nx == 0 and nt == 0:
        raise ValueError("shrink factor undefined for the maximally mixed input")
    eta_x = (vout @ vin) / nx if nx > 0 else float("nan")
    eta_t = np.sum(pair.T * input_state.T) / nt if nt > 0 else float("nan")
    return float(eta_x), float(eta_t)


def componentwise_ratios(out, input_state, floor=1e-6):
    """Ratios of every input Bloch entry with ``|value| > floor``; for covariance checks."""
    pair = out.desired_pair if isinstance(out, CloneOutput) else out
    a = np.concatenate([input_state.x, input_state.y, input_state.T.ravel()])
    b = np.concatenate([pair.x, pair.y, pair.T.ravel()])
    mask = np.abs(a) > floor
    return b[mask] / a[mask]
