"""Entanglement test and figures of merit for two-qubit resources."""

from dataclasses import dataclass

import numpy as np

from .qmat import (
    check_density,
    entropy_of_spectrum,
    partial_trace,
    partial_transpose,
    psd_sqrt,
    von_neumann_entropy,
)
from .states import BlochState, bloch_to_density, density_to_bloch

PPT_TOL = 1e-10
CLASSICAL_TF = 2.0 / 3.0
DC_FORMULAS = ("unclamped", "clamped")
FB_CONVENTIONS = ("root", "squared")


def _as_density(s):
    if isinstance(s, BlochState):
        return bloch_to_density(s)
    return check_density(np.asarray(s))


@dataclass(frozen=True)
class SeparabilityVerdict:
    min_pt_eigenvalue: float
    inseparable: bool

    @property
    def separable(self):
        return not self.inseparable


def ppt_verdict(rho, tol=PPT_TOL):
    """Peres-Horodecki test on a two-qubit state (exact for 2 x 2).

    The second qubit is transposed.  The state is reported inseparable when
    the smallest eigenvalue of the partial transpose is below ``-tol``.
    """
    rho = _as_density(rho)
    w = np.linalg.eigvalsh(partial_transpose(rho, [2, 2], 1))
    lam = float(w[0])
    return SeparabilityVerdict(lam, lam < -tol)


def min_pt_eigenvalue(rho):
    return ppt_verdict(rho).min_pt_eigenvalue


def teleportation_fidelity(s):
    """Maximal teleportation fidelity ``(1 + (sum_i sqrt(u_i)) / 3) / 2``.

    ``u_i`` are the eigenvalues of ``T^T T``, i.e. ``sqrt(u_i)`` are the
    singular values of the correlation matrix.
    """
    if not isinstance(s, BlochState):
        s = density_to_bloch(s)
    sv = np.linalg.svd(s.T, compute_uv=False)
    return 0.5 * (1.0 + sv.sum() / 3.0)


def useful_for_teleportation(s):
    return teleportation_fidelity(s) > CLASSICAL_TF


def dense_coding_capacity(rho, formula="unclamped"):
    """Dense-coding capacity in bits, ``1 + S(rho_B) - S(rho_AB)``.

    ``rho_B`` is the receiver's qubit (the second one).  With
    ``formula="clamped"`` the result is floored at the classical 1 bit.
    """
    if formula not in DC_FORMULAS:
        raise ValueError(f"unknown dense-coding formula {formula!r}")
    rho = _as_density(rho)
    rho_b = partial_trace(rho, [2, 2], [1])
    dc = 1.0 + entropy_of_spectrum(np.linalg.eigvalsh(rho_b)) - von_neumann_entropy(rho)
    if formula == "clamped":
        dc = max(1.0, dc)
    return dc


def uhlmann_fidelity(rho, sigma, convention="root"):
    """``Tr sqrt(sqrt(rho) sigma sqrt(rho))``; squared if ``convention="squared"``.

    Evaluated as the trace norm of ``sqrt(rho) sqrt(sigma)``, which is the
    same number and exactly symmetric in the two arguments.
    """
    if convention not in FB_CONVENTIONS:
        raise ValueError(f"unknown fidelity convention {convention!r}")
    rho, sigma = _as_density(rho), _as_density(sigma)
    if rho.shape != sigma.shape:
        raise ValueError("states must have equal dimension")
    sv = np.linalg.svd(psd_sqrt(rho) @ psd_sqrt(sigma), compute_uv=False)
    f = float(np.sum(sv))
    f = min(f, 1.0)
    return f * f if convention == "squared" else f


def delta_tf(input_state, output_state):
    return teleportation_fidelity(input_state) - teleportation_fidelity(output_state)


def delta_dc(input_state, output_state, formula="unclamped"):
    return dense_coding_capacity(input_state, formula) - dense_coding_capacity(output_state, formula)
