"""Dense complex matrix kernel.

Matrices are plain ``numpy.ndarray`` objects of complex dtype.  Subsystem
layouts are given as a list of local dimensions, e.g. ``[2, 2]`` for a pair
of qubits; subsystem indices are 0-based throughout.

Tolerances used across the package:

==========================  ========
Hermiticity check           1e-12
eigenvalue clamp to zero    1e-10
invalid-state rejection     -1e-8
==========================  ========
"""

from functools import reduce

import numpy as np

HERMITIAN_TOL = 1e-12
CLAMP_TOL = 1e-10
NEGATIVE_TOL = 1e-8

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SX, SY, SZ)


class ShapeError(ValueError):
    """Matrix and subsystem layout do not agree."""


class InvalidStateError(ValueError):
    """Matrix is not a valid (Hermitian, PSD, trace-one) density matrix."""


class NotHermitianError(ValueError):
    pass


def kron(*mats):
    """Kronecker product of any number of matrices, left to right."""
    return reduce(np.kron, mats)


def _check_shape(m, dims):
    dims = [int(d) for d in dims]
    n = int(np.prod(dims))
    if m.ndim != 2 or m.shape != (n, n):
        raise ShapeError(f"matrix of shape {m.shape} does not match dims {dims}")
    return dims


def partial_trace(m, dims, keep):
    """Reduce ``m`` onto the subsystems listed in ``keep``.

    The kept subsystems appear in the result in ascending index order.
    """
    m = np.asarray(m)
    dims = _check_shape(m, dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep or keep[0] < 0 or keep[-1] >= len(dims):
        raise ShapeError(f"keep={keep} is not a nonempty subset of {len(dims)} subsystems")
    n = len(dims)
    t = m.reshape(dims + dims)
    # einsum labels: row index i_k, column index j_k; traced subsystems share a label
    row = list(range(n))
    col = [k if k not in keep else n + k for k in range(n)]
    out = [k for k in keep] + [n + k for k in keep]
    reduced = np.einsum(t, row + col, out)
    d = int(np.prod([dims[k] for k in keep]))
    return reduced.reshape(d, d)


def partial_transpose(m, dims, sub):
    """Transpose subsystem ``sub`` of a bipartite matrix."""
    m = np.asarray(m)
    dims = _check_shape(m, dims)
    if len(dims) != 2 or sub not in (0, 1):
        raise ShapeError("partial_transpose expects a bipartite layout and sub in {0, 1}")
    t = m.reshape(dims + dims)
    if sub == 0:
        t = t.transpose(2, 1, 0, 3)
    else:
        t = t.transpose(0, 3, 2, 1)
    return t.reshape(m.shape)


def is_hermitian(m, tol=HERMITIAN_TOL):
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and np.max(np.abs(m - m.conj().T), initial=0.0) <= tol


def herm_eig(m, tol=HERMITIAN_TOL):
    """Eigen-decomposition of a Hermitian matrix.

    Returns ``(w, v)`` with ``w`` ascending and ``m == v @ diag(w) @ v^H``.
    Raises ``NotHermitianError`` if ``m`` is not Hermitian within ``tol``.
    """
    m = np.asarray(m, dtype=complex)
    if not is_hermitian(m, tol):
        raise NotHermitianError("matrix is not Hermitian within tolerance")
    return np.linalg.eigh(0.5 * (m + m.conj().T))


def psd_sqrt(m):
    """Principal square root of a positive semidefinite Hermitian matrix.

    Eigenvalues in ``[-NEGATIVE_TOL, 0)`` are treated as numerical noise and
    clamped; anything more negative raises ``InvalidStateError``.
    """
    w, v = herm_eig(m, tol=max(HERMITIAN_TOL, 1e-12 * max(1.0, np.max(np.abs(m)))))
    if w[0] < -NEGATIVE_TOL:
        raise InvalidStateError(f"matrix has negative eigenvalue {w[0]:.3e}")
    w = np.sqrt(np.clip(w, 0.0, None))
    return (v * w) @ v.conj().T


def check_density(rho, tol=NEGATIVE_TOL):
    """Raise ``InvalidStateError`` unless ``rho`` is a density matrix."""
    rho = np.asarray(rho)
    if not is_hermitian(rho, 1e-10):
        raise InvalidStateError("density matrix is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > 1e-10:
        raise InvalidStateError(f"density matrix has trace {tr}")
    w = np.linalg.eigvalsh(rho)
    if w[0] < -tol:
        raise InvalidStateError(f"density matrix has negative eigenvalue {w[0]:.3e}")
    return rho


def entropy_of_spectrum(w):
    """Shannon entropy in bits of a probability vector (0 log 0 = 0)."""
    w = np.clip(np.asarray(w, dtype=float), 0.0, None)
    w = w[w > CLAMP_TOL]
    return float(-np.sum(w * np.log2(w))) + 0.0


def von_neumann_entropy(rho):
    """Von Neumann entropy of ``rho`` in bits."""
    check_density(rho)
    return entropy_of_spectrum(np.linalg.eigvalsh(rho))
