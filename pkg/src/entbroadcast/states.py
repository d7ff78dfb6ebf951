"""Two-qubit states in canonical Bloch form.

A two-qubit density matrix is written as

    rho = 1/4 [I + sum_i x_i s_i (x) I + sum_i y_i I (x) s_i + sum_ij T_ij s_i (x) s_j]

with ``s_i`` the Pauli matrices.  :class:`BlochState` stores ``(x, y, T)``;
:func:`bloch_to_density` and :func:`density_to_bloch` convert between the two
forms.
"""

from dataclasses import dataclass, field

import numpy as np

from .qmat import I2, PAULIS, InvalidStateError, check_density, kron

# sigma_i (x) I, I (x) sigma_i and sigma_i (x) sigma_j, built once
_XOPS = [kron(s, I2) for s in PAULIS]
_YOPS = [kron(I2, s) for s in PAULIS]
_TOPS = [[kron(a, b) for b in PAULIS] for a in PAULIS]
# rows: I, x-ops, y-ops, T-ops (row-major), each flattened
_BASIS = np.array([np.eye(4)] + _XOPS + _YOPS + [op for row in _TOPS for op in row]).reshape(16, 16)

SAMPLERS = ("hs", "bloch")


@dataclass(frozen=True, eq=False)
class BlochState:
    """Canonical parameters ``(x, y, T)`` of a two-qubit state."""

    x: np.ndarray
    y: np.ndarray
    T: np.ndarray = field(repr=True)

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float).reshape(3))
        object.__setattr__(self, "y", np.asarray(self.y, dtype=float).reshape(3))
        object.__setattr__(self, "T", np.asarray(self.T, dtype=float).reshape(3, 3))

    def density(self, validate=True):
        return bloch_to_density(self, validate=validate)

    @property
    def purity(self):
        return purity(self)

    def scaled(self, eta_x, eta_y, eta_t):
        return BlochState(eta_x * self.x, eta_y * self.y, eta_t * self.T)

    def allclose(self, other, atol=1e-12):
        return (
            np.allclose(self.x, other.x, rtol=0, atol=atol)
            and np.allclose(self.y, other.y, rtol=0, atol=atol)
            and np.allclose(self.T, other.T, rtol=0, atol=atol)
        )

    def max_abs_diff(self, other):
        return max(
            np.max(np.abs(self.x - other.x)),
            np.max(np.abs(self.y - other.y)),
            np.max(np.abs(self.T - other.T)),
        )


@dataclass(frozen=True)
class WernerLikeParams:
    p: float
    alpha2: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"parameter out of range: p={self.p} not in [0, 1]")
        if not 0.0 <= self.alpha2 <= 1.0:
            raise ValueError(f"parameter out of range: alpha2={self.alpha2} not in [0, 1]")


@dataclass(frozen=True)
class BellDiagonalParams:
    c1: float
    c2: float
    c3: float

    def __post_init__(self):
        for c in (self.c1, self.c2, self.c3):
            if not -1.0 <= c <= 1.0:
                raise ValueError(f"parameter out of range: c={c} not in [-1, 1]")

    def eigenvalues(self):
        """Weights ``lambda_mn`` on the four Bell states, ordered (00, 01, 10, 11)."""
        return bell_weights(self.c1, self.c2, self.c3)


def bell_weights(c1, c2, c3):
    lam = [
        0.25 * (1 + (-1) ** m * c1 - (-1) ** (m + n) * c2 + (-1) ** n * c3)
        for m in (0, 1)
        for n in (0, 1)
    ]
    return np.array(lam)


def _coefficients(s):
    return np.concatenate([[1.0], s.x, s.y, s.T.ravel()])


def bloch_to_density(s, validate=True):
    """4x4 density matrix of a :class:`BlochState`."""
    rho = (_coefficients(s) @ _BASIS).reshape(4, 4) / 4
    if validate:
        check_density(rho)
    return rho


def density_to_bloch(rho, validate=True):
    """Pauli expectation values ``Tr(rho P)`` of a 4x4 density matrix."""
    rho = np.asarray(rho)
    if validate:
        check_density(rho)
    # Tr(rho P) = sum_ab rho_ab P_ba and every P here is Hermitian
    c = (_BASIS.conj() @ rho.ravel()).real
    return BlochState(c[1:4], c[4:7], c[7:16])


def werner_like(params=None, *, p=None, alpha2=None):
    """Mixture ``p |psi><psi| + (1-p) I/4`` with ``psi = a|00> + b|11>``.

    ``a`` and ``b`` are taken real and non-negative, ``a^2 = alpha2``.
    """
    if params is None:
        params = WernerLikeParams(p, alpha2)
    p, a2 = params.p, params.alpha2
    ab = np.sqrt(a2 * (1.0 - a2))
    z = p * (2.0 * a2 - 1.0)
    x = np.array([0.0, 0.0, z])
    T = np.diag([2 * p * ab, -2 * p * ab, p])
    return BlochState(x, x.copy(), T)


def bell_diagonal(params=None, *, c=None, tol=1e-12):
    """Bell-diagonal state with correlation matrix ``diag(c1, c2, c3)``."""
    if params is None:
        params = BellDiagonalParams(*c)
    lam = params.eigenvalues()
    if lam.min() < -tol:
        raise InvalidStateError(
            f"Bell-diagonal parameters {params} give negative weight {lam.min():.3g}"
        )
    return BlochState(np.zeros(3), np.zeros(3), np.diag([params.c1, params.c2, params.c3]))


def purity(s):
    """``Tr[rho^2] = (1 + |x|^2 + |y|^2 + |T|_F^2) / 4``."""
    return 0.25 * (1.0 + s.x @ s.x + s.y @ s.y + np.sum(s.T**2))


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_density_hs(rng, rank=None):
    """Random 4x4 density matrix ``G G^H / Tr`` from a 4 x k Ginibre matrix.

    With ``rank=4`` this is the Hilbert-Schmidt measure.  With ``rank=None``
    the ancilla dimension ``k`` is drawn uniformly from 1..4 so that the
    sample covers purities all the way up to pure states.
    """
    k = int(rng.integers(1, 5)) if rank is None else int(rank)
    g = rng.standard_normal((4, k)) + 1j * rng.standard_normal((4, k))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def _uniform_ball(rng, n):
    v = rng.standard_normal((n, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v * rng.random((n, 1)) ** (1.0 / 3.0)


def _haar_rotations(rng, n):
    q, r = np.linalg.qr(rng.standard_normal((n, 3, 3)))
    q = q * np.sign(np.diagonal(r, axis1=1, axis2=2))[:, None, :]
    det = np.linalg.det(q)
    q[:, :, 0] *= det[:, None]
    return q


def _densities(x, y, T):
    """Batched ``bloch_to_density`` without validation."""
    coeffs = np.concatenate([np.ones((len(x), 1)), x, y, T.reshape(-1, 9)], axis=1)
    return (coeffs @ _BASIS).reshape(-1, 4, 4) / 4


def random_bloch_rejection(rng, n=1, batch=None):
    """Rejection sampler over Bloch parameters.

    ``x`` and ``y`` are uniform in the unit ball; ``T = R1 diag(t) R2`` with
    Haar-random rotations and ``t`` uniform in the tetrahedron of valid
    Bell-diagonal correlations (a necessary condition for positivity).
    Candidates whose density matrix is not PSD are discarded.
    """
    if batch is None:
        # roughly one candidate in a few hundred survives
        batch = min(1 << 15, max(2048, 400 * n))
    out = []
    while len(out) < n:
        t = rng.uniform(-1.0, 1.0, (batch, 3))
        t = t[np.min(bell_weights(t[:, 0], t[:, 1], t[:, 2]), axis=0) >= 0.0]
        m = len(t)
        x = _uniform_ball(rng, m)
        y = _uniform_ball(rng, m)
        T = _haar_rotations(rng, m) @ (t[:, :, None] * _haar_rotations(rng, m))
        ok = np.linalg.eigvalsh(_densities(x, y, T))[:, 0] >= 0.0
        out.extend(BlochState(a, b, c) for a, b, c in zip(x[ok], y[ok], T[ok]))
    return out[:n]


def sample_random_states(n, seed=None, sampler="hs", rank=None):
    """Draw ``n`` random two-qubit states as :class:`BlochState` objects.

    ``seed`` may be an int (fresh generator) or a ``numpy.random.Generator``
    owned by the caller.  ``sampler="hs"`` uses :func:`random_density_hs`,
    ``sampler="bloch"`` uses :func:`random_bloch_rejection`.
    """
    rng = _rng(seed)
    if sampler == "hs":
        return [density_to_bloch(random_density_hs(rng, rank), validate=False) for _ in range(n)]
    if sampler == "bloch":
        return random_bloch_rejection(rng, n)
    raise ValueError(f"unknown sampler {sampler!r}; expected one of {SAMPLERS}")


def sample_random_state(seed=None, sampler="hs", rank=None):
    """Draw one random two-qubit state; deterministic for a given integer seed."""
    return sample_random_states(1, seed, sampler, rank)[0]


MAXIMALLY_MIXED = BlochState(np.zeros(3), np.zeros(3), np.zeros((3, 3)))
PHI_PLUS = BlochState(np.zeros(3), np.zeros(3), np.diag([1.0, -1.0, 1.0]))
