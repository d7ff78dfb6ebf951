import numpy as np
import pytest
from hypothesis import given, strategies as st

from entbroadcast.qmat import (
    I2,
    SX,
    SZ,
    InvalidStateError,
    NotHermitianError,
    ShapeError,
    check_density,
    entropy_of_spectrum,
    herm_eig,
    kron,
    partial_trace,
    partial_transpose,
    psd_sqrt,
    von_neumann_entropy,
)

from conftest import seeds


def _random_density(seed, d):
    r = np.random.default_rng(seed)
    g = r.standard_normal((d, d)) + 1j * r.standard_normal((d, d))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def test_kron_order():
    assert np.allclose(kron(SZ, I2), np.diag([1, 1, -1, -1]))
    assert np.allclose(kron(I2, SZ), np.diag([1, -1, 1, -1]))


def test_partial_trace_of_product():
    a = _random_density(1, 2)
    b = _random_density(2, 3)
    c = _random_density(3, 2)
    m = kron(a, b, c)
    assert np.allclose(partial_trace(m, [2, 3, 2], [0]), a)
    assert np.allclose(partial_trace(m, [2, 3, 2], [1]), b)
    assert np.allclose(partial_trace(m, [2, 3, 2], [2, 0]), kron(a, c))


def test_partial_trace_bad_layout():
    with pytest.raises(ShapeError):
        partial_trace(np.eye(4), [2, 3], [0])
    with pytest.raises(ShapeError):
        partial_trace(np.eye(4), [2, 2], [2])


@given(seeds)
def test_partial_trace_preserves_trace(seed):
    m = _random_density(seed, 8)
    for keep in ([0], [1, 2], [0, 2]):
        assert abs(np.trace(partial_trace(m, [2, 2, 2], keep)) - 1) < 1e-12


@given(seeds)
def test_partial_transpose_involution(seed):
    m = _random_density(seed, 4)
    for sub in (0, 1):
        assert np.allclose(partial_transpose(partial_transpose(m, [2, 2], sub), [2, 2], sub), m)
    # transposing one side and then the other is the full transpose
    both = partial_transpose(partial_transpose(m, [2, 2], 0), [2, 2], 1)
    assert np.allclose(both, m.T)


def test_partial_transpose_product():
    a, b = _random_density(4, 2), _random_density(5, 2)
    assert np.allclose(partial_transpose(kron(a, b), [2, 2], 1), kron(a, b.T))


def test_herm_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        herm_eig(np.array([[0, 1], [0, 0]]))
    w, v = herm_eig(SX)
    assert np.allclose(w, [-1, 1])


@given(seeds)
def test_psd_sqrt_squares_back(seed):
    m = _random_density(seed, 4)
    r = psd_sqrt(m)
    assert np.allclose(r @ r, m, atol=1e-12)
    assert np.allclose(r, r.conj().T)


def test_psd_sqrt_rejects_negative():
    with pytest.raises(InvalidStateError):
        psd_sqrt(np.diag([1.0, -1e-3]))
    # tiny negative noise is clamped
    assert np.allclose(psd_sqrt(np.diag([1.0, -1e-12])), np.diag([1.0, 0.0]))


def test_check_density():
    check_density(np.eye(4) / 4)
    with pytest.raises(InvalidStateError):
        check_density(np.eye(4) / 3)
    with pytest.raises(InvalidStateError):
        check_density(np.diag([1.1, -0.1]))
    with pytest.raises(InvalidStateError):
        check_density(np.array([[0.5, 0.5], [0.0, 0.5]]))


def test_entropies():
    assert entropy_of_spectrum([1, 0, 0, 0]) == 0.0
    assert abs(von_neumann_entropy(np.eye(4) / 4) - 2.0) < 1e-12
    # frozen: -(0.7 log2 0.7 + 3 * 0.1 log2 0.1), evaluated at 30 digits
    assert abs(entropy_of_spectrum([0.7, 0.1, 0.1, 0.1]) - 1.3567796494470395) < 1e-12


@given(st.lists(st.floats(0, 1), min_size=2, max_size=8).filter(lambda w: sum(w) > 1e-3))
def test_entropy_bounds(w):
    w = np.array(w) / sum(w)
    h = entropy_of_spectrum(w)
    assert -1e-12 <= h <= np.log2(len(w)) + 1e-12


@given(seeds)
def test_partial_trace_composes(seed):
    m = _random_density(seed, 16)
    dims = [2, 2, 2, 2]
    two_step = partial_trace(partial_trace(m, dims, [0, 1]), [2, 2], [0])
    assert np.allclose(two_step, partial_trace(m, dims, [0]), atol=1e-12)


@given(seeds)
def test_partial_transpose_keeps_trace_and_hermiticity(seed):
    m = _random_density(seed, 4)
    for sub in (0, 1):
        pt = partial_transpose(m, [2, 2], sub)
        assert abs(np.trace(pt) - 1) < 1e-12
        assert np.allclose(pt, pt.conj().T, atol=1e-12)


@given(seeds)
def test_herm_eig_sorted_and_traced(seed):
    m = _random_density(seed, 6) * 3.0
    w, v = herm_eig(m)
    assert np.all(np.diff(w) >= 0)
    assert abs(w.sum() - np.trace(m).real) < 1e-10
    assert np.allclose((v * w) @ v.conj().T, m, atol=1e-12)


@given(seeds)
def test_psd_sqrt_commutes(seed):
    m = _random_density(seed, 4)
    r = psd_sqrt(m)
    assert np.linalg.norm(r @ m - m @ r) <= 1e-9
