from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entbroadcast.cloners import (
    SUPPORTED_COPIES,
    UnsupportedCopiesError,
    brute_force_isometry,
    brute_force_pairs,
    build_nonlocal_isometry,
    clone,
    clone_pairs_batch,
    componentwise_ratios,
    copy_shrink,
    local_clone,
    local_isometry,
    nonlocal_clone,
    occupations,
    shrink_factors,
)
from entbroadcast.qmat import kron, partial_trace
from entbroadcast.states import (
    MAXIMALLY_MIXED,
    PHI_PLUS,
    bloch_to_density,
    density_to_bloch,
    sample_random_states,
    werner_like,
)

from conftest import random_states


def test_local_isometry():
    v = local_isometry()
    assert v.shape == (8, 2)
    assert np.allclose(v.conj().T @ v, np.eye(2), atol=1e-14)
    with pytest.raises(UnsupportedCopiesError):
        local_isometry(3)


@given(random_states())
def test_local_map_law(s):
    out = local_clone(s)
    want = s.scaled(2 / 3, 2 / 3, 4 / 9)
    assert out.desired_pair.max_abs_diff(want) < 1e-12
    assert out.desired_pair_b.max_abs_diff(want) < 1e-12
    # side pairs: both qubits of one party, correlations 1/3 identity
    assert np.allclose(out.side_pair.x, 2 / 3 * s.x, atol=1e-12)
    assert np.allclose(out.side_pair.y, 2 / 3 * s.x, atol=1e-12)
    assert np.allclose(out.side_pair.T, np.eye(3) / 3, atol=1e-12)
    assert np.allclose(out.side_pair_b.x, 2 / 3 * s.y, atol=1e-12)
    assert np.allclose(out.side_pair_b.T, np.eye(3) / 3, atol=1e-12)


def test_local_matches_symmetric_projector_construction():
    # the d=2 symmetric-projector machine is the same cloner up to a machine unitary
    va = brute_force_isometry(2, d=2)
    v = kron(va, va)
    dims = [2] * 6
    for s in sample_random_states(5, seed=3):
        rho = bloch_to_density(s)
        full = v @ rho @ v.conj().T
        out = local_clone(s)
        assert np.allclose(partial_trace(full, dims, [0, 4]), out.desired_pair.density(), atol=1e-12)
        assert np.allclose(partial_trace(full, dims, [1, 3]), out.desired_pair_b.density(), atol=1e-12)
        assert np.allclose(partial_trace(full, dims, [0, 1]), out.side_pair.density(), atol=1e-12)
        assert np.allclose(partial_trace(full, dims, [3, 4]), out.side_pair_b.density(), atol=1e-12)


def test_local_rejects_more_copies():
    with pytest.raises(UnsupportedCopiesError):
        local_clone(PHI_PLUS, 3)


@pytest.mark.parametrize("n", SUPPORTED_COPIES)
def test_occupation_basis_size(n):
    assert len(occupations(n)) == comb(n + 3, 3)
    iso = build_nonlocal_isometry(n)
    assert iso.columns.shape == (4, comb(n + 3, 3), comb(n + 2, 3))
    assert abs(sum(iso.branch_weights) - 1) < 1e-15


@pytest.mark.parametrize("n", SUPPORTED_COPIES)
def test_nonlocal_isometry(n):
    g = build_nonlocal_isometry(n).gram()
    assert np.max(np.abs(g - np.eye(4))) < 1e-10


@pytest.mark.parametrize("n", [2, 3])
def test_occupation_basis_equals_brute_force(n):
    v = brute_force_isometry(n)
    assert np.allclose(v.conj().T @ v, np.eye(4), atol=1e-12)
    for s in sample_random_states(4, seed=10 + n):
        rho = bloch_to_density(s)
        ref = brute_force_pairs(rho, n)
        out = nonlocal_clone(s, n)
        assert np.max(np.abs(ref["12"] - out.desired_pair.density())) < 1e-10
        assert np.max(np.abs(ref["34"] - out.desired_pair_b.density())) < 1e-10
        assert np.max(np.abs(ref["13"] - out.side_pair.density())) < 1e-10
        assert np.max(np.abs(ref["24"] - out.side_pair_b.density())) < 1e-10


@settings(max_examples=30)
@given(random_states())
def test_nonlocal_two_copy_map_law(s):
    out = nonlocal_clone(s, 2)
    want = s.scaled(0.6, 0.6, 0.6)
    assert out.desired_pair.max_abs_diff(want) < 1e-12
    assert out.desired_pair_b.max_abs_diff(want) < 1e-12


@pytest.mark.parametrize("p,a2", [(0.9, 0.5), (0.7, 0.2), (1.0, 0.35), (0.3, 0.9)])
def test_nonlocal_werner_side_pair(p, a2):
    s = werner_like(p=p, alpha2=a2)
    out = nonlocal_clone(s, 2)
    for side in (out.side_pair, out.side_pair_b):
        assert np.allclose(side.x, 0.6 * s.x, atol=1e-12)
        assert np.allclose(side.y, 0.6 * s.x, atol=1e-12)
        assert np.allclose(side.T, np.eye(3) / 5, atol=1e-12)


@pytest.mark.parametrize("n,eta", [(2, 3 / 5), (3, 7 / 15), (4, 2 / 5), (5, 9 / 25)])
def test_copy_shrink_values(n, eta):
    assert copy_shrink(n) == pytest.approx(eta, abs=1e-15)
    for s in sample_random_states(3, seed=n):
        r = componentwise_ratios(nonlocal_clone(s, n), s)
        assert np.allclose(r, eta, atol=1e-9)
        assert nonlocal_clone(s, n).shrink == pytest.approx((eta, eta), abs=1e-12)


def test_single_branch_reading():
    # same machine at N=2; an isometry but not covariant beyond that
    s = sample_random_states(1, seed=5)[0]
    a = nonlocal_clone(s, 2)
    one, _ = clone_pairs_batch([bloch_to_density(s)], "nonlocal", 2)[0][:2]
    assert np.allclose(one, a.desired_pair.density(), atol=1e-12)
    assert np.allclose(build_nonlocal_isometry(2, "single").columns, build_nonlocal_isometry(2).columns)
    for n in (3, 4):
        iso = build_nonlocal_isometry(n, "single")
        assert np.allclose(iso.gram(), np.eye(4), atol=1e-12)
    from entbroadcast.cloners import nonlocal_pair_states

    one, _ = nonlocal_pair_states(bloch_to_density(s), 3, "single")
    r = componentwise_ratios(density_to_bloch(one, validate=False), s)
    assert np.ptp(r) > 0.05


def test_nonlocal_copy_bounds():
    for n in (1, 6):
        with pytest.raises(UnsupportedCopiesError):
            nonlocal_clone(PHI_PLUS, n)


def test_maximally_mixed_fixed_point():
    for cl, n in [("local", 2), ("nonlocal", 2), ("nonlocal", 5)]:
        out = clone(MAXIMALLY_MIXED, cl, n)
        for pair in (out.desired_pair, out.desired_pair_b):
            assert pair.max_abs_diff(MAXIMALLY_MIXED) < 1e-12


def test_shrink_factors_edge_cases():
    with pytest.raises(ValueError):
        shrink_factors(MAXIMALLY_MIXED, MAXIMALLY_MIXED)
    ex, et = shrink_factors(local_clone(PHI_PLUS), PHI_PLUS)
    assert np.isnan(ex) and et == pytest.approx(4 / 9)


@pytest.mark.parametrize("cl,n", [("local", 2), ("nonlocal", 2), ("nonlocal", 3), ("nonlocal", 5)])
def test_batch_matches_single(cl, n):
    states = sample_random_states(6, seed=21)
    batch = clone_pairs_batch([bloch_to_density(s) for s in states], cl, n)
    for s, b in zip(states, batch):
        out = clone(s, cl, n)
        pairs = (out.desired_pair, out.desired_pair_b, out.side_pair, out.side_pair_b)
        for k, pair in enumerate(pairs):
            assert np.max(np.abs(pair.density() - b[k])) < 1e-12


@pytest.mark.parametrize("n", [2, 3])
def test_output_pairs_are_states(n):
    for s in sample_random_states(20, seed=n, sampler="bloch"):
        for pair in (nonlocal_clone(s, n).side_pair, nonlocal_clone(s, n).desired_pair):
            w = np.linalg.eigvalsh(pair.density())
            assert w[0] > -1e-12


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_copy_symmetry_and_trace(n):
    for s in sample_random_states(5, seed=40 + n):
        out = nonlocal_clone(s, n)
        assert out.desired_pair.max_abs_diff(out.desired_pair_b) < 1e-12
        for pair in (out.desired_pair, out.side_pair, out.side_pair_b):
            assert abs(np.trace(pair.density(validate=False)) - 1) < 1e-12


@settings(max_examples=25)
@given(random_states(), random_states(), st.floats(0, 1), st.sampled_from([("local", 2), ("nonlocal", 3)]))
def test_cloning_is_linear(a, b, w, cl):
    mix = density_to_bloch(w * bloch_to_density(a) + (1 - w) * bloch_to_density(b))
    oa, ob, om = (clone(x, *cl) for x in (a, b, mix))
    for attr in ("desired_pair", "side_pair", "side_pair_b"):
        pa, pb, pm = (getattr(o, attr) for o in (oa, ob, om))
        want = w * pa.density(validate=False) + (1 - w) * pb.density(validate=False)
        assert np.allclose(pm.density(validate=False), want, atol=1e-12)
