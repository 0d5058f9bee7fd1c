import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kicked_chaos.chain import ChainParams, floquet_operator
from kicked_chaos.ensembles import sample_coe
from kicked_chaos.errors import ContractViolation, DiagonalizationError
from kicked_chaos.spectral import (
    EigenDecomposition,
    diagonalize_symmetric_unitary,
    eigenvector_eta,
    log_eta,
    ratio_statistics,
    reconstruction_residual,
    spacings,
)


def check_invariants(U, d):
    N = d.N
    C = d.vectors
    assert np.isrealobj(C)
    assert np.abs(C.T @ C - np.eye(N)).max() <= 1e-10
    assert reconstruction_residual(U, d) <= 1e-8
    assert np.all(np.diff(d.phases) >= 0)
    assert d.phases.min() >= -np.pi and d.phases.max() < np.pi


def test_identity_degenerate_cluster():
    U = np.eye(16, dtype=complex)
    d = diagonalize_symmetric_unitary(U)
    np.testing.assert_array_equal(d.phases, 0.0)
    check_invariants(U, d)
    assert reconstruction_residual(U, d) <= 1e-14


def test_diagonal_unitary():
    alpha = np.array([0.3, -2.0, 1.1, 2.9, -0.4])
    d = diagonalize_symmetric_unitary(np.diag(np.exp(1j * alpha)))
    np.testing.assert_allclose(d.phases, np.sort(alpha), atol=1e-14)
    np.testing.assert_allclose(np.abs(d.vectors), np.eye(5)[:, np.argsort(alpha)], atol=1e-14)


def test_phase_pi_maps_to_minus_pi():
    d = diagonalize_symmetric_unitary(np.diag(np.exp(1j * np.array([np.pi, 0.5]))))
    assert d.phases[0] == -np.pi


def test_chain_l6_against_general_eigensolver(chain_a6):
    U = floquet_operator(chain_a6)
    d = diagonalize_symmetric_unitary(U)
    check_invariants(U, d)
    oracle = np.sort(np.angle(np.linalg.eigvals(U)))
    np.testing.assert_allclose(d.phases, oracle, atol=1e-9)
    # each column is an eigenvector
    resid = U @ d.vectors - d.vectors * np.exp(1j * d.phases)
    assert np.abs(resid).max() < 1e-10


def pm_pairs_unitary(seed, N=8):
    r = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(r.normal(size=(N, N)))
    phi = np.repeat(r.uniform(0.2, 3.0, N // 2), 2) * np.tile([1, -1], N // 2)
    return Q, phi, (Q * np.exp(1j * phi)) @ Q.T


def test_exact_pm_pairs_need_clustering():
    _, phi, U = pm_pairs_unitary(0)
    d = diagonalize_symmetric_unitary(U)
    np.testing.assert_allclose(d.phases, np.sort(phi), atol=1e-12)
    check_invariants(U, d)
    with pytest.raises(DiagonalizationError) as info:
        diagonalize_symmetric_unitary(U, cluster_tol=0.0)
    assert info.value.residual > 1e-8


@given(st.integers(0, 10_000))
@settings(max_examples=20, deadline=None)
def test_coe_small_invariants(seed):
    U = sample_coe(32, np.random.default_rng(seed))
    check_invariants(U, diagonalize_symmetric_unitary(U))


def test_global_phase_covariance(chain_a6):
    U = floquet_operator(chain_a6)
    s0 = spacings(diagonalize_symmetric_unitary(U)).spacings
    s1 = spacings(diagonalize_symmetric_unitary(np.exp(0.37j) * U)).spacings
    np.testing.assert_allclose(np.sort(s0), np.sort(s1), atol=1e-9)


def test_spacing_examples():
    N = 10
    equal = -np.pi + 2 * np.pi * np.arange(N) / N
    np.testing.assert_allclose(spacings(equal).spacings, 1.0, atol=1e-14)
    np.testing.assert_allclose(spacings(np.array([-np.pi, 0.0])).spacings, [1.0, 1.0])
    with pytest.raises(ContractViolation):
        spacings(np.array([1.0, 0.0]))


def test_zero_spacing_flag():
    with pytest.warns(RuntimeWarning):
        s = spacings(np.array([0.0, 0.0, 1.0]))
    assert s.has_zero
    with pytest.raises(ContractViolation):
        ratio_statistics(s)


def test_ratio_examples():
    rs = ratio_statistics(np.ones(7))
    np.testing.assert_array_equal(rs.r_tilde, 1.0)
    assert rs.mean_r == 1.0
    rs = ratio_statistics(np.array([1.0, 2.0]))
    np.testing.assert_allclose(rs.r, [0.5, 2.0])
    np.testing.assert_allclose(rs.r_tilde, [0.5, 0.5])
    assert rs.mean_r_tilde == 0.5


def test_ratio_stderr():
    s = np.random.default_rng(1).exponential(size=1000) + 0.01
    rs = ratio_statistics(s)
    assert rs.stderr_r_tilde == pytest.approx(rs.r_tilde.std(ddof=1) / np.sqrt(1000))


def test_eta_examples():
    d = EigenDecomposition(np.array([-1.0, 0.0, 1.0]), np.eye(3)[:, [2, 0, 1]])
    eta = eigenvector_eta(d).reshape(3, 3)
    assert np.all(np.sort(eta, axis=1) == [0, 0, 3])
    U = sample_coe(64, np.random.default_rng(3))
    eta = eigenvector_eta(diagonalize_symmetric_unitary(U)).reshape(64, 64)
    np.testing.assert_allclose(eta.sum(axis=1), 64, atol=1e-10)
    assert len(log_eta(np.array([0.0, 1.0]))) == 1


@pytest.mark.slow
def test_preset_a_spacings_sum(decomp_a):
    s = spacings(decomp_a).spacings
    assert abs(s.sum() - 4096) <= 1e-9
    assert np.all(s > 0)


@pytest.mark.slow
def test_coe_full_size_porter_thomas(coe4096):
    from kicked_chaos.reference import ReferenceCurve, ks_distance

    assert ks_distance(eigenvector_eta(coe4096), ReferenceCurve.porter_thomas()) < 0.01
