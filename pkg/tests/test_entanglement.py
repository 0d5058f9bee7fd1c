import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kicked_chaos.entanglement import (
    mean_entropy_curve,
    page_curve,
    page_value,
    state_entropies,
    von_neumann_entropy,
)
from kicked_chaos.errors import ContractViolation
from kicked_chaos.spectral import EigenDecomposition


def partial_trace_entropy(psi, L1, L):
    """Oracle: rho_1 by explicit index summation, then -sum lam ln lam."""
    N1, N2 = 2**L1, 2 ** (L - L1)
    rho1 = np.zeros((N1, N1), dtype=complex)
    for a in range(N1):
        for b in range(N1):
            acc = 0j
            for c in range(N2):
                acc += psi[a * N2 + c] * np.conj(psi[b * N2 + c])
            rho1[a, b] = acc
    lam = np.linalg.eigvalsh(rho1)
    lam = lam[lam > 1e-14]
    return float(-np.sum(lam * np.log(lam)))


def random_state(L, seed, complex_=False):
    r = np.random.default_rng(seed)
    psi = r.normal(size=2**L) + (1j * r.normal(size=2**L) if complex_ else 0)
    return psi / np.linalg.norm(psi)


def test_product_state_zero():
    psi = np.zeros(16)
    psi[0] = 1
    for L1 in range(1, 4):
        assert von_neumann_entropy(psi, L1) == 0.0


def test_bell_state():
    psi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    assert von_neumann_entropy(psi, 1) == pytest.approx(np.log(2), abs=1e-15)


def test_random_l8_against_partial_trace():
    psi = random_state(8, 0)
    assert von_neumann_entropy(psi, 3) == pytest.approx(partial_trace_entropy(psi, 3, 8), abs=1e-10)


@pytest.mark.parametrize("L", [2, 4, 6, 8])
def test_oracle_sweep(L):
    # 100 states per cut at small L, a handful at L = 8 (the oracle loop is slow)
    count = 100 if L <= 6 else 5
    for L1 in range(1, L):
        states = np.stack([random_state(L, 1000 * L1 + j, complex_=j % 2 == 1) for j in range(count)], axis=1)
        batch = state_entropies(states, L1)
        for j in range(count):
            assert batch[j] == pytest.approx(partial_trace_entropy(states[:, j], L1, L), abs=1e-10)


@given(st.integers(2, 9).flatmap(lambda L: st.tuples(st.just(L), st.integers(1, L - 1), st.integers(0, 2**31))))
@settings(max_examples=40, deadline=None)
def test_swap_symmetry_and_bounds(args):
    L, L1, seed = args
    psi = random_state(L, seed, complex_=seed % 2 == 0)
    S = von_neumann_entropy(psi, L1)
    swapped = psi.reshape(2**L1, 2 ** (L - L1)).T.ravel()
    assert von_neumann_entropy(swapped, L - L1) == pytest.approx(S, abs=1e-12)
    assert -1e-12 <= S <= min(L1, L - L1) * np.log(2) + 1e-12


def test_errors():
    with pytest.raises(ContractViolation):
        von_neumann_entropy(np.ones(4), 1)
    with pytest.raises(ContractViolation):
        von_neumann_entropy(random_state(3, 0), 3)


def test_page_values():
    assert page_value(64, 64) == pytest.approx(np.log(64) - 0.5, abs=1e-15)
    assert page_value(64, 64) == pytest.approx(3.65888, abs=1e-5)
    assert page_value(2, 2048) == pytest.approx(0.69266, abs=1e-5)
    assert page_value(2048, 2) == page_value(2, 2048)
    assert page_value(1, 8) == pytest.approx(-1 / 16) and page_value(1, 8) <= 0
    curve = page_curve(12)
    np.testing.assert_allclose(curve, curve[::-1])


def test_identity_curve_zero():
    L = 5
    d = EigenDecomposition(np.zeros(2**L), np.eye(2**L))
    curve = mean_entropy_curve(d, L)
    assert [p.L1 for p in curve.points] == [1, 2, 3, 4]
    assert np.all(curve.means == 0)


@pytest.mark.slow
def test_coe_full_size_near_page(coe4096):
    curve = mean_entropy_curve(coe4096, 12)
    assert abs(curve.at(6).mean_entropy - page_value(64, 64)) < 0.02
    for p in curve.points:
        assert 0 <= p.mean_entropy <= min(p.L1, 12 - p.L1) * np.log(2)


@pytest.mark.slow
def test_chain_b_less_entangled(decomp_a, decomp_b):
    a = mean_entropy_curve(decomp_a, 12).at(6).mean_entropy
    b = mean_entropy_curve(decomp_b, 12).at(6).mean_entropy
    assert b < a
