import numpy as np
import pytest

from kicked_chaos.chain import preset

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
ID = np.eye(2, dtype=complex)
LETTER_MATRIX = {"I": ID, "X": SX, "Y": SY, "Z": SZ}


def kron_oracle(letters):
    """Nested-loop Kronecker product, independent of np.kron."""
    mats = [LETTER_MATRIX[c] for c in letters]
    N = 2 ** len(mats)
    out = np.zeros((N, N), dtype=complex)
    for row in range(N):
        for col in range(N):
            val = 1.0 + 0j
            for n, m in enumerate(mats):
                shift = len(mats) - 1 - n
                val *= m[(row >> shift) & 1, (col >> shift) & 1]
            out[row, col] = val
    return out


def site_operator(op, site, L):
    """op on 0-based site (most significant first) via np.kron."""
    out = np.ones((1, 1), dtype=complex)
    for n in range(L):
        out = np.kron(out, op if n == site else ID)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def chain_a6():
    return preset("A").truncated(6)


@pytest.fixture(scope="session")
def coe4096():
    """One full-scale COE realization with its decomposition (about a minute)."""
    from kicked_chaos.ensembles import sample_coe
    from kicked_chaos.spectral import diagonalize_symmetric_unitary

    U = sample_coe(4096, np.random.default_rng(4096))
    return diagonalize_symmetric_unitary(U)


@pytest.fixture(scope="session")
def decomp_a():
    from kicked_chaos.chain import floquet_operator
    from kicked_chaos.spectral import diagonalize_symmetric_unitary

    return diagonalize_symmetric_unitary(floquet_operator(preset("A")))


@pytest.fixture(scope="session")
def decomp_b():
    from kicked_chaos.chain import floquet_operator
    from kicked_chaos.spectral import diagonalize_symmetric_unitary

    return diagonalize_symmetric_unitary(floquet_operator(preset("B")))


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
