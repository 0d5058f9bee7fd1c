"""Bipartite von Neumann entropy of eigenstates and the Page curve."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation
from .spectral import EigenDecomposition

SCHMIDT_FLOOR = 1e-14
NORM_TOL = 1e-8


@dataclass(frozen=True)
class EntropyPoint:
    L1: int
    mean_entropy: float
    std_error: float


@dataclass(frozen=True)
class EntropyCurve:
    L: int
    points: tuple[EntropyPoint, ...]

    @property
    def means(self) -> np.ndarray:
        return np.array([p.mean_entropy for p in self.points])

    def at(self, L1: int) -> EntropyPoint:
        for p in self.points:
            if p.L1 == L1:
                return p
        raise KeyError(L1)


def _check_cut(L: int, L1: int):
    if not 1 <= L1 <= L - 1:
        raise ContractViolation(f"subchain size L1 = {L1} outside 1..{L - 1}")


def _entropy_from_schmidt(lam: np.ndarray) -> np.ndarray:
    lam = np.where(lam > SCHMIDT_FLOOR, lam, 1.0)  # 1 * ln 1 = 0 drops the term
    return -np.sum(lam * np.log(lam), axis=-1)


def von_neumann_entropy(state: np.ndarray, L1: int) -> float:
    """Entanglement entropy (nats) between the first L1 spins and the rest."""
    state = np.asarray(state)
    N = state.shape[0]
    L = N.bit_length() - 1
    if state.ndim != 1 or 1 << L != N:
        raise ContractViolation("state must be a vector of length 2**L")
    _check_cut(L, L1)
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > NORM_TOL:
        raise ContractViolation(f"state not normalized (norm = {norm!r})")
    sv = np.linalg.svd(state.reshape(1 << L1, -1), compute_uv=False)
    return float(_entropy_from_schmidt(sv**2))


def state_entropies(states: np.ndarray, L1: int) -> np.ndarray:
    """Entropy of every column of ``states`` (batched SVD)."""
    N, count = states.shape
    L = N.bit_length() - 1
    _check_cut(L, L1)
    blocks = np.ascontiguousarray(states.T).reshape(count, 1 << L1, N >> L1)
    sv = np.linalg.svd(blocks, compute_uv=False)
    return _entropy_from_schmidt(sv**2)


def page_value(N1: int, N2: int) -> float:
    """Page's mean entropy ln(N1) - N1 / (2 N2) with N1 <= N2 after swapping.

    Only meaningful for 1 << N1; for N1 = 1 the value is slightly negative
    and returned as is.
    """
    if N1 < 1 or N2 < 1:
        raise ContractViolation("subsystem dimensions must be positive")
    a, b = sorted((N1, N2))
    return float(np.log(a) - a / (2 * b))


def page_curve(L: int) -> np.ndarray:
    return np.array([page_value(2**L1, 2 ** (L - L1)) for L1 in range(1, L)])


def mean_entropy_curve(decomp: EigenDecomposition, L: int) -> EntropyCurve:
    C = decomp.vectors
    if C.shape[0] != 1 << L:
        raise ContractViolation(f"decomposition dimension {C.shape[0]} != 2**{L}")
    n = C.shape[1]
    points = []
    for L1 in range(1, L):
        S = state_entropies(C, L1)
        err = S.std(ddof=1) / np.sqrt(n) if n > 1 else 0.0
        points.append(EntropyPoint(L1, float(S.mean()), float(err)))
    return EntropyCurve(L=L, points=tuple(points))
