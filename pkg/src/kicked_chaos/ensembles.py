"""Circular random-matrix ensembles (CUE and COE)."""

from __future__ import annotations

from enum import Enum

import numpy as np

from .errors import ContractViolation


class EnsembleKind(str, Enum):
    COE = "coe"
    CUE = "cue"

    @classmethod
    def parse(cls, value) -> "EnsembleKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ContractViolation(f"unknown ensemble {value!r}; use coe or cue") from None


def sample_cue(N: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a Ginibre matrix.

    Column j of Q is multiplied by R_jj / |R_jj|, which makes the factorization
    the unique one with positive diag(R); plain QR would not give the Haar
    measure.
    """
    if N < 2:
        raise ContractViolation(f"ensemble dimension must be >= 2, got {N}")
    Z = (rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))) / np.sqrt(2.0)
    Q, R = np.linalg.qr(Z)
    del Z
    d = np.diagonal(R)
    Q *= (d / np.abs(d))[None, :]
    return Q


def sample_coe(N: int, rng: np.random.Generator) -> np.ndarray:
    """COE matrix W^T W with W drawn from the CUE."""
    W = sample_cue(N, rng)
    return W.T @ W


def sample(kind: EnsembleKind | str, N: int, rng: np.random.Generator) -> np.ndarray:
    kind = EnsembleKind.parse(kind)
    return sample_coe(N, rng) if kind is EnsembleKind.COE else sample_cue(N, rng)
