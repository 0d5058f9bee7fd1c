"""Floquet operator of the kicked Ising chain with open boundaries.

    U = exp(-i H_free / 2) exp(-i H_kick) exp(-i H_free / 2)
    H_free = J sum_n sz_n sz_{n+1}
    H_kick = M sum_n (cos(theta_n) sx_n + sin(theta_n) sz_n)

H_free is diagonal in the computational basis and H_kick is a sum of
commuting single-site terms, so U = D K D with a diagonal D and a tensor
product K of 2x2 kicks.  K is applied as L single-site sweeps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import pi

import numpy as np

from .errors import ContractViolation, ResourceLimitError

MAX_L = 14


@dataclass(frozen=True)
class ChainParams:
    L: int
    J: float
    M: float
    thetas: tuple[float, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "thetas", tuple(float(t) for t in self.thetas))
        if self.L < 2:
            raise ContractViolation(f"chain needs L >= 2, got {self.L}")
        if len(self.thetas) != self.L:
            raise ContractViolation(
                f"expected {self.L} tilt angles, got {len(self.thetas)}"
            )

    @property
    def N(self) -> int:
        return 1 << self.L

    def truncated(self, L: int) -> "ChainParams":
        """Same couplings on the first ``L`` sites (small-scale oracle checks)."""
        return ChainParams(L, self.J, self.M, self.thetas[:L])

    def as_dict(self) -> dict:
        return {"L": self.L, "J": self.J, "M": self.M, "thetas": list(self.thetas)}


PRESETS = {
    "A": ChainParams(12, 0.80, 1.35, tuple(t * pi / 32 for t in (7, 7, 7, 7, 8, 8, 8, 8, 8, 8, 7, 7))),
    "B": ChainParams(12, 1.0, 1.2, tuple(t * pi / 32 for t in (9, 9, 9, 9, 10, 10, 10, 10, 10, 10, 9, 9))),
}


def preset(name: str) -> ChainParams:
    try:
        return PRESETS[name.upper()]
    except KeyError:
        raise ContractViolation(f"unknown chain preset {name!r}; choose from {sorted(PRESETS)}") from None


def spin_signs(L: int) -> np.ndarray:
    """``z[n, m]`` = +1 if spin n+1 is up in basis state m, else -1."""
    m = np.arange(1 << L)
    bits = (m[None, :] >> (L - 1 - np.arange(L))[:, None]) & 1
    return 1 - 2 * bits


def h_free_diagonal(params: ChainParams) -> np.ndarray:
    z = spin_signs(params.L)
    return params.J * np.sum(z[:-1] * z[1:], axis=0).astype(float)


def kick_site_unitary(M: float, theta: float) -> np.ndarray:
    """exp(-i M (cos(theta) sx + sin(theta) sz)) in closed form."""
    c, s = np.cos(theta), np.sin(theta)
    gen = np.array([[s, c], [c, -s]], dtype=complex)
    return np.cos(M) * np.eye(2) - 1j * np.sin(M) * gen


def apply_kicks(params: ChainParams, psi: np.ndarray) -> np.ndarray:
    """Apply K = kick_1 (x) ... (x) kick_L to a vector or to each column."""
    L = params.L
    psi = np.asarray(psi, dtype=complex)
    rest = psi.shape[1:]
    out = psi.reshape((1 << L,) + rest)
    for n, theta in enumerate(params.thetas):
        u = kick_site_unitary(params.M, theta)
        out = out.reshape((1 << n, 2, -1))
        out = np.matmul(u, out)
    return out.reshape((1 << L,) + rest)


def floquet_operator(params: ChainParams) -> np.ndarray:
    """Dense complex-symmetric unitary U = D K D."""
    if params.L > MAX_L:
        raise ResourceLimitError(f"dense Floquet operator refused for L = {params.L} > {MAX_L}")
    d = np.exp(-0.5j * h_free_diagonal(params))
    U = apply_kicks(params, np.diag(d))
    U *= d[:, None]
    return U


def apply_floquet(params: ChainParams, psi: np.ndarray) -> np.ndarray:
    """Matrix-free U @ psi."""
    d = np.exp(-0.5j * h_free_diagonal(params))
    psi = np.asarray(psi, dtype=complex)
    dd = d if psi.ndim == 1 else d[:, None]
    return dd * apply_kicks(params, dd * psi)
