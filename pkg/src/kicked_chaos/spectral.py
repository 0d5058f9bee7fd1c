"""Eigendecomposition of complex-symmetric unitaries and spectral statistics.

For U = X + iY unitary with U = U^T, the real symmetric matrices X and Y
commute, so they share a real orthonormal eigenbasis.  We diagonalize X,
resolve its near-degenerate clusters (cos(phi) = cos(-phi) collisions)
with the projected Y block, and read off phi = atan2(<Y>, <X>).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ContractViolation, DiagonalizationError

DEFAULT_CLUSTER_TOL = 1e-7
RECONSTRUCTION_TOL = 1e-8


@dataclass(frozen=True)
class EigenDecomposition:
    """Sorted eigenphases in [-pi, pi) and real eigenvectors (column n)."""

    phases: np.ndarray
    vectors: np.ndarray

    @property
    def N(self) -> int:
        return len(self.phases)

    def reconstruct(self) -> np.ndarray:
        C = self.vectors
        return (C * np.exp(1j * self.phases)[None, :]) @ C.T


@dataclass(frozen=True)
class SpacingSet:
    spacings: np.ndarray
    has_zero: bool = False

    @property
    def N(self) -> int:
        return len(self.spacings)


@dataclass(frozen=True)
class RatioStats:
    r: np.ndarray
    r_tilde: np.ndarray
    mean_r: float
    mean_r_tilde: float
    stderr_r: float
    stderr_r_tilde: float

    def as_dict(self) -> dict:
        return {
            "n_ratios": int(len(self.r)),
            "mean_r": self.mean_r,
            "stderr_r": self.stderr_r,
            "mean_r_tilde": self.mean_r_tilde,
            "stderr_r_tilde": self.stderr_r_tilde,
        }


def _clusters(values: np.ndarray, tol: float) -> list[np.ndarray]:
    """Index runs of ascending ``values`` with consecutive gaps below tol (size > 1 only)."""
    breaks = np.flatnonzero(np.diff(values) >= tol) + 1
    return [g for g in np.split(np.arange(len(values)), breaks) if len(g) > 1]


def _wrap_phases(phi: np.ndarray) -> np.ndarray:
    # atan2 returns (-pi, pi]; the convention here is [-pi, pi)
    return np.where(phi >= np.pi, phi - 2 * np.pi, phi)


def diagonalize_symmetric_unitary(
    U: np.ndarray,
    cluster_tol: float = DEFAULT_CLUSTER_TOL,
    check: bool = True,
) -> EigenDecomposition:
    """Real eigenvectors and eigenphases of a complex-symmetric unitary.

    Raises :class:`DiagonalizationError` if ``check`` is set and the
    reconstruction residual ``max|U - C diag(e^{i phi}) C^T|`` exceeds
    ``RECONSTRUCTION_TOL``.
    """
    U = np.asarray(U)
    N = U.shape[0]
    if U.shape != (N, N):
        raise ContractViolation(f"expected a square matrix, got shape {U.shape}")
    X = np.ascontiguousarray(U.real)
    xvals, V = scipy.linalg.eigh(X, overwrite_a=False, check_finite=False)
    Y = np.ascontiguousarray(U.imag)

    clusters = _clusters(xvals, cluster_tol)
    for idx in clusters:
        Vc = V[:, idx]
        block = Vc.T @ (Y @ Vc)
        _, R = np.linalg.eigh(0.5 * (block + block.T))
        V[:, idx] = Vc @ R

    x = np.einsum("ij,ij->j", V, X @ V)
    del X
    y = np.einsum("ij,ij->j", V, Y @ V)
    del Y
    norm_err = np.max(np.abs(x * x + y * y - 1.0))
    phi = _wrap_phases(np.arctan2(y, x))
    order = np.argsort(phi, kind="stable")
    decomp = EigenDecomposition(phases=phi[order], vectors=np.ascontiguousarray(V[:, order]))

    if check:
        residual_matrix = np.abs(U - decomp.reconstruct())
        residual = float(residual_matrix.max())
        if residual > RECONSTRUCTION_TOL or norm_err > 1e-10:
            # the worst column points at the offending cluster
            col = int(np.argmax(residual_matrix.max(axis=0)))
            worst = next((c for c in clusters if col in c), None)
            raise DiagonalizationError(
                f"reconstruction residual {residual:.3e} (|x^2+y^2-1| = {norm_err:.1e}); "
                f"cluster_tol = {cluster_tol:g} is likely too small",
                residual=residual,
                worst_cluster=None if worst is None else worst.tolist(),
            )
    return decomp


def reconstruction_residual(U: np.ndarray, decomp: EigenDecomposition) -> float:
    return float(np.max(np.abs(U - decomp.reconstruct())))


def spacings(decomp: EigenDecomposition | np.ndarray) -> SpacingSet:
    """Unfolded nearest-neighbour spacings with circular closure.

    s_n = N / (2 pi) * (phi_{n+1} - phi_n), phi_{N+1} = phi_1 + 2 pi, so the
    mean spacing is exactly one.
    """
    phi = decomp.phases if isinstance(decomp, EigenDecomposition) else np.asarray(decomp, float)
    N = len(phi)
    if np.any(np.diff(phi) < 0):
        raise ContractViolation("eigenphases must be sorted ascending")
    s = np.diff(np.append(phi, phi[0] + 2 * np.pi)) * (N / (2 * np.pi))
    has_zero = bool(np.any(s <= 0))
    if has_zero:
        warnings.warn("degenerate eigenphases produced zero spacings", RuntimeWarning, stacklevel=2)
    return SpacingSet(spacings=s, has_zero=has_zero)


def ratio_statistics(s: SpacingSet | np.ndarray) -> RatioStats:
    """Consecutive-spacing ratios r_n = s_n / s_{n-1} (circular, s_0 = s_N)."""
    s = s.spacings if isinstance(s, SpacingSet) else np.asarray(s, float)
    if np.any(s <= 0):
        raise ContractViolation("ratio statistics undefined for zero spacings")
    prev = np.roll(s, 1)
    r = s / prev
    r_tilde = np.minimum(s, prev) / np.maximum(s, prev)
    n = len(r)
    ddof = 1 if n > 1 else 0
    return RatioStats(
        r=r,
        r_tilde=r_tilde,
        mean_r=float(r.mean()),
        mean_r_tilde=float(r_tilde.mean()),
        stderr_r=float(r.std(ddof=ddof) / np.sqrt(n)),
        stderr_r_tilde=float(r_tilde.std(ddof=ddof) / np.sqrt(n)),
    )


def eigenvector_eta(decomp: EigenDecomposition) -> np.ndarray:
    """eta_{nm} = N |c_m^(n)|^2, flattened; row-major over states n."""
    C = decomp.vectors
    return (decomp.N * np.abs(C.T) ** 2).ravel()


def log_eta(eta: np.ndarray) -> np.ndarray:
    """ln(eta), dropping exact zeros (log undefined)."""
    eta = np.asarray(eta)
    return np.log(eta[eta > 0])
