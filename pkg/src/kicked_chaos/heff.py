"""Effective Hamiltonian H_eff = i ln U and its Pauli-string coefficients.

With U = C diag(e^{i phi}) C^T and phases on the principal branch
[-pi, pi), H_eff = -C diag(phi) C^T.  The coefficient of a Pauli string P
is C_P = Tr(P H_eff) / N, evaluated either in the eigenbasis,

    C_P = -(1/N) sum_n phi_n <psi_n|P|psi_n>,

or from the dense real matrix H_eff, where the signed-permutation form of
P reduces the trace to N terms.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .ensembles import EnsembleKind, sample
from .errors import ContractViolation, ResourceLimitError
from .pauli import PauliString, count_strings, sample_strings, string_expectation
from .spectral import EigenDecomposition, diagonalize_symmetric_unitary


class ImaginaryStringWarning(UserWarning):
    """Coefficient of a string with odd Y count requested on a real H_eff."""


@dataclass
class EffectiveHamiltonian:
    """H_eff = -C diag(phases) C^T of the globally phase-adjusted U.

    ``decomp.phases`` are the shifted phases phi_n + phase_shift; they are not
    re-wrapped into [-pi, pi).
    """

    decomp: EigenDecomposition
    phase_shift: float
    _dense: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def N(self) -> int:
        return self.decomp.N

    @property
    def L(self) -> int:
        return self.N.bit_length() - 1

    @property
    def phases(self) -> np.ndarray:
        return self.decomp.phases

    def dense(self) -> np.ndarray:
        """Real symmetric N x N matrix, built once and cached."""
        if self._dense is None:
            C = self.decomp.vectors
            self._dense = -(C * self.phases[None, :]) @ C.T
        return self._dense

    def release_dense(self):
        self._dense = None


@dataclass(frozen=True)
class CoefficientSample:
    string: PauliString
    value: float

    @property
    def k(self) -> int:
        return self.string.order


def build_effective(decomp: EigenDecomposition) -> EffectiveHamiltonian:
    """Remove the identity coefficient by the global phase shift alpha = -mean(phi)."""
    phi = decomp.phases
    if phi.size and (phi.min() < -np.pi or phi.max() >= np.pi):
        raise ContractViolation("eigenphases must lie in [-pi, pi) before the global-phase shift")
    alpha = -float(np.mean(phi))
    shifted = phi + alpha
    bound = np.pi + abs(alpha)
    if np.any(np.abs(shifted) > bound):
        warnings.warn("shifted eigenphases left [-pi-|alpha|, pi+|alpha|]", RuntimeWarning, stacklevel=2)
    return EffectiveHamiltonian(EigenDecomposition(shifted, decomp.vectors), alpha)


def _check_string(heff: EffectiveHamiltonian, P: PauliString):
    if P.L != heff.L:
        raise ContractViolation(f"string {P} has L = {P.L}, H_eff has L = {heff.L}")


def coefficient(heff: EffectiveHamiltonian, P: PauliString) -> float:
    """Eigenbasis evaluation, O(N^2) per string.

    Strings with an odd number of Y letters are imaginary matrices and have
    zero coefficient in a real H_eff; 0.0 is returned together with an
    :class:`ImaginaryStringWarning`.
    """
    _check_string(heff, P)
    if not P.is_real:
        warnings.warn(f"{P} is imaginary; coefficient is exactly zero", ImaginaryStringWarning, stacklevel=2)
        return 0.0
    expect = string_expectation(P, heff.decomp.vectors)
    return float(-np.dot(heff.phases, expect) / heff.N)


def coefficient_dense(heff: EffectiveHamiltonian, P: PauliString) -> float:
    """Same coefficient from the cached dense H_eff in O(N)."""
    _check_string(heff, P)
    if not P.is_real:
        warnings.warn(f"{P} is imaginary; coefficient is exactly zero", ImaginaryStringWarning, stacklevel=2)
        return 0.0
    H = heff.dense()
    j = np.arange(heff.N)
    # Tr(P H) = sum_j phase(j) H[j, j ^ xmask]
    return float(np.dot(P.phases(), H[j, P.targets]) / heff.N)


def coefficient_samples(
    heff: EffectiveHamiltonian,
    k: int,
    count: int,
    rng: np.random.Generator,
    dense: bool = True,
) -> list[CoefficientSample]:
    """Coefficients of ``count`` distinct random real strings of order k."""
    available = count_strings(heff.L, k, real_only=True)
    if count > available:
        raise ContractViolation(f"only {available} real strings of order {k} on L = {heff.L}")
    strings = sample_strings(heff.L, k, count, real_only=True, rng=rng)
    evaluate = coefficient_dense if dense else coefficient
    return [CoefficientSample(P, evaluate(heff, P)) for P in strings]


def reconstruct_unitary(heff: EffectiveHamiltonian, max_L: int = 8) -> np.ndarray:
    """exp(-i H_eff) = C diag(e^{i phi~}) C^T, i.e. e^{i alpha} U."""
    if heff.L > max_L:
        raise ResourceLimitError(f"round-trip reconstruction limited to L <= {max_L}")
    return heff.decomp.reconstruct()


def variance_prediction(N: int, ensemble: EnsembleKind | str = EnsembleKind.COE) -> float:
    """Gaussian coefficient variance for circular ensembles: 2 pi^2/(3N^2) (COE), half that (CUE)."""
    if N < 2:
        raise ContractViolation("N must be >= 2")
    kind = EnsembleKind.parse(ensemble)
    factor = 2.0 if kind is EnsembleKind.COE else 1.0
    return factor * np.pi**2 / (3.0 * N**2)


def _eig_unitary(U: np.ndarray, kind: EnsembleKind) -> tuple[np.ndarray, np.ndarray]:
    if kind is EnsembleKind.COE:
        d = diagonalize_symmetric_unitary(U)
        return d.phases, d.vectors
    w, V = np.linalg.eig(U)
    phi = np.angle(w)
    phi = np.where(phi >= np.pi, phi - 2 * np.pi, phi)
    # eig normalizes columns; orthogonality holds for a non-degenerate spectrum
    order = np.argsort(phi)
    return phi[order], V[:, order]


def appendix_b_check(
    N: int,
    realizations: int,
    rng: np.random.Generator,
    ensemble: EnsembleKind | str = EnsembleKind.COE,
) -> dict:
    """Monte Carlo statistics behind the Gaussian coefficient law.

    Collects, per ensemble sample: the eigenphases, eta = N |c|^2, the
    alternating sums Sigma_m = sum_m (-1)^m |c_m|^2 of each eigenvector, and
    the coefficient of I...I sigma_z.  Returns sample statistics next to
    the predicted values; no pass/fail is applied here.
    """
    kind = EnsembleKind.parse(ensemble)
    if N % 2:
        raise ContractViolation("the alternating-sum statistics assume an even dimension N")
    if N < 64:
        raise ContractViolation("use N >= 64 for the large-N statistics")
    from .reference import ReferenceCurve, ks_distance

    sign = np.where(np.arange(N) % 2 == 0, 1.0, -1.0)
    phases, sigma_m, coeffs = [], [], []
    eta_sum = eta_sq = 0.0
    eta_count = 0
    for _ in range(realizations):
        phi, V = _eig_unitary(sample(kind, N, rng), kind)
        prob = np.abs(V) ** 2
        eta = N * prob
        eta_sum += eta.sum()
        eta_sq += (eta**2).sum()
        eta_count += eta.size
        s = sign @ prob
        phases.append(phi)
        sigma_m.append(s)
        coeffs.append(-np.dot(phi, s) / N)

    phases = np.concatenate(phases)
    sigma_m = np.concatenate(sigma_m)
    coeffs = np.asarray(coeffs)
    eta_mean = eta_sum / eta_count
    eta_var = eta_sq / eta_count - eta_mean**2
    eta_var_pred = 2.0 if kind is EnsembleKind.COE else 1.0
    return {
        "ensemble": kind.value,
        "N": N,
        "realizations": realizations,
        "phase_ks_uniform": ks_distance(phases, ReferenceCurve.phase_uniform()),
        "eta_mean": float(eta_mean),
        "eta_var": float(eta_var),
        "eta_var_predicted": eta_var_pred,
        "sigma_m_mean": float(sigma_m.mean()),
        "sigma_m_var": float(sigma_m.var(ddof=1)),
        "sigma_m_var_predicted": eta_var_pred / N,
        "coeff_string": "I" * (N.bit_length() - 2) + "Z" if N & (N - 1) == 0 else None,
        "coeff_mean": float(coeffs.mean()),
        "coeff_var": float(coeffs.var(ddof=1)),
        "coeff_var_predicted": variance_prediction(N, kind),
    }
