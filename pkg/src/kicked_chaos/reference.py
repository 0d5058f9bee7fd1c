"""Reference densities, histograms and Kolmogorov-Smirnov distances."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np
from scipy import integrate, special

from .errors import ContractViolation


def wigner_surmise(s):
    """COE nearest-neighbour spacing density (pi/2) s exp(-pi s^2 / 4)."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ContractViolation("spacing must be non-negative")
    return np.pi / 2 * s * np.exp(-np.pi / 4 * s**2)


def porter_thomas(eta):
    """exp(-eta/2) / sqrt(2 pi eta) for eta > 0."""
    eta = np.asarray(eta, dtype=float)
    if np.any(eta <= 0):
        raise ContractViolation("Porter-Thomas density needs eta > 0; integrate over bins instead")
    return np.exp(-eta / 2) / np.sqrt(2 * np.pi * eta)


def log_porter_thomas(log_eta):
    """Density of ln(eta) for Porter-Thomas eta."""
    y = np.asarray(log_eta, dtype=float)
    # combined exponent stays finite for large y (inf * 0 otherwise)
    return np.exp((y - np.exp(y)) / 2) / np.sqrt(2 * np.pi)


def cue_exponential(eta):
    eta = np.asarray(eta, dtype=float)
    if np.any(eta < 0):
        raise ContractViolation("eta must be non-negative")
    return np.exp(-eta)


def coefficient_gaussian(c, variance: float):
    if variance <= 0:
        raise ContractViolation("variance must be positive")
    c = np.asarray(c, dtype=float)
    return np.exp(-(c**2) / (2 * variance)) / np.sqrt(2 * np.pi * variance)


def ratio_constants() -> tuple[float, float]:
    """COE means of r and of r_tilde = min(r, 1/r)."""
    return 1.75, 4.0 - 2.0 * np.sqrt(3.0)


class CurveKind(str, Enum):
    WIGNER_COE = "wigner_coe"
    PORTER_THOMAS = "porter_thomas"
    LOG_PORTER_THOMAS = "log_porter_thomas"
    EXPONENTIAL_CUE = "exponential_cue"
    COEFFICIENT_GAUSSIAN = "coefficient_gaussian"
    PHASE_UNIFORM = "phase_uniform"


@dataclass(frozen=True)
class ReferenceCurve:
    """A normalized density with its support and closed-form CDF.

    ``cdf_quad`` integrates the density numerically and serves as the
    independent check of the closed forms.
    """

    kind: CurveKind
    pdf: Callable
    cdf: Callable
    support: tuple[float, float]
    variance: float | None = None

    @classmethod
    def wigner(cls):
        return cls(CurveKind.WIGNER_COE, wigner_surmise,
                   lambda s: -np.expm1(-np.pi / 4 * np.asarray(s, float) ** 2), (0.0, np.inf))

    @classmethod
    def porter_thomas(cls):
        return cls(CurveKind.PORTER_THOMAS, porter_thomas,
                   lambda x: special.erf(np.sqrt(np.asarray(x, float) / 2)), (0.0, np.inf))

    @classmethod
    def log_porter_thomas(cls):
        return cls(CurveKind.LOG_PORTER_THOMAS, log_porter_thomas,
                   lambda y: special.erf(np.sqrt(np.exp(np.asarray(y, float)) / 2)), (-np.inf, np.inf))

    @classmethod
    def exponential_cue(cls):
        return cls(CurveKind.EXPONENTIAL_CUE, cue_exponential,
                   lambda x: -np.expm1(-np.asarray(x, float)), (0.0, np.inf))

    @classmethod
    def gaussian(cls, variance: float):
        if variance <= 0:
            raise ContractViolation("variance must be positive")
        sd = np.sqrt(variance)
        return cls(CurveKind.COEFFICIENT_GAUSSIAN, lambda c: coefficient_gaussian(c, variance),
                   lambda c: special.ndtr(np.asarray(c, float) / sd), (-np.inf, np.inf), variance)

    @classmethod
    def phase_uniform(cls):
        def pdf(phi):
            phi = np.asarray(phi, float)
            return np.where((phi >= -np.pi) & (phi < np.pi), 1 / (2 * np.pi), 0.0)

        return cls(CurveKind.PHASE_UNIFORM, pdf,
                   lambda phi: np.clip((np.asarray(phi, float) + np.pi) / (2 * np.pi), 0, 1), (-np.pi, np.pi))

    def cdf_quad(self, x: float) -> float:
        lo, hi = self.support
        x = min(max(x, lo), hi)
        if x == lo:
            return 0.0
        # split at the origin/mode so quad resolves narrow peaks
        pts = [p for p in (0.0,) if lo < p < x]
        total = 0.0
        a = lo
        for b in pts + [x]:
            val, _ = integrate.quad(self._integrand, a, b, epsabs=1e-10, epsrel=1e-10, limit=200)
            total += val
            a = b
        return total

    def _integrand(self, t: float) -> float:
        # the support boundary has measure zero; skip densities singular there
        return float(self.pdf(t)) if t > self.support[0] else 0.0

    def bin_probabilities(self, edges) -> np.ndarray:
        """Probability mass in each bin; avoids point evaluation at singularities."""
        return np.diff(self.cdf(np.asarray(edges, float)))

    def bin_density(self, edges) -> np.ndarray:
        edges = np.asarray(edges, float)
        return self.bin_probabilities(edges) / np.diff(edges)

    def tabulate(self, x) -> np.ndarray:
        x = np.asarray(x, float)
        if self.kind is CurveKind.PORTER_THOMAS:
            return np.where(x > 0, porter_thomas(np.where(x > 0, x, 1.0)), np.inf)
        return self.pdf(x)


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    counts: np.ndarray

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    @property
    def density(self) -> np.ndarray:
        total = self.counts.sum()
        if total == 0:
            return np.zeros(len(self.counts))
        return self.counts / (total * self.widths)

    def __add__(self, other: "Histogram") -> "Histogram":
        if not np.array_equal(self.edges, other.edges):
            raise ContractViolation("cannot add histograms with different edges")
        return Histogram(self.edges, self.counts + other.counts)


def histogram(data, edges) -> Histogram:
    edges = np.asarray(edges, float)
    if edges.ndim != 1 or len(edges) < 2 or np.any(np.diff(edges) <= 0):
        raise ContractViolation("histogram edges must be strictly ascending")
    counts, _ = np.histogram(np.asarray(data, float), bins=edges)
    return Histogram(edges, counts.astype(np.int64))


def ks_distance(data, curve: ReferenceCurve, quadrature: bool = False) -> float:
    """sup_x |F_n(x) - F(x)| evaluated at the sample points.

    With ``quadrature`` the reference CDF is accumulated by adaptive
    quadrature between consecutive sample points instead of the closed form
    (slow; intended for moderate sample sizes).
    """
    x = np.sort(np.asarray(data, float).ravel())
    n = len(x)
    if n == 0:
        raise ContractViolation("KS distance of an empty sample")
    if quadrature:
        F = np.empty(n)
        acc = curve.cdf_quad(float(x[0]))
        F[0] = acc
        for i in range(1, n):
            if x[i] > x[i - 1]:
                val, _ = integrate.quad(curve._integrand, x[i - 1], x[i], epsabs=1e-10, limit=200)
                acc += val
            F[i] = acc
    else:
        F = curve.cdf(x)
    upper = np.arange(1, n + 1) / n - F
    lower = F - np.arange(n) / n
    return float(max(upper.max(), lower.max()))
