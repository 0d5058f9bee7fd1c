"""Pauli strings as signed permutations.

Basis convention used throughout the package: basis index ``m`` runs over
``0 .. 2**L - 1`` and site ``n`` (1-based, leftmost tensor factor first) is
stored in bit ``L - n`` of ``m``.  Bit value 0 is spin up (sigma_z = +1).
Site 1 is therefore the most significant bit.

A Pauli string maps ``|m>`` to ``phase(m) |m ^ xmask>`` where ``xmask`` has
bits set at X and Y sites, and ``phase(m) = i**n_Y * (-1)**popcount(m & zmask)``
with ``zmask`` set at Z and Y sites.  Applying a string therefore never needs
the dense ``2**L x 2**L`` matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import comb

import numpy as np

from .errors import ContractViolation, ResourceLimitError

LETTERS = "IXYZ"
DENSE_MAX_L = 12

_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _parity(values: np.ndarray) -> np.ndarray:
    """Bit parity (popcount mod 2) of each non-negative integer."""
    v = values.astype(np.uint64, copy=True)
    out = np.zeros(v.shape, dtype=np.uint64)
    while np.any(v):
        out ^= v & np.uint64(1)
        v >>= np.uint64(1)
    return out


@dataclass(frozen=True)
class PauliString:
    """Word over ``{I, X, Y, Z}``; ``letters[0]`` acts on site 1."""

    letters: str

    def __post_init__(self):
        letters = self.letters.upper()
        if not letters or any(c not in LETTERS for c in letters):
            raise ContractViolation(f"invalid Pauli word {self.letters!r}")
        object.__setattr__(self, "letters", letters)

    def __str__(self):
        return self.letters

    @property
    def L(self) -> int:
        return len(self.letters)

    @property
    def order(self) -> int:
        """Interaction order k: number of non-identity letters."""
        return sum(c != "I" for c in self.letters)

    @property
    def y_count(self) -> int:
        return self.letters.count("Y")

    @property
    def is_real(self) -> bool:
        return self.y_count % 2 == 0

    def _mask(self, chars: str) -> int:
        L = self.L
        mask = 0
        for n, c in enumerate(self.letters):
            if c in chars:
                mask |= 1 << (L - 1 - n)
        return mask

    @cached_property
    def xmask(self) -> int:
        return self._mask("XY")

    @cached_property
    def zmask(self) -> int:
        return self._mask("ZY")

    @cached_property
    def _phase_sign(self) -> np.ndarray:
        # real part of the per-index phase, without the global i**n_Y
        m = np.arange(1 << self.L, dtype=np.uint64)
        par = _parity(m & np.uint64(self.zmask))
        return 1.0 - 2.0 * par.astype(float)

    @property
    def global_phase(self) -> complex:
        return 1j ** self.y_count

    def phases(self) -> np.ndarray:
        """Phase picked up by each source basis index ``m`` (length 2**L)."""
        if self.is_real:
            return self._phase_sign * self.global_phase.real
        return self._phase_sign * self.global_phase

    @cached_property
    def targets(self) -> np.ndarray:
        """Image index ``m ^ xmask`` for every basis index."""
        return np.arange(1 << self.L, dtype=np.int64) ^ self.xmask


def apply_string(P: PauliString, v: np.ndarray) -> np.ndarray:
    """Return ``P @ v``.

    ``v`` may be a vector of length ``2**L`` or a matrix whose columns are
    such vectors; cost is O(size of v).
    """
    v = np.asarray(v)
    N = 1 << P.L
    if v.shape[0] != N:
        raise ContractViolation(f"vector length {v.shape[0]} does not match 2**{P.L} = {N}")
    ph = P.phases()
    if v.ndim == 2:
        ph = ph[:, None]
    # out[m ^ x] = ph[m] v[m]; the xor map is an involution
    return (ph * v)[P.targets]


def string_expectation(P: PauliString, v: np.ndarray) -> float | np.ndarray:
    """Real expectation ``<v|P|v>`` for a real vector (or each real column).

    Only strings with an even number of Y letters are accepted: for odd
    Y-parity the expectation of a real vector vanishes identically and the
    caller should use :func:`complex_expectation` instead.
    """
    if not P.is_real:
        raise ContractViolation(
            f"{P} has odd Y count; real fast path undefined, use complex_expectation"
        )
    v = np.asarray(v)
    if np.iscomplexobj(v):
        raise ContractViolation("real fast path requires a real vector")
    Pv = apply_string(P, v)
    return np.sum(v * Pv, axis=0)


def complex_expectation(P: PauliString, v: np.ndarray) -> float | np.ndarray:
    """``<v|P|v>`` for arbitrary (complex) vectors; real up to round-off."""
    v = np.asarray(v)
    Pv = apply_string(P, v)
    return np.real(np.sum(np.conj(v) * Pv, axis=0))


def dense_matrix(P: PauliString) -> np.ndarray:
    """Kronecker product of the letters in site order (oracle use)."""
    if P.L > DENSE_MAX_L:
        raise ResourceLimitError(f"dense Pauli matrix refused for L = {P.L} > {DENSE_MAX_L}")
    out = np.ones((1, 1), dtype=complex)
    for c in P.letters:
        out = np.kron(out, _SINGLE[c])
    return out


def count_strings(L: int, k: int, real_only: bool = False) -> int:
    """Number of order-k strings on L sites (optionally only even Y-parity)."""
    if not 0 <= k <= L:
        raise ContractViolation(f"order k = {k} outside 0..{L}")
    if real_only:
        # even number of Y among k slots each X/Y/Z: (3^k + 1) / 2
        return comb(L, k) * (3**k + 1) // 2
    return comb(L, k) * 3**k


def all_strings(L: int, real_only: bool = False):
    """Iterate over every string on L sites in lexicographic IXYZ order."""
    from itertools import product

    for word in product(LETTERS, repeat=L):
        P = PauliString("".join(word))
        if real_only and not P.is_real:
            continue
        yield P


def sample_strings(
    L: int, k: int, count: int, real_only: bool, rng: np.random.Generator
) -> list[PauliString]:
    """Draw ``count`` distinct order-k strings uniformly without replacement.

    Proposals are a uniformly random site subset plus a uniform X/Y/Z word;
    proposals with odd Y count (when ``real_only``) or already seen are
    rejected.
    """
    population = count_strings(L, k, real_only)
    if count > population:
        raise ContractViolation(
            f"requested {count} strings but only {population} of order {k} exist on L = {L}"
        )
    seen: set[str] = set()
    out: list[PauliString] = []
    while len(out) < count:
        sites = rng.choice(L, size=k, replace=False)
        word = rng.integers(0, 3, size=k)
        letters = ["I"] * L
        for s, w in zip(sites, word):
            letters[s] = "XYZ"[w]
        text = "".join(letters)
        if text in seen:
            continue
        if real_only and text.count("Y") % 2:
            continue
        seen.add(text)
        out.append(PauliString(text))
    return out
