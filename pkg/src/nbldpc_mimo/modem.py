"""Gray-labelled constellations and the coded-symbol-to-antenna mapping.

Each GF(2^m) coded symbol is split into q = m/p groups of p bits (low-
order bits first) and each group selects one constellation point; K_t
coded symbols fill the N_t antennas of one channel use.  Constellation
points are indexed directly by their label integer, so mapping a bit
group is a table lookup.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .galois import GaloisField

SCHEMES = ("bpsk", "qpsk", "16qam")

# 2-bit reflected Gray code over the 4 amplitude levels of 16-QAM:
# label 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3 (adjacent levels differ
# in one bit).  Indexed by the label integer, low-order bit first.
_GRAY2_LEVELS = np.array([-3.0, -1.0, 3.0, 1.0])


@dataclass(frozen=True)
class Constellation:
    """M = 2^p complex points, indexed by their Gray label integer."""

    scheme: str
    points: np.ndarray
    bits_per_symbol: int
    es_over_nt: float

    @property
    def size(self) -> int:
        return len(self.points)

    def labels(self) -> np.ndarray:
        """(M, p) bit array, low-order bit first; row i labels points[i]."""
        idx = np.arange(self.size)
        return (idx[:, None] >> np.arange(self.bits_per_symbol)[None, :]) & 1


def build_constellation(scheme: str, es_over_nt: float = 1.0) -> Constellation:
    """Gray-labelled constellation with mean point energy es_over_nt."""
    scheme = scheme.lower()
    amp = np.sqrt(es_over_nt)
    if scheme == "bpsk":
        points = amp * np.array([1.0 + 0.0j, -1.0 + 0.0j])
        p = 1
    elif scheme == "qpsk":
        idx = np.arange(4)
        i = 1.0 - 2.0 * (idx & 1)
        qq = 1.0 - 2.0 * ((idx >> 1) & 1)
        points = amp * (i + 1j * qq) / np.sqrt(2.0)
        p = 2
    elif scheme == "16qam":
        idx = np.arange(16)
        i = _GRAY2_LEVELS[idx & 3]
        qq = _GRAY2_LEVELS[(idx >> 2) & 3]
        points = amp * (i + 1j * qq) / np.sqrt(10.0)
        p = 4
    else:
        raise ValueError(f"unsupported scheme {scheme!r}; choose from {SCHEMES}")
    return Constellation(scheme, points, p, es_over_nt)


@dataclass(frozen=True)
class MappingPlan:
    """Symbol-to-antenna bookkeeping for one (N_t, constellation, code) trio."""

    n_t: int
    n_symbols: int
    bits_per_symbol: int
    m: int

    def __post_init__(self) -> None:
        if self.m % self.bits_per_symbol != 0:
            raise ValueError(
                f"p={self.bits_per_symbol} does not divide the {self.m} bits "
                f"of a coded symbol"
            )
        if self.n_t % self.q != 0:
            raise ValueError(f"N_t={self.n_t} not divisible by q={self.q}")
        if self.n_symbols % self.k_t != 0:
            raise ValueError(
                f"N={self.n_symbols} not divisible by K_t={self.k_t}"
            )

    @property
    def q(self) -> int:
        """Modulated symbols per coded symbol."""
        return self.m // self.bits_per_symbol

    @property
    def k_t(self) -> int:
        """Coded symbols per channel use."""
        return self.n_t // self.q

    @property
    def uses_per_codeword(self) -> int:
        return self.n_symbols // self.k_t


def build_mapping_plan(
    n_t: int, constellation: Constellation, n_symbols: int, m: int = 8
) -> MappingPlan:
    return MappingPlan(n_t, n_symbols, constellation.bits_per_symbol, m)


def point_indices(x, plan: MappingPlan) -> np.ndarray:
    """Constellation indices of the q bit groups of each coded symbol.

    Group i of symbol x is bits [i*p, (i+1)*p) of the binary
    representation, i.e. (x >> i*p) & (M-1).
    """
    x = np.asarray(x, dtype=np.int64)
    p = plan.bits_per_symbol
    shifts = p * np.arange(plan.q, dtype=np.int64)
    return (x[..., None] >> shifts) & ((1 << p) - 1)


def map_codeword(
    x, plan: MappingPlan, constellation: Constellation
) -> np.ndarray:
    """Map an N-symbol codeword to (uses_per_codeword, N_t) transmit vectors.

    Coded symbols fill antennas in ascending index: channel use u carries
    symbols u*K_t .. (u+1)*K_t - 1, symbol slot t occupying antennas
    t*q .. (t+1)*q - 1, bits consumed low-order first.
    """
    x = np.asarray(x, dtype=np.int64)
    if x.shape != (plan.n_symbols,):
        raise ValueError(f"expected {plan.n_symbols} symbols, got {x.shape}")
    idx = point_indices(x, plan)  # (N, q)
    return constellation.points[idx].reshape(plan.uses_per_codeword, plan.n_t)


def hard_demap(point: complex, constellation: Constellation) -> tuple[int, ...]:
    """Label bits of the nearest constellation point (lowest index on ties)."""
    d2 = np.abs(np.asarray(constellation.points) - point) ** 2
    idx = int(np.argmin(d2))
    p = constellation.bits_per_symbol
    return tuple((idx >> i) & 1 for i in range(p))


def demap_codeword(
    s: np.ndarray, plan: MappingPlan, constellation: Constellation, field: GaloisField
) -> np.ndarray:
    """Hard-decision inverse of map_codeword (uncoded baselines, tests)."""
    s = np.asarray(s)
    if s.shape != (plan.uses_per_codeword, plan.n_t):
        raise ValueError(
            f"expected shape {(plan.uses_per_codeword, plan.n_t)}, got {s.shape}"
        )
    d2 = np.abs(s[..., None] - constellation.points) ** 2
    idx = np.argmin(d2, axis=-1).reshape(plan.n_symbols, plan.q)
    p = plan.bits_per_symbol
    shifts = p * np.arange(plan.q, dtype=np.int64)
    return np.bitwise_xor.reduce(idx << shifts, axis=1)
