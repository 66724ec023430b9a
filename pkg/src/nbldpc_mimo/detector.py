"""Soft-output MMSE detection for the non-binary decoder.

Per channel use: MMSE weights W_k = ((N0/(Es/N_t)) I + H H^H)^{-1} H_k,
estimates s_hat_k = W_k^H y, the equivalent-AWGN parameters
mu_k = W_k^H H_k and eps_k^2 = (Es/N_t)(mu_k - mu_k^2), per-point
Gaussian likelihoods, and finally one GF(2^m) prior per coded symbol as
the product of the q per-antenna point likelihoods selected by the
symbol's bit groups.

All functions accept a leading batch of channel uses.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .galois import GaloisField
from .modem import Constellation, MappingPlan, point_indices

MU_CLAMP = 1e-12


class EqAwgnParams(NamedTuple):
    """Per-antenna scale and residual variance of the equivalent AWGN model."""

    mu: np.ndarray
    eps_sq: np.ndarray


def compute_weights(
    H: np.ndarray, n0: float, es: float = 1.0, n_t: int | None = None
) -> np.ndarray:
    """MMSE weight matrix W (..., N_r, N_t); column k is W_k.

    The regularized Gram matrix (N0/(Es/N_t)) I + H H^H is Hermitian
    positive definite for N0 > 0, and is solved against all columns of H
    at once.
    """
    H = np.asarray(H, dtype=np.complex128)
    if not np.all(np.isfinite(H)) or not np.isfinite(n0):
        raise ValueError("non-finite input")
    if n_t is None:
        n_t = H.shape[-1]
    n_r = H.shape[-2]
    G = (n0 / (es / n_t)) * np.eye(n_r) + H @ np.conj(np.swapaxes(H, -1, -2))
    return np.linalg.solve(G, H)


def detect(W: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Per-antenna estimates s_hat with s_hat_k = W_k^H y."""
    W = np.asarray(W)
    y = np.asarray(y)
    if W.shape[-2] != y.shape[-1] or W.shape[:-2] != y.shape[:-1]:
        raise ValueError(f"shape mismatch: W {W.shape}, y {y.shape}")
    return np.einsum("...rk,...r->...k", np.conj(W), y)


def eq_awgn_params(
    W: np.ndarray, H: np.ndarray, es: float = 1.0, n_t: int | None = None
) -> EqAwgnParams:
    """mu_k = W_k^H H_k and eps_k^2 = (Es/N_t)(mu_k - mu_k^2).

    mu_k is real to machine precision by construction; it is clamped away
    from {0, 1} so eps_k^2 stays strictly positive under pathological
    conditioning.
    """
    W = np.asarray(W)
    H = np.asarray(H)
    if n_t is None:
        n_t = H.shape[-1]
    mu = np.einsum("...rk,...rk->...k", np.conj(W), H).real
    mu = np.clip(mu, MU_CLAMP, 1.0 - MU_CLAMP)
    eps_sq = (es / n_t) * (mu - mu * mu)
    return EqAwgnParams(mu, eps_sq)


def likelihoods(
    s_hat: np.ndarray,
    mu: np.ndarray,
    eps_sq: np.ndarray,
    constellation: Constellation,
) -> np.ndarray:
    """Pr(s_hat_k | s) over the M constellation points, shape (..., M).

    Proportional to exp(-|s_hat - mu s|^2 / eps^2); the max exponent is
    subtracted before exponentiation so the high-SNR regime cannot
    underflow to an all-zero row.
    """
    s_hat = np.asarray(s_hat)
    mu = np.asarray(mu)
    eps_sq = np.asarray(eps_sq)
    if np.any(eps_sq <= 0.0):
        raise ValueError("eps_sq must be positive")
    d2 = np.abs(s_hat[..., None] - mu[..., None] * constellation.points) ** 2
    expo = -d2 / eps_sq[..., None]
    expo -= expo.max(axis=-1, keepdims=True)
    p = np.exp(expo)
    return p / p.sum(axis=-1, keepdims=True)


def gf_priors(
    tables: np.ndarray, plan: MappingPlan, field: GaloisField
) -> np.ndarray:
    """Decoder priors over GF(2^m) from q per-antenna likelihood tables.

    `tables` has shape (..., q, M), the likelihoods of the q consecutive
    antennas carrying one coded symbol.  The prior of symbol x is the
    product of the q point likelihoods selected by x's bit groups,
    renormalized: 2^m (q-1) real multiplications per coded symbol plus
    the normalization.
    """
    tables = np.asarray(tables, dtype=np.float64)
    q = plan.q
    if tables.shape[-2] != q or tables.shape[-1] != constellation_size(plan):
        raise ValueError(
            f"expected tables (..., {q}, {constellation_size(plan)}), "
            f"got {tables.shape}"
        )
    idx = point_indices(np.arange(field.q), plan)  # (2^m, q)
    p = tables[..., 0, idx[:, 0]]
    for i in range(1, q):
        p = p * tables[..., i, idx[:, i]]
    return p / p.sum(axis=-1, keepdims=True)


def constellation_size(plan: MappingPlan) -> int:
    return 1 << plan.bits_per_symbol
