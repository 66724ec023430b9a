"""Flat Rayleigh-fading MIMO channel y = H s + n and SNR bookkeeping.

Entries of H are i.i.d. circularly-symmetric complex Gaussian with unit
variance; noise entries have variance sigma_n^2 per real component, and
the per-receive-antenna SNR is gamma = Es / N0 with N0 = 2 sigma_n^2.
A fresh H is drawn for every channel use.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np


class ChannelUse(NamedTuple):
    """One realization of the channel equation."""

    H: np.ndarray
    s: np.ndarray
    y: np.ndarray
    sigma_n_sq: float


def sample_channel(n_t: int, n_r: int, rng: np.random.Generator, size=()) -> np.ndarray:
    """Draw (*size, n_r, n_t) i.i.d. CN(0, 1) fading matrices."""
    if n_t <= 0 or n_r <= 0:
        raise ValueError("antenna counts must be positive")
    shape = tuple(np.atleast_1d(size)) + (n_r, n_t) if size != () else (n_r, n_t)
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) / np.sqrt(2.0)


def noise_from_snr(gamma_db: float, es: float = 1.0) -> tuple[float, float]:
    """(N0, sigma_n^2) for a per-receive-antenna SNR of gamma_db dB."""
    if not np.isfinite(gamma_db):
        raise ValueError("SNR must be finite")
    n0 = es / 10.0 ** (gamma_db / 10.0)
    return n0, n0 / 2.0


def transmit(
    H: np.ndarray, s: np.ndarray, sigma_n_sq: float, rng: np.random.Generator
) -> np.ndarray:
    """y = H s + n with noise variance sigma_n_sq per real component.

    Batched: H may be (..., n_r, n_t) with s (..., n_t).
    """
    H = np.asarray(H)
    s = np.asarray(s)
    if H.shape[-1] != s.shape[-1] or H.shape[:-2] != s.shape[:-1]:
        raise ValueError(f"shape mismatch: H {H.shape}, s {s.shape}")
    y = np.einsum("...rt,...t->...r", H, s)
    if sigma_n_sq > 0.0:
        std = np.sqrt(sigma_n_sq)
        y = y + std * (
            rng.standard_normal(y.shape) + 1j * rng.standard_normal(y.shape)
        )
    return y
