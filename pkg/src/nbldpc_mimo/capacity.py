"""Monte-Carlo ergodic MIMO capacity and its inverse.

C(gamma) = E[ log2 det(I + (gamma/N_t) H H^H) ] over i.i.d. CN(0,1)
fading, estimated by sample mean; `snr_for_rate` bisects gamma_db until
the capacity matches a target spectral efficiency, reusing one fixed set
of channel draws across evaluations so the bisection sees a monotone,
noise-free function.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import sample_channel

_CHUNK = 2048


@dataclass(frozen=True)
class CapacityEstimate:
    gamma_db: float
    mean_bps_hz: float
    stderr: float
    trials: int


def _logdet_samples(H: np.ndarray, gamma: float, n_t: int) -> np.ndarray:
    """log2 det(I + (gamma/n_t) H H^H) per batched draw, via Cholesky."""
    n_r = H.shape[-2]
    G = np.eye(n_r) + (gamma / n_t) * (H @ np.conj(np.swapaxes(H, -1, -2)))
    L = np.linalg.cholesky(G)
    diag = np.real(np.diagonal(L, axis1=-2, axis2=-1))
    return 2.0 * np.sum(np.log2(diag), axis=-1)


def ergodic_capacity(
    n_t: int,
    n_r: int,
    gamma_db: float,
    trials: int = 10**5,
    rng: np.random.Generator | None = None,
) -> CapacityEstimate:
    """Sample-mean estimate of the ergodic capacity at gamma_db dB."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if rng is None:
        rng = np.random.default_rng()
    gamma = 10.0 ** (gamma_db / 10.0)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < trials:
        b = min(_CHUNK, trials - done)
        H = sample_channel(n_t, n_r, rng, size=(b,))
        c = _logdet_samples(H, gamma, n_t)
        total += float(c.sum())
        total_sq += float((c * c).sum())
        done += b
    mean = total / trials
    var = max(total_sq / trials - mean * mean, 0.0)
    stderr = np.sqrt(var / trials)
    return CapacityEstimate(gamma_db, mean, stderr, trials)


def snr_for_rate(
    n_t: int,
    n_r: int,
    target_bps_hz: float,
    tol_db: float = 0.05,
    trials: int = 10**4,
    seed: int = 0,
    bracket_db: tuple[float, float] = (-20.0, 60.0),
) -> float:
    """SNR (dB) at which the ergodic capacity equals target_bps_hz.

    Uses common random numbers: one fixed block of channel draws is
    evaluated at every bisection point, so C(gamma) is exactly monotone
    and the returned abscissa is deterministic given the seed.
    """
    if target_bps_hz <= 0.0:
        raise ValueError("target rate must be positive")
    rng = np.random.default_rng(seed)
    H = sample_channel(n_t, n_r, rng, size=(trials,))

    def c_of(gamma_db: float) -> float:
        gamma = 10.0 ** (gamma_db / 10.0)
        total = 0.0
        for lo in range(0, trials, _CHUNK):
            total += float(_logdet_samples(H[lo : lo + _CHUNK], gamma, n_t).sum())
        return total / trials

    lo, hi = bracket_db
    if c_of(lo) >= target_bps_hz or c_of(hi) <= target_bps_hz:
        raise ValueError(
            f"target {target_bps_hz} bps/Hz not bracketed in {bracket_db} dB"
        )
    while hi - lo > tol_db:
        mid = 0.5 * (lo + hi)
        if c_of(mid) < target_bps_hz:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
