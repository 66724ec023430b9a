"""Belief propagation over GF(2^m) in the probability domain.

Messages are length-2^m probability vectors.  Check-node updates permute
each incoming message by the inverse edge coefficient, convolve the
permuted messages over the additive group of the field, and de-permute by
the target edge coefficient; the convolutions run in the Walsh-Hadamard
transform domain.  Variable-node updates are entrywise products with the
channel prior.  The flooding schedule is: all checks, all variables, one
tentative decision, then a syndrome check for early exit.

The module exposes the per-edge reference operations (`wh_transform`,
`convolve`, `check_to_var`, `var_to_check`) and a `Decoder` that runs the
same algorithm batch-vectorized, with an optional numba-compiled kernel
for Monte-Carlo throughput.  Both paths are cross-checked in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codes import ParityCheckMatrix

try:
    from . import _kernels

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    _kernels = None
    _HAVE_NUMBA = False

# Entries below this are clamped after each normalization so that repeated
# products cannot underflow to an all-zero message within 100 iterations.
PROB_FLOOR = 1e-300


def normalize(p: np.ndarray, floor: float = PROB_FLOOR) -> np.ndarray:
    """Scale to unit sum, clamp tiny/negative entries, and rescale.

    An all-zero (or non-finite) vector is replaced by the uniform vector,
    which erases an inconsistent message without stalling the iteration.
    """
    p = np.asarray(p, dtype=np.float64)
    s = p.sum()
    if not np.isfinite(s) or s <= 0.0:
        return np.full(p.shape, 1.0 / p.shape[-1])
    p = np.maximum(p / s, floor)
    return p / p.sum()


def wh_transform(p: np.ndarray) -> np.ndarray:
    """Walsh-Hadamard transform over the additive group of GF(2^m).

    T(p)(u) = sum_x (-1)^<u,x> p(x), with <u,x> the bit inner product of
    the binary representations.  Involutive up to the factor 2^m.  Applies
    along the last axis, so batched inputs are fine.
    """
    p = np.array(p, dtype=np.float64)
    q = p.shape[-1]
    if q & (q - 1) or q == 0:
        raise ValueError(f"length {q} is not a power of two")
    h = 1
    while h < q:
        v = p.reshape(p.shape[:-1] + (q // (2 * h), 2, h))
        a = v[..., 0, :].copy()
        b = v[..., 1, :].copy()
        v[..., 0, :] = a + b
        v[..., 1, :] = a - b
        h *= 2
    return p


def convolve(p1: np.ndarray, p2: np.ndarray) -> np.ndarray:
    """Group convolution (p1 (*) p2)(x) = sum_{y+z=x} p1(y) p2(z).

    Computed as the inverse transform of the pointwise product of
    transforms.
    """
    p1 = np.asarray(p1, dtype=np.float64)
    p2 = np.asarray(p2, dtype=np.float64)
    if p1.shape[-1] != p2.shape[-1]:
        raise ValueError("length mismatch")
    return wh_transform(wh_transform(p1) * wh_transform(p2)) / p1.shape[-1]


def mult_permute(p: np.ndarray, a: int, field) -> np.ndarray:
    """Return r with r(x) = p(a*x) for a nonzero field element a."""
    return np.asarray(p, dtype=np.float64)[field.mul_row(a)]


def check_to_var(incoming, coeffs, field) -> list[np.ndarray]:
    """Messages a check node sends on each of its edges.

    `incoming[t]` is the variable-to-check message on edge t and
    `coeffs[t]` its parity coefficient.  For target edge t, every other
    incoming message is permuted by the inverse of its coefficient, the
    permuted messages are convolved, and the result is de-permuted by the
    target coefficient.  Outputs are normalized.
    """
    coeffs = [int(a) for a in coeffs]
    permuted = [
        mult_permute(p, field.inv(a), field) for p, a in zip(incoming, coeffs)
    ]
    q = field.q
    outs = []
    for t, a_t in enumerate(coeffs):
        acc = None
        for j, pj in enumerate(permuted):
            if j == t:
                continue
            acc = pj if acc is None else convolve(acc, pj)
        if acc is None:
            acc = np.zeros(q)
            acc[0] = 1.0
        outs.append(normalize(mult_permute(acc, a_t, field)))
    return outs


def var_to_check(prior, incoming=()) -> np.ndarray:
    """Entrywise product of the prior with the incoming check messages,
    normalized to unit sum.  With no incoming messages this is the
    (normalized) prior, the iteration-0 message."""
    out = np.asarray(prior, dtype=np.float64).copy()
    for p in incoming:
        out *= np.asarray(p, dtype=np.float64)
    return normalize(out)


@dataclass
class DecodeResult:
    symbols: np.ndarray
    iterations_used: int
    converged: bool
    posteriors: np.ndarray | None = None


class Decoder:
    """Batched BP decoder bound to one immutable parity-check matrix.

    Construction precomputes the edge layout and the per-edge permutation
    tables; `decode` is then called once per received frame.  Distinct
    decode calls share no state and may run in parallel processes.
    """

    def __init__(self, matrix: ParityCheckMatrix):
        self.matrix = matrix
        self.field = matrix.field
        gf = self.field
        q = gf.q
        N, P = matrix.n_symbols, matrix.n_checks

        e_check, e_var, e_coeff = [], [], []
        for c in range(P):
            for v, a in zip(matrix.row_cols[c], matrix.row_coeffs[c]):
                e_check.append(c)
                e_var.append(int(v))
                e_coeff.append(int(a))
        self.e_check = np.array(e_check, dtype=np.int64)
        self.e_var = np.array(e_var, dtype=np.int64)
        self.e_coeff = np.array(e_coeff, dtype=np.int64)
        E = len(e_check)
        self.n_edges = E

        weights = matrix.row_weights()
        self.check_ptr = np.zeros(P + 1, dtype=np.int64)
        self.check_ptr[1:] = np.cumsum(weights)
        self.dc_max = int(weights.max()) if P else 0

        # Variable adjacency in edge ids, plus flat slot indices used to
        # scatter edge messages into padded (node, slot, q) buffers.
        var_lists: list[list[int]] = [[] for _ in range(N)]
        for e in range(E):
            var_lists[self.e_var[e]].append(e)
        self.var_ptr = np.zeros(N + 1, dtype=np.int64)
        self.var_ptr[1:] = np.cumsum([len(l) for l in var_lists])
        self.var_edges = np.array(
            [e for l in var_lists for e in l], dtype=np.int64
        )
        self.dv_max = max((len(l) for l in var_lists), default=0)

        self.check_slot_idx = np.empty(E, dtype=np.int64)
        for c in range(P):
            lo, hi = self.check_ptr[c], self.check_ptr[c + 1]
            self.check_slot_idx[lo:hi] = c * self.dc_max + np.arange(hi - lo)
        self.var_slot_idx = np.empty(E, dtype=np.int64)
        for v in range(N):
            for slot, e in enumerate(var_lists[v]):
                self.var_slot_idx[e] = v * self.dv_max + slot

        self.perm_in = np.empty((E, q), dtype=np.int32)
        self.perm_out = np.empty((E, q), dtype=np.int32)
        for e in range(E):
            a = int(self.e_coeff[e])
            self.perm_in[e] = gf.mul_row(gf.inv(a))
            self.perm_out[e] = gf.mul_row(a)

    def decode(
        self,
        priors: np.ndarray,
        l_max: int,
        early_stop: bool = True,
        return_posteriors: bool = False,
        use_fast: bool | None = None,
    ) -> DecodeResult:
        """Run BP from the given per-symbol priors.

        Returns the first tentative decision with zero syndrome, or the
        decision after l_max iterations.  Non-convergence is a valid
        result, not an error.
        """
        priors = np.asarray(priors, dtype=np.float64)
        if priors.shape != (self.matrix.n_symbols, self.field.q):
            raise ValueError(
                f"priors shape {priors.shape} != "
                f"({self.matrix.n_symbols}, {self.field.q})"
            )
        if l_max < 0:
            raise ValueError("l_max must be >= 0")
        if use_fast is None:
            use_fast = _HAVE_NUMBA and not return_posteriors
        if use_fast and not return_posteriors:
            symbols, iters, converged = _kernels.decode(
                priors,
                self.perm_in,
                self.perm_out,
                self.e_var,
                self.e_check,
                self.check_ptr,
                self.var_ptr,
                self.var_edges,
                l_max,
                early_stop,
                PROB_FLOOR,
            )
            return DecodeResult(symbols, int(iters), bool(converged))
        return self._decode_numpy(priors, l_max, early_stop, return_posteriors)

    def _syndrome_is_zero(self, x_hat: np.ndarray) -> bool:
        return not np.any(self.matrix.syndrome(x_hat))

    @staticmethod
    def _normalize_rows(p: np.ndarray) -> np.ndarray:
        s = p.sum(axis=1, keepdims=True)
        bad = ~np.isfinite(s) | (s <= 0.0)
        p = np.where(bad, 1.0, p / np.where(bad, 1.0, s))
        p = np.maximum(p, PROB_FLOOR)
        return p / p.sum(axis=1, keepdims=True)

    @staticmethod
    def _excl_products(padded: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Per-slot product of all other slots, plus the full product."""
        d = padded.shape[1]
        pre = np.ones_like(padded)
        if d > 1:
            np.cumprod(padded[:, :-1], axis=1, out=pre[:, 1:])
        suf = np.ones_like(padded)
        if d > 1:
            suf[:, :-1] = np.cumprod(padded[:, -1:0:-1], axis=1)[:, ::-1]
        return pre * suf, pre[:, -1] * padded[:, -1]

    def _decode_numpy(
        self,
        priors: np.ndarray,
        l_max: int,
        early_stop: bool,
        return_posteriors: bool,
    ) -> DecodeResult:
        N, P, E = self.matrix.n_symbols, self.matrix.n_checks, self.n_edges
        q = self.field.q
        pri = self._normalize_rows(priors)

        post = pri.copy()
        x_hat = np.argmax(post, axis=1)
        if early_stop and self._syndrome_is_zero(x_hat):
            return DecodeResult(
                x_hat, 0, True, self._normalize_rows(post) if return_posteriors else None
            )

        msg_vc = pri[self.e_var]
        iterations = 0
        converged = False
        rows = np.arange(E)[:, None]
        for it in range(1, l_max + 1):
            iterations = it
            # Check to variable, in the transform domain.
            F = wh_transform(msg_vc[rows, self.perm_in])
            buf = np.ones((P * self.dc_max, q))
            buf[self.check_slot_idx] = F
            excl, _ = self._excl_products(buf.reshape(P, self.dc_max, q))
            conv = wh_transform(excl.reshape(P * self.dc_max, q)[self.check_slot_idx]) / q
            msg_cv = self._normalize_rows(conv[rows, self.perm_out])

            # Variable to check, plus the tentative-decision posterior.
            buf2 = np.ones((N * self.dv_max, q))
            buf2[self.var_slot_idx] = msg_cv
            excl2, full2 = self._excl_products(buf2.reshape(N, self.dv_max, q))
            msg_vc = self._normalize_rows(
                pri[self.e_var] * excl2.reshape(N * self.dv_max, q)[self.var_slot_idx]
            )

            post = pri * full2
            x_hat = np.argmax(post, axis=1)
            if early_stop and self._syndrome_is_zero(x_hat):
                converged = True
                break

        return DecodeResult(
            x_hat,
            iterations,
            converged,
            self._normalize_rows(post) if return_posteriors else None,
        )


def decode(
    matrix: ParityCheckMatrix,
    priors: np.ndarray,
    l_max: int,
    early_stop: bool = True,
    return_posteriors: bool = False,
) -> DecodeResult:
    """One-shot decode; builds a fresh Decoder (use the class for loops)."""
    return Decoder(matrix).decode(
        priors, l_max, early_stop=early_stop, return_posteriors=return_posteriors
    )
