"""Numba-compiled BP decode loop.

Same algorithm and message schedule as `Decoder._decode_numpy`; explicit
loops over checks and variables avoid the temporaries of the batched
numpy path, which matters for long Monte-Carlo runs.  Kept free of any
object-mode fallbacks so the kernel compiles fully.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _wht_inplace(v):
    q = v.shape[0]
    h = 1
    while h < q:
        i = 0
        while i < q:
            for j in range(i, i + h):
                a = v[j]
                b = v[j + h]
                v[j] = a + b
                v[j + h] = a - b
            i += 2 * h
        h <<= 1


@njit(cache=True, inline="always")
def _normalize_row(v, floor):
    q = v.shape[0]
    s = 0.0
    for x in range(q):
        s += v[x]
    if not np.isfinite(s) or s <= 0.0:
        u = 1.0 / q
        for x in range(q):
            v[x] = u
        return
    inv = 1.0 / s
    s2 = 0.0
    for x in range(q):
        t = v[x] * inv
        if t < floor:
            t = floor
        v[x] = t
        s2 += t
    inv2 = 1.0 / s2
    for x in range(q):
        v[x] *= inv2


@njit(cache=True, inline="always")
def _syndrome_is_zero(x_hat, perm_out, e_var, e_check, n_checks):
    syn = np.zeros(n_checks, dtype=np.int64)
    for e in range(e_var.shape[0]):
        syn[e_check[e]] ^= perm_out[e, x_hat[e_var[e]]]
    for c in range(n_checks):
        if syn[c] != 0:
            return False
    return True


@njit(cache=True)
def _decode_loop(
    priors,
    perm_in,
    perm_out,
    e_var,
    e_check,
    check_ptr,
    var_ptr,
    var_edges,
    l_max,
    early_stop,
    floor,
):
    n_sym, q = priors.shape
    n_edges = e_var.shape[0]
    n_checks = check_ptr.shape[0] - 1

    pri = priors.copy()
    for v in range(n_sym):
        _normalize_row(pri[v], floor)

    x_hat = np.empty(n_sym, dtype=np.int64)
    for v in range(n_sym):
        best = 0
        bv = pri[v, 0]
        for x in range(1, q):
            if pri[v, x] > bv:
                bv = pri[v, x]
                best = x
        x_hat[v] = best
    if early_stop and _syndrome_is_zero(x_hat, perm_out, e_var, e_check, n_checks):
        return x_hat, 0, True

    msg_vc = np.empty((n_edges, q))
    msg_cv = np.empty((n_edges, q))
    for e in range(n_edges):
        v = e_var[e]
        for x in range(q):
            msg_vc[e, x] = pri[v, x]

    dc_max = 0
    for c in range(n_checks):
        d = check_ptr[c + 1] - check_ptr[c]
        if d > dc_max:
            dc_max = d
    dv_max = 0
    for v in range(n_sym):
        d = var_ptr[v + 1] - var_ptr[v]
        if d > dv_max:
            dv_max = d

    work = np.empty((dc_max, q))
    pre = np.empty((dc_max + 1, q))
    suf = np.empty((dc_max + 1, q))
    conv = np.empty(q)
    vpre = np.empty((dv_max + 1, q))
    vsuf = np.empty((dv_max + 1, q))

    iterations = 0
    converged = False
    for it in range(1, l_max + 1):
        iterations = it

        # ---- check to variable ----
        for c in range(n_checks):
            lo = check_ptr[c]
            d = check_ptr[c + 1] - lo
            for t in range(d):
                e = lo + t
                for x in range(q):
                    work[t, x] = msg_vc[e, perm_in[e, x]]
                _wht_inplace(work[t])
            for x in range(q):
                pre[0, x] = 1.0
            for t in range(d):
                for x in range(q):
                    pre[t + 1, x] = pre[t, x] * work[t, x]
            for x in range(q):
                suf[d, x] = 1.0
            for t in range(d - 1, -1, -1):
                for x in range(q):
                    suf[t, x] = suf[t + 1, x] * work[t, x]
            qinv = 1.0 / q
            for t in range(d):
                e = lo + t
                for x in range(q):
                    conv[x] = pre[t, x] * suf[t + 1, x]
                _wht_inplace(conv)
                for x in range(q):
                    msg_cv[e, x] = conv[perm_out[e, x]] * qinv
                _normalize_row(msg_cv[e], floor)

        # ---- variable to check, tentative decision ----
        for v in range(n_sym):
            lo = var_ptr[v]
            d = var_ptr[v + 1] - lo
            for x in range(q):
                vpre[0, x] = 1.0
            for t in range(d):
                e = var_edges[lo + t]
                for x in range(q):
                    vpre[t + 1, x] = vpre[t, x] * msg_cv[e, x]
            for x in range(q):
                vsuf[d, x] = 1.0
            for t in range(d - 1, -1, -1):
                e = var_edges[lo + t]
                for x in range(q):
                    vsuf[t, x] = vsuf[t + 1, x] * msg_cv[e, x]
            for t in range(d):
                e = var_edges[lo + t]
                for x in range(q):
                    msg_vc[e, x] = pri[v, x] * vpre[t, x] * vsuf[t + 1, x]
                _normalize_row(msg_vc[e], floor)
            best = 0
            bv = -1.0
            for x in range(q):
                p = pri[v, x] * vpre[d, x]
                if p > bv:
                    bv = p
                    best = x
            x_hat[v] = best

        if early_stop and _syndrome_is_zero(x_hat, perm_out, e_var, e_check, n_checks):
            converged = True
            break

    return x_hat, iterations, converged


def decode(
    priors,
    perm_in,
    perm_out,
    e_var,
    e_check,
    check_ptr,
    var_ptr,
    var_edges,
    l_max,
    early_stop,
    floor,
):
    return _decode_loop(
        np.ascontiguousarray(priors, dtype=np.float64),
        perm_in,
        perm_out,
        e_var,
        e_check,
        check_ptr,
        var_ptr,
        var_edges,
        np.int64(l_max),
        early_stop,
        floor,
    )
