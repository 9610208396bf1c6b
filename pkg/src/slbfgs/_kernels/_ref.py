"""Pure-NumPy kernel backend.

This module is the normative definition of every hot numeric kernel: the
compiled backend (`_fast.pyx`) mirrors the exact per-example operation
order used here.  Component sums always run over the index set in the
given (ascending) order, accumulating one fully formed per-example term at
a time, which is what makes subset results decompose bit-for-bit into
their singleton parts.

All kernels assume validated inputs (contiguous float64 arrays, int64
index sets, in-range indices); validation happens one layer up.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


# ---------------------------------------------------------------------------
# ridge: f_i(w) = 0.5*(x_i.w - y_i)^2 + 0.5*lam*||w||^2


def ridge_value_dense(X, y, w, lam, idx):
    c = 0.5 * lam * float(np.dot(w, w))
    acc = 0.0
    for i in idx:
        r = float(np.dot(X[i], w)) - float(y[i])
        acc += 0.5 * r * r + c
    return acc / idx.shape[0]


def ridge_grad_dense(X, y, w, lam, idx):
    lam_w = lam * w
    g = np.zeros(w.shape[0])
    for i in idx:
        r = float(np.dot(X[i], w)) - y[i]
        g += r * X[i] + lam_w
    return g / idx.shape[0]


def ridge_hvp_dense(X, lam, idx, v):
    lam_v = lam * v
    out = np.zeros(v.shape[0])
    for i in idx:
        q = float(np.dot(X[i], v))
        out += q * X[i] + lam_v
    return out / idx.shape[0]


def ridge_value_csr(data, cols, indptr, y, w, lam, idx):
    c = 0.5 * lam * float(np.dot(w, w))
    acc = 0.0
    for i in idx:
        lo, hi = indptr[i], indptr[i + 1]
        r = float(np.dot(data[lo:hi], w[cols[lo:hi]])) - float(y[i])
        acc += 0.5 * r * r + c
    return acc / idx.shape[0]


def ridge_grad_csr(data, cols, indptr, y, w, lam, idx):
    d = w.shape[0]
    lam_w = lam * w
    g = np.zeros(d)
    use_reg = lam != 0.0
    for i in idx:
        lo, hi = indptr[i], indptr[i + 1]
        ci = cols[lo:hi]
        r = float(np.dot(data[lo:hi], w[ci])) - y[i]
        if use_reg:
            tmp = lam_w.copy()
            tmp[ci] += r * data[lo:hi]
            g += tmp
        else:
            g[ci] += r * data[lo:hi]
    return g / idx.shape[0]


def ridge_hvp_csr(data, cols, indptr, lam, idx, v):
    d = v.shape[0]
    lam_v = lam * v
    out = np.zeros(d)
    use_reg = lam != 0.0
    for i in idx:
        lo, hi = indptr[i], indptr[i + 1]
        ci = cols[lo:hi]
        q = float(np.dot(data[lo:hi], v[ci]))
        if use_reg:
            tmp = lam_v.copy()
            tmp[ci] += q * data[lo:hi]
            out += tmp
        else:
            out[ci] += q * data[lo:hi]
    return out / idx.shape[0]


# ---------------------------------------------------------------------------
# squared hinge: f_i(w) = max(0, 1 - y_i*(x_i.w))^2 + 0.5*lam*||w||^2
# The per-example Hessian at margin == 1 is the zero matrix (limit from the
# inactive side), hence the strict < 1 test everywhere.


def hinge2_value_dense(X, y, w, lam, idx):
    c = 0.5 * lam * float(np.dot(w, w))
    acc = 0.0
    for i in idx:
        m = float(y[i]) * float(np.dot(X[i], w))
        if m < 1.0:
            t = 1.0 - m
            acc += t * t + c
        else:
            acc += c
    return acc / idx.shape[0]


def hinge2_grad_dense(X, y, w, lam, idx):
    lam_w = lam * w
    g = np.zeros(w.shape[0])
    for i in idx:
        m = y[i] * float(np.dot(X[i], w))
        if m < 1.0:
            coef = -2.0 * (1.0 - m) * y[i]
            g += coef * X[i] + lam_w
        else:
            g += lam_w
    return g / idx.shape[0]


def hinge2_hvp_dense(X, y, w, lam, idx, v):
    lam_v = lam * v
    out = np.zeros(v.shape[0])
    for i in idx:
        m = y[i] * float(np.dot(X[i], w))
        if m < 1.0:
            coef = 2.0 * float(np.dot(X[i], v))
            out += coef * X[i] + lam_v
        else:
            out += lam_v
    return out / idx.shape[0]


def hinge2_value_csr(data, cols, indptr, y, w, lam, idx):
    c = 0.5 * lam * float(np.dot(w, w))
    acc = 0.0
    for i in idx:
        lo, hi = indptr[i], indptr[i + 1]
        m = float(y[i]) * float(np.dot(data[lo:hi], w[cols[lo:hi]]))
        if m < 1.0:
            t = 1.0 - m
            acc += t * t + c
        else:
            acc += c
    return acc / idx.shape[0]


def hinge2_grad_csr(data, cols, indptr, y, w, lam, idx):
    d = w.shape[0]
    lam_w = lam * w
    g = np.zeros(d)
    use_reg = lam != 0.0
    for i in idx:
        lo, hi = indptr[i], indptr[i + 1]
        ci = cols[lo:hi]
        m = y[i] * float(np.dot(data[lo:hi], w[ci]))
        active = m < 1.0
        if use_reg:
            tmp = lam_w.copy()
            if active:
                tmp[ci] += (-2.0 * (1.0 - m) * y[i]) * data[lo:hi]
            g += tmp
        elif active:
            g[ci] += (-2.0 * (1.0 - m) * y[i]) * data[lo:hi]
    return g / idx.shape[0]


def hinge2_hvp_csr(data, cols, indptr, y, w, lam, idx, v):
    d = v.shape[0]
    lam_v = lam * v
    out = np.zeros(d)
    use_reg = lam != 0.0
    for i in idx:
        lo, hi = indptr[i], indptr[i + 1]
        ci = cols[lo:hi]
        m = y[i] * float(np.dot(data[lo:hi], w[ci]))
        active = m < 1.0
        if use_reg:
            tmp = lam_v.copy()
            if active:
                tmp[ci] += (2.0 * float(np.dot(data[lo:hi], v[ci]))) * data[lo:hi]
            out += tmp
        elif active:
            out[ci] += (2.0 * float(np.dot(data[lo:hi], v[ci]))) * data[lo:hi]
    return out / idx.shape[0]


# ---------------------------------------------------------------------------
# matrix completion, factored form.  w packs nrows*k row factors then
# ncols*k column factors; observation (i, j, r) contributes
# (L_i.R_j - r)^2 + 0.5*lam*(||L_i||^2 + ||R_j||^2).


def mc_value(obs_i, obs_j, obs_r, nrows, k, w, lam, idx):
    acc = 0.0
    base = nrows * k
    for t in idx:
        i = obs_i[t]
        j = obs_j[t]
        Li = w[i * k : (i + 1) * k]
        Rj = w[base + j * k : base + (j + 1) * k]
        e = float(np.dot(Li, Rj)) - float(obs_r[t])
        acc += e * e + 0.5 * lam * (float(np.dot(Li, Li)) + float(np.dot(Rj, Rj)))
    return acc / idx.shape[0]


def mc_grad(obs_i, obs_j, obs_r, nrows, k, w, lam, idx):
    g = np.zeros(w.shape[0])
    base = nrows * k
    for t in idx:
        i = obs_i[t]
        j = obs_j[t]
        sl = slice(i * k, (i + 1) * k)
        sr = slice(base + j * k, base + (j + 1) * k)
        Li = w[sl]
        Rj = w[sr]
        e = float(np.dot(Li, Rj)) - obs_r[t]
        two_e = 2.0 * e
        g[sl] += two_e * Rj + lam * Li
        g[sr] += two_e * Li + lam * Rj
    return g / idx.shape[0]


def mc_hvp(obs_i, obs_j, obs_r, nrows, k, w, lam, idx, v):
    out = np.zeros(v.shape[0])
    base = nrows * k
    for t in idx:
        i = obs_i[t]
        j = obs_j[t]
        sl = slice(i * k, (i + 1) * k)
        sr = slice(base + j * k, base + (j + 1) * k)
        Li = w[sl]
        Rj = w[sr]
        vL = v[sl]
        vR = v[sr]
        e = float(np.dot(Li, Rj)) - obs_r[t]
        two_e = 2.0 * e
        cross = 2.0 * (float(np.dot(Rj, vL)) + float(np.dot(Li, vR)))
        out[sl] += cross * Rj + two_e * vR + lam * vL
        out[sr] += cross * Li + two_e * vL + lam * vR
    return out / idx.shape[0]


# ---------------------------------------------------------------------------
# two-loop recursion for applying the L-BFGS inverse-Hessian approximation.
# Pairs are ordered oldest -> newest; h0_scale is the initial diagonal
# scaling (s.y/||y||^2 of the newest pair, or 1 for identity).


def two_loop_apply(s_mat, y_mat, rho, h0_scale, v):
    count = s_mat.shape[0]
    q = v.copy()
    alpha = np.zeros(count)
    for j in range(count - 1, -1, -1):
        alpha[j] = rho[j] * float(np.dot(s_mat[j], q))
        q -= alpha[j] * y_mat[j]
    r = h0_scale * q
    for j in range(count):
        beta = rho[j] * float(np.dot(y_mat[j], r))
        r += (alpha[j] - beta) * s_mat[j]
    return r
