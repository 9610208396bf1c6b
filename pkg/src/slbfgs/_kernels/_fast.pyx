# Compiled kernel backend.  Mirrors _ref.py operation-for-operation: same
# per-example accumulation order, multiply-add left unfused (built with
# -ffp-contract=off), so results stay within a rounding error of the
# fallback and all within-backend bit-level contracts hold identically.
# Inputs are validated one layer up.

import numpy as np

BACKEND_NAME = "compiled"


cdef inline double _dot(const double[::1] a, const double[::1] b) noexcept:
    cdef Py_ssize_t i, n = a.shape[0]
    cdef double acc = 0.0
    for i in range(n):
        acc += a[i] * b[i]
    return acc


cdef inline double _row_dot_dense(const double[:, ::1] X, Py_ssize_t i,
                                  const double[::1] w) noexcept:
    cdef Py_ssize_t j, d = X.shape[1]
    cdef double acc = 0.0
    for j in range(d):
        acc += X[i, j] * w[j]
    return acc


cdef inline double _row_dot_csr(const double[::1] data,
                                const long long[::1] cols,
                                Py_ssize_t lo, Py_ssize_t hi,
                                const double[::1] w) noexcept:
    cdef Py_ssize_t p
    cdef double acc = 0.0
    for p in range(lo, hi):
        acc += data[p] * w[cols[p]]
    return acc


# ---------------------------------------------------------------------------
# ridge


def ridge_value_dense(const double[:, ::1] X, const double[::1] y,
                      const double[::1] w, double lam,
                      const long long[::1] idx):
    cdef Py_ssize_t t, i, b = idx.shape[0]
    cdef double r, acc = 0.0
    cdef double c = 0.5 * lam * _dot(w, w)
    for t in range(b):
        i = idx[t]
        r = _row_dot_dense(X, i, w) - y[i]
        acc += 0.5 * r * r + c
    return acc / b


def ridge_grad_dense(const double[:, ::1] X, const double[::1] y,
                     const double[::1] w, double lam,
                     const long long[::1] idx):
    cdef Py_ssize_t t, i, j, b = idx.shape[0], d = w.shape[0]
    cdef double r
    g_arr = np.zeros(d)
    cdef double[::1] g = g_arr
    for t in range(b):
        i = idx[t]
        r = _row_dot_dense(X, i, w) - y[i]
        for j in range(d):
            g[j] += r * X[i, j] + lam * w[j]
    for j in range(d):
        g[j] /= b
    return g_arr


def ridge_hvp_dense(const double[:, ::1] X, double lam,
                    const long long[::1] idx, const double[::1] v):
    cdef Py_ssize_t t, i, j, b = idx.shape[0], d = v.shape[0]
    cdef double q
    out_arr = np.zeros(d)
    cdef double[::1] out = out_arr
    for t in range(b):
        i = idx[t]
        q = _row_dot_dense(X, i, v)
        for j in range(d):
            out[j] += q * X[i, j] + lam * v[j]
    for j in range(d):
        out[j] /= b
    return out_arr


def ridge_value_csr(const double[::1] data, const long long[::1] cols,
                    const long long[::1] indptr, const double[::1] y,
                    const double[::1] w, double lam,
                    const long long[::1] idx):
    cdef Py_ssize_t t, i, b = idx.shape[0]
    cdef double r, acc = 0.0
    cdef double c = 0.5 * lam * _dot(w, w)
    for t in range(b):
        i = idx[t]
        r = _row_dot_csr(data, cols, indptr[i], indptr[i + 1], w) - y[i]
        acc += 0.5 * r * r + c
    return acc / b


def ridge_grad_csr(const double[::1] data, const long long[::1] cols,
                   const long long[::1] indptr, const double[::1] y,
                   const double[::1] w, double lam,
                   const long long[::1] idx):
    cdef Py_ssize_t t, i, j, p, lo, hi, b = idx.shape[0], d = w.shape[0]
    cdef double r
    cdef bint use_reg = lam != 0.0
    g_arr = np.zeros(d)
    tmp_arr = np.zeros(d)
    cdef double[::1] g = g_arr
    cdef double[::1] tmp = tmp_arr
    for t in range(b):
        i = idx[t]
        lo = indptr[i]
        hi = indptr[i + 1]
        r = _row_dot_csr(data, cols, lo, hi, w) - y[i]
        if use_reg:
            for j in range(d):
                tmp[j] = lam * w[j]
            for p in range(lo, hi):
                tmp[cols[p]] += r * data[p]
            for j in range(d):
                g[j] += tmp[j]
        else:
            for p in range(lo, hi):
                g[cols[p]] += r * data[p]
    for j in range(d):
        g[j] /= b
    return g_arr


def ridge_hvp_csr(const double[::1] data, const long long[::1] cols,
                  const long long[::1] indptr, double lam,
                  const long long[::1] idx, const double[::1] v):
    cdef Py_ssize_t t, i, j, p, lo, hi, b = idx.shape[0], d = v.shape[0]
    cdef double q
    cdef bint use_reg = lam != 0.0
    out_arr = np.zeros(d)
    tmp_arr = np.zeros(d)
    cdef double[::1] out = out_arr
    cdef double[::1] tmp = tmp_arr
    for t in range(b):
        i = idx[t]
        lo = indptr[i]
        hi = indptr[i + 1]
        q = _row_dot_csr(data, cols, lo, hi, v)
        if use_reg:
            for j in range(d):
                tmp[j] = lam * v[j]
            for p in range(lo, hi):
                tmp[cols[p]] += q * data[p]
            for j in range(d):
                out[j] += tmp[j]
        else:
            for p in range(lo, hi):
                out[cols[p]] += q * data[p]
    for j in range(d):
        out[j] /= b
    return out_arr


# ---------------------------------------------------------------------------
# squared hinge (strict m < 1: Hessian at the kink is the zero matrix)


def hinge2_value_dense(const double[:, ::1] X, const double[::1] y,
                       const double[::1] w, double lam,
                       const long long[::1] idx):
    cdef Py_ssize_t t, i, b = idx.shape[0]
    cdef double m, u, acc = 0.0
    cdef double c = 0.5 * lam * _dot(w, w)
    for t in range(b):
        i = idx[t]
        m = y[i] * _row_dot_dense(X, i, w)
        if m < 1.0:
            u = 1.0 - m
            acc += u * u + c
        else:
            acc += c
    return acc / b


def hinge2_grad_dense(const double[:, ::1] X, const double[::1] y,
                      const double[::1] w, double lam,
                      const long long[::1] idx):
    cdef Py_ssize_t t, i, j, b = idx.shape[0], d = w.shape[0]
    cdef double m, coef
    g_arr = np.zeros(d)
    cdef double[::1] g = g_arr
    for t in range(b):
        i = idx[t]
        m = y[i] * _row_dot_dense(X, i, w)
        if m < 1.0:
            coef = -2.0 * (1.0 - m) * y[i]
            for j in range(d):
                g[j] += coef * X[i, j] + lam * w[j]
        else:
            for j in range(d):
                g[j] += lam * w[j]
    for j in range(d):
        g[j] /= b
    return g_arr


def hinge2_hvp_dense(const double[:, ::1] X, const double[::1] y,
                     const double[::1] w, double lam,
                     const long long[::1] idx, const double[::1] v):
    cdef Py_ssize_t t, i, j, b = idx.shape[0], d = v.shape[0]
    cdef double m, coef
    out_arr = np.zeros(d)
    cdef double[::1] out = out_arr
    for t in range(b):
        i = idx[t]
        m = y[i] * _row_dot_dense(X, i, w)
        if m < 1.0:
            coef = 2.0 * _row_dot_dense(X, i, v)
            for j in range(d):
                out[j] += coef * X[i, j] + lam * v[j]
        else:
            for j in range(d):
                out[j] += lam * v[j]
    for j in range(d):
        out[j] /= b
    return out_arr


def hinge2_value_csr(const double[::1] data, const long long[::1] cols,
                     const long long[::1] indptr, const double[::1] y,
                     const double[::1] w, double lam,
                     const long long[::1] idx):
    cdef Py_ssize_t t, i, b = idx.shape[0]
    cdef double m, u, acc = 0.0
    cdef double c = 0.5 * lam * _dot(w, w)
    for t in range(b):
        i = idx[t]
        m = y[i] * _row_dot_csr(data, cols, indptr[i], indptr[i + 1], w)
        if m < 1.0:
            u = 1.0 - m
            acc += u * u + c
        else:
            acc += c
    return acc / b


def hinge2_grad_csr(const double[::1] data, const long long[::1] cols,
                    const long long[::1] indptr, const double[::1] y,
                    const double[::1] w, double lam,
                    const long long[::1] idx):
    cdef Py_ssize_t t, i, j, p, lo, hi, b = idx.shape[0], d = w.shape[0]
    cdef double m, coef
    cdef bint use_reg = lam != 0.0
    cdef bint active
    g_arr = np.zeros(d)
    tmp_arr = np.zeros(d)
    cdef double[::1] g = g_arr
    cdef double[::1] tmp = tmp_arr
    for t in range(b):
        i = idx[t]
        lo = indptr[i]
        hi = indptr[i + 1]
        m = y[i] * _row_dot_csr(data, cols, lo, hi, w)
        active = m < 1.0
        if active:
            coef = -2.0 * (1.0 - m) * y[i]
        if use_reg:
            for j in range(d):
                tmp[j] = lam * w[j]
            if active:
                for p in range(lo, hi):
                    tmp[cols[p]] += coef * data[p]
            for j in range(d):
                g[j] += tmp[j]
        elif active:
            for p in range(lo, hi):
                g[cols[p]] += coef * data[p]
    for j in range(d):
        g[j] /= b
    return g_arr


def hinge2_hvp_csr(const double[::1] data, const long long[::1] cols,
                   const long long[::1] indptr, const double[::1] y,
                   const double[::1] w, double lam,
                   const long long[::1] idx, const double[::1] v):
    cdef Py_ssize_t t, i, j, p, lo, hi, b = idx.shape[0], d = v.shape[0]
    cdef double m, coef
    cdef bint use_reg = lam != 0.0
    cdef bint active
    out_arr = np.zeros(d)
    tmp_arr = np.zeros(d)
    cdef double[::1] out = out_arr
    cdef double[::1] tmp = tmp_arr
    for t in range(b):
        i = idx[t]
        lo = indptr[i]
        hi = indptr[i + 1]
        m = y[i] * _row_dot_csr(data, cols, lo, hi, w)
        active = m < 1.0
        if active:
            coef = 2.0 * _row_dot_csr(data, cols, lo, hi, v)
        if use_reg:
            for j in range(d):
                tmp[j] = lam * v[j]
            if active:
                for p in range(lo, hi):
                    tmp[cols[p]] += coef * data[p]
            for j in range(d):
                out[j] += tmp[j]
        elif active:
            for p in range(lo, hi):
                out[cols[p]] += coef * data[p]
    for j in range(d):
        out[j] /= b
    return out_arr


# ---------------------------------------------------------------------------
# matrix completion (factored, w = row factors then column factors)


def mc_value(const long long[::1] obs_i, const long long[::1] obs_j,
             const double[::1] obs_r, long long nrows, long long k,
             const double[::1] w, double lam, const long long[::1] idx):
    cdef Py_ssize_t t, c, oL, oR, b = idx.shape[0]
    cdef Py_ssize_t base = nrows * k
    cdef double e, sLL, sRR, acc = 0.0
    for t in range(b):
        oL = obs_i[idx[t]] * k
        oR = base + obs_j[idx[t]] * k
        e = 0.0
        sLL = 0.0
        sRR = 0.0
        for c in range(k):
            e += w[oL + c] * w[oR + c]
        e -= obs_r[idx[t]]
        for c in range(k):
            sLL += w[oL + c] * w[oL + c]
        for c in range(k):
            sRR += w[oR + c] * w[oR + c]
        acc += e * e + 0.5 * lam * (sLL + sRR)
    return acc / b


def mc_grad(const long long[::1] obs_i, const long long[::1] obs_j,
            const double[::1] obs_r, long long nrows, long long k,
            const double[::1] w, double lam, const long long[::1] idx):
    cdef Py_ssize_t t, c, oL, oR, b = idx.shape[0], dim = w.shape[0]
    cdef Py_ssize_t base = nrows * k
    cdef double e, two_e
    g_arr = np.zeros(dim)
    cdef double[::1] g = g_arr
    for t in range(b):
        oL = obs_i[idx[t]] * k
        oR = base + obs_j[idx[t]] * k
        e = 0.0
        for c in range(k):
            e += w[oL + c] * w[oR + c]
        e -= obs_r[idx[t]]
        two_e = 2.0 * e
        for c in range(k):
            g[oL + c] += two_e * w[oR + c] + lam * w[oL + c]
        for c in range(k):
            g[oR + c] += two_e * w[oL + c] + lam * w[oR + c]
    for c in range(dim):
        g[c] /= b
    return g_arr


def mc_hvp(const long long[::1] obs_i, const long long[::1] obs_j,
           const double[::1] obs_r, long long nrows, long long k,
           const double[::1] w, double lam, const long long[::1] idx,
           const double[::1] v):
    cdef Py_ssize_t t, c, oL, oR, b = idx.shape[0], dim = v.shape[0]
    cdef Py_ssize_t base = nrows * k
    cdef double e, two_e, cross, rv, lv
    out_arr = np.zeros(dim)
    cdef double[::1] out = out_arr
    for t in range(b):
        oL = obs_i[idx[t]] * k
        oR = base + obs_j[idx[t]] * k
        e = 0.0
        rv = 0.0
        lv = 0.0
        for c in range(k):
            e += w[oL + c] * w[oR + c]
        e -= obs_r[idx[t]]
        for c in range(k):
            rv += w[oR + c] * v[oL + c]
        for c in range(k):
            lv += w[oL + c] * v[oR + c]
        two_e = 2.0 * e
        cross = 2.0 * (rv + lv)
        for c in range(k):
            out[oL + c] += cross * w[oR + c] + two_e * v[oR + c] + lam * v[oL + c]
        for c in range(k):
            out[oR + c] += cross * w[oL + c] + two_e * v[oL + c] + lam * v[oR + c]
    for c in range(dim):
        out[c] /= b
    return out_arr


# ---------------------------------------------------------------------------
# two-loop recursion (pairs oldest -> newest)


def two_loop_apply(const double[:, ::1] s_mat, const double[:, ::1] y_mat,
                   const double[::1] rho, double h0_scale,
                   const double[::1] v):
    cdef Py_ssize_t j, c, count = s_mat.shape[0], d = v.shape[0]
    cdef double a, beta
    q_arr = np.array(v, copy=True)
    alpha_arr = np.zeros(count)
    cdef double[::1] q = q_arr
    cdef double[::1] alpha = alpha_arr
    for j in range(count - 1, -1, -1):
        a = 0.0
        for c in range(d):
            a += s_mat[j, c] * q[c]
        alpha[j] = rho[j] * a
        a = alpha[j]
        for c in range(d):
            q[c] -= a * y_mat[j, c]
    for c in range(d):
        q[c] = h0_scale * q[c]
    for j in range(count):
        beta = 0.0
        for c in range(d):
            beta += y_mat[j, c] * q[c]
        beta = rho[j] * beta
        a = alpha[j] - beta
        for c in range(d):
            q[c] += a * s_mat[j, c]
    return q_arr
