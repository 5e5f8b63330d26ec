# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Signatures mirror ``_pykernels`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, M_PI

cnp.import_array()


def ms_value(const cnp.int64_t[:, ::1] order, const double[:, ::1] dsorted,
             const double[::1] p):
    cdef Py_ssize_t T = order.shape[0], L = order.shape[1]
    cdef Py_ssize_t v, j
    cdef double total = 0.0, acc, pref, pj
    for v in range(T):
        acc = 0.0
        pref = 1.0
        for j in range(L):
            pj = p[order[v, j]]
            acc += pref * pj * dsorted[v, j]
            pref *= 1.0 - pj
            if pref == 0.0:
                break
        total += acc
    return total


def ms_grad(const cnp.int64_t[:, ::1] order, const double[:, ::1] dsorted,
            const double[::1] p):
    cdef Py_ssize_t T = order.shape[0], L = order.shape[1]
    cdef Py_ssize_t v, j
    cdef double S, pref, pj
    g_arr = np.zeros(p.shape[0], dtype=np.float64)
    tail_arr = np.empty(L, dtype=np.float64)
    cdef double[::1] g = g_arr
    cdef double[::1] tail = tail_arr
    for v in range(T):
        S = 0.0
        for j in range(L - 1, -1, -1):
            tail[j] = S
            pj = p[order[v, j]]
            S = pj * dsorted[v, j] + (1.0 - pj) * S
        pref = 1.0
        for j in range(L):
            g[order[v, j]] += pref * (dsorted[v, j] - tail[j])
            pref *= 1.0 - p[order[v, j]]
            if pref == 0.0:
                break
    return g_arr


def card_remove_sums(const double[::1] q, const double[::1] p,
                     const double[::1] dist):
    # The removal recursion is a serial chain in t, so nodes are advanced
    # together (t outer, node inner) to keep independent divisions in flight.
    cdef Py_ssize_t n = p.shape[0], i, j, t, nlo = 0, nhi = 0
    cdef double pi, cur, d0, d1, qt
    idx_arr = np.empty(n, dtype=np.intp)
    state_arr = np.zeros(n, dtype=np.float64)
    a0_arr = np.zeros(n, dtype=np.float64)
    a1_arr = np.zeros(n, dtype=np.float64)
    pl_arr = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t[::1] idx = idx_arr
    cdef double[::1] prev = state_arr
    cdef double[::1] a0 = a0_arr
    cdef double[::1] a1 = a1_arr
    cdef double[::1] pl = pl_arr
    for i in range(n):
        if p[i] <= 0.5:
            idx[nlo] = i
            nlo += 1
    nhi = nlo
    for i in range(n):
        if p[i] > 0.5:
            idx[nhi] = i
            nhi += 1
    for j in range(n):
        pl[j] = p[idx[j]]
    cdef double[::1] s0 = np.zeros(n, dtype=np.float64)
    cdef double[::1] s1 = np.zeros(n, dtype=np.float64)
    for t in range(n):
        qt, d0, d1 = q[t], dist[t], dist[t + 1]
        for j in range(nlo):
            cur = (qt - pl[j] * prev[j]) / (1.0 - pl[j])
            s0[j] += cur * d0
            s1[j] += cur * d1
            prev[j] = cur
    for t in range(n - 1, -1, -1):
        qt, d0, d1 = q[t + 1], dist[t], dist[t + 1]
        for j in range(nlo, n):
            cur = (qt - (1.0 - pl[j]) * prev[j]) / pl[j]
            s0[j] += cur * d0
            s1[j] += cur * d1
            prev[j] = cur
    for j in range(n):
        a0[idx[j]] = s0[j]
        a1[idx[j]] = s1[j]
    return a0_arr, a1_arr


def pmf_dft(const double[::1] p):
    cdef Py_ssize_t n = p.shape[0], s, j
    cdef Py_ssize_t half = (n + 1) // 2 + 1
    cdef double omega = 2.0 * M_PI / (n + 1)
    cdef double zr, zi, re, im, ar, ai, tmp
    phi_arr = np.empty(half, dtype=np.complex128)
    cdef double complex[::1] phi = phi_arr
    for s in range(half):
        zr = cos(omega * s)
        zi = sin(omega * s)
        re = 1.0
        im = 0.0
        for j in range(n):
            ar = 1.0 - p[j] + p[j] * zr
            ai = p[j] * zi
            tmp = re * ar - im * ai
            im = re * ai + im * ar
            re = tmp
        phi[s] = re + 1j * im
    return np.fft.irfft(np.conj(phi_arr), n + 1)


def pmf_dp(const double[::1] p):
    cdef Py_ssize_t n = p.shape[0], j, t
    cdef double pj
    q_arr = np.zeros(n + 1, dtype=np.float64)
    cdef double[::1] q = q_arr
    q[0] = 1.0
    for j in range(n):
        pj = p[j]
        q[j + 1] = q[j] * pj
        for t in range(j, 0, -1):
            q[t] = q[t] * (1.0 - pj) + q[t - 1] * pj
        q[0] = q[0] * (1.0 - pj)
    return q_arr
