"""Pure numpy versions of the compiled kernels.

Every function here has the same signature and return convention as its
counterpart in ``_ckernels.pyx``. Loops run over one axis and vectorize over
the other, so cost stays O(n^2) without Python-level inner loops.
"""
import numpy as np


def ms_value(order, dsorted, p):
    pm = p[order]
    keep = np.cumprod(1.0 - pm, axis=1)
    pref = np.ones_like(pm)
    pref[:, 1:] = keep[:, :-1]
    return float(np.sum(pref * pm * dsorted))


def ms_grad(order, dsorted, p):
    T, L = order.shape
    pm = p[order]
    tail = np.empty((T, L))
    S = np.zeros(T)
    for j in range(L - 1, -1, -1):
        tail[:, j] = S
        S = pm[:, j] * dsorted[:, j] + (1.0 - pm[:, j]) * S
    keep = np.cumprod(1.0 - pm, axis=1)
    pref = np.ones_like(pm)
    pref[:, 1:] = keep[:, :-1]
    contrib = pref * (dsorted - tail)
    g = np.zeros(p.shape[0])
    np.add.at(g, order.ravel(), contrib.ravel())
    return g


def card_remove_sums(q, p, dist):
    n = p.shape[0]
    lo = p <= 0.5
    hi = ~lo
    a0 = np.zeros(n)
    a1 = np.zeros(n)
    if lo.any():
        pl = p[lo]
        prev = np.zeros(pl.shape[0])
        s0 = np.zeros_like(prev)
        s1 = np.zeros_like(prev)
        for t in range(n):
            cur = (q[t] - pl * prev) / (1.0 - pl)
            s0 += cur * dist[t]
            s1 += cur * dist[t + 1]
            prev = cur
        a0[lo] = s0
        a1[lo] = s1
    if hi.any():
        ph = p[hi]
        prev = np.zeros(ph.shape[0])
        s0 = np.zeros_like(prev)
        s1 = np.zeros_like(prev)
        for t in range(n - 1, -1, -1):
            cur = (q[t + 1] - (1.0 - ph) * prev) / ph
            s0 += cur * dist[t]
            s1 += cur * dist[t + 1]
            prev = cur
        a0[hi] = s0
        a1[hi] = s1
    return a0, a1


def pmf_dft(p):
    n = p.shape[0]
    omega = 2.0 * np.pi / (n + 1)
    s = np.arange((n + 1) // 2 + 1)
    z = np.exp(1j * omega * s)
    phi = np.prod(1.0 - p[None, :] + p[None, :] * z[:, None], axis=1)
    return np.fft.irfft(np.conj(phi), n + 1)


def pmf_dp(p):
    q = np.zeros(p.shape[0] + 1)
    q[0] = 1.0
    for j, pj in enumerate(p):
        q[1 : j + 2] = q[1 : j + 2] * (1.0 - pj) + q[0 : j + 1] * pj
        q[0] *= 1.0 - pj
    return q
