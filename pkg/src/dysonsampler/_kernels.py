"""Compiled inner loops shared by the Coulomb and stepping code."""
import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def coulomb_sum(x, out):
    # each pair is visited once and applied to both ends with opposite signs
    n = x.shape[0]
    for k in range(n):
        out[k] = 0.0
    for k in range(n):
        xk = x[k]
        acc = 0.0
        for j in range(k + 1, n):
            inv = 1.0 / (xk - x[j])
            acc += inv
            out[j] -= inv
        out[k] += acc


@njit(cache=True, nogil=True)
def _insertion_sort(a):
    # rows are nearly sorted after a small step, so this is close to linear
    for i in range(1, a.shape[0]):
        v = a[i]
        j = i - 1
        while j >= 0 and a[j] > v:
            a[j + 1] = a[j]
            j -= 1
        a[j + 1] = v


@njit(cache=True, nogil=True)
def tamed_euler_batch(lam, noise, q, g, dt, coulomb_scale, noise_scale, out, status):
    """One tamed step for every row of ``lam``; rows of ``out`` come back sorted.

    ``status[r]`` is 0 on success, 1 if row r produced a non-finite
    coordinate and 2 if two coordinates of row r coincide exactly.
    """
    m, n = lam.shape
    s = np.empty(n)
    for r in range(m):
        coulomb_sum(lam[r], s)
        for k in range(n):
            xk = lam[r, k]
            dv = q * xk + g * xk * xk * xk
            drift = coulomb_scale * s[k] - dv / (2.0 + dt * abs(dv))
            out[r, k] = xk + drift * dt + noise_scale * noise[r, k]
        _insertion_sort(out[r])
        status[r] = 0
        for k in range(n):
            if not np.isfinite(out[r, k]):
                status[r] = 1
                break
        if status[r] == 0:
            for k in range(n - 1):
                if out[r, k] == out[r, k + 1]:
                    status[r] = 2
                    break


@njit(cache=True)
def tree_moments(x, bounds, nlev, order):
    """Centres, half-widths and power moments of every node of the index tree.

    Nodes use 1-based heap numbering: node ``i`` at level ``l`` covers leaves
    ``[(i - 2**l) * 2**(nlev - l), ...)`` and has children ``2i`` and ``2i + 1``.
    """
    nnode = 2 << nlev
    center = np.zeros(nnode)
    radius = np.zeros(nnode)
    mom = np.zeros((nnode, order + 1))
    for lev in range(nlev + 1):
        shift = nlev - lev
        for c in range(1 << lev):
            node = (1 << lev) + c
            a = bounds[c << shift]
            b = bounds[(c + 1) << shift]
            lo = x[a]
            hi = x[b - 1]
            cen = 0.5 * (lo + hi)
            center[node] = cen
            radius[node] = 0.5 * (hi - lo)
            for j in range(a, b):
                rel = x[j] - cen
                pw = 1.0
                for k in range(order + 1):
                    mom[node, k] += pw
                    pw *= rel
    return center, radius, mom


@njit(cache=True, nogil=True)
def tree_drift(x, bounds, nlev, center, radius, mom, theta, out):
    n = x.shape[0]
    order = mom.shape[1] - 1
    nleaf = 1 << nlev
    stack = np.empty(2 * (nlev + 2), dtype=np.int64)
    for t in range(n):
        xt = x[t]
        s = 0.0
        top = 0
        stack[0] = 1
        while top >= 0:
            node = stack[top]
            top -= 1
            d = xt - center[node]
            if radius[node] < theta * abs(d):
                u = 1.0 / d
                acc = mom[node, order]
                for k in range(order - 1, -1, -1):
                    acc = mom[node, k] + u * acc
                s += u * acc
            elif node >= nleaf:
                leaf = node - nleaf
                for j in range(bounds[leaf], bounds[leaf + 1]):
                    if j != t:
                        s += 1.0 / (xt - x[j])
            else:
                top += 1
                stack[top] = 2 * node + 1
                top += 1
                stack[top] = 2 * node
        out[t] = s
