"""Numba-jitted implementations of the numeric kernels.

Default backend. Algorithms are kept in lockstep with ``numpy_impl``; the
loops here are written scalar-style so numba compiles them to tight
machine code (these two kernels dominate runtime: every learner fit and
every separability query lands here).
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

CONVERGED = 0
BUDGET_EXHAUSTED = 1
DIVERGED = 2

LP_OK = 0
LP_PIVOT_LIMIT = 1

_ARMIJO = 1e-4
_MIN_STEP = 1e-20


@njit(cache=True)
def _loss_terms(z, y):
    total = 0.0
    for i in range(z.shape[0]):
        zi = z[i]
        if zi > 0.0:
            total += zi + math.log1p(math.exp(-zi)) - y[i] * zi
        else:
            total += math.log1p(math.exp(zi)) - y[i] * zi
    return total


@njit(cache=True)
def logreg_gd(X, y, lam, max_iters, tol):
    n, p = X.shape
    w = np.zeros(p)
    b = 0.0
    step = 1.0

    z = np.empty(n)
    for i in range(n):
        acc = b
        for j in range(p):
            acc += X[i, j] * w[j]
        z[i] = acc
    f = _loss_terms(z, y)

    gw = np.empty(p)
    w_new = np.empty(p)
    z_new = np.empty(n)
    for _ in range(max_iters):
        for j in range(p):
            gw[j] = 0.0
        gb = 0.0
        for i in range(n):
            zi = z[i]
            if zi >= 0.0:
                s = 1.0 / (1.0 + math.exp(-zi))
            else:
                ez = math.exp(zi)
                s = ez / (1.0 + ez)
            diff = s - y[i]
            gb += diff
            for j in range(p):
                gw[j] += diff * X[i, j]
        wnorm = 0.0
        for j in range(p):
            wnorm += w[j] * w[j]
        wnorm = math.sqrt(wnorm)
        if lam > 0.0 and wnorm > 0.0:
            for j in range(p):
                gw[j] += lam * w[j] / wnorm
        gnorm2 = gb * gb
        for j in range(p):
            gnorm2 += gw[j] * gw[j]
        if gnorm2 <= tol * tol:
            return w, b, CONVERGED
        if not (math.isfinite(f) and math.isfinite(gnorm2)):
            return w, b, DIVERGED

        step = min(step * 2.0, 1e6)
        accepted = False
        b_new = b
        f_new = f
        while step >= _MIN_STEP:
            for j in range(p):
                w_new[j] = w[j] - step * gw[j]
            b_new = b - step * gb
            wnn = 0.0
            for j in range(p):
                wnn += w_new[j] * w_new[j]
            for i in range(n):
                acc = b_new
                for j in range(p):
                    acc += X[i, j] * w_new[j]
                z_new[i] = acc
            f_new = _loss_terms(z_new, y) + lam * math.sqrt(wnn)
            if math.isfinite(f_new) and f_new <= f - _ARMIJO * step * gnorm2:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            return w, b, BUDGET_EXHAUSTED
        for j in range(p):
            w[j] = w_new[j]
        b = b_new
        for i in range(n):
            z[i] = z_new[i]
        f = f_new
    return w, b, BUDGET_EXHAUSTED


@njit(cache=True)
def margin_lp(A, tol, max_pivots):
    m, k = A.shape
    ncols = 2 * k + 2 * m
    eps = 1e-10

    tab = np.zeros((m, ncols))
    for i in range(m):
        for j in range(k):
            tab[i, j] = A[i, j]
            tab[i, k + j] = -A[i, j]
        tab[i, 2 * k + i] = -1.0
        tab[i, 2 * k + m + i] = 1.0
    rhs = np.ones(m)
    basis = np.empty(m, dtype=np.int64)
    for i in range(m):
        basis[i] = 2 * k + m + i

    cbar = np.zeros(ncols)
    for j in range(2 * k + m, ncols):
        cbar[j] = 1.0
    for j in range(ncols):
        colsum = 0.0
        for i in range(m):
            colsum += tab[i, j]
        cbar[j] -= colsum
    obj = 0.0
    for i in range(m):
        obj += rhs[i]

    for _ in range(max_pivots):
        pc = -1
        for j in range(ncols):
            if cbar[j] < -eps:
                pc = j
                break
        if pc < 0:
            return LP_OK, obj, _extract_x(basis, rhs, k)

        pr = -1
        best = np.inf
        for i in range(m):
            if tab[i, pc] > eps:
                ratio = rhs[i] / tab[i, pc]
                if ratio < best - eps or (
                    ratio < best + eps and (pr < 0 or basis[i] < basis[pr])
                ):
                    best = ratio
                    pr = i
        if pr < 0:
            break

        piv = tab[pr, pc]
        for j in range(ncols):
            tab[pr, j] /= piv
        rhs[pr] /= piv
        delta = cbar[pc]
        obj += delta * rhs[pr]
        for i in range(m):
            if i == pr:
                continue
            factor = tab[i, pc]
            if factor != 0.0:
                for j in range(ncols):
                    tab[i, j] -= factor * tab[pr, j]
                rhs[i] -= factor * rhs[pr]
        for j in range(ncols):
            cbar[j] -= delta * tab[pr, j]
        for i in range(m):
            tab[i, pc] = 0.0
        tab[pr, pc] = 1.0
        cbar[pc] = 0.0
        basis[pr] = pc

    return LP_PIVOT_LIMIT, obj, _extract_x(basis, rhs, k)


@njit(cache=True)
def _extract_x(basis, rhs, k):
    x = np.zeros(k)
    for i in range(basis.shape[0]):
        col = basis[i]
        if col < k:
            x[col] += rhs[i]
        elif col < 2 * k:
            x[col - k] -= rhs[i]
    return x
