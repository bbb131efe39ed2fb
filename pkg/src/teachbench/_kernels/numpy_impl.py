"""Pure-numpy implementations of the numeric kernels.

Selected via ``TEACHBENCH_KERNELS=numpy`` (or automatically when numba is
unavailable). Mirrors ``numba_impl`` function-for-function; keep the two
files' algorithms in lockstep.
"""

from __future__ import annotations

import numpy as np

# logreg_gd status codes
CONVERGED = 0
BUDGET_EXHAUSTED = 1
DIVERGED = 2

# margin_lp status codes
LP_OK = 0
LP_PIVOT_LIMIT = 1

_ARMIJO = 1e-4
_MIN_STEP = 1e-20


def _loss_terms(z: np.ndarray, y: np.ndarray) -> float:
    # softplus(z) - y*z, evaluated stably
    return float(np.sum(np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z))) - y * z))


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0.0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def logreg_gd(
    X: np.ndarray,
    y: np.ndarray,
    lam: float,
    max_iters: int,
    tol: float,
) -> tuple[np.ndarray, float, int]:
    """Full-batch gradient descent with backtracking line search.

    Minimizes sum_i softplus(z_i) - y_i z_i + lam*||w||_2 with z = X@w + b.
    The penalty subgradient is taken as 0 at w = 0. Returns (w, b, status).
    """
    n, p = X.shape
    w = np.zeros(p)
    b = 0.0
    step = 1.0

    z = X @ w + b
    f = _loss_terms(z, y)  # ||w|| = 0 at start
    for _ in range(max_iters):
        s = _sigmoid(z)
        gw = X.T @ (s - y)
        gb = float(np.sum(s - y))
        wnorm = float(np.linalg.norm(w))
        if lam > 0.0 and wnorm > 0.0:
            gw = gw + lam * w / wnorm
        gnorm2 = float(gw @ gw) + gb * gb
        if gnorm2 <= tol * tol:
            return w, b, CONVERGED
        if not np.isfinite(f) or not np.isfinite(gnorm2):
            return w, b, DIVERGED

        step = min(step * 2.0, 1e6)
        accepted = False
        while step >= _MIN_STEP:
            w_new = w - step * gw
            b_new = b - step * gb
            z_new = X @ w_new + b_new
            f_new = _loss_terms(z_new, y) + lam * float(np.linalg.norm(w_new))
            if np.isfinite(f_new) and f_new <= f - _ARMIJO * step * gnorm2:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            return w, b, BUDGET_EXHAUSTED
        w, b, z, f = w_new, b_new, z_new, f_new
    return w, b, BUDGET_EXHAUSTED


def margin_lp(
    A: np.ndarray,
    tol: float,
    max_pivots: int,
) -> tuple[int, float, np.ndarray]:
    """Phase-1 simplex for the margin feasibility system A @ x >= 1.

    Minimizes the total constraint violation sum(s) subject to
    A@x + s - r = 1, s >= 0, r >= 0, with x free (split into u - v).
    The optimum is 0 exactly when some x satisfies every margin
    constraint. Bland's rule is used throughout, so the iteration
    terminates without cycling. Returns (status, objective, x).
    """
    m, k = A.shape
    ncols = 2 * k + 2 * m
    eps = 1e-10

    tab = np.zeros((m, ncols))
    tab[:, :k] = A
    tab[:, k : 2 * k] = -A
    for i in range(m):
        tab[i, 2 * k + i] = -1.0  # surplus r_i
        tab[i, 2 * k + m + i] = 1.0  # violation s_i
    rhs = np.ones(m)
    basis = np.arange(2 * k + m, 2 * k + 2 * m)

    cbar = np.zeros(ncols)
    cbar[2 * k + m :] = 1.0
    cbar -= tab.sum(axis=0)  # c_B = 1 on the initial s basis
    obj = float(rhs.sum())

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
            # cannot happen: the objective is bounded below by zero
            break

        piv = tab[pr, pc]
        tab[pr] /= piv
        rhs[pr] /= piv
        delta = cbar[pc]
        obj += delta * rhs[pr]
        col = tab[:, pc].copy()
        col[pr] = 0.0
        tab -= np.outer(col, tab[pr])
        rhs -= col * rhs[pr]
        cbar -= delta * tab[pr]
        tab[:, pc] = 0.0
        tab[pr, pc] = 1.0
        cbar[pc] = 0.0
        basis[pr] = pc

    return LP_PIVOT_LIMIT, obj, _extract_x(basis, rhs, k)


def _extract_x(basis: np.ndarray, rhs: np.ndarray, k: int) -> np.ndarray:
    x = np.zeros(k)
    for i in range(basis.shape[0]):
        col = basis[i]
        if col < k:
            x[col] += rhs[i]
        elif col < 2 * k:
            x[col - k] -= rhs[i]
    return x
