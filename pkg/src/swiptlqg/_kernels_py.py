"""Pure-Python fallback for the compiled kernels in ``_kernels``.

Same functions, same status conventions (see _kernels.pyx); used when the
extension is not built or when SWIPTLQG_PURE_PYTHON is set.
"""

from __future__ import annotations

import numpy as np

STATUS_MAXITER = 0
STATUS_CONVERGED = 1
STATUS_DIVERGED = 2
STATUS_SINGULAR = -1


def mare_fixed_point(F, G, Wt, Ut, prob, S0, tol, max_iter, div_threshold):
    """Iterate S <- F'SF + Wt - prob * F'SG (G'SG + Ut)^-1 G'SF."""
    F = np.asarray(F, dtype=float)
    G = np.asarray(G, dtype=float)
    Wt = np.asarray(Wt, dtype=float)
    Ut = np.asarray(Ut, dtype=float)
    S = np.array(S0, dtype=float, copy=True)
    FT = F.T
    res = np.inf
    it = 0
    while it < max_iter:
        it += 1
        SG = S @ G
        inner = G.T @ SG + Ut
        try:
            Z = np.linalg.solve(inner, SG.T)
        except np.linalg.LinAlgError:
            return S, it, STATUS_SINGULAR, float(res)
        if not np.all(np.isfinite(Z)):
            return S, it, STATUS_SINGULAR, float(res)
        T1 = S - prob * (SG @ Z)
        Snew = FT @ T1 @ F
        Snew = 0.5 * (Snew + Snew.T) + Wt
        res = np.max(np.abs(Snew - S))
        S = Snew
        tr = np.trace(S)
        if not np.isfinite(tr) or tr > div_threshold:
            return S, it, STATUS_DIVERGED, float(res)
        if res <= tol:
            return S, it, STATUS_CONVERGED, float(res)
    return S, it, STATUS_MAXITER, float(res)


def scaled_lyapunov_fixed_point(A, Qc, coeff, P0, tol, max_iter, div_threshold):
    """Iterate P <- coeff * A P A' + Qc."""
    A = np.asarray(A, dtype=float)
    Qc = np.asarray(Qc, dtype=float)
    P = np.array(P0, dtype=float, copy=True)
    res = np.inf
    it = 0
    while it < max_iter:
        it += 1
        Pn = coeff * (A @ P @ A.T)
        Pn = 0.5 * (Pn + Pn.T) + Qc
        res = np.max(np.abs(Pn - P))
        P = Pn
        tr = np.trace(P)
        if not np.isfinite(tr) or tr > div_threshold:
            return P, it, STATUS_DIVERGED, float(res)
        if res <= tol:
            return P, it, STATUS_CONVERGED, float(res)
    return P, it, STATUS_MAXITER, float(res)


def simulate_path(A, B, C, Q, R, W, U, L, x0, xhat0, P0, w, v,
                  eta_bits, gamma_bits, overflow):
    """One closed-loop trajectory; see the compiled twin for the contract."""
    A = np.asarray(A, dtype=float)
    T = w.shape[0]
    x = np.array(x0, dtype=float, copy=True)
    xhat = np.array(xhat0, dtype=float, copy=True)
    P = np.array(P0, dtype=float, copy=True)
    cost = 0.0
    err_sq = 0.0
    tr_p = 0.0
    diverged = 0
    steps = 0
    for k in range(T):
        e = x - xhat
        err_sq += float(e @ e)
        tr_p += float(np.trace(P))
        u = L @ xhat
        cost += float(x @ W @ x)
        if eta_bits[k]:
            cost += float(u @ U @ u)
        bu = B @ u if eta_bits[k] else 0.0
        xn = A @ x + bu + w[k]
        xpr = A @ xhat + bu
        Ppr = A @ P @ A.T
        Ppr = 0.5 * (Ppr + Ppr.T) + Q
        if gamma_bits[k]:
            CP = C @ Ppr
            Sp = CP @ C.T + R
            try:
                KT = np.linalg.solve(Sp, CP)   # K^T
            except np.linalg.LinAlgError:
                diverged = 2
                steps = k + 1
                break
            innov = C @ (xn - xpr) + v[k]
            xhat = xpr + KT.T @ innov
            KCP = KT.T @ CP
            P = Ppr - 0.5 * (KCP + KCP.T)
        else:
            xhat = xpr
            P = Ppr
        x = xn
        steps = k + 1
        if not np.all(np.isfinite(x)) or np.max(np.abs(x)) > overflow:
            diverged = 1
            break
    if not diverged:
        cost += float(x @ W @ x)
    return float(cost), int(diverged), float(err_sq), float(tr_p), steps
