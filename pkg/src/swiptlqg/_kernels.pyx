# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: Riccati-type fixed-point iterations and the closed-loop
Monte Carlo path simulator.

The pure-Python twin lives in ``_kernels_py``; both expose the same functions
with the same status conventions:

    status  1  converged      (residual <= tol)
            2  diverged       (trace exceeded div_threshold, or non-finite)
            0  iteration budget exhausted
           -1  inner matrix numerically singular
"""

import numpy as np

from libc.math cimport fabs, isfinite, sqrt


cdef int _chol(double* M, int m) nogil:
    """In-place lower Cholesky of a symmetric m x m matrix (row-major)."""
    cdef int i, j, k
    cdef double s
    for j in range(m):
        s = M[j * m + j]
        for k in range(j):
            s -= M[j * m + k] * M[j * m + k]
        if s <= 0.0 or not isfinite(s):
            return -1
        M[j * m + j] = sqrt(s)
        for i in range(j + 1, m):
            s = M[i * m + j]
            for k in range(j):
                s -= M[i * m + k] * M[j * m + k]
            M[i * m + j] = s / M[j * m + j]
    return 0


cdef void _chol_solve(double* L, double* B, int m, int r) nogil:
    """Solve (L L^T) X = B in place; B is m x r row-major, L lower-triangular."""
    cdef int i, k, c
    cdef double s
    for c in range(r):
        for i in range(m):
            s = B[i * r + c]
            for k in range(i):
                s -= L[i * m + k] * B[k * r + c]
            B[i * r + c] = s / L[i * m + i]
        for i in range(m - 1, -1, -1):
            s = B[i * r + c]
            for k in range(i + 1, m):
                s -= L[k * m + i] * B[k * r + c]
            B[i * r + c] = s / L[i * m + i]


cdef void _matmul(const double* A, const double* B, double* out, int n, int k, int m) nogil:
    """out (n x m) = A (n x k) @ B (k x m), all row-major."""
    cdef int i, j, l
    cdef double s
    for i in range(n):
        for j in range(m):
            s = 0.0
            for l in range(k):
                s += A[i * k + l] * B[l * m + j]
            out[i * m + j] = s


cdef void _matmul_nt(const double* A, const double* B, double* out, int n, int k, int m) nogil:
    """out (n x m) = A (n x k) @ B^T where B is m x k."""
    cdef int i, j, l
    cdef double s
    for i in range(n):
        for j in range(m):
            s = 0.0
            for l in range(k):
                s += A[i * k + l] * B[j * k + l]
            out[i * m + j] = s


cdef void _matmul_tn(const double* A, const double* B, double* out, int n, int k, int m) nogil:
    """out (n x m) = A^T @ B where A is k x n, B is k x m."""
    cdef int i, j, l
    cdef double s
    for i in range(n):
        for j in range(m):
            s = 0.0
            for l in range(k):
                s += A[l * n + i] * B[l * m + j]
            out[i * m + j] = s


cdef void _matvec(const double* A, const double* x, double* out, int n, int m) nogil:
    """out (n) = A (n x m) @ x (m)."""
    cdef int i, l
    cdef double s
    for i in range(n):
        s = 0.0
        for l in range(m):
            s += A[i * m + l] * x[l]
        out[i] = s


cdef double _quad_form(const double* M, const double* x, int n) nogil:
    """x' M x for symmetric M."""
    cdef int i, j
    cdef double s = 0.0
    for i in range(n):
        for j in range(n):
            s += x[i] * M[i * n + j] * x[j]
    return s


def mare_fixed_point(const double[:, ::1] F, const double[:, ::1] G, const double[:, ::1] Wt,
                     const double[:, ::1] Ut, double prob, const double[:, ::1] S0,
                     double tol, long max_iter, double div_threshold):
    """Iterate S <- F'SF + Wt - prob * F'SG (G'SG + Ut)^-1 G'SF.

    Returns (S, iterations, status, residual); residual is the max-norm of the
    last increment.
    """
    cdef int n = F.shape[0]
    cdef int m = G.shape[1]
    S_arr = np.array(S0, dtype=np.float64, copy=True)
    cdef double[:, ::1] S = S_arr
    cdef double[:, ::1] SG = np.empty((n, m))
    cdef double[:, ::1] inner = np.empty((m, m))
    cdef double[:, ::1] Z = np.empty((m, n))
    cdef double[:, ::1] T1 = np.empty((n, n))
    cdef double[:, ::1] T2 = np.empty((n, n))
    cdef double[:, ::1] Snew = np.empty((n, n))
    cdef long it = 0
    cdef int i, j, status = 0
    cdef double res = 0.0, tr, d
    with nogil:
        while it < max_iter:
            it += 1
            _matmul(&S[0, 0], &G[0, 0], &SG[0, 0], n, n, m)
            _matmul_tn(&G[0, 0], &SG[0, 0], &inner[0, 0], m, n, m)
            for i in range(m):
                for j in range(m):
                    inner[i, j] += Ut[i, j]
            if _chol(&inner[0, 0], m) != 0:
                status = -1
                break
            # Z = inner^{-1} (SG)^T = inner^{-1} G'S
            for i in range(m):
                for j in range(n):
                    Z[i, j] = SG[j, i]
            _chol_solve(&inner[0, 0], &Z[0, 0], m, n)
            # T1 = S - prob * SG @ Z
            _matmul(&SG[0, 0], &Z[0, 0], &T1[0, 0], n, m, n)
            for i in range(n):
                for j in range(n):
                    T1[i, j] = S[i, j] - prob * T1[i, j]
            # Snew = F' T1 F + Wt, then symmetrize
            _matmul_tn(&F[0, 0], &T1[0, 0], &T2[0, 0], n, n, n)
            _matmul(&T2[0, 0], &F[0, 0], &Snew[0, 0], n, n, n)
            res = 0.0
            tr = 0.0
            for i in range(n):
                for j in range(i, n):
                    d = 0.5 * (Snew[i, j] + Snew[j, i]) + Wt[i, j]
                    Snew[i, j] = d
                    Snew[j, i] = d
            for i in range(n):
                for j in range(n):
                    d = fabs(Snew[i, j] - S[i, j])
                    if d > res:
                        res = d
                    S[i, j] = Snew[i, j]
                tr += S[i, i]
            if not isfinite(tr) or tr > div_threshold:
                status = 2
                break
            if res <= tol:
                status = 1
                break
    return S_arr, int(it), status, float(res)


def scaled_lyapunov_fixed_point(const double[:, ::1] A, const double[:, ::1] Qc,
                                double coeff, const double[:, ::1] P0,
                                double tol, long max_iter, double div_threshold):
    """Iterate P <- coeff * A P A' + Qc.  Returns (P, iterations, status, residual)."""
    cdef int n = A.shape[0]
    P_arr = np.array(P0, dtype=np.float64, copy=True)
    cdef double[:, ::1] P = P_arr
    cdef double[:, ::1] T1 = np.empty((n, n))
    cdef double[:, ::1] Pn = np.empty((n, n))
    cdef long it = 0
    cdef int i, j, status = 0
    cdef double res = 0.0, tr, d
    with nogil:
        while it < max_iter:
            it += 1
            _matmul(&A[0, 0], &P[0, 0], &T1[0, 0], n, n, n)
            _matmul_nt(&T1[0, 0], &A[0, 0], &Pn[0, 0], n, n, n)
            for i in range(n):
                for j in range(i, n):
                    d = coeff * 0.5 * (Pn[i, j] + Pn[j, i]) + Qc[i, j]
                    Pn[i, j] = d
                    Pn[j, i] = d
            res = 0.0
            tr = 0.0
            for i in range(n):
                for j in range(n):
                    d = fabs(Pn[i, j] - P[i, j])
                    if d > res:
                        res = d
                    P[i, j] = Pn[i, j]
                tr += P[i, i]
            if not isfinite(tr) or tr > div_threshold:
                status = 2
                break
            if res <= tol:
                status = 1
                break
    return P_arr, int(it), status, float(res)


def simulate_path(const double[:, ::1] A, const double[:, ::1] B, const double[:, ::1] C,
                  const double[:, ::1] Q, const double[:, ::1] R, const double[:, ::1] W,
                  const double[:, ::1] U, const double[:, ::1] L,
                  const double[::1] x0, const double[::1] xhat0, const double[:, ::1] P0,
                  const double[:, ::1] w, const double[:, ::1] v,
                  const signed char[::1] eta_bits, const signed char[::1] gamma_bits,
                  double overflow):
    """Run one closed-loop trajectory of T steps with a fixed control gain L.

    Per step: u = L xhat; accumulate x'Wx + eta * u'Uu; plant step with packet
    bit eta_k; Kalman predict (TCP acknowledgment of eta_k) and measurement
    update gated by gamma_k.  Terminal cost x_T'W x_T is added at the end.

    Returns (total_cost, diverged, err_sq_sum, trace_p_sum, steps_done).
    A run is flagged diverged when any state component exceeds ``overflow``.
    """
    cdef int n = A.shape[0]
    cdef int p = C.shape[0]
    cdef int q = B.shape[1]
    cdef long T = w.shape[0]
    cdef double[::1] x = np.array(x0, dtype=np.float64, copy=True)
    cdef double[::1] xhat = np.array(xhat0, dtype=np.float64, copy=True)
    cdef double[:, ::1] P = np.array(P0, dtype=np.float64, copy=True)
    cdef double[::1] u = np.empty(q)
    cdef double[::1] xn = np.empty(n)
    cdef double[::1] xpr = np.empty(n)
    cdef double[::1] tmpn = np.empty(n)
    cdef double[::1] innov = np.empty(p)
    cdef double[:, ::1] Ppr = np.empty((n, n))
    cdef double[:, ::1] T1 = np.empty((n, n))
    cdef double[:, ::1] CP = np.empty((p, n))
    cdef double[:, ::1] Sp = np.empty((p, p))
    cdef double[:, ::1] KT = np.empty((p, n))   # K^T = Sp^{-1} C Ppr
    cdef double[:, ::1] KCP = np.empty((n, n))
    cdef long k = 0
    cdef int i, j, diverged = 0
    cdef double cost = 0.0, err_sq = 0.0, tr_p = 0.0, e, d
    with nogil:
        for k in range(T):
            # running statistics
            for i in range(n):
                e = x[i] - xhat[i]
                err_sq += e * e
                tr_p += P[i, i]
            # control and stage cost
            _matvec(&L[0, 0], &xhat[0], &u[0], q, n)
            cost += _quad_form(&W[0, 0], &x[0], n)
            if eta_bits[k]:
                cost += _quad_form(&U[0, 0], &u[0], q)
            # plant step: x_{k+1} = A x + eta B u + w_k
            _matvec(&A[0, 0], &x[0], &xn[0], n, n)
            _matvec(&A[0, 0], &xhat[0], &xpr[0], n, n)
            if eta_bits[k]:
                _matvec(&B[0, 0], &u[0], &tmpn[0], n, q)
                for i in range(n):
                    xn[i] += tmpn[i]
                    xpr[i] += tmpn[i]
            for i in range(n):
                xn[i] += w[k, i]
            # covariance predict: Ppr = A P A' + Q
            _matmul(&A[0, 0], &P[0, 0], &T1[0, 0], n, n, n)
            _matmul_nt(&T1[0, 0], &A[0, 0], &Ppr[0, 0], n, n, n)
            for i in range(n):
                for j in range(i, n):
                    d = 0.5 * (Ppr[i, j] + Ppr[j, i]) + Q[i, j]
                    Ppr[i, j] = d
                    Ppr[j, i] = d
            if gamma_bits[k]:
                # measurement y = C x_{k+1} + v_k, gain K = Ppr C' Sp^{-1}
                _matmul_nt(&C[0, 0], &Ppr[0, 0], &CP[0, 0], p, n, n)
                _matmul_nt(&CP[0, 0], &C[0, 0], &Sp[0, 0], p, n, p)
                for i in range(p):
                    for j in range(p):
                        Sp[i, j] += R[i, j]
                if _chol(&Sp[0, 0], p) != 0:
                    diverged = 2
                    break
                for i in range(p):
                    for j in range(n):
                        KT[i, j] = CP[i, j]
                _chol_solve(&Sp[0, 0], &KT[0, 0], p, n)
                # innovation = y - C xpr = C(xn - xpr) + v
                for i in range(n):
                    tmpn[i] = xn[i] - xpr[i]
                _matvec(&C[0, 0], &tmpn[0], &innov[0], p, n)
                for i in range(p):
                    innov[i] += v[k, i]
                # xhat = xpr + K innov;  P = Ppr - K C Ppr
                for i in range(n):
                    e = 0.0
                    for j in range(p):
                        e += KT[j, i] * innov[j]
                    xhat[i] = xpr[i] + e
                _matmul_tn(&KT[0, 0], &CP[0, 0], &KCP[0, 0], n, p, n)
                for i in range(n):
                    for j in range(i, n):
                        d = Ppr[i, j] - 0.5 * (KCP[i, j] + KCP[j, i])
                        P[i, j] = d
                        P[j, i] = d
            else:
                for i in range(n):
                    xhat[i] = xpr[i]
                    for j in range(n):
                        P[i, j] = Ppr[i, j]
            for i in range(n):
                x[i] = xn[i]
            for i in range(n):
                if fabs(x[i]) > overflow or not isfinite(x[i]):
                    diverged = 1
                    break
            if diverged:
                break
        if not diverged:
            cost += _quad_form(&W[0, 0], &x[0], n)
    return float(cost), int(diverged), float(err_sq), float(tr_p), int(k + 1 if T > 0 else 0)
