"""Plant description and validation.

The theorems on cost boundedness require an unstable plant with the usual
controllability/observability assumptions.  Validation checks all of them,
but only warns (``AssumptionViolated``) by default so that the Monte Carlo
simulator stays usable for stable sanity-check plants.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

SYMMETRY_TOL = 1e-9
RANK_SV_RTOL = 1e-8
SQRT_EIG_TOL = 1e-10


class DimensionMismatch(ValueError):
    pass


class NotPositiveDefinite(ValueError):
    pass


class NotPSD(ValueError):
    pass


class AssumptionViolated(UserWarning):
    """A theorem hypothesis (stability/controllability/observability) fails."""


@dataclass(frozen=True)
class PlantModel:
    """Validated LTI plant with quadratic cost weights.

    x_{k+1} = A x_k + B u^a_k + w_k,  y_k = C x_k + v_k,
    w ~ N(0, Q), v ~ N(0, R), x_0 ~ N(x0_mean, P0),
    stage cost x'Wx + u'Uu.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    Q: np.ndarray
    R: np.ndarray
    W: np.ndarray
    U: np.ndarray
    x0_mean: np.ndarray
    P0: np.ndarray
    controllable: bool
    observable_w: bool       # (A, W^{1/2})
    controllable_q: bool     # (A, Q^{1/2})
    observable: bool         # (A, C)
    unstable: bool

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def p(self) -> int:
        return self.C.shape[0]

    @property
    def q(self) -> int:
        return self.B.shape[1]


@dataclass(frozen=True)
class HorizonSpec:
    """Finite horizon length, or None for the infinite-horizon problem.

    Per-step weights are the constant (W, U) of the plant; time-varying
    weights are unsupported.
    """

    N: int | None

    def __post_init__(self):
        if self.N is not None and self.N < 1:
            raise ValueError(f"horizon must be >= 1, got {self.N}")


def _as_matrix(x, name: str) -> np.ndarray:
    M = np.atleast_2d(np.asarray(x, dtype=float))
    if M.ndim != 2:
        raise DimensionMismatch(f"{name} must be a matrix, got ndim={M.ndim}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} contains non-finite entries")
    return M


def _symmetrized(M: np.ndarray, name: str) -> np.ndarray:
    drift = np.max(np.abs(M - M.T)) if M.size else 0.0
    if drift > SYMMETRY_TOL:
        raise ValueError(f"{name} is not symmetric (max asymmetry {drift:.3g})")
    return 0.5 * (M + M.T)


def _check_psd(M: np.ndarray, name: str) -> np.ndarray:
    M = _symmetrized(M, name)
    eigs = np.linalg.eigvalsh(M)
    if eigs.size and eigs.min() < -SYMMETRY_TOL:
        raise NotPSD(f"{name} has negative eigenvalue {eigs.min():.3g}")
    return M


def _check_pd(M: np.ndarray, name: str) -> np.ndarray:
    M = _symmetrized(M, name)
    eigs = np.linalg.eigvalsh(M)
    if eigs.size == 0 or eigs.min() <= 0.0:
        raise NotPositiveDefinite(
            f"{name} must be positive definite (min eigenvalue "
            f"{eigs.min() if eigs.size else 'n/a'})"
        )
    return M


def psd_sqrt(M: np.ndarray) -> np.ndarray:
    """Symmetric PSD square root, clamping tiny negative eigenvalues."""
    vals, vecs = np.linalg.eigh(0.5 * (M + M.T))
    vals = np.where(vals < SQRT_EIG_TOL, np.maximum(vals, 0.0), vals)
    return (vecs * np.sqrt(vals)) @ vecs.T


def _staircase_rank_full(A: np.ndarray, B: np.ndarray) -> bool:
    """Rank test on the Kalman controllability matrix [B AB ... A^{n-1}B]."""
    n = A.shape[0]
    blocks = [B]
    for _ in range(n - 1):
        blocks.append(A @ blocks[-1])
    K = np.hstack(blocks)
    sv = np.linalg.svd(K, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return False
    return int(np.sum(sv > RANK_SV_RTOL * sv[0])) == n


def is_controllable(A: np.ndarray, B: np.ndarray) -> bool:
    return _staircase_rank_full(A, B)


def is_observable(A: np.ndarray, C: np.ndarray) -> bool:
    return _staircase_rank_full(A.T, C.T)


def unstable_eigen_products(A: np.ndarray) -> tuple[float, float]:
    """(max_i |lam_i^u|^2, prod_i |lam_i^u|^2) over eigenvalues with |lam|>1.

    Returns (1.0, 1.0) for a stable A, so the derived critical-probability
    closed forms 1 - 1/x evaluate to 0.
    """
    A = _as_matrix(A, "A")
    mods_sq = np.abs(np.linalg.eigvals(A)) ** 2
    unstable = mods_sq[mods_sq > 1.0]
    if unstable.size == 0:
        return 1.0, 1.0
    return float(unstable.max()), float(np.prod(unstable))


def validate_plant(
    A, B=None, C=None, Q=None, R=None, W=None, U=None,
    x0_mean=None, P0=None, permissive: bool = True,
) -> PlantModel:
    """Build a validated PlantModel.

    Scalars and nested lists are accepted and promoted to matrices.  Raises
    DimensionMismatch / NotPositiveDefinite / NotPSD on structural problems.
    Theorem-hypothesis violations (stability, controllability, observability)
    warn with AssumptionViolated when ``permissive`` (default), else raise.
    Passing an already-validated PlantModel revalidates it and returns an
    identical model (idempotence).
    """
    if isinstance(A, PlantModel):
        m = A
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", AssumptionViolated)
            return validate_plant(
                m.A, m.B, m.C, m.Q, m.R, m.W, m.U, m.x0_mean, m.P0,
                permissive=permissive,
            )
    if any(arg is None for arg in (B, C, Q, R, W, U)):
        raise DimensionMismatch("B, C, Q, R, W, U are all required")
    A = _as_matrix(A, "A")
    n = A.shape[0]
    if A.shape != (n, n):
        raise DimensionMismatch(f"A must be square, got {A.shape}")
    B = _as_matrix(B, "B")
    if B.shape[0] != n:
        raise DimensionMismatch(f"B must have {n} rows, got {B.shape}")
    C = _as_matrix(C, "C")
    if C.shape[1] != n:
        raise DimensionMismatch(f"C must have {n} columns, got {C.shape}")
    p, q = C.shape[0], B.shape[1]

    Q = _as_matrix(Q, "Q")
    if Q.shape != (n, n):
        raise DimensionMismatch(f"Q must be {n}x{n}, got {Q.shape}")
    R = _as_matrix(R, "R")
    if R.shape != (p, p):
        raise DimensionMismatch(f"R must be {p}x{p}, got {R.shape}")
    W = _as_matrix(W, "W")
    if W.shape != (n, n):
        raise DimensionMismatch(f"W must be {n}x{n}, got {W.shape}")
    U = _as_matrix(U, "U")
    if U.shape != (q, q):
        raise DimensionMismatch(f"U must be {q}x{q}, got {U.shape}")

    x0_mean = (
        np.zeros(n) if x0_mean is None else np.asarray(x0_mean, dtype=float).reshape(-1)
    )
    if x0_mean.shape != (n,):
        raise DimensionMismatch(f"x0_mean must have length {n}, got {x0_mean.shape}")
    P0 = np.eye(n) if P0 is None else _as_matrix(P0, "P0")
    if P0.shape != (n, n):
        raise DimensionMismatch(f"P0 must be {n}x{n}, got {P0.shape}")

    Q = _check_psd(Q, "Q")
    W = _check_psd(W, "W")
    P0 = _check_psd(P0, "P0")
    R = _check_pd(R, "R")
    U = _check_pd(U, "U")

    flags = {
        "controllable": is_controllable(A, B),
        "observable_w": is_observable(A, psd_sqrt(W)),
        "controllable_q": is_controllable(A, psd_sqrt(Q)),
        "observable": is_observable(A, C),
        "unstable": bool(np.max(np.abs(np.linalg.eigvals(A))) > 1.0),
    }
    failed = [name for name, ok in flags.items() if not ok]
    if failed:
        msg = f"theorem assumptions violated: {', '.join(failed)}"
        if permissive:
            warnings.warn(msg, AssumptionViolated, stacklevel=2)
        else:
            raise ValueError(msg)

    for arr in (A, B, C, Q, R, W, U, x0_mean, P0):
        arr.setflags(write=False)
    return PlantModel(A=A, B=B, C=C, Q=Q, R=R, W=W, U=U, x0_mean=x0_mean, P0=P0, **flags)
