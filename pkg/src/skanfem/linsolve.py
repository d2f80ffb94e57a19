"""Direct tridiagonal and restarted GMRES/SSOR solvers for :class:`BandedSystem`."""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np
from scipy.linalg import solve_triangular

from .assembly import BandedSystem

__all__ = [
    "ZeroPivotError",
    "KrylovNotConverged",
    "KrylovConfig",
    "solve_direct",
    "ssor_apply",
    "solve_krylov",
]


class ZeroPivotError(np.linalg.LinAlgError):
    """The tridiagonal elimination met an exactly zero pivot."""


class KrylovNotConverged(RuntimeError):
    def __init__(self, iterations: int, relres: float, tol: float):
        super().__init__(
            f"GMRES did not reach relative residual {tol:g} in {iterations} iterations "
            f"(last {relres:.3e})"
        )
        self.iterations = iterations
        self.relres = relres
        self.tol = tol


@dataclass(frozen=True)
class KrylovConfig:
    tol: float = 1e-13
    max_iters: int = 20000
    restart: int = 30
    relaxation: float = 1.0

    def __post_init__(self):
        if not self.tol > 0.0:
            raise ValueError("tol must be positive")
        if self.restart < 1:
            raise ValueError("restart must be at least 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if not 0.0 < self.relaxation < 2.0:
            raise ValueError("relaxation must lie in (0, 2)")


@numba.njit(cache=True)
def _gtsv(dl, d, du, b):
    # Gaussian elimination with partial pivoting on a tridiagonal matrix (as in
    # LAPACK dgtsv).  dl[i] = A[i+1, i], du[i] = A[i, i+1].  Returns (x, ok).
    n = d.size
    du2 = np.zeros(n)
    for i in range(n - 1):
        if abs(d[i]) >= abs(dl[i]):
            if d[i] == 0.0:
                return b, False
            fact = dl[i] / d[i]
            d[i + 1] -= fact * du[i]
            b[i + 1] -= fact * b[i]
        else:
            fact = d[i] / dl[i]
            d[i] = dl[i]
            temp = d[i + 1]
            d[i + 1] = du[i] - fact * temp
            if i < n - 2:
                du2[i] = du[i + 1]
                du[i + 1] = -fact * du2[i]
            du[i] = temp
            temp = b[i]
            b[i] = b[i + 1]
            b[i + 1] = temp - fact * b[i + 1]
    if d[n - 1] == 0.0:
        return b, False
    x = np.empty(n)
    x[n - 1] = b[n - 1] / d[n - 1]
    if n > 1:
        x[n - 2] = (b[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2]
    for i in range(n - 3, -1, -1):
        x[i] = (b[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i]
    return x, True


def solve_direct(system: BandedSystem) -> np.ndarray:
    """Solve the tridiagonal system by elimination and back substitution.

    Rows are interchanged only when the subdiagonal entry dominates the pivot,
    so diagonally dominant systems are solved by plain Thomas elimination.
    """
    n = system.n
    if n == 1:
        if system.diag[0] == 0.0:
            raise ZeroPivotError("zero pivot in 1x1 system")
        return system.rhs / system.diag
    dl = system.lower[1:].copy()
    x, ok = _gtsv(dl, system.diag.copy(), system.upper[:-1].copy(), system.rhs.copy())
    if not ok:
        raise ZeroPivotError("zero pivot: tridiagonal matrix is singular")
    return x


@numba.njit(cache=True)
def _ssor(lower, diag, upper, r, omega):
    # M = (D + wL) D^-1 (D + wU) / (w (2 - w)); returns M^-1 r
    n = diag.size
    y = np.empty(n)
    scale = omega * (2.0 - omega)
    y[0] = scale * r[0] / diag[0]
    for i in range(1, n):
        y[i] = (scale * r[i] - omega * lower[i] * y[i - 1]) / diag[i]
    for i in range(n):
        y[i] *= diag[i]
    x = np.empty(n)
    x[n - 1] = y[n - 1] / diag[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = (y[i] - omega * upper[i] * x[i + 1]) / diag[i]
    return x


def ssor_apply(system: BandedSystem, r: np.ndarray, omega: float = 1.0) -> np.ndarray:
    """Apply the inverse of the SSOR preconditioner of ``system`` to ``r``."""
    if np.any(system.diag == 0.0):
        raise ZeroPivotError("SSOR needs a nonzero diagonal")
    return _ssor(system.lower, system.diag, system.upper, np.asarray(r, dtype=float), omega)


def solve_krylov(system: BandedSystem, x0=None, cfg: KrylovConfig = KrylovConfig(),
                 history: list | None = None):
    """Left-preconditioned restarted GMRES with an SSOR preconditioner.

    Iterates until ``||M^-1 (b - A x)|| <= tol * ||M^-1 b||``.  Returns
    ``(x, iterations)`` where iterations counts Arnoldi steps.  If ``history`` is
    given, the preconditioned residual norm at the start of every restart cycle
    and at exit is appended to it.
    """
    n = system.n
    b = system.rhs
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    if x.shape != (n,):
        raise ValueError(f"initial guess has shape {x.shape}, expected ({n},)")
    omega = cfg.relaxation

    def prec(v):
        return ssor_apply(system, v, omega)

    bnorm = np.linalg.norm(prec(b))
    if bnorm == 0.0:
        if history is not None:
            history.append(0.0)
        return np.zeros(n), 0
    target = cfg.tol * bnorm

    m = min(cfg.restart, n)
    V = np.empty((m + 1, n))
    H = np.zeros((m + 1, m))
    cs = np.zeros(m)
    sn = np.zeros(m)
    g = np.zeros(m + 1)
    iters = 0
    while True:
        r = prec(b - system.matvec(x))
        rnorm = np.linalg.norm(r)
        if history is not None:
            history.append(rnorm / bnorm)
        if rnorm <= target:
            return x, iters
        if iters >= cfg.max_iters:
            raise KrylovNotConverged(iters, rnorm / bnorm, cfg.tol)
        V[0] = r / rnorm
        H[:] = 0.0
        g[:] = 0.0
        g[0] = rnorm
        k = 0
        for k in range(m):
            w = prec(system.matvec(V[k]))
            # classical Gram-Schmidt, applied twice for stability
            basis = V[: k + 1]
            c = basis @ w
            w -= c @ basis
            c2 = basis @ w
            w -= c2 @ basis
            H[: k + 1, k] = c + c2
            hnext = np.linalg.norm(w)
            H[k + 1, k] = hnext
            for i in range(k):
                t = cs[i] * H[i, k] + sn[i] * H[i + 1, k]
                H[i + 1, k] = -sn[i] * H[i, k] + cs[i] * H[i + 1, k]
                H[i, k] = t
            denom = np.hypot(H[k, k], hnext)
            if denom == 0.0:
                raise np.linalg.LinAlgError("GMRES breakdown: singular preconditioned matrix")
            cs[k] = H[k, k] / denom
            sn[k] = hnext / denom
            H[k, k] = denom
            H[k + 1, k] = 0.0
            g[k + 1] = -sn[k] * g[k]
            g[k] = cs[k] * g[k]
            iters += 1
            # hnext == 0 is a happy breakdown: the Krylov space is invariant
            if abs(g[k + 1]) <= target or iters >= cfg.max_iters or hnext == 0.0:
                break
            V[k + 1] = w / hnext
        kk = k + 1
        y = solve_triangular(H[:kk, :kk], g[:kk])
        x = x + V[:kk].T @ y
