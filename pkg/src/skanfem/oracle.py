"""Shooting-method reference solution of the Falkner-Skan equation.

The third-order equation is integrated as the first-order system

    f' = u,   u' = w,   w' = -(f w + beta (1 - u^2))

from the wall with a trial curvature w(0) = alpha, using fixed-step classical
Runge-Kutta.  alpha is root-found so that u(eta_inf) hits the far-field value.
Nothing here is shared with the finite element path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .model import FlowParams, bc_values

__all__ = [
    "IvpState",
    "ShootingResult",
    "BlowUpError",
    "ShootingError",
    "integrate_ivp",
    "shooting_mismatch",
    "solve_shooting",
]

BLOWUP = 1e8

# kernel status codes
_END, _BLOWUP, _OVERSHOOT, _TURNBACK = 0, 1, 2, 3


class BlowUpError(ArithmeticError):
    def __init__(self, eta: float, alpha: float):
        super().__init__(f"IVP solution blew up at eta={eta:.6g} (alpha={alpha:.12g})")
        self.eta = eta
        self.alpha = alpha


class ShootingError(RuntimeError):
    pass


@dataclass(frozen=True)
class IvpState:
    f: float
    u: float
    w: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.f, self.u, self.w)):
            raise ValueError(f"non-finite IVP state {self}")


@numba.njit(cache=True)
def _rhs(beta, f, u, w):
    return u, w, -(f * w + beta * (1.0 - u * u))


@numba.njit(cache=True)
def _integrate(beta, u0, alpha, step, nsteps, target, events, keep):
    # Returns (state, eta_stop, status, trajectory).  With events on, stops once
    # u is off target by more than half the wall-to-far-field gap: either past
    # it, or short of it while heading away.
    f, u, w = 0.0, u0, alpha
    sgn = 1.0 if target >= u0 else -1.0
    margin = 0.5 * abs(target - u0)
    ntraj = nsteps + 1 if keep else 1
    traj = np.empty((ntraj, 3))
    traj[0, 0], traj[0, 1], traj[0, 2] = f, u, w
    h = step
    for i in range(nsteps):
        k1f, k1u, k1w = _rhs(beta, f, u, w)
        k2f, k2u, k2w = _rhs(beta, f + 0.5 * h * k1f, u + 0.5 * h * k1u, w + 0.5 * h * k1w)
        k3f, k3u, k3w = _rhs(beta, f + 0.5 * h * k2f, u + 0.5 * h * k2u, w + 0.5 * h * k2w)
        k4f, k4u, k4w = _rhs(beta, f + h * k3f, u + h * k3u, w + h * k3w)
        f += h / 6.0 * (k1f + 2.0 * k2f + 2.0 * k3f + k4f)
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
        if keep:
            traj[i + 1, 0], traj[i + 1, 1], traj[i + 1, 2] = f, u, w
        eta = (i + 1) * h
        if not (abs(f) <= BLOWUP and abs(u) <= BLOWUP and abs(w) <= BLOWUP):
            return f, u, w, eta, _BLOWUP, traj
        if events and i + 1 < nsteps:
            if sgn * (u - target) > margin:
                return f, u, w, eta, _OVERSHOOT, traj
            if sgn * w < 0.0 and sgn * (u - target) < -margin:
                return f, u, w, eta, _TURNBACK, traj
    return f, u, w, nsteps * h, _END, traj


def _nsteps(eta_inf: float, step: float) -> int:
    if not step > 0.0:
        raise ValueError("step must be positive")
    n = eta_inf / step
    nr = round(n)
    if nr < 1 or abs(n - nr) > 1e-9 * max(1.0, n):
        raise ValueError(f"eta_inf={eta_inf} is not an integer multiple of step={step}")
    return int(nr)


def integrate_ivp(params: FlowParams, alpha: float, step: float = 1e-3) -> IvpState:
    """State (f, u, f'') at eta_inf starting from (0, u(0), alpha) at the wall."""
    n = _nsteps(params.eta_inf, step)
    u0 = bc_values(params).u_at_0
    f, u, w, eta, status, _ = _integrate(params.beta, u0, float(alpha), step, n, 0.0, False, False)
    if status == _BLOWUP:
        raise BlowUpError(eta, alpha)
    return IvpState(f, u, w)


def shooting_mismatch(params: FlowParams, alpha: float, step: float = 1e-3) -> float:
    """Signed far-field mismatch, increasing with alpha through the root.

    Trajectories that run well past the far-field value, or turn back well
    short of it, are cut short there; their mismatch is u - u_inf at the cut,
    which has the right sign and avoids the blow-up that follows.
    """
    bc = bc_values(params)
    n = _nsteps(params.eta_inf, step)
    f, u, w, eta, status, _ = _integrate(params.beta, bc.u_at_0, float(alpha), step, n,
                                         bc.u_at_inf, True, False)
    return u - bc.u_at_inf


@dataclass(frozen=True, eq=False)
class ShootingResult:
    alpha: float
    residual: float
    iterations: int
    profile: np.ndarray  # columns eta, f, u, w

    def interpolate(self, eta):
        """(f, u, w) at arbitrary eta by cubic Hermite interpolation of the profile."""
        p = self.profile
        fi = CubicHermiteSpline(p[:, 0], p[:, 1], p[:, 2])
        ui = CubicHermiteSpline(p[:, 0], p[:, 2], p[:, 3])
        eta = np.asarray(eta, dtype=float)
        return fi(eta), ui(eta), ui.derivative()(eta)


def _find_bracket(g, lo, hi):
    glo, ghi = g(lo), g(hi)
    return (glo, ghi) if glo < 0.0 < ghi else None


def solve_shooting(params: FlowParams, tol: float = 1e-10, step: float = 1e-3,
                   bisect_width: float = 1e-6, max_iters: int = 200) -> ShootingResult:
    """Root-find alpha = f''(0) by bisection on [0, 5] (widened once to [-2, 10]), then secant."""
    bc = bc_values(params)
    n = _nsteps(params.eta_inf, step)
    count = 0

    def g(a):
        nonlocal count
        count += 1
        return shooting_mismatch(params, a, step)

    lo, hi = 0.0, 5.0
    br = _find_bracket(g, lo, hi)
    if br is None:
        lo, hi = -2.0, 10.0
        br = _find_bracket(g, lo, hi)
        if br is None:
            raise ShootingError(
                f"no sign change of the far-field mismatch on [0, 5] or [-2, 10] "
                f"(beta={params.beta}, bc={params.bc_variant.value}; "
                f"g(-2)={g(-2.0):.3e}, g(10)={g(10.0):.3e})"
            )
    glo, ghi = br

    while hi - lo > bisect_width and count < max_iters:
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if gm == 0.0:
            lo = hi = mid
            glo = ghi = 0.0
            break
        if gm < 0.0:
            lo, glo = mid, gm
        else:
            hi, ghi = mid, gm

    # secant polish, kept inside the bracket
    if abs(glo) <= abs(ghi):
        a, ga = lo, glo
    else:
        a, ga = hi, ghi
    while abs(ga) > tol and count < max_iters:
        if ghi != glo:
            a_new = hi - ghi * (hi - lo) / (ghi - glo)
        else:
            a_new = 0.5 * (lo + hi)
        if not lo < a_new < hi:
            a_new = 0.5 * (lo + hi)
        ga_new = g(a_new)
        if ga_new < 0.0:
            lo, glo = a_new, ga_new
        else:
            hi, ghi = a_new, ga_new
        a, ga = a_new, ga_new
        if hi - lo < 1e-15 * max(1.0, abs(a)):
            break

    if abs(ga) > tol:
        raise ShootingError(
            f"far-field mismatch {ga:.3e} above tolerance {tol:g} after {count} "
            f"integrations (alpha={a!r})"
        )
    f, u, w, eta, status, traj = _integrate(params.beta, bc.u_at_0, a, step, n, 0.0, False, True)
    if status == _BLOWUP:
        raise BlowUpError(eta, a)
    eta_grid = np.arange(n + 1) * step
    eta_grid[-1] = params.eta_inf
    profile = np.column_stack([eta_grid, traj])
    return ShootingResult(float(a), float(u - bc.u_at_inf), count, profile)
