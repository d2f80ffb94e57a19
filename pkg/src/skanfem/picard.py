"""Staggered Picard iteration for the coupled (f, u) system on a fixed mesh."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .assembly import Linearization, apply_dirichlet, assemble_f_system, assemble_u_system
from .linsolve import KrylovConfig, solve_direct, solve_krylov
from .mesh import Mesh1D, NodalField
from .model import BcValues, FlowParams, bc_values

__all__ = ["PicardConfig", "PicardReport", "initial_guess", "picard_solve"]


@dataclass(frozen=True)
class PicardConfig:
    max_iters: int = 50
    tol: float = 1e-12
    damping: float = 1.0
    linearization: Linearization = Linearization.NEWTON
    use_krylov: bool = True
    krylov: KrylovConfig = field(default_factory=KrylovConfig)

    def __post_init__(self):
        if not self.tol > 0.0:
            raise ValueError("Picard tolerance must be positive")
        if not 0.0 < self.damping <= 1.0:
            raise ValueError("damping must lie in (0, 1]")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        object.__setattr__(self, "linearization", Linearization(self.linearization))


@dataclass
class PicardReport:
    iterations: int
    converged: bool
    update_history: list[float]
    krylov_iterations: int = 0


def initial_guess(mesh: Mesh1D, bc: BcValues) -> NodalField:
    """Linear u between the boundary values, f its antiderivative with f(0) = f_at_0."""
    eta = mesh.nodes - mesh.a
    length = mesh.b - mesh.a
    slope = (bc.u_at_inf - bc.u_at_0) / length
    u = bc.u_at_0 + slope * eta
    f = bc.f_at_0 + bc.u_at_0 * eta + 0.5 * slope * eta**2
    u[-1] = bc.u_at_inf
    return NodalField(mesh, f, u)


def picard_solve(mesh: Mesh1D, params: FlowParams, init: NodalField,
                 cfg: PicardConfig = PicardConfig(), system_hook=None):
    """Iterate u-solve then f-solve until the relative update of [f, u] drops below tol.

    ``system_hook`` (if given) is called as ``hook(system, solution)`` for every
    constrained u-system after it is solved.  Returns ``(field, report)``; non-convergence is reported in
    the report, not raised.
    """
    if init.mesh is not mesh and init.mesh != mesh:
        raise ValueError("initial guess lives on a different mesh")
    bc = bc_values(params)
    last = mesh.n_nodes - 1
    current = init
    history: list[float] = []
    kry_total = 0
    converged = False
    for _ in range(cfg.max_iters):
        usys = assemble_u_system(mesh, current, params.beta, cfg.linearization)
        usys = apply_dirichlet(usys, 0, bc.u_at_0)
        usys = apply_dirichlet(usys, last, bc.u_at_inf)
        if cfg.use_krylov:
            u_new, its = solve_krylov(usys, current.u_vals, cfg.krylov)
            kry_total += its
        else:
            u_new = solve_direct(usys)
        if system_hook is not None:
            system_hook(usys, u_new)

        fsys = apply_dirichlet(assemble_f_system(mesh, u_new), 0, bc.f_at_0)
        f_new = solve_direct(fsys)

        w = cfg.damping
        if w != 1.0:
            f_new = (1.0 - w) * current.f_vals + w * f_new
            u_new = (1.0 - w) * current.u_vals + w * u_new
        new = NodalField(mesh, f_new, u_new)
        new_vec = new.stacked()
        upd = np.linalg.norm(new_vec - current.stacked()) / np.linalg.norm(new_vec)
        history.append(float(upd))
        current = new
        if upd < cfg.tol:
            converged = True
            break
    report = PicardReport(len(history), converged, history, kry_total)
    return current, report
