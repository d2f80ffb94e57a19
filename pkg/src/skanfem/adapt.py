"""Adaptive solve-estimate-mark-refine driver."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .kelly import KellyReport, estimate
from .mesh import Mesh1D, NodalField, coarsen, refine, transfer, uniform_mesh
from .model import FlowParams, bc_values
from .picard import PicardConfig, initial_guess, picard_solve
from .postproc import wall_gradient

__all__ = [
    "AmrConfig",
    "CycleRecord",
    "AdaptiveRunReport",
    "Termination",
    "PicardDivergenceError",
    "mark",
    "run_adaptive",
]


class Termination(str, enum.Enum):
    TOLERANCE = "Tolerance"
    MAX_CYCLES = "MaxCycles"


class PicardDivergenceError(RuntimeError):
    def __init__(self, cycle: int, report):
        super().__init__(
            f"Picard iteration did not converge on adaptive cycle {cycle} "
            f"after {report.iterations} iterations "
            f"(last relative update {report.update_history[-1]:.3e})"
        )
        self.cycle = cycle
        self.report = report


@dataclass(frozen=True)
class AmrConfig:
    max_cycles: int = 20
    tol_error: float = 1e-6
    theta: float = 0.5
    coarsening: bool = False
    c1: float = 1.0
    c2: float = 0.5
    n0: int = 8
    picard: PicardConfig = field(default_factory=PicardConfig)

    def __post_init__(self):
        if not 0.0 < self.theta <= 1.0:
            raise ValueError("theta must lie in (0, 1]")
        if not self.tol_error > 0.0:
            raise ValueError("tol_error must be positive")
        if self.max_cycles < 1:
            raise ValueError("max_cycles must be at least 1")
        if self.n0 < 2:
            raise ValueError("the initial mesh needs at least two elements")


@dataclass(frozen=True)
class CycleRecord:
    cycle: int
    dofs: int
    eta_global: float
    fpp0: float
    picard_iters: int


@dataclass
class AdaptiveRunReport:
    cycles: list[CycleRecord]
    final_field: NodalField
    final_mesh: Mesh1D
    terminated_by: Termination
    estimates: list[KellyReport]
    meshes: list[Mesh1D]


def mark(report: KellyReport, theta: float) -> set[int]:
    """Indices with eta_j^2 >= theta * max eta^2; empty when every indicator is zero."""
    sq = report.squared
    if sq.size == 0:
        raise ValueError("no indicators to mark")
    top = sq.max()
    if top <= 0.0:
        return set()
    return set(np.flatnonzero(sq >= theta * top).tolist())


def _coarsen_step(mesh: Mesh1D, fld: NodalField, report: KellyReport, flags: set[int]):
    ind = report.indicators.copy()
    threshold = np.quantile(ind, 0.1)
    if flags:
        ind[sorted(flags)] = np.inf
    new_mesh, new_field = coarsen(mesh, fld, ind, threshold)
    if new_mesh is mesh:
        return mesh, fld, flags
    # marked elements survive untouched; find them again by their left node
    left = mesh.nodes[sorted(flags)]
    new_flags = set(np.searchsorted(new_mesh.nodes, left).tolist())
    return new_mesh, new_field, new_flags


def run_adaptive(params: FlowParams, cfg: AmrConfig = AmrConfig(), system_hook=None) -> AdaptiveRunReport:
    bc = bc_values(params)
    mesh = uniform_mesh(0.0, params.eta_inf, cfg.n0)
    fld = initial_guess(mesh, bc)
    records: list[CycleRecord] = []
    reports: list[KellyReport] = []
    meshes: list[Mesh1D] = []
    terminated = Termination.MAX_CYCLES
    for cycle in range(cfg.max_cycles):
        fld, prep = picard_solve(mesh, params, fld, cfg.picard, system_hook=system_hook)
        if not prep.converged:
            raise PicardDivergenceError(cycle, prep)
        rep = estimate(fld, params, cfg.c1, cfg.c2)
        records.append(CycleRecord(cycle, mesh.n_nodes, rep.global_estimate,
                                   wall_gradient(fld), prep.iterations))
        reports.append(rep)
        meshes.append(mesh)
        if rep.global_estimate < cfg.tol_error:
            terminated = Termination.TOLERANCE
            break
        if cycle == cfg.max_cycles - 1:
            break
        flags = mark(rep, cfg.theta)
        if not flags:
            terminated = Termination.TOLERANCE
            break
        if cfg.coarsening:
            mesh, fld, flags = _coarsen_step(mesh, fld, rep, flags)
        mesh = refine(mesh, flags)
        fld = transfer(fld, mesh)
    return AdaptiveRunReport(records, fld, mesh, terminated, reports, meshes)
