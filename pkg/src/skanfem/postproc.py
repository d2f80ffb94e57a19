"""Wall gradient extraction and CSV/JSON export."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .kelly import KellyReport
from .mesh import Mesh1D, NodalField
from .model import FlowParams

__all__ = [
    "wall_gradient",
    "export_profile",
    "read_profile",
    "export_indicators",
    "RunSummary",
]


def wall_gradient(field: NodalField) -> float:
    """f''(0) = u'(0) from the one-sided three-point formula on the first three nodes.

    Exact for quadratic u on any spacing; reduces to (-3u0 + 4u1 - u2) / 2h
    on a uniform grid.
    """
    x = field.mesh.nodes
    if x.size < 3:
        raise ValueError("wall gradient needs at least three nodes")
    u0, u1, u2 = field.u_vals[:3]
    h1 = x[1] - x[0]
    h2 = x[2] - x[1]
    return float(
        -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * u0
        + (h1 + h2) / (h1 * h2) * u1
        - h1 / (h2 * (h1 + h2)) * u2
    )


def _fmt(x: float) -> str:
    # repr is the shortest string that round-trips, independent of locale
    return repr(float(x))


def _write_text(path, text: str) -> Path:
    path = Path(path)
    try:
        path.write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise OSError(f"could not write {path}: {exc}") from exc
    return path


def export_profile(field: NodalField, path) -> Path:
    """Write ``eta,f,u`` rows, one per node."""
    lines = ["eta,f,u"]
    for x, f, u in zip(field.mesh.nodes, field.f_vals, field.u_vals):
        lines.append(f"{_fmt(x)},{_fmt(f)},{_fmt(u)}")
    return _write_text(path, "\n".join(lines) + "\n")


def read_profile(path) -> NodalField:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return NodalField(Mesh1D(data[:, 0]), data[:, 1], data[:, 2])


def export_indicators(report: KellyReport, mesh: Mesh1D, cycle: int, path) -> Path:
    """Write ``cell_center,h,indicator`` rows, one per element.

    If ``path`` is a directory the file is named ``indicators_cycle_<cycle>.csv``.
    """
    if report.indicators.shape != (mesh.n_elements,):
        raise ValueError("indicator report does not match the mesh")
    path = Path(path)
    if path.is_dir():
        path = path / f"indicators_cycle_{cycle}.csv"
    lines = ["cell_center,h,indicator"]
    for c, h, ind in zip(mesh.centers, mesh.h, report.indicators):
        lines.append(f"{_fmt(c)},{_fmt(h)},{_fmt(ind)}")
    return _write_text(path, "\n".join(lines) + "\n")


@dataclass
class RunSummary:
    params: FlowParams
    cycles: list
    fpp0_final: float
    terminated_by: str
    oracle_alpha: float | None = None

    @property
    def agreement(self) -> float | None:
        if self.oracle_alpha is None:
            return None
        return abs(self.fpp0_final - self.oracle_alpha)

    @classmethod
    def from_run(cls, params: FlowParams, run, oracle_alpha: float | None = None) -> "RunSummary":
        return cls(params, list(run.cycles), run.cycles[-1].fpp0,
                   getattr(run.terminated_by, "value", str(run.terminated_by)), oracle_alpha)

    def to_dict(self) -> dict:
        p = self.params
        out = {
            "params": {"m": p.m, "beta": p.beta, "eta_inf": p.eta_inf, "bc": p.bc_variant.value},
            "cycles": [
                {
                    "cycle": c.cycle,
                    "dofs": c.dofs,
                    "eta_global": c.eta_global,
                    "fpp0": c.fpp0,
                    "picard_iters": c.picard_iters,
                }
                for c in self.cycles
            ],
            "fpp0_final": self.fpp0_final,
            "oracle_alpha": self.oracle_alpha,
            "terminated_by": self.terminated_by,
        }
        if self.oracle_alpha is not None:
            out["agreement"] = self.agreement
        return out

    def write(self, path) -> Path:
        return _write_text(path, json.dumps(self.to_dict(), indent=2) + "\n")
