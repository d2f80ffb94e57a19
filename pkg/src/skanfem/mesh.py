"""One-dimensional meshes over [0, eta_inf], nodal P1 fields, and mesh transfer."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Mesh1D",
    "NodalField",
    "uniform_mesh",
    "refine",
    "coarsen",
    "transfer",
    "evaluate",
]


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Mesh1D:
    """Strictly increasing node coordinates; element j is (nodes[j], nodes[j+1])."""

    nodes: np.ndarray

    def __post_init__(self):
        nodes = _frozen(self.nodes)
        if nodes.ndim != 1 or nodes.size < 2:
            raise ValueError("a mesh needs at least two nodes")
        if not np.all(np.isfinite(nodes)):
            raise ValueError("mesh nodes must be finite")
        if np.any(np.diff(nodes) <= 0.0):
            raise ValueError("mesh nodes must be strictly increasing")
        object.__setattr__(self, "nodes", nodes)

    @property
    def n_nodes(self) -> int:
        return self.nodes.size

    @property
    def n_elements(self) -> int:
        return self.nodes.size - 1

    @property
    def h(self) -> np.ndarray:
        return np.diff(self.nodes)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.nodes[:-1] + self.nodes[1:])

    @property
    def a(self) -> float:
        return float(self.nodes[0])

    @property
    def b(self) -> float:
        return float(self.nodes[-1])

    def __eq__(self, other):
        if not isinstance(other, Mesh1D):
            return NotImplemented
        return np.array_equal(self.nodes, other.nodes)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class NodalField:
    """Continuous piecewise-linear (f, u) pair on a mesh; u approximates f'."""

    mesh: Mesh1D
    f_vals: np.ndarray
    u_vals: np.ndarray

    def __post_init__(self):
        f = _frozen(self.f_vals)
        u = _frozen(self.u_vals)
        n = self.mesh.n_nodes
        if f.shape != (n,) or u.shape != (n,):
            raise ValueError(
                f"field lengths ({f.size}, {u.size}) do not match node count {n}"
            )
        object.__setattr__(self, "f_vals", f)
        object.__setattr__(self, "u_vals", u)

    def stacked(self) -> np.ndarray:
        """Concatenated [f, u] nodal vector."""
        return np.concatenate([self.f_vals, self.u_vals])

    def u_slopes(self) -> np.ndarray:
        """Elementwise derivative of the piecewise-linear u."""
        return np.diff(self.u_vals) / self.mesh.h


def uniform_mesh(a: float, b: float, n: int) -> Mesh1D:
    if not (np.isfinite(a) and np.isfinite(b)) or not a < b:
        raise ValueError(f"invalid interval [{a}, {b}]")
    if int(n) != n or n < 1:
        raise ValueError(f"element count must be a positive integer, got {n}")
    n = int(n)
    nodes = a + (b - a) * np.arange(n + 1) / n
    nodes[-1] = b
    return Mesh1D(nodes)


def _check_flags(mesh: Mesh1D, flags) -> np.ndarray:
    idx = np.unique(np.asarray(sorted(flags), dtype=int))
    if idx.size and (idx[0] < 0 or idx[-1] >= mesh.n_elements):
        raise IndexError(f"refinement flags out of range for {mesh.n_elements} elements")
    return idx


def refine(mesh: Mesh1D, flags) -> Mesh1D:
    """Bisect every element whose index is in ``flags``."""
    idx = _check_flags(mesh, flags)
    if idx.size == 0:
        return mesh
    mids = 0.5 * (mesh.nodes[idx] + mesh.nodes[idx + 1])
    # insert before node idx+1 keeps the order
    nodes = np.insert(mesh.nodes, idx + 1, mids)
    return Mesh1D(nodes)


def coarsen(mesh: Mesh1D, field: NodalField, indicators, keep_threshold: float):
    """Merge neighbouring equal-length element pairs with small combined indicator.

    Elements are scanned left to right; elements k and k+1 are merged when they
    have the same length (they can be the two halves of an earlier bisection) and
    ``hypot(indicators[k], indicators[k+1]) < keep_threshold``.  Boundary nodes are
    never removed.  Values at the surviving nodes are kept as they are.
    """
    if mesh.n_elements < 2:
        raise ValueError("coarsening needs at least two elements")
    if field.mesh is not mesh and field.mesh != mesh:
        raise ValueError("field is not defined on the given mesh")
    ind = np.asarray(indicators, dtype=float)
    if ind.shape != (mesh.n_elements,):
        raise ValueError("one indicator per element is required")
    h = mesh.h
    keep = np.ones(mesh.n_nodes, dtype=bool)
    k = 0
    while k < mesh.n_elements - 1:
        same = abs(h[k] - h[k + 1]) <= 1e-12 * max(h[k], h[k + 1])
        if same and np.hypot(ind[k], ind[k + 1]) < keep_threshold:
            keep[k + 1] = False
            k += 2
        else:
            k += 1
    if keep.all():
        return mesh, field
    new_mesh = Mesh1D(mesh.nodes[keep])
    return new_mesh, NodalField(new_mesh, field.f_vals[keep], field.u_vals[keep])


def transfer(field: NodalField, target: Mesh1D) -> NodalField:
    """Interpolate ``field`` onto ``target`` (same end points) with P1 interpolation."""
    src = field.mesh
    if src.a != target.a or src.b != target.b:
        raise ValueError(
            f"domain mismatch: [{src.a}, {src.b}] vs [{target.a}, {target.b}]"
        )
    if target is src or target == src:
        return NodalField(target, field.f_vals, field.u_vals)
    f = np.interp(target.nodes, src.nodes, field.f_vals)
    u = np.interp(target.nodes, src.nodes, field.u_vals)
    return NodalField(target, f, u)


def evaluate(field: NodalField, eta: float) -> tuple[float, float]:
    """Evaluate (f, u) at ``eta`` by linear interpolation."""
    mesh = field.mesh
    if not mesh.a <= eta <= mesh.b:
        raise ValueError(f"eta={eta} outside [{mesh.a}, {mesh.b}]")
    f = float(np.interp(eta, mesh.nodes, field.f_vals))
    u = float(np.interp(eta, mesh.nodes, field.u_vals))
    return f, u
