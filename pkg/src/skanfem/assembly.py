"""Galerkin assembly of the linearized u- and f-systems with P1 elements."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .mesh import Mesh1D, NodalField

__all__ = [
    "Linearization",
    "BandedSystem",
    "QuadratureRule",
    "gauss_rule",
    "GAUSS2",
    "u_element_terms",
    "f_element_terms",
    "scatter",
    "assemble_u_system",
    "assemble_f_system",
    "apply_dirichlet",
    "u_residual",
]


class Linearization(str, enum.Enum):
    """How the quadratic reaction term beta*u^2 is frozen at the previous iterate."""

    PICARD = "picard"  # -beta u^n u^{n+1},  rhs -beta
    NEWTON = "newton"  # -2 beta u^n u^{n+1}, rhs -beta (1 + (u^n)^2)


@dataclass(frozen=True, eq=False)
class BandedSystem:
    """Tridiagonal matrix plus right-hand side.

    ``lower[i]`` is A[i, i-1] (``lower[0]`` unused, kept zero) and ``upper[i]`` is
    A[i, i+1] (``upper[-1]`` unused, kept zero).
    """

    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        n = np.shape(self.diag)[0]
        for name in ("lower", "diag", "upper", "rhs"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != (n,):
                raise ValueError(f"{name} has shape {arr.shape}, expected ({n},)")
            object.__setattr__(self, name, arr)
        self.lower[0] = 0.0
        self.upper[-1] = 0.0

    @property
    def n(self) -> int:
        return self.diag.size

    def matvec(self, x: np.ndarray) -> np.ndarray:
        y = self.diag * x
        y[1:] += self.lower[1:] * x[:-1]
        y[:-1] += self.upper[:-1] * x[1:]
        return y

    def to_dense(self) -> np.ndarray:
        return (
            np.diag(self.diag)
            + np.diag(self.lower[1:], -1)
            + np.diag(self.upper[:-1], 1)
        )

    def copy(self) -> "BandedSystem":
        return BandedSystem(self.lower.copy(), self.diag.copy(), self.upper.copy(), self.rhs.copy())


@dataclass(frozen=True)
class QuadratureRule:
    """Points and weights on the reference element [-1, 1]."""

    points: np.ndarray
    weights: np.ndarray
    degree: int


def gauss_rule(npts: int) -> QuadratureRule:
    x, w = np.polynomial.legendre.leggauss(npts)
    return QuadratureRule(x, w, 2 * npts - 1)


GAUSS2 = gauss_rule(2)
GAUSS3 = gauss_rule(3)


def _reference_basis(rule: QuadratureRule):
    xi = rule.points
    return np.stack([(1.0 - xi) / 2.0, (1.0 + xi) / 2.0])  # (2, nq)


def _check_field(mesh: Mesh1D, vals, name: str) -> np.ndarray:
    vals = np.asarray(vals, dtype=float)
    if vals.shape != (mesh.n_nodes,):
        raise ValueError(f"{name} has {vals.size} values for {mesh.n_nodes} nodes")
    return vals


def u_element_terms(mesh: Mesh1D, f_prev, u_prev, beta: float,
                    linearization=Linearization.NEWTON, rule: QuadratureRule = GAUSS2):
    """Element matrices (ne, 2, 2) and load vectors (ne, 2) of the linearized u-equation.

    Entry [j, a, b] is the contribution of trial function b to the row of test
    function a on element j.
    """
    linearization = Linearization(linearization)
    f_prev = _check_field(mesh, f_prev, "f_prev")
    u_prev = _check_field(mesh, u_prev, "u_prev")
    h = mesh.h
    phi = _reference_basis(rule)
    jac = 0.5 * h
    dphi = np.stack([-1.0 / h, 1.0 / h], axis=1)  # (ne, 2)

    fq = f_prev[:-1, None] * phi[0] + f_prev[1:, None] * phi[1]  # (ne, nq)
    uq = u_prev[:-1, None] * phi[0] + u_prev[1:, None] * phi[1]
    wq = rule.weights[None, :] * jac[:, None]

    c = 2.0 if linearization is Linearization.NEWTON else 1.0
    diffusion = -dphi[:, :, None] * dphi[:, None, :] * h[:, None, None]
    advection = np.einsum("eq,eb,aq,eq->eab", fq, dphi, phi, wq)
    reaction = -c * beta * np.einsum("eq,bq,aq,eq->eab", uq, phi, phi, wq)
    K = diffusion + advection + reaction

    if linearization is Linearization.NEWTON:
        src = -beta * (1.0 + uq**2)
    else:
        src = -beta * np.ones_like(uq)
    F = np.einsum("eq,aq,eq->ea", src, phi, wq)
    return K, F


def f_element_terms(mesh: Mesh1D, u_new, rule: QuadratureRule = GAUSS2):
    """Element matrices and loads of the f-equation: int f' v and int u v."""
    u_new = _check_field(mesh, u_new, "u_new")
    h = mesh.h
    phi = _reference_basis(rule)
    wq = rule.weights[None, :] * (0.5 * h)[:, None]
    dphi = np.stack([-1.0 / h, 1.0 / h], axis=1)
    uq = u_new[:-1, None] * phi[0] + u_new[1:, None] * phi[1]
    K = np.einsum("eb,aq,eq->eab", dphi, phi, wq)
    F = np.einsum("eq,aq,eq->ea", uq, phi, wq)
    return K, F


def scatter(K: np.ndarray, F: np.ndarray, order=None) -> BandedSystem:
    """Sum element contributions into a tridiagonal system.

    ``order`` permutes the element visitation (summation order); the result is
    the same up to rounding.
    """
    ne = K.shape[0]
    n = ne + 1
    lower = np.zeros(n)
    diag = np.zeros(n)
    upper = np.zeros(n)
    rhs = np.zeros(n)
    if order is None:
        diag[:-1] += K[:, 0, 0]
        diag[1:] += K[:, 1, 1]
        upper[:-1] += K[:, 0, 1]
        lower[1:] += K[:, 1, 0]
        rhs[:-1] += F[:, 0]
        rhs[1:] += F[:, 1]
    else:
        for j in order:
            diag[j] += K[j, 0, 0]
            diag[j + 1] += K[j, 1, 1]
            upper[j] += K[j, 0, 1]
            lower[j + 1] += K[j, 1, 0]
            rhs[j] += F[j, 0]
            rhs[j + 1] += F[j, 1]
    return BandedSystem(lower, diag, upper, rhs)


def assemble_u_system(mesh: Mesh1D, prev: NodalField, beta: float,
                      linearization=Linearization.NEWTON) -> BandedSystem:
    """Linearized u-system with f and u frozen at ``prev``; boundary rows are not constrained."""
    if prev.mesh is not mesh and prev.mesh != mesh:
        raise ValueError("previous iterate lives on a different mesh")
    if not np.isfinite(beta):
        raise ValueError("beta must be finite")
    K, F = u_element_terms(mesh, prev.f_vals, prev.u_vals, beta, linearization)
    return scatter(K, F)


def assemble_f_system(mesh: Mesh1D, u_new) -> BandedSystem:
    """f-system sum_j f_j int phi_j' phi_i = int u phi_i; row 0 is left for f(0)."""
    K, F = f_element_terms(mesh, u_new)
    return scatter(K, F)


def apply_dirichlet(system: BandedSystem, node: int, value: float) -> BandedSystem:
    """Constrain x[node] = value, eliminating the column into the neighbouring rows."""
    n = system.n
    if not 0 <= node < n:
        raise IndexError(f"node {node} out of range for a system of size {n}")
    out = system.copy()
    if node > 0:
        out.rhs[node - 1] -= out.upper[node - 1] * value
        out.upper[node - 1] = 0.0
    if node < n - 1:
        out.rhs[node + 1] -= out.lower[node + 1] * value
        out.lower[node + 1] = 0.0
    out.lower[node] = 0.0
    out.upper[node] = 0.0
    out.diag[node] = 1.0
    out.rhs[node] = value
    return out


def u_residual(field: NodalField, beta: float, rule: QuadratureRule = GAUSS2) -> np.ndarray:
    """Nodal Galerkin residual of the nonlinear u-equation.

    Row i is int [-u' phi_i' + f u' phi_i + beta (1 - u^2) phi_i]; the two
    boundary rows are set to zero since their test functions are excluded.
    """
    mesh = field.mesh
    h = mesh.h
    phi = _reference_basis(rule)
    wq = rule.weights[None, :] * (0.5 * h)[:, None]
    dphi = np.stack([-1.0 / h, 1.0 / h], axis=1)
    f, u = field.f_vals, field.u_vals
    fq = f[:-1, None] * phi[0] + f[1:, None] * phi[1]
    uq = u[:-1, None] * phi[0] + u[1:, None] * phi[1]
    du = (np.diff(u) / h)[:, None]
    point = fq * du + beta * (1.0 - uq**2)  # (ne, nq)
    loc = -du * dphi * np.sum(wq, axis=1)[:, None] + np.einsum("eq,aq,eq->ea", point, phi, wq)
    r = np.zeros(mesh.n_nodes)
    r[:-1] += loc[:, 0]
    r[1:] += loc[:, 1]
    r[0] = 0.0
    r[-1] = 0.0
    return r
