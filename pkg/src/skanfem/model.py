"""Similarity parameters and boundary-condition variants for Falkner-Skan flow."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

__all__ = ["BcVariant", "FlowParams", "BcValues", "beta_from_m", "m_from_beta", "bc_values"]


class BcVariant(str, enum.Enum):
    """Which far-field/wall pairing is imposed on u = f'."""

    WEDGE = "wedge"  # u(0) = 0, u(eta_inf) = 1
    STRETCHING = "stretching"  # u(0) = 1, u(eta_inf) = 0


def beta_from_m(m: float) -> float:
    """Pressure-gradient parameter beta = 2m / (m + 1)."""
    if m == -1.0:
        raise ValueError("beta is undefined for m = -1")
    return 2.0 * m / (m + 1.0)


def m_from_beta(beta: float) -> float:
    """Inverse of :func:`beta_from_m`, defined for beta != 2."""
    if beta == 2.0:
        raise ValueError("m is undefined for beta = 2")
    return beta / (2.0 - beta)


@dataclass(frozen=True)
class FlowParams:
    m: float
    beta: float
    eta_inf: float = 8.0
    bc_variant: BcVariant = BcVariant.WEDGE

    def __post_init__(self):
        if not (math.isfinite(self.beta) and math.isfinite(self.m)):
            raise ValueError(f"non-finite flow parameters m={self.m}, beta={self.beta}")
        if not (math.isfinite(self.eta_inf) and self.eta_inf > 0.0):
            raise ValueError(f"eta_inf must be positive and finite, got {self.eta_inf}")
        object.__setattr__(self, "bc_variant", BcVariant(self.bc_variant))
        if self.bc_variant is BcVariant.STRETCHING and self.beta != 0.0:
            raise ValueError(
                "stretching boundary conditions are only consistent with beta = 0 "
                f"(got beta={self.beta})"
            )

    @classmethod
    def from_m(cls, m: float, eta_inf: float = 8.0, bc_variant=BcVariant.WEDGE) -> "FlowParams":
        return cls(m=float(m), beta=beta_from_m(m), eta_inf=eta_inf, bc_variant=bc_variant)

    @classmethod
    def from_beta(cls, beta: float, eta_inf: float = 8.0, bc_variant=BcVariant.WEDGE) -> "FlowParams":
        return cls(m=m_from_beta(beta), beta=float(beta), eta_inf=eta_inf, bc_variant=bc_variant)


@dataclass(frozen=True)
class BcValues:
    f_at_0: float
    u_at_0: float
    u_at_inf: float


def bc_values(params: FlowParams) -> BcValues:
    if params.bc_variant is BcVariant.STRETCHING:
        if params.beta != 0.0:
            raise ValueError("stretching boundary conditions require beta = 0")
        return BcValues(0.0, 1.0, 0.0)
    return BcValues(0.0, 0.0, 1.0)
