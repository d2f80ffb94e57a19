"""h-adaptive P1 finite elements for the Falkner-Skan boundary-layer equation."""

from .model import BcValues, BcVariant, FlowParams, bc_values, beta_from_m, m_from_beta
from .mesh import Mesh1D, NodalField, coarsen, evaluate, refine, transfer, uniform_mesh

__version__ = "0.1.0"
