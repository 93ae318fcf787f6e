"""Exact finite-scale experiments around the Lebesgue property of Banach
spaces: Schreier families, Tsirelson and W_iw norms, Haar systems of
partitions of N, dyadic Riemann sums and desk-scale L_1 tools."""

__version__ = "0.1.0"

from .core import BlockSequence, DyadicRational, FinVec, dyadic_enumerate, dyadic_index
from .haar import canonical_haar, haar_from_dyadic_locations, load_haar_system, sigma
from .norms import NormBudgetError, NormOracle, NormValue, make_oracle
from .schreier import is_admissible, schreier_member

__all__ = [
    "BlockSequence",
    "DyadicRational",
    "FinVec",
    "NormBudgetError",
    "NormOracle",
    "NormValue",
    "canonical_haar",
    "dyadic_enumerate",
    "dyadic_index",
    "haar_from_dyadic_locations",
    "is_admissible",
    "load_haar_system",
    "make_oracle",
    "schreier_member",
    "sigma",
]
