"""Strategy iteration for least fixpoints of non-expansive functions on MV-chains."""

from .mv import Assignment, FiniteChain, MVValue, UnitInterval, decrease, norm
from .strategy import Decomposition, Solution, Strategy, brute_force_mu, si_above, si_below

__all__ = [
    "Assignment", "FiniteChain", "MVValue", "UnitInterval", "decrease", "norm",
    "Decomposition", "Solution", "Strategy", "brute_force_mu", "si_above", "si_below",
]
__version__ = "0.1.0"
