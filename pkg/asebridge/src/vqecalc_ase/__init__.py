"""ASE calculator bridge for the vqecalc engine."""

from ._host import HAVE_ASE, Atoms, BFGS
from .bridge import EV_PER_HARTREE, BridgeCalculator, ProtocolError

__all__ = ["BridgeCalculator", "ProtocolError", "EV_PER_HARTREE",
           "Atoms", "BFGS", "HAVE_ASE"]
