from crkfr.equations.base import EPS_POS, rusanov_speed
from crkfr.equations.scalar import Burgers, LinearAdvection, VariableAdvection1D, VariableAdvection2D
from crkfr.equations.euler import Euler1D, Euler2D, hllc_flux
from crkfr.equations.tenmoment import TenMoment, QuiverEnergy

__all__ = [
    "EPS_POS",
    "rusanov_speed",
    "LinearAdvection",
    "VariableAdvection1D",
    "VariableAdvection2D",
    "Burgers",
    "Euler1D",
    "Euler2D",
    "hllc_flux",
    "TenMoment",
    "QuiverEnergy",
]
