"""Exact and certified computations for rearrangement-invariant norms."""

from .enclosure import Enclosure, NeedsEnclosure, Diverges
from .exactfun import PiecewisePoly, StepFunction, make, evaluate, integrate
from .rearrange import rearrangement, distribution, double_star, maximal_1d, hlp_compare
from .norms import LorentzParams, YoungFunction, NormDescriptor, lorentz_norm, orlicz_norm, norm
from .witnesses import lan_bump, mount_filip, bounded_witness, refined_witness

__version__ = "0.1.0"

__all__ = [
    "Enclosure", "NeedsEnclosure", "Diverges",
    "PiecewisePoly", "StepFunction", "make", "evaluate", "integrate",
    "rearrangement", "distribution", "double_star", "maximal_1d", "hlp_compare",
    "LorentzParams", "YoungFunction", "NormDescriptor", "lorentz_norm", "orlicz_norm", "norm",
    "lan_bump", "mount_filip", "bounded_witness", "refined_witness",
]
