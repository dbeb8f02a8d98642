"""Exact tools for Lipschitz saturation, integral closure on curve germs and
infinitesimal Lipschitz conditions for families of plane-curve singularities."""

__version__ = "0.1.0"

from .cyclo import CycRat
from .doubling import SearchBound, double_ideal, replay_pair_witness, saturation_membership
from .errors import LipsatError
from .icurve import IdealOnCurve, colength, ic_membership, ideal_multiplicity
from .poly import Poly, parse_poly
from .puiseux import Branch, puiseux_branches, verify_branch
from .series import PSeries
from .verdict import Verdict

__all__ = [
    "__version__",
    "CycRat",
    "PSeries",
    "Poly",
    "parse_poly",
    "Branch",
    "puiseux_branches",
    "verify_branch",
    "IdealOnCurve",
    "ic_membership",
    "ideal_multiplicity",
    "colength",
    "SearchBound",
    "double_ideal",
    "saturation_membership",
    "replay_pair_witness",
    "Verdict",
    "LipsatError",
]
