"""Exact Connes-Kreimer renormalization on the rooted-tree Hopf algebra.

Characters of the Hopf algebra take values in eps-Laurent series with exact
rational coefficients; the package decomposes them, extracts the beta
element and checks the flow identities that follow from locality.
"""

from .birkhoff import BirkhoffPair, decompose
from .coeffs import EpsLaurent, Poly, series
from .errors import CKRGError
from .hierarchy import TimeVector, apply_times
from .reports import FlowReport
from .rg import beta_function, compute_M
from .toy import LADDER, MELLIN, build_character, load_rule
from .trees import Forest, RootedTree, TreeAlgebra, parse_forest, parse_tree

__all__ = [
    "BirkhoffPair",
    "CKRGError",
    "EpsLaurent",
    "FlowReport",
    "Forest",
    "LADDER",
    "MELLIN",
    "Poly",
    "RootedTree",
    "TimeVector",
    "TreeAlgebra",
    "apply_times",
    "beta_function",
    "build_character",
    "compute_M",
    "decompose",
    "load_rule",
    "parse_forest",
    "parse_tree",
    "series",
]
