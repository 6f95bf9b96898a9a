"""Exact root-system combinatorics for Kac-Moody algebras and their affine loop realizations."""

from kmroots.affine import (
    FiniteRootSystem,
    PeriodicRootSet,
    SymRegTuple,
    is_maximal_tuple,
    pi_exact,
)
from kmroots.cartan import CartanDatum, Gcm, cartan_datum, kind
from kmroots.loop import LoopElement, bracket, chevalley, generate
from kmroots.rootslice import (
    RootClass,
    RootSlice,
    Truncated,
    classify,
    enumerate_roots,
    root_string,
)
from kmroots.subroot import (
    RootSet,
    minimal_elements,
    orbit,
    pi_system_check,
    verify_bijection,
)

__version__ = "0.1.0"

__all__ = [
    "CartanDatum",
    "FiniteRootSystem",
    "Gcm",
    "LoopElement",
    "PeriodicRootSet",
    "RootClass",
    "RootSet",
    "RootSlice",
    "SymRegTuple",
    "Truncated",
    "bracket",
    "cartan_datum",
    "chevalley",
    "classify",
    "enumerate_roots",
    "generate",
    "is_maximal_tuple",
    "kind",
    "minimal_elements",
    "orbit",
    "pi_exact",
    "pi_system_check",
    "root_string",
    "verify_bijection",
]
