"""Exact-rational toolkit for anonymous games, radix gadgets and the polymatrix reduction."""
from .core import (
    APPROXIMATE,
    WELL_SUPPORTED,
    AnonymousGame,
    EquilibriumCertificate,
    GameError,
    MixedProfile,
    seen_distribution,
    verify_equilibrium,
)
from .polymatrix import PolyProfile, PolymatrixGame, solve_poly_small
from .radix import build_generalized_radix, build_radix, canonical_radix_ne
from .reduction import ReductionParams, compile_polymatrix, decode, lift, pad

__version__ = "0.1.0"
