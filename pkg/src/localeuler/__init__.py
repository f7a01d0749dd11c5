"""Local rational Euler class cochains of triangulated sphere bundles."""

from .bundle import BundleModel, FiberAnchor, TriangulatedBundle, validate_bundle
from .chains import CellComplex, RationalChain, boundary, coboundary, fundamental_class, orient, validate_complex
from .engine import EulerCochain, EulerEngine, coboundary_check, euler_cochain, necklace_formula, pair
from .fixtures import gen_trivial, hopf_fixture, subdivide_fiber_edge
from .linalg import betti_numbers, harmonic_extension, laplacian, validate_sphere
from .simplicial import SimplicialComplex

__version__ = "0.1.0"

__all__ = [
    "BundleModel",
    "CellComplex",
    "EulerCochain",
    "EulerEngine",
    "FiberAnchor",
    "RationalChain",
    "SimplicialComplex",
    "TriangulatedBundle",
    "betti_numbers",
    "boundary",
    "coboundary",
    "coboundary_check",
    "euler_cochain",
    "fundamental_class",
    "gen_trivial",
    "harmonic_extension",
    "hopf_fixture",
    "laplacian",
    "necklace_formula",
    "orient",
    "pair",
    "subdivide_fiber_edge",
    "validate_bundle",
    "validate_complex",
    "validate_sphere",
]
