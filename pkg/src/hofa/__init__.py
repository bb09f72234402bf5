"""Higher-order Fourier analysis on finite abelian groups at desk scale."""
from .groups import Character, FiniteAbelianGroup, GroupFunction, fourier_transform, inverse_fourier
from .gowers import (FunctionSystem, corner_convolution, gowers_inner_product, gowers_norm_exact,
                     gowers_norm_sampled)
from .cubes import CubeMorphism, Cubespace, check_nilspace_axioms, enumerate_cube_morphisms
from .heisenberg import HeisenbergElement, heis_sequence, reduce_to_fundamental_domain
from .moments import MomentSpec, moment_exact, moment_sampled, sample_Dn
from .decompose import u2_decompose, u2_inverse_certificate

__version__ = "0.1.0"

__all__ = [
    "Character", "FiniteAbelianGroup", "GroupFunction", "fourier_transform", "inverse_fourier",
    "FunctionSystem", "corner_convolution", "gowers_inner_product", "gowers_norm_exact",
    "gowers_norm_sampled", "CubeMorphism", "Cubespace", "check_nilspace_axioms",
    "enumerate_cube_morphisms", "HeisenbergElement", "heis_sequence", "reduce_to_fundamental_domain",
    "MomentSpec", "moment_exact", "moment_sampled", "sample_Dn", "u2_decompose",
    "u2_inverse_certificate",
]
