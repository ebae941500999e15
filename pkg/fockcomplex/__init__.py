"""
fockcomplex - the holomorphic d-complex on the Gaussian Fock space
Exact operator calculus on graded monomial bases, the complex Laplacian and its
Neumann inverse, canonical solvers, weighted Kohn-Morrey checks and general
differential-operator complexes.
"""

__version__ = "1.0.0"
__author__ = "fockcomplex Project"

from .config import Config, RunConfig
from .core import Workbench
from .dbar import box, neumann, partial, partial_star, solve_partial, spectrum_table
from .forms import PForm
from .general import (
    DOperator, apply_D, apply_Dstar, commutator_form, estimate_constant, solve_canonical_D,
    solve_canonical_Dstar,
)
from .polynomials import HoloPoly, MixedPoly
from .scalars import ExactScalar
from .weighted import RadialPolyWeight, kohn_morrey_report
from .weyl import WeylOperator, parse_weyl

__all__ = [
    'Config', 'RunConfig', 'Workbench',
    'HoloPoly', 'MixedPoly', 'PForm', 'ExactScalar', 'WeylOperator', 'DOperator', 'RadialPolyWeight',
    'partial', 'partial_star', 'box', 'neumann', 'solve_partial', 'spectrum_table',
    'apply_D', 'apply_Dstar', 'commutator_form', 'estimate_constant', 'solve_canonical_D',
    'solve_canonical_Dstar',
    'kohn_morrey_report', 'parse_weyl',
]
