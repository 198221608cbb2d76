"""Census of planar central configurations of the Newtonian n-body problem.

Finds all central configurations for given positive masses, computes their
Morse indices on the shape space, and compares the counts with exact
Morse-theoretic lower bounds.
"""

from .bounds import (BoundTable, IndexPolynomial, bound_table, bouquet_poly,
                     equivariant_morse_check, first_palmore_poly, ignored_palmore_poly,
                     mccord_poly, morse_inequality_check)
from .census import CensusOptions, CensusResult, compare_with_bounds, run_census
from .config import Configuration, MassVector, classify, config_key, normalize
from .kernels import BACKEND
from .solver import SolveOptions, cc_residual, moulton_solve, newton_polish
from .spectral import morse_index

__version__ = "0.1.0"
