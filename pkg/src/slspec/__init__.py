"""Numerical workbench for Sturm-Liouville problems on [0, pi] with
arbitrary complex two-point boundary conditions.

Core objects: Potential (the coefficient q), BcMatrix (the 2x4 boundary
matrix with its taxonomy classifier), DetEvaluator (the characteristic
determinant), the argument-principle spectrum locator, root-function and
biorthogonal-system builders, and the degenerate-case constructions with
nonclassical (unboundedly multiple) spectra.
"""

from .bc import BcClass, BcKind, BcMatrix, canonical_form, classify
from .degenerate import (DegenerateCase, DegenerateClassification, ProductSpec,
                         classify_degenerate, d_to_gamma, example1_product,
                         example1_sequence, example2_product, example2_sequence,
                         gamma_d_maps, growth_bound_check,
                         nonclassical_spectrum_report, product_eval,
                         product_eval_many, pw_membership_check)
from .determinant import DetEvaluator, delta0
from .errors import (AssignmentFailureError, BoundaryZeroError,
                     DegenerateMatrixError, InsufficientTruncationError,
                     IntegrationFailureError, InternalConsistencyError,
                     InvalidInputError, NotAnEigenvalueError,
                     NumericalFailureError, SlspecError, UnsupportedQueryError)
from .ode import (FundamentalValues, SolutionTrace, free_fundamental,
                  fundamental_at_pi, fundamental_at_pi_many,
                  fundamental_traces, ode_residual, solve_inhomogeneous,
                  solve_ivp)
from .potential import (Potential, endpoint_derivative_test, symmetry_defect,
                        endpoint_tail_limit)
from .rootfns import (BiorthogonalPair, RootChain, associated_chain,
                      basis_diagnostics, build_chains, chain_via_jets,
                      dual_system, eigenfunction, root_subspace)
from .spectrum import (Box, EigenvalueRecord, SpectrumClass, SpectrumReport,
                       asymptotic_fit, locate_spectrum,
                       multiplicity_growth_check, separation_check,
                       multiplicity_sqrt_ratio, winding_count, winding_count_circle)

__version__ = "0.1.0"
