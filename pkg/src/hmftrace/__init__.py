"""Computable objects on the geometric side of a weighted trace formula
for modular groups over totally real fields: exact field/lattice arithmetic,
the spherical transform chain, ODE profiles, lattice zeta functions with
analytic continuation, and the conjugacy-class contribution terms."""

from .backends import BACKEND_NAME
from .errors import HmftraceError
from .fields import FieldElement, FieldEmbedding, embed, \
    fundamental_totally_positive_unit, make_quadratic_field
from .lattice import (CuspFrame, EmbeddedLattice, MultiplierGroup, covolume,
                      cusp_coordinates, dual_lattice, exponents_from,
                      lambda_character, quotient_reps_mod_units, quotient_size,
                      reduce_mod_multipliers, vector_norm)
from .modgroup import (GroupElementN, act, automorphic_kernel_partial, classify,
                       eisenstein_direct, enumerate_group_elements, kernel_k)
from .specfun import angular_f, bessel_k, complex_gamma, spherical_g
from .transforms import (HGrid, TestFunction, TransformTriple, Q_of, g_from_h,
                         g_of, h_of, make_h_grid, psi_from_Q)
from .trace import (AutomorphicFormData, ClassInventory, TermResult,
                    assemble_geometric_trace, demo_form, demo_inventory,
                    elliptic_oracle, elliptic_term, hyp_par_C_term,
                    hyp_par_main_term, hyp_par_theta_factor, mixed_term,
                    parabolic_term)
from .zeta import (ZetaContext, completed_xi, convexity_spot_check,
                   functional_equation_residual, residue_at_one, theta,
                   zeta_continued, zeta_direct)

__version__ = "0.1.0"
