"""towercodes: exact transitive / self-dual algebraic-geometry codes from a
recursive Galois tower of function fields, verified by brute-force oracles."""

__version__ = "0.1.0"

from .algebra import (FieldCtx, FieldElement, MatrixGFq, Poly, RatFunc,
                      field_make, nullspace, solve_additive, sqrt_in_Fq)
from .tower import (Divisor, Place, TowerCtx, TowerFunc, divisor_A,
                    divisor_B, divisor_D, genus_level, infinity_place,
                    places_over, principal_divisor, tower_make, valuation)
from .rrspace import RRBasis, rr_space, rr_space_with_exact_orders
from .galois import (AutMap, ClosureReport, artin_schreier_reduce,
                     automorphism_group, closure_compute, verify_theorem_1_7)
from .agcodes import (EtaForm, LinearCode, MinDistanceResult,
                      TransitivityCertificate, certify_transitive,
                      dual_via_eta, eta_form, family_code, goppa_code,
                      min_distance, plan_transitive_code, selfdual_scale)
from .sxcodes import SxCodebook, sx_codebook, sx_divisors
from .bounds import (bound_table, crossover, delta_star, gv,
                     improved_and_selfdual, isodual_old_delta,
                     selfdual_delta, sx_improved, tvz)
