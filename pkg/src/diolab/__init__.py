"""diolab: an exact-arithmetic laboratory for Diophantine approximation
with restricted denominator sequences.

Subpackages cover sequence construction and growth audits, pairwise
separation certification, hit counting with gcd correlation sums, the
periodized trapezoid kernels with closed-form Fourier coefficients, measure
sampling with empirical Fourier transforms, and partial-sum oracles.
"""

from .core import (ApproxFunction, ClassificationError, DEFAULT_PRECISION_BITS,
                   DyadicPoint, Rational, eval_psi, membership,
                   nearest_int_distance, rational_from_str, rational_to_str)
from .counting import (ConvergenceVerdict, CountingInstance, GcdErrorResult,
                       IntersectionReport, SchmidtReport, arc_intersection_measure,
                       arc_intervals, arc_union_measure, count_hits,
                       gcd_error_prefixes, gcd_error_sum, khintchine_verdict,
                       psi_sum, schmidt_experiment)
from .kernels import (BoundsReport, CoefficientTable, KernelParams,
                      build_coefficient_table, coeff_magnitudes, indicator_bump,
                      kernel_fourier_coeff, kernel_reconstruct, kernel_value,
                      kernel_value_grid, trapezoid_bump, verify_coefficient_bounds)
from .measures import (CriteriaAuditReport, DecayAuditReport, DecayModel,
                       EmpiricalCloud, MeasureSpec, MuHatEstimate,
                       cantor_mu_hat_exact, convergence_criteria_audit,
                       decay_audit, empirical_mu_hat, lebesgue_mu_hat_exact,
                       poly_density_mu_hat_exact, probe_grid, sample,
                       seq_audit_points, tau_exponent, tau_growth_probe)
from .separation import (SeparationQuery, SeparationReport, ViolationCertificate,
                         certify_sequence, find_violation, min_linear_form,
                         min_linear_form_brute, poly_growth_threshold)
from .sequences import (DenominatorSequence, GrowthAuditReport, GrowthModel,
                        PolyGrowthParams, gen_geometric, gen_poly_growth,
                        gen_poly_growth_prime, gen_smooth, growth_slope_audit,
                        is_prime, liouville_growth_check, primes_up_to)
from .series import NonnegSeries, SeriesCheckResult, log_bound_check, ratio_series_check

__version__ = "0.1.0"
