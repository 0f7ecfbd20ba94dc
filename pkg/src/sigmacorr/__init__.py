"""Exact pair-correlation laboratory for quadratic sequences modulo one."""
from .realnum import (DomainError, FixedReal, InsufficientDataError, RangeError, GOLDEN, PI,
                      SQRT2, cf_expand, dioph_constant_estimate, dioph_type_estimate,
                      fx_from_rational, fx_frac_power, fx_sqrt_int, parse_real)
from .fixedvec import FracArray
from .seqgen import SequenceSpec, generate, generate_chunk
from .paircount import (CorrelationEstimate, CorrelationQuery, count_pairs_bruteforce,
                        count_pairs_sorted, distinct_gaps, pair_corr_functional,
                        rk_bruteforce, spacing_measure)
from .testfn import TestFunction, TestFunction2D, build_approx_pair, build_tensor_pair
from .spectral import (fourier_coefficients, parseval_check, weyl_inequality_check, weyl_sum,
                       weyl_sums, xn_direct, xn_spectral)
from .theta import (ThetaParams, theta_C, verify_bound_exp_sum, verify_cancellation,
                    verify_quarter_rotation)
from .lattice import (Lattice2D, check_height_bound, check_lipschitz, check_siegel_estimate,
                      count_in_disk, first_estimate_sum, shortest_vector, siegel_gaussian_sum)

__version__ = "0.1.0"
