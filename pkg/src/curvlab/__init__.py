"""Numerical verification of positivity, contractivity, curvature inequalities and
infinite divisibility for reproducing kernels."""

from curvlab.curvature import (curvature_compare, curvature_gram_check, curvature_matrix, curvature_negativity,
                               curvature_scalar, curvature_series)
from curvlab.divisibility import (divisibility_check, divisible_contraction_check, log_kernel_cpd_check,
                                  reconstruct)
from curvlab.dsl import DSLDomainError, DSLError, DSLSyntaxError, parse_kernel, parse_kernel_dsl
from curvlab.kernels import (Constant, Contract, DetBall2, Diagonal, DomainError, DruryArveson, Kernel, Power,
                             Product, SzegoDisc, SzegoPolydisc, derivatives, evaluate, normalize_at, taylor_expand,
                             to_dsl)
from curvlab.operators import (contraction_test, local_contraction_test, local_operator, polydisc_contraction_test,
                               row_contraction_test, shift_from_diagonal)
from curvlab.posdef import PosDefVerdict, Verdict, cpd_check, gram_psd, posdef_function_check, taylor_psd
from curvlab.series import HermitianSeries, Series, SeriesError

__version__ = "0.1.0"
