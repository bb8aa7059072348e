"""Fourier-analytic bounds for Kakeya and (d, k, Gamma)-sets over finite fields."""

from .finite_field import FieldCtx, FieldElement, dot, make_field
from .fourier import GridFunction, Measure, dft_fast, dft_naive, dft_naive_many, plancherel_defect, project, sup_nonzero
from .grassmannian import Subspace, enumerate_grassmannian, gaussian_binomial, perp, stabbing_count
from .kakeya_sets import (
    AffinePlaneFamily,
    PointSet,
    construct_mt_kakeya_2d,
    expand,
    is_dk_set,
    is_kakeya,
    product_with_full,
    random_gamma,
)
from .minimax import minimax_measure, sharpness_report
from .salem_measures import (
    incidence_ft_closed_form,
    incidence_ft_closed_form_all,
    incidence_measure,
    is_salem_witness,
    min_sup_lower_bound,
    salem_bound_dk,
    size_estimate,
    verify_salem_bound,
)

__version__ = "0.1.0"
