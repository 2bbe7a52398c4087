"""Standard and maximal quantum f-divergences for finite-dimensional matrices."""

from ._accel import backend_name
from .divergences import (
    DivergenceReport,
    approximant_sequence,
    classical_f_divergence,
    compression_sequence,
    d_bs,
    eps_regularized_maximal,
    martingale_sequence,
    maximal_closed_form,
    maximal_f_divergence,
    measured_estimate,
    renyi,
    renyi_quasi,
    standard_f_divergence,
)
from .errors import InputError, NumericalError, QFDivError
from .ocf import (
    Canonical,
    cutoff_approximant,
    make_canonical,
    make_named,
    parse_function,
    ratio_sum,
    transpose,
)
from .reverse_tests import (
    ReverseTest,
    evaluate_reverse_test,
    minimal_reverse_test,
    refine_reverse_test,
    verify_reverse_test,
)
from .states import (
    PositiveFunctional,
    apply_predual,
    commutes,
    kraus_channel,
    make_functional,
    pinching_channel,
    random_channel,
    random_density,
)

__version__ = "0.1.0"
