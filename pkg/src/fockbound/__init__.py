"""Integration lemmas for the kernel s^n e^{-s}/n! and norm bounds for
radial Toeplitz operators on the Fock space."""

from .extremal import ExtremalInterval, best_interval, galbis_bound, verify_rearrangement
from .gamma_kernel import (
    IntervalMass,
    interval_mass,
    kernel,
    log_factorial,
    log_reg_lower_gamma,
    reg_lower_gamma,
    reg_upper_gamma,
)
from .lemmas import check_lemma_1_1, check_lemma_1_2, check_lemma_1_3, sweep
from .reports import LemmaReport, SlackViolation
from .symbols import (
    StepSymbol,
    SymbolError,
    SymbolParseError,
    TabulatedSymbol,
    l1_norm,
    load_symbol,
    save_symbol,
    validate,
    weighted_kernel_integral,
)
from .toeplitz import (
    EigenvalueSequence,
    FockCoefficients,
    RadialSymbol,
    apply_diagonal,
    eigenvalue,
    norm_estimate,
    quadratic_form,
    spectrum,
    to_t_variable,
)

__version__ = "0.1.0"
