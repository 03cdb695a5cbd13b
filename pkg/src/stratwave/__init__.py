"""stratwave: spectral laboratory for non-local dispersive-dissipative waves."""

from .errors import (BadParameter, ConfigInvalid, ExcludedParameters,
                     GridMismatch, InsufficientDecades, InvalidN, InvalidRange,
                     NoContraction, NonFinite, StratwaveError, UnderResolved,
                     UnknownPreset, WindowContaminated, ZeroMean)
from .model import (DispersionSymbol, ModelParams, amplification_bound,
                    dissipation_symbol, fitted_growth_constant,
                    linear_multiplier, model_from_config, preset,
                    validate_params)
from .spectral import (Field, Grid, SpectralField, convolve, dealias,
                       derivative, field_from_binary, field_from_csv,
                       field_to_binary, field_to_csv, hilbert, integral,
                       to_physical, to_spectral, wrap_contamination)
from .kernel import (KernelField, asymptotic_coefficient, kernel_derivative_field,
                     kernel_field, kernel_hat, leading_jump,
                     verify_pointwise_bound)
from .solver import (DatumSpec, EtdPropagator, SolverConfig, Trajectory,
                     datum_from_config, dissipation_rate, energy, etd_step,
                     make_datum, picard_solve, solve)
from .analysis import (DecayFit, Weight, dichotomy_experiment, growth_envelope,
                       lower_bound_check, mean, tail_exponent, weighted_norm,
                       weighted_persistence_experiment, zero_mean_project)

__version__ = "0.1.0"
