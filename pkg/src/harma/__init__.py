"""Humbert-polynomial fractionally differenced ARMA (HARMA) processes."""

__version__ = "0.1.0"

from .covariance import (
    AcvfTable,
    acvf_ma,
    acvf_minimum_phase,
    acvf_spectral,
    acvf_spectral_table,
    lrd_asymptote,
    lrd_ratio_probe,
    minimum_phase_coefficients,
    printed_double_sum,
    sample_acvf,
)
from .errors import (
    BurnInWarning,
    DegeneratePolynomialError,
    DomainError,
    HarmaError,
    NonCausalWarning,
    PrecisionWarning,
    QuadratureError,
    RecurrenceMismatchError,
    TruncationWarning,
    UnknownFamilyError,
    ValidationError,
)
from .humbert import (
    CoeffSeries,
    PolyFamily,
    coeff_explicit,
    coeff_explicit_type1,
    coeff_explicit_type2,
    coeff_recurrence,
    coeff_series_oracle,
    humbert_coefficients,
    specialization,
)
from .model import (
    HarmaModel,
    StationarityReport,
    ma_coefficients,
    psi_weights,
    require_stationary,
    validate,
)
from .simulate import TimeSeries, gaussian_noise, fractional_filter, impulse_response, simulate
from .spectral import (
    SpectrumGrid,
    kernel_zeros,
    periodogram,
    singular_frequencies,
    spectral_density,
    spectrum_grid,
    u_function,
)
