"""gmshadow: simulation and analysis of a non-local Gierer-Meinhardt shadow
system on isotropically evolving domains."""

from .analysis import (
    BlowUpLocation,
    BlowUpReport,
    BoundReport,
    MomentCriteria,
    OracleResult,
    Verdict,
    bernoulli_bound,
    bernoulli_oracle,
    bernoulli_profile_static,
    detect_blowup,
    fit_rate,
    locate_blowup,
    logistic_mean_threshold,
    mean_threshold,
    moment_blowup_check,
    threshold_integral,
)
from .evolution import (
    CoefficientBounds,
    EvolutionLaw,
    LawKind,
    coefficient_bounds,
    dilution_coefficient,
    dissipation_coeff,
    phi_squared,
    reaction_coeff,
    scale_factor,
    sigma_horizon,
    sigma_of_t,
    t_of_sigma,
)
from .initdata import InitKind, InitSpec, build_initial, spike_profile
from .mesh import (
    Field,
    RadialGrid,
    RectGrid,
    laplacian,
    laplacian_radial,
    laplacian_rect,
    mean,
    read_field_csv,
    sup_norm,
    write_field_csv,
)
from .params import (
    DerivedIndices,
    Parameters,
    derive_indices,
    diffusion_blowup_condition,
    global_existence_condition,
    turing_condition,
)
from .solver import (
    NonPositiveStateError,
    RunConfig,
    RunState,
    SystemKind,
    TimeSeries,
    advance,
    rhs,
    step,
)

__version__ = "0.1.0"
