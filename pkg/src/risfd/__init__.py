"""Full-duplex OFDM self-interference cancellation with in-device
reflecting surfaces: near-field channel modeling, joint power/reflection
optimization, and experiment drivers."""

from .exceptions import (
    ConfigurationError,
    GeometryError,
    NumericalError,
    RisfdError,
)
from .fading import RicianParams, TapChannel, cfr, cfr_at_subcarrier, draw_rician_taps
from .nearfield import (
    SPEED_OF_LIGHT,
    CarrierPlan,
    Point3,
    SurfaceGeometry,
    antenna_to_surface_cfr,
    link_phase,
    patch_gain,
    si_cfr,
    subcarrier_frequency,
    unit_cell_center,
)
from .optimizer import OptResult, SicOptimizer, alternate_optimize
from .power import (
    RatioTerms,
    allocation_for_multiplier,
    auxiliary_q,
    ratio_objective,
    saturating_allocation,
    transformed_objective,
    waterfill,
)
from .reflection import (
    QuadraticForm,
    RcgResult,
    assemble_quadratic,
    auxiliary_l,
    brute_force_discrete,
    disk_multipliers,
    euclidean_gradient,
    npp_project,
    random_rc,
    rcg_minimize,
    retract,
    riemannian_gradient,
    solve_ideal,
    transport,
)
from .runner import ScenarioReport, convergence_trace, run_scenario, run_trial, sweep
from .scenario import (
    ScenarioConfig,
    build_channel_set,
    config_from_file,
    dbm_to_watts,
    snap_to_square,
    watts_to_dbm,
)
from .system import (
    ChannelSet,
    FeasibleSet,
    PowerAllocation,
    RcVector,
    assemble_cascades,
    fd_capacity,
    fd_capacity_sic_coefficient,
    hd_capacity,
    phase_error_bound,
    residual_si_gains,
    sic_capability,
    sic_objective,
)

__version__ = "0.1.0"
