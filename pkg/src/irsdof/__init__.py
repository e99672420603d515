"""Sum-DoF bounds for interference networks assisted by reconfigurable surfaces.

Library layout:

* :mod:`irsdof.numerics` -- complex linear solves and sup-norm feasibility,
* :mod:`irsdof.channel` -- scenario configs and channel sampling,
* :mod:`irsdof.topology` -- connectivity patterns and their enumeration,
* :mod:`irsdof.irs` -- surface coefficient solvers per amplitude class,
* :mod:`irsdof.bounds` -- closed forms and Monte Carlo bound estimators,
* :mod:`irsdof.alignment` -- desk-scale alignment certification,
* :mod:`irsdof.montecarlo` -- substream RNG and the estimate driver,
* :mod:`irsdof.cli` -- the ``irsdof`` command.
"""

__version__ = "0.1.0"

from .alignment import (
    DofPoint,
    IaConfig,
    SubspaceReport,
    achieved_dof,
    build_beamformers,
    certify,
    effective_slot_channels,
    example1_config,
    generic_config,
    predicted_report,
)
from .bounds import (
    BoundCurvePoint,
    active_lower_sum,
    active_upper_sum,
    eps_relaxed_lower_sum_mc,
    outer_pair_value,
    passive_lower_sum_mc,
    passive_upper_sum_mc,
    region_contains,
    rho_limited_lower_sum_mc,
    timeshare_contains,
)
from .channel import ChannelRealization, SystemConfig, sample, variance_params
from .irs import (
    FeasibilityReport,
    IrsCoefficients,
    IrsMode,
    build_cancellation_system,
    effective_channel,
    eps_relaxed_lambda,
    lossless_phase_align,
    sinr_triplet,
    solve_active,
    solve_passive_candidate,
)
from .montecarlo import EstimatorResult, RandomStream, estimate, wilson_interval
from .numerics import min_linf_feasible, min_norm_solve, rank_of, solve_square
from .topology import (
    NetworkMatrix,
    cancellation_set,
    enumerate_family,
    family_size,
    w_decomposition,
    w_pattern,
)

__all__ = [name for name in dir() if not name.startswith("_")]
