"""coldbeam: fiber-averaged Lorentz dynamics for narrow relativistic beams.

The library builds the velocity-dependent connection whose auto-parallel
curves are Lorentz-force orbits, averages it over a compactly supported
velocity distribution into an affine connection, integrates both flows,
and measures how well the normalized mean-velocity field of the kinetic
solution satisfies the cold-fluid (auto-parallel) equation.  Everything
is instrumented for scaling studies in the narrowness diameter, beam
energy, and evolution time.
"""

from coldbeam.geometry import (
    minkowski_metric,
    minkowski_inner,
    eta_bar_matrix,
    eta_bar_inner,
    eta_bar_norm,
    hyperboloid_lift,
    fiber_volume_weight,
    boost_to,
    NormalCoordinateMap,
    normal_coordinates,
)
from coldbeam.em_fields import (
    FieldTensor,
    FieldScenario,
    field_from_potential,
    check_closed,
    field_operator_norm,
    make_scenario,
    scenario_names,
)
from coldbeam.connections import (
    lorentz_coeffs,
    lorentz_spray,
    averaged_coeffs,
    interpolated_coeffs,
    covariant_derivative,
)
from coldbeam.distribution import (
    BumpProfile,
    PhaseDistribution,
    MomentSet,
    SupportStats,
    make_beam_distribution,
    compute_moments,
    support_stats,
    sobolev_norms,
    window_support,
    dirac_limit_distribution,
)

__all__ = [
    "minkowski_metric",
    "minkowski_inner",
    "eta_bar_matrix",
    "eta_bar_inner",
    "eta_bar_norm",
    "hyperboloid_lift",
    "fiber_volume_weight",
    "boost_to",
    "NormalCoordinateMap",
    "normal_coordinates",
    "FieldTensor",
    "FieldScenario",
    "field_from_potential",
    "check_closed",
    "field_operator_norm",
    "make_scenario",
    "scenario_names",
    "lorentz_coeffs",
    "lorentz_spray",
    "averaged_coeffs",
    "interpolated_coeffs",
    "covariant_derivative",
    "BumpProfile",
    "PhaseDistribution",
    "MomentSet",
    "SupportStats",
    "make_beam_distribution",
    "compute_moments",
    "support_stats",
    "sobolev_norms",
    "window_support",
    "dirac_limit_distribution",
]

__version__ = "0.1.0"
