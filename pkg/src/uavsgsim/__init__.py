"""Coverage and spatial-throughput evaluation for hovering fixed-wing UAV
access-point networks: closed-form quadratures and a Monte Carlo engine."""

from .analytic import (AnalyticResult, QuadratureSpec, Regime,
                       activated_density, cp_rtna_dir, cp_rtna_omni,
                       cp_semi_dir, cp_semi_omni, cp_semi_omni_upper_bound,
                       evaluate_analytic, optimize_beamwidth,
                       pae_half_beamwidth, st_from_cp, st_scaling_pae)
from .association import (AssociationRule, activation_probability, associate,
                          mark_activation, projection_probability_rtna,
                          projection_probability_semi)
from .backhaul import (backhaul_capacity, effective_function, mainlobe_gain,
                       mmwave_beamwidth)
from .errors import (BeamDomain, DegenerateGeometry, DegenerateRealization,
                     NonConvergence, ParseError, QuadratureFailure,
                     UavsgsimError, ValidationError)
from .model import (G0, BackhaulConfig, GroundUser, NetworkConfig, UavField,
                    UavState, antenna_gain, channel_power, projection_radius,
                    sample_ppp, sample_uav_field)
from .montecarlo import (MetricEstimate, SweepSpec, TrialOutcome,
                         default_region_radius, empirical_activation,
                         estimate, run_trial, sweep)
from .specfun import (delta_kernel, erf, gauss_2f1_neg, hyp2f1_1b, omega1,
                      omega2, psi)

__version__ = "0.1.0"

__all__ = [
    "AnalyticResult", "AssociationRule", "BackhaulConfig", "BeamDomain",
    "DegenerateGeometry", "DegenerateRealization", "G0", "GroundUser",
    "MetricEstimate", "NetworkConfig", "NonConvergence", "ParseError",
    "QuadratureFailure", "QuadratureSpec", "Regime", "SweepSpec",
    "TrialOutcome", "UavField", "UavState", "UavsgsimError",
    "ValidationError", "activated_density", "activation_probability",
    "antenna_gain", "associate", "backhaul_capacity", "channel_power",
    "cp_rtna_dir", "cp_rtna_omni", "cp_semi_dir", "cp_semi_omni",
    "cp_semi_omni_upper_bound", "default_region_radius", "delta_kernel",
    "effective_function", "empirical_activation", "erf", "estimate",
    "evaluate_analytic", "gauss_2f1_neg", "hyp2f1_1b", "mainlobe_gain",
    "mark_activation", "mmwave_beamwidth", "omega1", "omega2",
    "optimize_beamwidth", "pae_half_beamwidth", "projection_probability_rtna",
    "projection_probability_semi", "projection_radius", "psi", "run_trial",
    "sample_ppp", "sample_uav_field", "st_from_cp", "st_scaling_pae", "sweep",
]
