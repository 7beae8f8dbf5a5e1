"""mmWave backhaul capacity model.

A gateway's normalized capacity c_t is shared equally by the activated UAVs
inside a disk of radius r_m; each UAV's share is scaled by the mainlobe gain
and by the probability that the beam orientation error stays inside the
mainlobe.  The mainlobe must cover the whole hover circle, which ties the
beamwidth to hover radius and altitude.
"""

from __future__ import annotations

import math

from .errors import BeamDomain, ValidationError
from .model import BackhaulConfig

# Width used instead of a literally zero beamwidth (hovering disabled):
# G_m * F stays finite as the beamwidth shrinks, so this clamp only avoids
# the removable singularity of the two factors.
MIN_BEAMWIDTH = 1e-4


def mmwave_beamwidth(hover_radius: float, altitude: float) -> float:
    """Mainlobe beamwidth 2*arctan(R_h / h) that covers the hover circle.

    Returns 0.0 as a sentinel for R_h = 0 (callers treat it as the
    no-hover, effectively unlimited-gain case).  Raises BeamDomain when the
    result leaves (0, pi/2), where the capacity model is defined.
    """
    if not altitude > 0.0:
        raise ValidationError(f"altitude must be positive, got {altitude}")
    if hover_radius < 0.0:
        raise ValidationError(f"hover_radius must be >= 0, got {hover_radius}")
    if hover_radius == 0.0:
        return 0.0
    theta = 2.0 * math.atan(hover_radius / altitude)
    if theta >= math.pi / 2.0:
        raise BeamDomain(
            f"mainlobe beamwidth {theta:.4f} rad outside (0, pi/2); "
            f"hover radius {hover_radius} m is too large for altitude {altitude} m")
    return theta


def mainlobe_gain(theta_beam: float) -> float:
    """mmWave mainlobe gain 2*pi / theta."""
    if not 0.0 < theta_beam < math.pi / 2.0:
        raise BeamDomain(f"beamwidth must lie in (0, pi/2), got {theta_beam}")
    return 2.0 * math.pi / theta_beam


def effective_function(theta_beam: float, eps_bar: float) -> float:
    """Probability that the absolute orientation error falls inside the
    mainlobe, for an exponential error truncated to [0, pi]:

        F(theta) = (1 - exp(-theta/(2*eps_bar))) / (1 - exp(-pi/eps_bar)).

    Increasing in theta, decreasing in eps_bar, always in (0, 1).
    """
    if not 0.0 < theta_beam < math.pi / 2.0:
        raise BeamDomain(f"beamwidth must lie in (0, pi/2), got {theta_beam}")
    if not eps_bar > 0.0:
        raise ValidationError(f"eps_bar must be positive, got {eps_bar}")
    return (1.0 - math.exp(-theta_beam / (2.0 * eps_bar))) / \
        (1.0 - math.exp(-math.pi / eps_bar))


def backhaul_capacity(cfg: BackhaulConfig, hover_radius: float,
                      lambda_active: float, altitude: float = None) -> float:
    """Per-UAV backhaul capacity G_m(theta) * F(theta) * c_t / (lambda_a * pi * r_m^2).

    The denominator counts activated UAVs sharing one gateway.  Sentinels:
    c_t = inf or a nonpositive activated density yield +inf (no backhaul
    limit); hover_radius = 0 clamps the beamwidth at MIN_BEAMWIDTH.
    """
    if math.isinf(cfg.c_t):
        return math.inf
    if lambda_active <= 0.0:
        return math.inf
    h = altitude if altitude is not None else cfg.altitude_for_beam
    if h is None:
        raise ValidationError("no representative altitude for the mmWave beam")
    theta = mmwave_beamwidth(hover_radius, h)
    if theta == 0.0:
        theta = MIN_BEAMWIDTH
    n_shared = lambda_active * math.pi * cfg.r_m * cfg.r_m
    return mainlobe_gain(theta) * effective_function(theta, cfg.eps_bar) * \
        cfg.c_t / n_shared
