"""Network configuration, geometry, antenna pattern and channel primitives.

Units are strictly SI inside the package: lengths in meters, densities in
points per square meter, powers in watts, angles in radians.  The CLI layer
converts the per-km^2 and dBm units that config files use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import DegenerateGeometry, ValidationError

# Mainlobe gain constant of the rectangular-cone antenna pattern.
G0 = 2.2846

# Half-beamwidths within this distance of pi/2 are treated as the
# omnidirectional case: unit gain, infinite projection radius.
_OMNI_EPS = 1e-9


def is_omni(half_beamwidth: float) -> bool:
    return half_beamwidth >= math.pi / 2.0 - _OMNI_EPS


@dataclass(frozen=True)
class BackhaulConfig:
    """mmWave backhaul sharing parameters.

    c_t: normalized backhaul capacity in bits/(s*Hz); math.inf disables the
         backhaul limit entirely.
    r_m: radius of the region sharing one gateway's capacity, meters.
    eps_bar: mean beam orientation error (before truncation), radians.
    altitude_for_beam: representative UAV altitude used for the mainlobe
         beamwidth; None means the midpoint of the flight band.
    """

    c_t: float = math.inf
    r_m: float = 500.0
    eps_bar: float = 0.1745
    altitude_for_beam: Optional[float] = None

    def __post_init__(self):
        if not self.c_t > 0.0:
            raise ValidationError(f"c_t must be positive (or inf), got {self.c_t}")
        if not self.r_m > 0.0:
            raise ValidationError(f"r_m must be positive, got {self.r_m}")
        if not self.eps_bar > 0.0:
            raise ValidationError(f"eps_bar must be positive, got {self.eps_bar}")
        if self.altitude_for_beam is not None and not self.altitude_for_beam > 0.0:
            raise ValidationError("altitude_for_beam must be positive when given")


@dataclass(frozen=True)
class NetworkConfig:
    """Every scalar parameter of the network model, in SI units.

    Invariants enforced here: densities positive, 0 < h_gu < h_lower <=
    h_upper, alpha > 2, tau > 0, half_beamwidth in (0, pi/2].
    """

    lambda_uav: float = 60e-6          # UAV hover centers per m^2
    lambda_gu: float = 1e-2            # ground users per m^2
    hover_radius: float = 100.0        # m
    h_lower: float = 91.5              # m, lower flight altitude
    h_upper: float = 111.5             # m, upper flight altitude
    h_gu: float = 1.5                  # m, ground-user antenna height
    alpha: float = 3.5                 # pathloss exponent
    tau: float = 1.0                   # SIR threshold, linear
    tx_power: float = 1.0              # W
    half_beamwidth: float = math.pi / 2.0
    backhaul: BackhaulConfig = field(default_factory=BackhaulConfig)
    seed: int = 0
    sim_region_radius: Optional[float] = None  # None: derived by the engine

    def __post_init__(self):
        if not self.lambda_uav > 0.0:
            raise ValidationError(f"lambda_uav must be positive, got {self.lambda_uav}")
        if not self.lambda_gu > 0.0:
            raise ValidationError(f"lambda_gu must be positive, got {self.lambda_gu}")
        if self.hover_radius < 0.0:
            raise ValidationError(f"hover_radius must be >= 0, got {self.hover_radius}")
        if not 0.0 < self.h_gu < self.h_lower:
            raise ValidationError(
                f"need 0 < h_gu < h_lower, got h_gu={self.h_gu}, h_lower={self.h_lower}")
        if not self.h_lower <= self.h_upper:
            raise ValidationError(
                f"need h_lower <= h_upper, got {self.h_lower} > {self.h_upper}")
        if not self.alpha > 2.0:
            raise ValidationError(f"alpha must exceed 2, got {self.alpha}")
        if not self.tau > 0.0:
            raise ValidationError(f"tau must be positive, got {self.tau}")
        if not self.tx_power > 0.0:
            raise ValidationError(f"tx_power must be positive, got {self.tx_power}")
        if not 0.0 < self.half_beamwidth <= math.pi / 2.0 + _OMNI_EPS:
            raise ValidationError(
                f"half_beamwidth must lie in (0, pi/2], got {self.half_beamwidth}")
        if self.sim_region_radius is not None and not self.sim_region_radius > 0.0:
            raise ValidationError("sim_region_radius must be positive when given")

    # Vertical link-distance band (UAV minus GU heights).
    @property
    def dh_lower(self) -> float:
        return self.h_lower - self.h_gu

    @property
    def dh_upper(self) -> float:
        return self.h_upper - self.h_gu

    @property
    def eta(self) -> float:
        """Density ratio lambda_uav / lambda_gu."""
        return self.lambda_uav / self.lambda_gu

    @property
    def is_omni(self) -> bool:
        return is_omni(self.half_beamwidth)

    @property
    def beam_altitude(self) -> float:
        """Representative altitude entering the mmWave beamwidth."""
        if self.backhaul.altitude_for_beam is not None:
            return self.backhaul.altitude_for_beam
        return 0.5 * (self.h_lower + self.h_upper)

    def with_overrides(self, **kwargs) -> "NetworkConfig":
        """Copy with some fields replaced; backhaul fields may be passed flat."""
        bh_fields = {"c_t", "r_m", "eps_bar", "altitude_for_beam"}
        bh_kwargs = {k: kwargs.pop(k) for k in list(kwargs) if k in bh_fields}
        cfg = replace(self, **kwargs) if kwargs else self
        if bh_kwargs:
            cfg = replace(cfg, backhaul=replace(cfg.backhaul, **bh_kwargs))
        return cfg


@dataclass
class UavState:
    """One UAV of a realization: hover circle plus slot-level state."""

    hover_center: tuple
    altitude: float
    hover_angle: float
    activated: bool = False
    served_gu: Optional[int] = None

    def position_at(self, hover_radius: float) -> tuple:
        """Instantaneous 2D position on the hover circle (center + swing)."""
        cx, cy = self.hover_center
        return (cx + hover_radius * math.cos(self.hover_angle),
                cy + hover_radius * math.sin(self.hover_angle))


@dataclass
class GroundUser:
    """One ground user: position plus association outcome."""

    position: tuple
    associated_uav: Optional[int] = None
    in_projection: bool = False


class UavField:
    """Array-backed container for a sampled UAV field (one slot snapshot)."""

    def __init__(self, centers: np.ndarray, altitudes: np.ndarray,
                 hover_angles: np.ndarray, hover_radius: float):
        self.centers = centers
        self.altitudes = altitudes
        self.hover_angles = hover_angles
        self.hover_radius = hover_radius
        self.activated = np.zeros(len(centers), dtype=bool)

    def __len__(self) -> int:
        return len(self.centers)

    @property
    def positions(self) -> np.ndarray:
        """Instantaneous 2D positions: center + R_h * (cos theta, sin theta)."""
        swing = self.hover_radius * np.stack(
            [np.cos(self.hover_angles), np.sin(self.hover_angles)], axis=1)
        return self.centers + swing

    def to_states(self) -> list:
        return [
            UavState(hover_center=tuple(c), altitude=float(a), hover_angle=float(t),
                     activated=bool(act))
            for c, a, t, act in zip(self.centers, self.altitudes,
                                    self.hover_angles, self.activated)
        ]


def sample_ppp(density: float, region_radius: float, rng: np.random.Generator) -> np.ndarray:
    """Sample a homogeneous PPP on a disk centered at the origin.

    Returns an (n, 2) array with n ~ Poisson(density * pi * region_radius^2)
    and points uniform on the disk.
    """
    if density < 0.0:
        raise ValidationError(f"density must be >= 0, got {density}")
    if not region_radius > 0.0:
        raise ValidationError(f"region_radius must be positive, got {region_radius}")
    n = rng.poisson(density * math.pi * region_radius * region_radius)
    if n == 0:
        return np.empty((0, 2))
    r = region_radius * np.sqrt(rng.random(n))
    ang = 2.0 * math.pi * rng.random(n)
    return np.stack([r * np.cos(ang), r * np.sin(ang)], axis=1)


def sample_uav_field(cfg: NetworkConfig, rng: np.random.Generator,
                     region_radius: Optional[float] = None) -> UavField:
    """Sample hover centers (PPP), altitudes U(h_L, h_U), hover angles U[0, 2pi)."""
    radius = region_radius if region_radius is not None else cfg.sim_region_radius
    if radius is None:
        raise ValidationError("no region radius given and cfg.sim_region_radius unset")
    centers = sample_ppp(cfg.lambda_uav, radius, rng)
    n = len(centers)
    altitudes = rng.uniform(cfg.h_lower, cfg.h_upper, n)
    hover_angles = 2.0 * math.pi * rng.random(n)
    return UavField(centers, altitudes, hover_angles, cfg.hover_radius)


def antenna_gain(phi, varphi, half_beamwidth: float):
    """Gain of the square-mainlobe pattern in direction (phi, varphi).

    G0/Phi^2 when both angles lie inside the mainlobe box [-Phi, Phi],
    zero outside.  The omnidirectional limit Phi = pi/2 returns exactly 1
    (the analysis treats that case as a unit-gain antenna; gain cancels in
    the SIR either way).
    """
    if not 0.0 < half_beamwidth <= math.pi / 2.0 + _OMNI_EPS:
        raise ValidationError(
            f"half_beamwidth must lie in (0, pi/2], got {half_beamwidth}")
    phi = np.asarray(phi, dtype=float)
    varphi = np.asarray(varphi, dtype=float)
    if is_omni(half_beamwidth):
        out = np.ones(np.broadcast(phi, varphi).shape)
        return float(out) if out.ndim == 0 else out
    inside = (np.abs(phi) <= half_beamwidth) & (np.abs(varphi) <= half_beamwidth)
    out = np.where(inside, G0 / (half_beamwidth * half_beamwidth), 0.0)
    return float(out) if out.ndim == 0 else out


def projection_radius(delta_h: float, half_beamwidth: float) -> float:
    """Ground footprint radius delta_h * tan(Phi); +inf in the omni limit."""
    if not delta_h > 0.0:
        raise ValidationError(f"delta_h must be positive, got {delta_h}")
    if not 0.0 < half_beamwidth <= math.pi / 2.0 + _OMNI_EPS:
        raise ValidationError(
            f"half_beamwidth must lie in (0, pi/2], got {half_beamwidth}")
    if is_omni(half_beamwidth):
        return math.inf
    return delta_h * math.tan(half_beamwidth)


def channel_power(distance, alpha: float, fading):
    """Received-power factor fading * distance^-alpha.

    fading is the small-scale power gain; under Rayleigh fading it is a
    unit-mean exponential draw.
    """
    d = np.asarray(distance, dtype=float)
    if np.any(d <= 0.0):
        raise DegenerateGeometry("link distance must be positive")
    out = np.asarray(fading, dtype=float) * d ** (-alpha)
    return float(out) if out.ndim == 0 else out
