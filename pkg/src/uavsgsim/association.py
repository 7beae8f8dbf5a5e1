"""User association rules, UAV activation, and projection-coverage probabilities.

Two association rules are supported: RTNA (each user connects to the UAV
whose instantaneous position is horizontally closest) and Semi-RTNA (closest
hover center, which avoids handovers as UAVs circle).
"""

from __future__ import annotations

import enum
import math
from typing import Optional

import numpy as np
from scipy.integrate import quad
from scipy.spatial import cKDTree

from .errors import QuadratureFailure, ValidationError
from .model import GroundUser, UavField, UavState

# Mean cell-load shape parameter of the activation-probability fit.
MU_CELL = 3.5

# Above this many pairwise distances, nearest-neighbor queries go through a
# KD-tree instead of dense broadcasting.
_BRUTE_PAIR_LIMIT = 200_000


class AssociationRule(enum.Enum):
    RTNA = "rtna"
    SEMI_RTNA = "semi"

    @classmethod
    def parse(cls, text: str) -> "AssociationRule":
        key = text.strip().lower()
        for rule in cls:
            if key == rule.value or key == rule.name.lower():
                return rule
        if key in ("semi-rtna", "semirtna"):
            return cls.SEMI_RTNA
        raise ValidationError(f"unknown association rule: {text!r}")


def nearest_index(points: np.ndarray, sites: np.ndarray) -> np.ndarray:
    """Index of the nearest site for each point; ties go to the lowest index."""
    if len(sites) == 0:
        raise ValidationError("no sites to associate with")
    if len(points) == 0:
        return np.empty(0, dtype=int)
    if len(points) * len(sites) <= _BRUTE_PAIR_LIMIT:
        d2 = ((points[:, None, :] - sites[None, :, :]) ** 2).sum(axis=2)
        return np.argmin(d2, axis=1)
    _, idx = cKDTree(sites).query(points)
    return np.asarray(idx, dtype=int)


def _reference_positions(uavs, rule: AssociationRule, hover_radius: Optional[float]):
    if isinstance(uavs, UavField):
        return uavs.positions if rule is AssociationRule.RTNA else uavs.centers
    if hover_radius is None:
        raise ValidationError("hover_radius is required for lists of UavState")
    if rule is AssociationRule.RTNA:
        return np.array([u.position_at(hover_radius) for u in uavs])
    return np.array([u.hover_center for u in uavs])


def associate(gus, uavs, rule: AssociationRule,
              hover_radius: Optional[float] = None) -> dict:
    """Map each ground user to its serving UAV index under the given rule.

    gus may be a list of GroundUser or an (m, 2) position array; uavs may be
    a UavField or a list of UavState (then hover_radius must be passed).
    The user objects' associated_uav field is filled in when present.
    """
    refs = _reference_positions(uavs, rule, hover_radius)
    if isinstance(gus, np.ndarray):
        positions = gus
        users = None
    else:
        users = list(gus)
        positions = np.array([g.position for g in users], dtype=float).reshape(-1, 2)
    idx = nearest_index(positions, refs)
    mapping = {i: int(j) for i, j in enumerate(idx)}
    if users is not None:
        for i, j in mapping.items():
            users[i].associated_uav = j
    return mapping


def mark_activation(uavs, association_map: dict):
    """Set activated flags (a UAV is active iff it serves >= 1 user).

    Returns (uavs, q_hat) where q_hat is the activated fraction.
    """
    if isinstance(uavs, UavField):
        flags = np.zeros(len(uavs), dtype=bool)
        served = np.fromiter(association_map.values(), dtype=int,
                             count=len(association_map))
        flags[served] = True
        uavs.activated = flags
        return uavs, float(flags.mean()) if len(uavs) else 0.0
    served = set(association_map.values())
    for j, uav in enumerate(uavs):
        uav.activated = j in served
    n = len(uavs)
    return uavs, (len(served) / n if n else 0.0)


def activation_probability(eta: float, mu: float = MU_CELL) -> float:
    """Probability that a UAV serves at least one user, as a function of
    the density ratio eta = lambda_uav / lambda_gu.

    q_a = 1 - (1 + (mu*eta)^-1)^-mu; strictly decreasing in eta, and
    q_a * eta -> 1 as eta -> inf (the activated density saturates at the
    user density).
    """
    if not eta > 0.0:
        raise ValidationError(f"eta must be positive, got {eta}")
    return 1.0 - (1.0 + 1.0 / (mu * eta)) ** (-mu)


def projection_probability_semi(lambda_uav: float, hover_radius: float,
                                proj_radius: float, rel_tol: float = 1e-10) -> float:
    """Probability that a user sits inside its serving UAV's ground footprint
    under Semi-RTNA.

    The serving UAV is the nearest hover center (distance r0 with density
    2*pi*lambda*r0*exp(-pi*lambda*r0^2)); the instantaneous horizontal
    distance is sqrt(r0^2 + R_h^2 - 2*r0*R_h*cos(theta)) with theta uniform,
    and the footprint test compares it against proj_radius.
    """
    if lambda_uav < 0.0 or hover_radius < 0.0 or proj_radius < 0.0:
        raise ValidationError("arguments must be nonnegative")
    if math.isinf(proj_radius):
        return 1.0
    if proj_radius == 0.0:
        return 0.0
    lam = lambda_uav
    rh = hover_radius
    rp = proj_radius
    if rh == 0.0 or lam == 0.0:
        return 1.0 - math.exp(-math.pi * lam * rp * rp) if lam > 0.0 else 0.0

    # Full inclusion for r0 < rp - rh; partial ring for |r0 - rh| < rp.
    full = 1.0 - math.exp(-math.pi * lam * max(0.0, rp - rh) ** 2)

    def integrand(r):
        c = (r * r + rh * rh - rp * rp) / (2.0 * r * rh)
        if c >= 1.0:
            return 0.0
        frac = math.acos(max(c, -1.0)) / math.pi
        return 2.0 * math.pi * lam * r * math.exp(-math.pi * lam * r * r) * frac

    lo = max(0.0, rp - rh) if rp > rh else max(0.0, rh - rp)
    lo = max(lo, 1e-300)
    hi = rh + rp
    val, err = quad(integrand, lo, hi, epsabs=1e-13, epsrel=rel_tol, limit=200)
    p = full + val
    if err > max(1e-9, 1e-6 * abs(p)):
        raise QuadratureFailure(
            f"projection probability integral error {err:.3e} too large")
    return min(max(p, 0.0), 1.0)


def projection_probability_rtna(lambda_active: float, proj_radius: float) -> float:
    """Probability that the nearest point of a density-lambda_active field
    lies within the footprint radius: 1 - exp(-pi*lambda*R_p^2)."""
    if lambda_active < 0.0 or proj_radius < 0.0:
        raise ValidationError("arguments must be nonnegative")
    if math.isinf(proj_radius):
        return 1.0
    return 1.0 - math.exp(-math.pi * lambda_active * proj_radius * proj_radius)
