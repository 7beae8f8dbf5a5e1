"""Deterministic evaluation of the closed-form coverage and throughput results.

Every coverage probability here is an expectation of a Laplace-transform
factor over the serving-link geometry (nearest-neighbor distance r0, hover
angle theta, vertical distance dh).  The expectations are computed with
nested Gauss-Legendre tensor quadrature under global node doubling until the
requested relative tolerance is met; the r0 dimension is integrated in the
variable u = exp(-pi*lambda*r0^2) so the nearest-neighbor density and its
truncation quantile are exact, and panels are split at r0 = R_h where the
closest-interferer distance switches branch.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .association import (AssociationRule, activation_probability,
                          projection_probability_semi)
from .backhaul import backhaul_capacity
from .errors import QuadratureFailure, ValidationError
from .model import NetworkConfig
from .specfun import delta_kernel, erf, omega1, omega2


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and budgets for the nested quadratures."""

    rel_tol: float = 1e-6
    abs_tol: float = 1e-12
    r0_truncation_quantile: float = 1.0 - 1e-8
    max_depth: int = 6  # node-doubling rounds before giving up

    def __post_init__(self):
        if not (self.rel_tol > 0.0 and self.abs_tol > 0.0):
            raise ValidationError("tolerances must be positive")
        if not 0.999 < self.r0_truncation_quantile < 1.0:
            raise ValidationError("truncation quantile must lie in (0.999, 1)")


DEFAULT_QUAD = QuadratureSpec()


class Regime(enum.Enum):
    BACKHAUL_LIMITED = "backhaul_limited"
    BACKHAUL_UNLIMITED = "backhaul_unlimited"


@dataclass(frozen=True)
class AnalyticResult:
    """A coverage probability with its throughput under the backhaul cap."""

    cp: float
    st: float
    c_b_used: float
    regime: Regime


def activated_density(cfg: NetworkConfig) -> float:
    """Density of UAVs serving at least one user, q_a(eta) * lambda."""
    return activation_probability(cfg.eta) * cfg.lambda_uav


def st_from_cp(lambda_active: float, cp: float, tau: float, c_b: float) -> AnalyticResult:
    """Area spectral throughput lambda_a * cp * min(log2(1+tau), c_b)."""
    if not 0.0 <= cp <= 1.0:
        raise ValidationError(f"cp must lie in [0, 1], got {cp}")
    rate = math.log2(1.0 + tau)
    limited = c_b < rate
    st = lambda_active * cp * min(rate, c_b)
    return AnalyticResult(cp=cp, st=st, c_b_used=c_b,
                          regime=Regime.BACKHAUL_LIMITED if limited
                          else Regime.BACKHAUL_UNLIMITED)


@lru_cache(maxsize=64)
def _gl01(n: int):
    """Gauss-Legendre nodes/weights mapped to [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def _r_nodes_from_density(lam: float, r_lo: float, r_hi, n: int):
    """Nodes/weights integrating f(r) = 2*pi*lam*r*exp(-pi*lam*r^2) on
    [r_lo, r_hi] via the substitution u = exp(-pi*lam*r^2).

    Bounds may be arrays (broadcast); returns arrays shaped (..., n).
    """
    x, w = _gl01(n)
    r_lo = np.asarray(r_lo, dtype=float)
    r_hi = np.asarray(r_hi, dtype=float)
    u_hi = np.exp(-math.pi * lam * r_lo ** 2)
    u_lo = np.exp(-math.pi * lam * r_hi ** 2)
    span = u_hi - u_lo
    u = np.maximum(u_lo[..., None] + span[..., None] * x, 1e-300)
    r = np.sqrt(np.maximum(-np.log(u), 0.0) / (math.pi * lam))
    return r, span[..., None] * w


def _dh_nodes(cfg: NetworkConfig, delta_h: Optional[float], n: int):
    if delta_h is not None:
        if not delta_h > 0.0:
            raise ValidationError(f"delta_h must be positive, got {delta_h}")
        return np.array([delta_h]), np.array([1.0])
    lo, hi = cfg.dh_lower, cfg.dh_upper
    if hi - lo < 1e-12:
        return np.array([lo]), np.array([1.0])
    x, w = _gl01(n)
    return lo + (hi - lo) * x, w  # weights integrate the uniform density


def _doubling(evaluate, spec: QuadratureSpec, sizes):
    """Run `evaluate(sizes)` under global node doubling to tolerance."""
    prev = evaluate(sizes)
    for _ in range(spec.max_depth):
        sizes = tuple(2 * s for s in sizes)
        cur = evaluate(sizes)
        if abs(cur - prev) <= max(spec.abs_tol, spec.rel_tol * abs(cur)):
            return cur
        prev = cur
    raise QuadratureFailure(
        f"quadrature did not reach rel_tol={spec.rel_tol} within "
        f"{spec.max_depth} doublings (last delta {abs(cur - prev):.3e})")


def cp_semi_omni(cfg: NetworkConfig, spec: QuadratureSpec = DEFAULT_QUAD,
                 delta_h: Optional[float] = None) -> float:
    """Coverage probability, Semi-RTNA association, omnidirectional antennas.

    Triple expectation over (r0, theta, dh) of
    exp(-2*pi*lambda_a * l^2 * y * omega1(alpha, y) / (alpha-2)) with
    y = tau * (d0/l)^alpha, d0 the 3D serving distance and l the closest
    possible interferer distance (dh while the serving circle can overfly
    the user, else the near edge of the serving void).
    """
    lam = cfg.lambda_uav
    lam_a = activated_density(cfg)
    alpha, tau, rh = cfg.alpha, cfg.tau, cfg.hover_radius
    if tau < 1e-300 or lam_a < 1e-300:
        return 1.0
    u_min = 1.0 - spec.r0_truncation_quantile
    r_max = math.sqrt(-math.log(u_min) / (math.pi * lam))
    scale = 2.0 * math.pi * lam_a / (alpha - 2.0)

    def evaluate(sizes):
        n_dh, n_r, n_th = sizes
        dh, w_dh = _dh_nodes(cfg, delta_h, n_dh)
        panels = [(0.0, rh), (rh, r_max)] if 0.0 < rh < r_max else [(0.0, r_max)]
        total = 0.0
        for (a, b) in panels:
            r, w_r = _r_nodes_from_density(lam, a, b, n_r)
            if rh > 0.0:
                th, w_th = _gl01(n_th)
                th = math.pi * th  # weight 1/pi * pi cancels
            else:
                th, w_th = np.array([0.0]), np.array([1.0])
            D = dh[:, None, None]
            R = r[None, :, None]
            T = th[None, None, :]
            d0sq = R * R + rh * rh - 2.0 * R * rh * np.cos(T) + D * D
            l2 = np.where(R <= rh, D * D, (R - rh) ** 2 + D * D)
            y = tau * (d0sq / l2) ** (0.5 * alpha)
            expo = -scale * l2 * y * omega1(alpha, y)
            vals = np.exp(expo)
            total += np.einsum("i,j,k,ijk->", w_dh, w_r, w_th, vals)
        return total

    return float(min(max(_doubling(evaluate, spec, (8, 24, 16)), 0.0), 1.0))


def cp_semi_omni_upper_bound(cfg: NetworkConfig, delta_h: float) -> float:
    """Closed-form upper bound on the Semi-RTNA omni coverage probability at
    a fixed vertical distance.

    Evaluates exp(-pi*lam*d*dh^2) * E_r0[exp(-pi*lam*d*(r0-R_h)^2)] with
    d = delta_kernel(alpha, tau, q_a); the expectation over the
    nearest-center density has the exact value

        exp(-pi*lam*d*R_h^2) / (1+d)
        + exp(-pi*lam*d*R_h^2/(1+d)) * d*pi*sqrt(lam)*R_h
          * (1 + erf(d*sqrt(pi*lam)*R_h/sqrt(1+d))) / (1+d)^(3/2).
    """
    if not delta_h > 0.0:
        raise ValidationError(f"delta_h must be positive, got {delta_h}")
    lam = cfg.lambda_uav
    q_a = activation_probability(cfg.eta)
    d = delta_kernel(cfg.alpha, cfg.tau, q_a)
    if d == 0.0:
        return 1.0
    rh = cfg.hover_radius
    one = 1.0 + d
    first = math.exp(-math.pi * lam * d * rh * rh) / one
    arg = d * math.sqrt(math.pi * lam) * rh / math.sqrt(one)
    second = math.exp(-math.pi * lam * d * rh * rh / one) * \
        d * math.pi * math.sqrt(lam) * rh * (1.0 + float(erf(arg))) / one ** 1.5
    return math.exp(-math.pi * lam * d * delta_h * delta_h) * (first + second)


def cp_rtna_omni(cfg: NetworkConfig, delta_h: Optional[float] = None) -> float:
    """Coverage probability, RTNA association, omnidirectional antennas.

    E_dh[exp(-pi*lam*d*dh^2)] / (1+d) in closed form through the error
    function; independent of the hover radius by construction.
    """
    lam = cfg.lambda_uav
    q_a = activation_probability(cfg.eta)
    d = delta_kernel(cfg.alpha, cfg.tau, q_a)
    if d < 1e-300:
        return 1.0
    one = 1.0 + d
    if delta_h is not None:
        return math.exp(-math.pi * lam * d * delta_h * delta_h) / one
    lo, hi = cfg.dh_lower, cfg.dh_upper
    if hi - lo < 1e-9:
        mid = 0.5 * (lo + hi)
        return math.exp(-math.pi * lam * d * mid * mid) / one
    a = math.sqrt(math.pi * lam * d)
    return float(erf(a * hi) - erf(a * lo)) / \
        (2.0 * math.sqrt(lam * d) * one * (hi - lo))


def _projection_geometry(rh: float, r, rp):
    """Half-opening angle of the hover angles that put the serving UAV's
    footprint over the user, for serving-center distance r."""
    r = np.asarray(r, dtype=float)
    if rh == 0.0:
        return np.where(r < rp, math.pi, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        c = (r * r + rh * rh - rp * rp) / (2.0 * r * rh)
        c = np.where(r == 0.0, np.sign(rh - rp) * np.inf, c)
    return np.arccos(np.clip(c, -1.0, 1.0))


def cp_semi_dir(cfg: NetworkConfig, spec: QuadratureSpec = DEFAULT_QUAD,
                delta_h: Optional[float] = None) -> float:
    """Coverage probability, Semi-RTNA association, directional antennas.

    Integrates the conditional success factor over the region of (r0, theta)
    where the user sits inside the serving footprint, then over dh; the
    interference exponent uses the thinned density p_p * lambda_a between
    the nearest-interferer distance and the slant footprint edge R_p_hat.
    """
    if cfg.is_omni:
        return cp_semi_omni(cfg, spec, delta_h)
    lam = cfg.lambda_uav
    lam_a = activated_density(cfg)
    alpha, tau, rh = cfg.alpha, cfg.tau, cfg.hover_radius
    tan_phi = math.tan(cfg.half_beamwidth)
    r_cap = math.sqrt(-math.log(1.0 - spec.r0_truncation_quantile) /
                      (math.pi * lam))

    def evaluate(sizes):
        n_dh, n_r, n_th = sizes
        dh, w_dh = _dh_nodes(cfg, delta_h, n_dh)
        total = 0.0
        for dh_i, wdh_i in zip(dh, w_dh):
            rp = dh_i * tan_phi
            p_p = projection_probability_semi(lam, rh, rp)
            if p_p == 0.0:
                continue
            rp_hat_sq = rp * rp + dh_i * dh_i
            r_lo, r_hi = abs(rh - rp), min(rh + rp, r_cap)
            inner_full = min(max(0.0, rp - rh), r_cap)  # full-inclusion disk
            panels = []
            if inner_full > 0.0:
                panels.append((0.0, min(inner_full, rh)))
                if inner_full > rh:
                    panels.append((rh, inner_full))
            partial = [(max(r_lo, inner_full), min(rh, r_hi)),
                       (max(r_lo, rh, inner_full), r_hi)]
            panels.extend((a, b) for a, b in partial if b > a)
            for (a, b) in panels:
                r, w_r = _r_nodes_from_density(lam, a, b, n_r)
                th_max = _projection_geometry(rh, r, rp)
                x_th, w_th = _gl01(n_th)
                T = th_max[:, None] * x_th[None, :]
                frac = th_max / math.pi
                d0sq = r[:, None] ** 2 + rh * rh - \
                    2.0 * r[:, None] * rh * np.cos(T) + dh_i * dh_i
                l2 = np.where(r[:, None] <= rh, dh_i * dh_i,
                              (r[:, None] - rh) ** 2 + dh_i * dh_i)
                y_far = (rp_hat_sq / d0sq) ** (0.5 * alpha) / tau
                y_near = (l2 / d0sq) ** (0.5 * alpha) / tau
                ps = rp_hat_sq * omega2(alpha, y_far) - \
                    l2 * omega2(alpha, y_near)
                vals = np.exp(-math.pi * p_p * lam_a * ps)
                total += wdh_i * np.einsum("i,i,ij,j->", w_r, frac, vals, w_th)
        return total

    return float(min(max(_doubling(evaluate, spec, (8, 16, 12)), 0.0), 1.0))


def cp_rtna_dir(cfg: NetworkConfig, spec: QuadratureSpec = DEFAULT_QUAD,
                delta_h: Optional[float] = None, pae_c: Optional[float] = None,
                serving_density: str = "activated") -> float:
    """Coverage probability, RTNA association, directional antennas.

    The serving candidate field has density lambda_a ("activated",
    default) or the full lambda ("total"); that choice drives both the
    nearest-distance density and the in-footprint probability p_hat.  Under
    the footprint-matching policy (pae_c set) every UAV's footprint radius
    is pae_c/sqrt(lambda_a) regardless of its altitude.
    """
    if pae_c is None and cfg.is_omni:
        return cp_rtna_omni(cfg, delta_h)
    if serving_density not in ("activated", "total"):
        raise ValidationError(f"unknown serving_density {serving_density!r}")
    lam_a = activated_density(cfg)
    lam_d = lam_a if serving_density == "activated" else cfg.lambda_uav
    alpha, tau = cfg.alpha, cfg.tau
    w_ref = float(omega2(alpha, 1.0 / tau))
    tan_phi = math.tan(cfg.half_beamwidth) if not cfg.is_omni else math.inf

    def evaluate(sizes):
        n_dh, n_r = sizes
        dh, w_dh = _dh_nodes(cfg, delta_h, n_dh)
        total = 0.0
        for dh_i, wdh_i in zip(dh, w_dh):
            rp = pae_c / math.sqrt(lam_a) if pae_c is not None else dh_i * tan_phi
            p_hat = 1.0 - math.exp(-math.pi * lam_d * rp * rp)
            if p_hat == 0.0:
                continue
            rp_hat_sq = rp * rp + dh_i * dh_i
            r, w_r = _r_nodes_from_density(lam_d, 0.0, rp, n_r)
            dchk_sq = r * r + dh_i * dh_i
            y_far = (rp_hat_sq / dchk_sq) ** (0.5 * alpha) / tau
            ps = rp_hat_sq * omega2(alpha, y_far) - dchk_sq * w_ref
            vals = np.exp(-math.pi * p_hat * lam_a * ps)
            total += wdh_i * float(w_r @ vals)
        return total

    return float(min(max(_doubling(evaluate, spec, (8, 32)), 0.0), 1.0))


def pae_half_beamwidth(c: float, delta_h: float, lambda_active: float) -> float:
    """Half-beamwidth arctan(c / (dh * sqrt(lambda_a))) that keeps every
    footprint radius equal to c/sqrt(lambda_a)."""
    if not (c > 0.0 and delta_h > 0.0 and lambda_active > 0.0):
        raise ValidationError("all arguments must be positive")
    return math.atan(c / (delta_h * math.sqrt(lambda_active)))


def evaluate_analytic(cfg: NetworkConfig, rule, spec: QuadratureSpec = DEFAULT_QUAD,
                      pae_c: Optional[float] = None,
                      delta_h: Optional[float] = None) -> AnalyticResult:
    """Coverage and throughput for one configuration under one rule."""
    rule = AssociationRule.parse(rule) if isinstance(rule, str) else rule
    lam_a = activated_density(cfg)
    if rule.name == "RTNA":
        if pae_c is not None or not cfg.is_omni:
            cp = cp_rtna_dir(cfg, spec, delta_h=delta_h, pae_c=pae_c)
        else:
            cp = cp_rtna_omni(cfg, delta_h)
    else:
        if pae_c is not None:
            raise ValidationError("the footprint-matching policy is evaluated "
                                  "under RTNA")
        cp = cp_semi_dir(cfg, spec, delta_h) if not cfg.is_omni \
            else cp_semi_omni(cfg, spec, delta_h)
    c_b = backhaul_capacity(cfg.backhaul, cfg.hover_radius, lam_a,
                            altitude=cfg.beam_altitude)
    return st_from_cp(lam_a, cp, cfg.tau, c_b)


def optimize_beamwidth(cfg: NetworkConfig, rule, spec: QuadratureSpec = DEFAULT_QUAD,
                       n_grid: int = 64, phi_min: float = 5e-3,
                       refine_tol: float = 1e-4):
    """Maximize throughput over the half-beamwidth on (0, pi/2].

    Log-spaced grid search refined by golden-section around the best node;
    deterministic for a fixed spec.  Returns (phi_star, st_star).
    """
    grid = np.geomspace(phi_min, math.pi / 2.0, n_grid)

    def st_of(phi: float) -> float:
        return evaluate_analytic(cfg.with_overrides(half_beamwidth=float(phi)),
                                 rule, spec).st

    values = [st_of(p) for p in grid]
    best = int(np.argmax(values))
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, n_grid - 1)]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = st_of(c), st_of(d)
    while b - a > refine_tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = st_of(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = st_of(d)
    phi_star = 0.5 * (a + b)
    st_star = st_of(phi_star)
    if values[best] > st_star:
        phi_star, st_star = float(grid[best]), float(values[best])
    return float(phi_star), float(st_star)


def st_scaling_pae(cfg: NetworkConfig, c: float = 1.0) -> AnalyticResult:
    """Dense-deployment limit of throughput under the footprint-matching
    policy (footprint radius c/sqrt(lambda_a)) with RTNA.

    cp -> p_dag * d1 where p_dag = 1 - exp(-pi*c^2) and

        d1 = (exp(-p_dag*pi*c^2*w) - exp(-pi*c^2)) / (1 - p_dag*w),
        w = omega2(alpha, 1/tau).

    In the dense limit the activated density saturates at the user density,
    so the prefactor is lambda_gu and the backhaul share is evaluated there;
    the result is altitude-independent whenever the backhaul cap is not
    binding.
    """
    if not c > 0.0:
        raise ValidationError(f"c must be positive, got {c}")
    p_dag = 1.0 - math.exp(-math.pi * c * c)
    w = float(omega2(cfg.alpha, 1.0 / cfg.tau))
    denom = 1.0 - p_dag * w
    pic2 = math.pi * c * c
    if abs(denom) < 1e-12:
        d1 = pic2 * math.exp(-pic2)
    else:
        d1 = (math.exp(-p_dag * pic2 * w) - math.exp(-pic2)) / denom
    cp = p_dag * d1
    c_b = backhaul_capacity(cfg.backhaul, cfg.hover_radius, cfg.lambda_gu,
                            altitude=cfg.beam_altitude)
    return st_from_cp(cfg.lambda_gu, cp, cfg.tau, c_b)
