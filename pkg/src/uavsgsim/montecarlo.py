"""Monte Carlo engine: direct simulation of network snapshots.

Each trial drops a probe user at the origin (the field statistics are
unchanged by that conditioning), samples the UAV field on a disk, associates
users, marks activation, and scores one downlink slot: the probe's serving
UAV transmits to it while every other activated UAV transmits to one of its
own users.  Coverage means the probe lies inside the serving footprint and
the SIR clears the threshold.

Estimator: with unit-mean exponential fading on every link, the coverage
probability conditioned on the sampled pattern is a product of
1/(1 + tau * power-ratio) factors, so fading never has to be drawn for the
estimate (run_trial still draws it to report a literal SIR).  In omni mode
the interference of the unsampled field beyond the disk is folded in through
its exact annulus Laplace factor, which removes all truncation bias.

Two interference models are available:

  physical (default)  interferers are the activated UAVs of the sampled
                      field, each shadowed by its own footprint;
  matched             the serving geometry stays physical, but interferers
                      are drawn from exactly the field the closed forms
                      assume: an annulus point process of 3D distances at
                      density lambda_a starting at the closest-possible
                      interferer distance (directional: the footprint window
                      at density p_p * lambda_a).  This is the oracle pairing
                      for validating the analytic engine, since the closed
                      forms idealize the interferer field (common altitudes,
                      no hover-displaced void).

Trials use deterministically derived RNG substreams (seed, trial index), so
any degree of parallelism reproduces the sequential result; reductions are
per-block sums combined in block order.  UAVSGSIM_THREADS caps the workers.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product
from typing import Optional

import numpy as np

from .analytic import activated_density, evaluate_analytic
from .association import (AssociationRule, activation_probability,
                          nearest_index, projection_probability_semi)
from .backhaul import backhaul_capacity
from .errors import DegenerateRealization, ValidationError
from .model import G0, NetworkConfig
from .specfun import omega1

_BLOCK = 256            # trials per reduction block (fixed: reproducibility)
_LOCAL_UAV_LIMIT = 20_000   # above this, activation is resolved locally
_FIELD_GU_LIMIT = 2_000_000
_ALL_ACTIVE_EPS = 1e-2  # max expected inactive UAVs for the all-active path
_ANNULUS_SPAN = 10.0    # matched omni mode samples out to span * l


@dataclass
class TrialOutcome:
    """Result of one simulated slot for the probe user."""

    covered: bool
    sir: float
    in_projection: bool
    serving_distance: float  # 3D link distance, m
    active_count: int


@dataclass(frozen=True)
class MetricEstimate:
    """A point estimate with its standard error and provenance."""

    value: float
    std_error: float
    trials: int
    method: str  # "analytic" | "mc"


def _trial_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=(seed, index)))


def default_region_radius(cfg: NetworkConfig, antenna_mode: str = "omni",
                          pae_c: Optional[float] = None) -> float:
    """Interference-accounting disk radius.

    Omni: a disk holding ~400 hover centers; what lies beyond is integrated
    analytically, so the radius only trades variance against cost.
    Directional: only UAVs whose footprint can cover the origin interfere,
    so the footprint reach plus an association margin suffices.
    """
    if cfg.sim_region_radius is not None:
        return cfg.sim_region_radius
    lam = cfg.lambda_uav
    base = 20.0 / math.sqrt(math.pi * lam)
    if antenna_mode == "omni" and pae_c is None:
        return base
    margin = 6.0 / math.sqrt(math.pi * lam)
    if pae_c is not None:
        rp_max = pae_c / math.sqrt(activated_density(cfg))
    else:
        rp_max = cfg.dh_upper * math.tan(cfg.half_beamwidth)
    return cfg.hover_radius + margin + min(base, rp_max + margin)


@dataclass(frozen=True)
class _Context:
    """Precomputed constants shared by every trial of a batch."""

    rule: str
    directional: bool
    pae_c: Optional[float]
    interference: str      # "physical" | "matched"
    region: float          # interference accounting radius (tail starts here)
    sample_radius: float   # center-sampling radius (region + hover reach)
    exp_uav: float
    exp_gu: float
    tan_phi: float
    gain: float            # mainlobe gain (fixed-beamwidth case)
    lam_a: float           # analytic activated density (policy input)
    activation: str        # "all_active" | "field" | "local" | "none"
    pm_dh: Optional[tuple] = None   # footprint-overlap prob. grid (semi)
    pm_val: Optional[tuple] = None
    gu_margin: float = 0.0
    dh_mid_sq: float = 0.0


def _make_context(cfg: NetworkConfig, rule: AssociationRule, antenna_mode: str,
                  interference: str, pae_c: Optional[float]) -> _Context:
    if antenna_mode not in ("omni", "directional"):
        raise ValidationError(f"unknown antenna mode {antenna_mode!r}")
    if interference not in ("physical", "matched"):
        raise ValidationError(f"unknown interference model {interference!r}")
    directional = antenna_mode == "directional" or pae_c is not None
    if not directional and not cfg.is_omni:
        raise ValidationError("omni mode requires half_beamwidth = pi/2")
    region = default_region_radius(cfg, antenna_mode, pae_c)
    # Hover swing can carry a UAV centered outside the disk back inside it;
    # sampling centers out to region + R_h and cutting interference at
    # `region` keeps the in-region instantaneous field exactly homogeneous.
    sample_radius = region if directional else region + cfg.hover_radius
    exp_uav = cfg.lambda_uav * math.pi * sample_radius * sample_radius
    exp_gu = cfg.lambda_gu * math.pi * sample_radius * sample_radius
    lam_a = activated_density(cfg)
    if directional:
        # Inactive UAVs only matter when their footprint covers the probe.
        if pae_c is not None:
            rp_max = pae_c / math.sqrt(lam_a)
        else:
            rp_max = cfg.dh_upper * math.tan(cfg.half_beamwidth)
        relevant = cfg.lambda_uav * math.pi * rp_max * rp_max
    else:
        relevant = exp_uav
    if interference == "matched":
        activation = "none"      # interferer field carries lambda_a directly
    elif relevant * (1.0 - activation_probability(cfg.eta)) < _ALL_ACTIVE_EPS:
        activation = "all_active"
    elif directional and exp_uav > _LOCAL_UAV_LIMIT:
        activation = "local"
    elif exp_gu > _FIELD_GU_LIMIT:
        raise ValidationError(
            f"expected {exp_gu:.2e} users in the region; set sim_region_radius")
    else:
        activation = "field"
    tan_phi = math.tan(cfg.half_beamwidth) if not cfg.is_omni else math.inf
    gain = 1.0 if cfg.is_omni else G0 / cfg.half_beamwidth ** 2
    pm_dh = pm_val = None
    if interference == "matched" and directional and \
            rule is AssociationRule.SEMI_RTNA:
        dhs = np.linspace(cfg.dh_lower, cfg.dh_upper, 33)
        rps = (pae_c / math.sqrt(lam_a)) * np.ones_like(dhs) if pae_c is not None \
            else dhs * tan_phi
        vals = [projection_probability_semi(cfg.lambda_uav, cfg.hover_radius,
                                            float(rp)) for rp in rps]
        pm_dh, pm_val = tuple(dhs.tolist()), tuple(vals)
    return _Context(rule=rule.value, directional=directional, pae_c=pae_c,
                    interference=interference, region=region,
                    sample_radius=sample_radius, exp_uav=exp_uav,
                    exp_gu=exp_gu, tan_phi=tan_phi, gain=gain, lam_a=lam_a,
                    activation=activation, pm_dh=pm_dh, pm_val=pm_val,
                    gu_margin=3.3 / math.sqrt(math.pi * cfg.lambda_uav),
                    dh_mid_sq=(0.5 * (cfg.dh_lower + cfg.dh_upper)) ** 2)


def _field_activation(assoc_pos, gu_pos, serving: int):
    """Activation from the user field.  Returns (flags, q_hat) with q_hat
    measured before the serving UAV is forced active: the probe user is not
    part of the sampled field, so counting the server would bias the
    population fraction upward by 1/n."""
    act = np.zeros(len(assoc_pos), dtype=bool)
    if len(gu_pos):
        act[nearest_index(gu_pos, assoc_pos)] = True
    q_hat = float(act.mean()) if len(act) else 0.0
    act[serving] = True
    return act, q_hat


def _local_activation(assoc_pos, assoc_d, gu_pos, serving: int,
                      rp_max: float, margin: float) -> np.ndarray:
    """Activation flags resolved only where they can matter: for UAVs whose
    footprint covers the origin.  Users farther than `margin` from every
    candidate associate elsewhere with overwhelming probability."""
    act = np.zeros(len(assoc_pos), dtype=bool)
    if len(gu_pos):
        keep = (gu_pos[:, 0] ** 2 + gu_pos[:, 1] ** 2) <= (rp_max + margin) ** 2
        local_gus = gu_pos[keep]
        if len(local_gus):
            near = assoc_d <= rp_max + 2.0 * margin
            sub = np.flatnonzero(near)
            act[sub[nearest_index(local_gus, assoc_pos[near])]] = True
    act[serving] = True
    return act


def _match_probability(cfg: NetworkConfig, ctx: _Context, dh_s: float) -> float:
    """Footprint-overlap probability of the conditioning link, used as the
    interferer-field thinning in matched mode (mirrors the closed forms)."""
    if ctx.rule == AssociationRule.SEMI_RTNA.value:
        return float(np.interp(dh_s, ctx.pm_dh, ctx.pm_val))
    rp = ctx.pae_c / math.sqrt(ctx.lam_a) if ctx.pae_c is not None \
        else dh_s * ctx.tan_phi
    return 1.0 - math.exp(-math.pi * ctx.lam_a * rp * rp)


def _annulus_factors(cfg: NetworkConfig, ctx: _Context, rng, d0_sq: float,
                     l_sq: float, x_hi_sq: float, density: float):
    """Sample the model interferer field: a point process of 3D distances
    with measure 2*pi*density*x dx on (l, x_hi).  Returns (p_cond factor,
    sampled distances^2)."""
    if x_hi_sq <= l_sq or density <= 0.0:
        return 1.0, np.empty(0)
    n = rng.poisson(density * math.pi * (x_hi_sq - l_sq))
    if n == 0:
        return 1.0, np.empty(0)
    x_sq = l_sq + (x_hi_sq - l_sq) * rng.random(n)
    ratio = cfg.tau * (d0_sq / x_sq) ** (0.5 * cfg.alpha)
    return math.exp(-float(np.sum(np.log1p(ratio)))), x_sq


def _simulate_one(cfg: NetworkConfig, ctx: _Context, rng: np.random.Generator):
    """One slot.  Returns (covered, in_proj, p_cond, sir, d0, active_count,
    q_hat, retries): `covered` is the literal fading draw, `p_cond` the
    exact conditional coverage probability given the sampled pattern."""
    retries = 0
    n = rng.poisson(ctx.exp_uav)
    while n == 0:
        retries += 1
        if retries > 100:
            raise DegenerateRealization("no UAVs sampled in 100 attempts")
        n = rng.poisson(ctx.exp_uav)

    rad = ctx.sample_radius * np.sqrt(rng.random(n))
    ang = 2.0 * math.pi * rng.random(n)
    centers = np.empty((n, 2))
    centers[:, 0] = rad * np.cos(ang)
    centers[:, 1] = rad * np.sin(ang)
    alt = rng.uniform(cfg.h_lower, cfg.h_upper, n)
    hover = 2.0 * math.pi * rng.random(n)
    inst = centers + cfg.hover_radius * np.stack(
        [np.cos(hover), np.sin(hover)], axis=1)
    inst_d2 = inst[:, 0] ** 2 + inst[:, 1] ** 2

    if ctx.rule == AssociationRule.RTNA.value:
        assoc_pos, assoc_d2 = inst, inst_d2
    else:
        assoc_pos = centers
        assoc_d2 = centers[:, 0] ** 2 + centers[:, 1] ** 2
    s = int(np.argmin(assoc_d2))

    dh = alt - cfg.h_gu
    dh_s = float(dh[s])
    if ctx.directional:
        if ctx.pae_c is not None:
            rp = np.full(n, ctx.pae_c / math.sqrt(ctx.lam_a))
            phi = np.arctan(rp / dh)
            gains = G0 / (phi * phi)
        else:
            rp = dh * ctx.tan_phi
            gains = None  # common gain cancels in the SIR
        in_proj = bool(inst_d2[s] < rp[s] * rp[s])
    else:
        rp = None
        gains = None
        in_proj = True
    d0_sq = float(inst_d2[s]) + dh_s * dh_s
    g_s = gains[s] if gains is not None else ctx.gain

    if ctx.interference == "matched":
        return _finish_matched(cfg, ctx, rng, s, float(assoc_d2[s]), dh_s,
                               d0_sq, g_s, in_proj, retries)

    # Activation of the sampled field (the serving UAV transmits to the
    # probe regardless, so it is activated by construction).
    q_hat = math.nan
    if ctx.activation == "all_active":
        act = np.ones(n, dtype=bool)
        q_hat = 1.0
    else:
        m = rng.poisson(ctx.exp_gu)
        if m > 0:
            g_rad = ctx.sample_radius * np.sqrt(rng.random(m))
            g_ang = 2.0 * math.pi * rng.random(m)
            gu_pos = np.stack([g_rad * np.cos(g_ang), g_rad * np.sin(g_ang)],
                              axis=1)
        else:
            gu_pos = np.empty((0, 2))
        if ctx.activation == "field":
            act, q_hat = _field_activation(assoc_pos, gu_pos, s)
        else:
            rp_max = float(np.max(rp)) if rp is not None else 0.0
            act = _local_activation(assoc_pos, np.sqrt(assoc_d2), gu_pos, s,
                                    rp_max, ctx.gu_margin)

    mask = act.copy()
    mask[s] = False
    if ctx.directional:
        mask &= inst_d2 < rp * rp
    else:
        mask &= inst_d2 <= ctx.region * ctx.region  # beyond: analytic tail

    idx = np.flatnonzero(mask)
    h0 = rng.exponential()
    if len(idx):
        d_sq = inst_d2[idx] + dh[idx] * dh[idx]
        g_i = gains[idx] if gains is not None else ctx.gain
        ratio = cfg.tau * (g_i / g_s) * (d0_sq / d_sq) ** (0.5 * cfg.alpha)
        p_cond = math.exp(-float(np.sum(np.log1p(ratio))))
        h_i = rng.exponential(size=len(idx))
        interference = cfg.tx_power * float(
            np.sum(h_i * g_i * d_sq ** (-0.5 * cfg.alpha)))
    else:
        p_cond = 1.0
        interference = 0.0

    if not ctx.directional:
        # Exact average over the (unsampled) interferers beyond the region:
        # the annulus Laplace transform in closed form, with the analytic
        # activated density standing in for the field we cannot see.
        p_cond *= _tail_factor(cfg, ctx.lam_a, d0_sq,
                               ctx.region * ctx.region + ctx.dh_mid_sq)

    if not in_proj:
        p_cond = 0.0
    signal = cfg.tx_power * h0 * g_s * d0_sq ** (-0.5 * cfg.alpha)
    sir = math.inf if interference == 0.0 else signal / interference
    covered = in_proj and sir > cfg.tau
    return (covered, in_proj, p_cond, sir, math.sqrt(d0_sq), int(act.sum()),
            q_hat, retries)


def _tail_factor(cfg: NetworkConfig, density: float, d0_sq: float,
                 l_sq: float) -> float:
    """Laplace factor of annulus interference of 3D distances beyond
    sqrt(l_sq) at the given density."""
    y = cfg.tau * (d0_sq / l_sq) ** (0.5 * cfg.alpha)
    kern = l_sq * y * float(omega1(cfg.alpha, y)) / (cfg.alpha - 2.0)
    return math.exp(-2.0 * math.pi * density * kern)


def _finish_matched(cfg: NetworkConfig, ctx: _Context, rng, s: int,
                    assoc_d2_s: float, dh_s: float, d0_sq: float, g_s: float,
                    in_proj: bool, retries: int):
    """Interferers drawn from the closed forms' idealized field."""
    if ctx.directional:
        if not in_proj:
            return False, False, 0.0, 0.0, math.sqrt(d0_sq), 1, math.nan, retries
        rp0 = ctx.pae_c / math.sqrt(ctx.lam_a) if ctx.pae_c is not None \
            else dh_s * ctx.tan_phi
        x_hi_sq = rp0 * rp0 + dh_s * dh_s
        if ctx.rule == AssociationRule.SEMI_RTNA.value:
            r_c = math.sqrt(assoc_d2_s)  # hover-center distance
            l_sq = dh_s * dh_s if r_c <= cfg.hover_radius else \
                (r_c - cfg.hover_radius) ** 2 + dh_s * dh_s
        else:
            l_sq = d0_sq
        density = _match_probability(cfg, ctx, dh_s) * ctx.lam_a
        p_cond, x_sq = _annulus_factors(cfg, ctx, rng, d0_sq, l_sq, x_hi_sq,
                                        density)
    else:
        if ctx.rule == AssociationRule.SEMI_RTNA.value:
            r_c = math.sqrt(assoc_d2_s)
            l_sq = dh_s * dh_s if r_c <= cfg.hover_radius else \
                (r_c - cfg.hover_radius) ** 2 + dh_s * dh_s
        else:
            l_sq = d0_sq
        x_hi_sq = l_sq * _ANNULUS_SPAN ** 2
        p_cond, x_sq = _annulus_factors(cfg, ctx, rng, d0_sq, l_sq, x_hi_sq,
                                        ctx.lam_a)
        p_cond *= _tail_factor(cfg, ctx.lam_a, d0_sq, x_hi_sq)

    h0 = rng.exponential()
    if len(x_sq):
        h_i = rng.exponential(size=len(x_sq))
        interference = cfg.tx_power * ctx.gain * float(
            np.sum(h_i * x_sq ** (-0.5 * cfg.alpha)))
    else:
        interference = 0.0
    signal = cfg.tx_power * h0 * g_s * d0_sq ** (-0.5 * cfg.alpha)
    sir = math.inf if interference == 0.0 else signal / interference
    covered = in_proj and sir > cfg.tau
    return (covered, in_proj, p_cond, sir, math.sqrt(d0_sq), 1 + len(x_sq),
            math.nan, retries)


def run_trial(cfg: NetworkConfig, rule, antenna_mode: str,
              rng: np.random.Generator, interference: str = "physical",
              pae_c: Optional[float] = None) -> TrialOutcome:
    """Simulate a single slot and return its literal (fading-drawn) outcome."""
    rule = AssociationRule.parse(rule) if isinstance(rule, str) else rule
    ctx = _make_context(cfg, rule, antenna_mode, interference, pae_c)
    covered, in_proj, _, sir, d0, n_act, _, _ = _simulate_one(cfg, ctx, rng)
    return TrialOutcome(covered=covered, sir=sir, in_projection=in_proj,
                        serving_distance=d0, active_count=n_act)


def _run_block(args):
    cfg, ctx, seed, start, count = args
    p_sum = p_sq = 0.0
    proj = 0
    q_sum = q_sq = 0.0
    q_n = 0
    retries = 0
    for i in range(start, start + count):
        _, in_proj, p, _, _, _, q, r = _simulate_one(cfg, ctx, _trial_rng(seed, i))
        p_sum += p
        p_sq += p * p
        proj += in_proj
        retries += r
        if not math.isnan(q):
            q_sum += q
            q_sq += q * q
            q_n += 1
    return p_sum, p_sq, proj, q_sum, q_sq, q_n, retries


def empirical_activation(cfg: NetworkConfig, rule, n_trials: Optional[int] = None,
                         seed: Optional[int] = None) -> MetricEstimate:
    """Activation probability of the typical UAV, measured by conditioning a
    UAV at the origin (which leaves the field statistics unchanged) and
    checking whether any user's nearest UAV is that one.

    The construction is rule-independent: under RTNA users read the
    instantaneous positions, which are an equal-density homogeneous field
    whose typical point can equally be conditioned at the origin, so hover
    displacement drops out of the activation statistics.

    When n_trials is not given, a pilot run sizes the trial count for about
    1% relative standard error (capped at 2e6 trials).
    """
    seed = cfg.seed if seed is None else seed
    radius = 7.0 / math.sqrt(math.pi * cfg.lambda_uav)
    exp_uav = cfg.lambda_uav * math.pi * radius * radius
    exp_gu = cfg.lambda_gu * math.pi * radius * radius

    def run(count: int, offset: int) -> int:
        hits = 0
        for i in range(offset, offset + count):
            rng = np.random.default_rng(
                np.random.SeedSequence(entropy=(seed, 0xAC7, i)))
            n = rng.poisson(exp_uav)
            rad = radius * np.sqrt(rng.random(n))
            ang = 2.0 * math.pi * rng.random(n)
            pos = np.concatenate(
                [np.zeros((1, 2)),
                 np.stack([rad * np.cos(ang), rad * np.sin(ang)], axis=1)])
            m = rng.poisson(exp_gu)
            if m == 0:
                continue
            g_rad = radius * np.sqrt(rng.random(m))
            g_ang = 2.0 * math.pi * rng.random(m)
            gu = np.stack([g_rad * np.cos(g_ang), g_rad * np.sin(g_ang)],
                          axis=1)
            if np.any(nearest_index(gu, pos) == 0):
                hits += 1
        return hits

    if n_trials is None:
        pilot = 2000
        q0 = max(run(pilot, 0) / pilot, 1.0 / pilot)
        n_trials = int(min(max(4000, (1.0 - q0) / (q0 * 1e-4)), 2_000_000))
        hits = run(n_trials, pilot)
    else:
        hits = run(n_trials, 0)
    q = hits / n_trials
    return MetricEstimate(value=q, std_error=math.sqrt(q * (1 - q) / n_trials),
                          trials=n_trials, method="mc")


def estimate(cfg: NetworkConfig, rule, antenna_mode: str = "omni",
             n_trials: int = 100_000, seed: Optional[int] = None,
             interference: str = "physical", pae_c: Optional[float] = None,
             workers: Optional[int] = None):
    """Estimate coverage, throughput, and activation probability by simulation.

    Returns (cp, st, q_a_hat) as MetricEstimate triples.  Deterministic for a
    fixed seed regardless of the worker count: trials are keyed by (seed,
    index) and block sums are reduced in block order.
    """
    if n_trials < 100:
        raise ValidationError(f"n_trials must be >= 100, got {n_trials}")
    rule = AssociationRule.parse(rule) if isinstance(rule, str) else rule
    seed = cfg.seed if seed is None else seed
    ctx = _make_context(cfg, rule, antenna_mode, interference, pae_c)

    blocks = [(cfg, ctx, seed, start, min(_BLOCK, n_trials - start))
              for start in range(0, n_trials, _BLOCK)]
    if workers is None:
        workers = int(os.environ.get("UAVSGSIM_THREADS", "1"))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_block, blocks,
                                    chunksize=max(1, len(blocks) // (8 * workers))))
    else:
        results = [_run_block(b) for b in blocks]

    p_sum = sum(r[0] for r in results)
    p_sq = sum(r[1] for r in results)
    q_sum = sum(r[3] for r in results)
    q_sq = sum(r[4] for r in results)
    q_n = sum(r[5] for r in results)

    cp = p_sum / n_trials
    var = max(p_sq / n_trials - cp * cp, 0.0)
    cp_se = math.sqrt(var / n_trials)
    cp_est = MetricEstimate(cp, cp_se, n_trials, "mc")

    if ctx.activation == "all_active":
        qa_est = MetricEstimate(1.0, 0.0, n_trials, "mc")
    elif ctx.activation == "field" and q_n > 0:
        q_mean = q_sum / q_n
        q_var = max(q_sq / q_n - q_mean * q_mean, 0.0)
        qa_est = MetricEstimate(q_mean, math.sqrt(q_var / q_n), q_n, "mc")
    elif ctx.activation == "none":
        qa_est = MetricEstimate(activation_probability(cfg.eta), 0.0,
                                n_trials, "analytic")
    else:
        qa_est = empirical_activation(cfg, rule, seed=seed)

    lam_hat = qa_est.value * cfg.lambda_uav
    c_b = backhaul_capacity(cfg.backhaul, cfg.hover_radius, lam_hat,
                            altitude=cfg.beam_altitude)
    rate = min(math.log2(1.0 + cfg.tau), c_b)
    st = lam_hat * cp * rate
    # In the backhaul-limited regime c_b ~ 1/lam_hat, so lam_hat cancels and
    # only the coverage noise remains; otherwise both uncertainties enter.
    rel_sq = (cp_se / cp) ** 2 if cp > 0.0 else 0.0
    if rate < c_b and qa_est.value > 0.0:
        rel_sq += (qa_est.std_error / qa_est.value) ** 2
    st_est = MetricEstimate(st, st * math.sqrt(rel_sq), n_trials, "mc")
    return cp_est, st_est, qa_est


@dataclass
class SweepSpec:
    """A Cartesian parameter grid plus engine/rule/mode selection."""

    axes: list                      # [(field name, [values, ...]), ...]
    engines: tuple = ("analytic", "mc")
    rule: str = "rtna"
    antenna_mode: str = "omni"
    pae_c: Optional[float] = None
    n_trials: int = 20_000
    seed: Optional[int] = None
    interference: str = "physical"

    def __post_init__(self):
        if not self.axes or any(len(vals) == 0 for _, vals in self.axes):
            raise ValidationError("every sweep axis needs at least one value")
        bad = [e for e in self.engines if e not in ("analytic", "mc")]
        if bad:
            raise ValidationError(f"unknown engines: {bad}")


_SWEEPABLE = {
    "lambda_uav", "lambda_gu", "hover_radius", "h_lower", "h_upper", "h_gu",
    "alpha", "tau", "tx_power", "half_beamwidth", "seed", "sim_region_radius",
    "c_t", "r_m", "eps_bar", "altitude_for_beam",
}


def sweep(cfg_base: NetworkConfig, spec: SweepSpec) -> list:
    """Evaluate every grid point with the selected engines.

    Per-point failures are recorded in the row's `error` column and the
    sweep continues.  Rows carry the axis values plus analytic and MC
    metric columns with standard errors.
    """
    for name, _ in spec.axes:
        if name not in _SWEEPABLE:
            raise ValidationError(f"unknown sweep axis {name!r}")
    seed = cfg_base.seed if spec.seed is None else spec.seed
    rows = []
    names = [name for name, _ in spec.axes]
    for row_idx, combo in enumerate(product(*(vals for _, vals in spec.axes))):
        row = dict(zip(names, combo))
        row["error"] = ""
        try:
            cfg = cfg_base.with_overrides(**dict(zip(names, combo)))
            if "analytic" in spec.engines:
                res = evaluate_analytic(cfg, spec.rule, pae_c=spec.pae_c)
                row["cp_analytic"] = res.cp
                row["st_analytic"] = res.st
            if "mc" in spec.engines:
                row_seed = int(np.random.SeedSequence(
                    entropy=(seed, 0x5EED, row_idx)).generate_state(1)[0])
                cp, st, qa = estimate(
                    cfg, spec.rule, antenna_mode=spec.antenna_mode,
                    n_trials=spec.n_trials, seed=row_seed,
                    interference=spec.interference, pae_c=spec.pae_c)
                row.update(cp_mc=cp.value, cp_mc_se=cp.std_error,
                           st_mc=st.value, st_mc_se=st.std_error,
                           q_a_mc=qa.value)
        except Exception as exc:  # per-point failure, sweep continues
            row["error"] = f"{type(exc).__name__}: {exc}"
        rows.append(row)
    return rows
