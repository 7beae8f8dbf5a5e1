"""Special-function kernels used by the coverage/throughput closed forms.

Everything here reduces to the Gauss hypergeometric family

    F(b, y) = 2F1(1, b; b+1; -y),   b > 0, y >= 0,

with integral representation F(b, y) = b * int_0^1 t^(b-1) / (1 + y*t) dt.
The network formulas only use it through omega1(alpha, y) = F(1 - 2/alpha, y)
and omega2(alpha, y) = F(2/alpha, y) with alpha > 2, so b stays in (0, 1) and
three series branches cover the whole y range in a few hundred terms:

    y <= 1/2      defining series     sum_k  b/(b+k) * (-y)^k
    1/2 < y <= 2  Pfaff transform     (1+y)^-1 * 2F1(1, 1; b+1; y/(1+y))
    y > 2         large-y expansion   b*pi/sin(pi*b) * y^-b
                                        - b * sum_j (-1)^j * y^-(1+j) / (j+1-b)

All evaluators are pure functions and vectorize over y; nothing in this
module holds state, so concurrent use is unrestricted.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad
from scipy.special import erf as _erf

from .errors import NonConvergence

# Budget for the defining power series of the general 2F1 path; the
# specialized branches converge geometrically and use a much smaller cap.
SERIES_CAP = 1_000_000
_BRANCH_CAP = 4096
_RTOL = 5e-15  # internal target, leaves headroom under the 1e-10 contract


def erf(x):
    """Standard error function: odd, strictly increasing, range (-1, 1)."""
    return _erf(x)


def _series_sum(first_term, ratio_fn, cap, rtol, what):
    """Sum terms t0=first_term, t_k = t_{k-1} * ratio_fn(k), elementwise.

    Stops when every |t_k| fell below rtol * |partial sum|.  Raises
    NonConvergence on budget exhaustion.
    """
    acc = np.array(first_term, dtype=float, copy=True)
    term = np.array(first_term, dtype=float, copy=True)
    for k in range(1, cap + 1):
        term = term * ratio_fn(k)
        acc += term
        if np.max(np.abs(term)) <= rtol * max(np.min(np.abs(acc)), 1e-300):
            return acc
    raise NonConvergence(f"{what}: no convergence within {cap} terms")


def _f1b_direct(b, y):
    # 2F1(1, b; b+1; -y) = sum_k b/(b+k) (-y)^k, reliable for y <= 1/2
    return _series_sum(
        np.ones_like(y),
        lambda k: -y * (b + k - 1.0) / (b + k),
        _BRANCH_CAP,
        _RTOL,
        "2F1 defining series",
    )


def _f1b_pfaff(b, y):
    # Pfaff: 2F1(1, b; b+1; -y) = (1+y)^-1 * 2F1(1, 1; b+1; w), w = y/(1+y)
    w = y / (1.0 + y)
    s = _series_sum(
        np.ones_like(w),
        lambda k: w * k / (b + k),
        _BRANCH_CAP,
        _RTOL,
        "2F1 Pfaff series",
    )
    return s / (1.0 + y)


def _f1b_large(b, y):
    # Large-y expansion from splitting the integral representation at
    # infinity; valid for 0 < b < 1 and geometric in 1/y (used for y > 2).
    lead = b * math.pi / math.sin(math.pi * b) * y ** (-b)
    corr = _series_sum(
        1.0 / (y * (1.0 - b)),
        lambda k: -(k - b) / (y * (k + 1.0 - b)),
        _BRANCH_CAP,
        _RTOL,
        "2F1 large-y series",
    )
    return lead - b * corr


def _f1b_quad(b, y_flat):
    # Integral-representation fallback for b >= 1 (outside the closed-form
    # kernels' parameter range); adaptive quadrature per element.
    out = np.empty_like(y_flat)
    for i, yi in enumerate(y_flat):
        val, _ = quad(lambda t: t ** (b - 1.0) / (1.0 + yi * t), 0.0, 1.0,
                      epsabs=0.0, epsrel=1e-12, limit=200)
        out[i] = b * val
    return out


def hyp2f1_1b(b: float, y):
    """Evaluate 2F1(1, b; b+1; -y) for b > 0 and y >= 0 (vectorized in y).

    This is the only hypergeometric pattern the network closed forms need;
    for b in (0, 1) the three series branches give ~1e-12 relative accuracy.
    """
    if not b > 0.0:
        raise ValueError(f"b must be positive, got {b}")
    arr = np.asarray(y, dtype=float)
    if np.any(arr < 0.0) or not np.all(np.isfinite(arr)):
        raise ValueError("y must be finite and nonnegative")
    scalar = arr.ndim == 0
    flat = np.atleast_1d(arr).ravel()
    out = np.empty_like(flat)

    if b >= 1.0:
        small = flat <= 0.5
        if small.any():
            out[small] = _f1b_direct(b, flat[small])
        if (~small).any():
            out[~small] = _f1b_quad(b, flat[~small])
    else:
        lo = flat <= 0.5
        mid = (flat > 0.5) & (flat <= 2.0)
        hi = flat > 2.0
        if lo.any():
            out[lo] = _f1b_direct(b, flat[lo])
        if mid.any():
            out[mid] = _f1b_pfaff(b, flat[mid])
        if hi.any():
            out[hi] = _f1b_large(b, flat[hi])

    out = out.reshape(np.atleast_1d(arr).shape)
    return float(out[0]) if scalar else out.reshape(arr.shape)


def gauss_2f1_neg(a: float, b: float, c: float, z: float) -> float:
    """Gauss hypergeometric 2F1(a, b; c; z) for real parameters and z <= 0.

    The paper-style kernels all match the pattern 2F1(1, b; b+1; -y), which
    is dispatched to the fast branch evaluator; other parameter combinations
    fall back to the defining series (|z| <= 1/2) or its Pfaff transform,
    each within a SERIES_CAP-term budget.
    """
    if z > 0.0:
        raise ValueError(f"z must be <= 0, got {z}")
    if c <= 0.0 and float(c).is_integer():
        raise ValueError(f"c must not be a nonpositive integer, got {c}")
    if z == 0.0:
        return 1.0
    y = -z
    if math.isclose(a, 1.0, rel_tol=0, abs_tol=1e-14) and \
            math.isclose(c, b + 1.0, rel_tol=1e-14):
        return float(hyp2f1_1b(b, y))
    if math.isclose(b, 1.0, rel_tol=0, abs_tol=1e-14) and \
            math.isclose(c, a + 1.0, rel_tol=1e-14):
        return float(hyp2f1_1b(a, y))  # 2F1 is symmetric in (a, b)

    if y <= 0.5:
        def ratio(k):
            return z * (a + k - 1.0) * (b + k - 1.0) / ((c + k - 1.0) * k)
        return float(_series_sum(1.0, ratio, SERIES_CAP, 1e-13,
                                 "general 2F1 series"))

    # Pfaff toward w = z/(z-1) in (0, 1)
    w = z / (z - 1.0)

    def ratio(k):
        return w * (a + k - 1.0) * (c - b + k - 1.0) / ((c + k - 1.0) * k)

    s = _series_sum(1.0, ratio, SERIES_CAP, 1e-13, "general 2F1 Pfaff series")
    return float((1.0 - z) ** (-a) * s)


def omega1(alpha: float, y):
    """omega1(alpha, y) = 2F1(1, 1-2/alpha; 2-2/alpha; -y); in (0, 1], decreasing in y."""
    if not alpha > 2.0:
        raise ValueError(f"alpha must exceed 2, got {alpha}")
    return hyp2f1_1b(1.0 - 2.0 / alpha, y)


def omega2(alpha: float, y):
    """omega2(alpha, y) = 2F1(1, 2/alpha; 1+2/alpha; -y); in (0, 1], decreasing in y."""
    if not alpha > 2.0:
        raise ValueError(f"alpha must exceed 2, got {alpha}")
    return hyp2f1_1b(2.0 / alpha, y)


def delta_kernel(alpha: float, tau: float, q_a: float) -> float:
    """Interference exponent scale 2*q_a*tau*omega1(alpha, tau)/(alpha - 2).

    Nonnegative and linear in the activation probability q_a.
    """
    if not alpha > 2.0:
        raise ValueError(f"alpha must exceed 2, got {alpha}")
    if not tau > 0.0:
        raise ValueError(f"tau must be positive, got {tau}")
    if not 0.0 <= q_a <= 1.0:
        raise ValueError(f"q_a must lie in [0, 1], got {q_a}")
    if q_a == 0.0:
        return 0.0
    return 2.0 * q_a * tau * float(omega1(alpha, tau)) / (alpha - 2.0)


def psi(x, b: float, z: float):
    """Truncated-interference primitive x^2 * 2F1(1, 2/z; 1+2/z; -b*x^z).

    Nondecreasing in x with psi(0) = 0 and slope 2x / (1 + b*x^z); it is the
    antiderivative that turns annulus interference integrals into
    differences of omega2 terms.
    """
    if not b > 0.0:
        raise ValueError(f"b must be positive, got {b}")
    if not z > 0.0:
        raise ValueError(f"z must be positive, got {z}")
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0.0):
        raise ValueError("x must be nonnegative")
    return arr * arr * hyp2f1_1b(2.0 / z, b * arr ** z)
