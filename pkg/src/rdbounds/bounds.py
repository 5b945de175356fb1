"""Lower and upper bounds on the rate-distortion function of the band-forgiving loss.

Implemented bounds, all in nats:

* ``shannon_lower_bound``      -- entropy-difference lower bound, closed form
* ``slb_zero``                 -- distortion where that lower bound crosses zero
* ``trivial_upper_bound_laplacian`` -- exact absolute-error rate -log(alpha D),
  an upper bound for every epsilon > 0
* ``convolution_upper_bound``  -- h(g * p) - h(g) via the additive test channel
* ``gaussian_entropy_bound``   -- replaces h(g * p) by the max-entropy Gaussian
* ``analytic_upper_bound_laplacian`` -- closed-form upper bound on h(g * p)
  for Laplacian sources

Rates returned as :class:`RDPoint` are clamped at zero (the true curve is zero
past d_max) with the raw value kept alongside and a ``clamped`` flag set, never
silently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .convolution import _entropy_edges, conv_entropy
from .quadrature import panel_nodes
from .sources import Laplacian, Source
from .tilted import (
    EpsilonLoss,
    _check_slope,
    distortion_of_slope,
    normalizer,
    tilted_entropy,
    tilted_variance,
)

__all__ = [
    "RDPoint",
    "LaplacianAuxiliaries",
    "SingularSlopeError",
    "shannon_lower_bound",
    "slb_zero",
    "slb_at_matched_slope",
    "trivial_upper_bound_laplacian",
    "laplacian_conv_pdf",
    "convolution_upper_bound",
    "gaussian_entropy_bound",
    "laplacian_upper_bound_terms",
    "analytic_upper_bound_laplacian",
]

#: relative half-width of the guarded window around |s| = alpha where the
#: closed-form Laplacian convolution density is a 0/0 expression
SINGULAR_WINDOW = 1e-6


class SingularSlopeError(ValueError):
    """|s| is within the guarded window around the Laplacian rate alpha."""


@dataclass(frozen=True)
class RDPoint:
    """One (distortion, rate) point of a bound curve.

    ``r`` is clamped at zero; ``raw_rate`` keeps the unclamped value and
    ``clamped`` records that clamping happened.
    """

    d: float
    r: float
    s: float | None = None
    raw_rate: float | None = None
    clamped: bool = False
    flag: str = ""


def _rate_point(d: float, raw: float, s: float, flag: str = "") -> RDPoint:
    clamped = raw < 0.0
    return RDPoint(d=d, r=max(raw, 0.0), s=s, raw_rate=raw, clamped=clamped, flag=flag)


def shannon_lower_bound(d: float, source_entropy: float, loss: EpsilonLoss) -> float:
    """Closed-form lower bound on the rate at average distortion d.

    Returns the raw (possibly negative) value; it is strictly decreasing in d.
    The eps = 0 branch is the exact limit source_entropy - log(2 e d).
    """
    d = float(d)
    if not math.isfinite(d) or d <= 0.0:
        raise ValueError(f"distortion must be a finite positive real, got {d!r}")
    eps = loss.epsilon
    if eps == 0.0:
        return source_entropy - math.log(2.0 * d) - 1.0
    dt = d / (2.0 * eps)
    root = math.sqrt(dt * (dt + 2.0))
    # dt - root written in quotient form: no cancellation for dt >> 1
    return source_entropy - math.log(2.0 * eps) - math.log1p(dt + root) - 2.0 * dt / (dt + root)


def slb_zero(source: Source, loss: EpsilonLoss, tol: float = 1e-8) -> float:
    """Distortion where the lower bound crosses zero, by bisection to tol.

    Raises if the bound is nonpositive on all of (0, d_max] ("SLB vacuous").
    For eps > 0 the root lies strictly below d_max(loss).
    """
    h_p = source.differential_entropy()
    if loss.epsilon > 0.0 and h_p - math.log(2.0 * loss.epsilon) <= 0.0:
        raise ValueError("SLB vacuous: nonpositive for every distortion")
    hi = source.d_max(loss)
    f_hi = shannon_lower_bound(hi, h_p, loss)
    if f_hi >= 0.0:
        if f_hi < 1e-12:
            return hi
        raise ValueError("SLB positive at d_max; inconsistent source")
    lo = 0.5 * hi
    for _ in range(200):
        if shannon_lower_bound(lo, h_p, loss) > 0.0:
            break
        lo *= 0.5
    else:
        raise ValueError("SLB vacuous: nonpositive for every distortion")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if shannon_lower_bound(mid, h_p, loss) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def slb_at_matched_slope(alpha: float, loss: EpsilonLoss) -> float:
    """Lower-bound value at slope s = -alpha for a Laplacian(alpha) source.

    Equals 1 - log(1 + alpha eps) - 1/(1 + alpha eps), which is strictly
    negative for every alpha eps > 0 (and zero at eps = 0).
    """
    u = float(alpha) * loss.epsilon
    return 1.0 - math.log1p(u) - 1.0 / (1.0 + u)


def trivial_upper_bound_laplacian(d: float, alpha: float) -> float:
    """Exact absolute-error rate -log(alpha d) of a Laplacian source.

    Upper-bounds the band-forgiving rate for every eps >= 0; zero for
    d >= 1/alpha.
    """
    d = float(d)
    if not math.isfinite(d) or d <= 0.0:
        raise ValueError(f"distortion must be a finite positive real, got {d!r}")
    if d > 1.0 / alpha:
        return 0.0
    return max(-math.log(alpha * d), 0.0)


def _check_off_singularity(s: float, alpha: float) -> None:
    if abs(abs(s) - alpha) < SINGULAR_WINDOW * alpha:
        raise SingularSlopeError(
            f"|s| = {abs(s)!r} is within the guarded window around alpha = {alpha!r}"
        )


def _laplacian_conv_coeffs(s: float, alpha: float):
    c1 = s / (alpha - s)
    c2 = s / (alpha + s)
    c3 = 2.0 * alpha**2 / (alpha**2 - s * s)
    return c1, c2, c3


def laplacian_conv_pdf(y, s: float, alpha: float, loss: EpsilonLoss):
    """Closed form of (tilted kernel * Laplacian density)(y).

    Piecewise in |y| with a flat-band expression inside [-eps, eps] and a
    three-exponential expression outside; symmetric and continuous.  Raises
    :class:`SingularSlopeError` inside the |s| ~ alpha guard window, where the
    coefficients are a removable 0/0.
    """
    s = _check_slope(s)
    alpha = float(alpha)
    _check_off_singularity(s, alpha)
    eps = loss.epsilon
    c = normalizer(s, loss)
    c1, c2, c3 = _laplacian_conv_coeffs(s, alpha)
    ay = np.abs(np.asarray(y, dtype=float))
    # exponents clipped at 0: out-of-branch lanes of np.where stay finite
    inner = (
        c1 * np.exp(-alpha * (ay + eps))
        + c1 * np.exp(np.minimum(alpha * (ay - eps), 0.0))
        + 2.0
    )
    outer = (
        c1 * np.exp(-alpha * (ay + eps))
        + c2 * np.exp(np.minimum(-alpha * (ay - eps), 0.0))
        + c3 * np.exp(np.minimum(s * (ay - eps), 0.0))
    )
    out = np.where(ay < eps, inner, outer) / (2.0 * c)
    return out if out.ndim else float(out)


def _laplacian_conv_entropy(s: float, alpha: float, loss: EpsilonLoss, refine: int = 1) -> float:
    """h(g * p) for a Laplacian source via panels on the closed-form density."""
    eps = loss.epsilon
    c = normalizer(s, loss)
    c1, c2, c3 = _laplacian_conv_coeffs(s, alpha)
    coef = max(abs(c1), abs(c2), abs(c3), 1.0)
    rate = min(alpha, abs(s))
    upper = eps + (40.0 + math.log(coef) + max(0.0, -math.log(2.0 * c))) / rate
    edges = _entropy_edges(s, loss, upper, 15.0 / alpha / refine)
    yn, wq = panel_nodes(edges)
    r = laplacian_conv_pdf(yn, s, alpha, loss)
    val = -np.where(r > 0.0, r * np.log(np.where(r > 0.0, r, 1.0)), 0.0)
    return 2.0 * float(np.dot(wq, val))


def convolution_upper_bound(source: Source, s: float, loss: EpsilonLoss) -> RDPoint:
    """Upper bound h(g * p) - h(g) at the distortion fixed by the slope.

    Laplacian sources use the closed-form convolution density; inside the
    |s| ~ alpha guard window (and for every other source) the density is
    convolved numerically.
    """
    s = _check_slope(s)
    d = distortion_of_slope(s, loss)
    flag = ""
    if isinstance(source, Laplacian):
        try:
            h_r = _laplacian_conv_entropy(s, source.alpha, loss)
        except SingularSlopeError:
            h_r = conv_entropy(source, s, loss)
            flag = "ru_numeric_fallback"
    else:
        h_r = conv_entropy(source, s, loss)
    return _rate_point(d, h_r - tilted_entropy(s, loss), s, flag)


def gaussian_entropy_bound(source: Source, s: float, loss: EpsilonLoss) -> RDPoint:
    """Upper bound replacing h(g * p) by the max-entropy Gaussian of equal variance."""
    s = _check_slope(s)
    v = source.variance() + tilted_variance(s, loss)
    raw = 0.5 * math.log(2.0 * math.pi * math.e * v) - tilted_entropy(s, loss)
    return _rate_point(distortion_of_slope(s, loss), raw, s)


@dataclass(frozen=True)
class LaplacianAuxiliaries:
    """Scalar ingredients of the Laplacian closed-form upper bound."""

    c_s: float
    b_int: float
    e_int: float


def laplacian_upper_bound_terms(s: float, alpha: float, loss: EpsilonLoss) -> LaplacianAuxiliaries:
    """Floor constant and the two outer-tail integrals of the convolution density.

    c_s lower-bounds the band part of 2 C(s) (g * p); b_int and e_int are the
    zeroth and first moments of its outer branch on [eps, inf).
    """
    s = _check_slope(s)
    alpha = float(alpha)
    _check_off_singularity(s, alpha)
    eps = loss.epsilon
    e2 = math.exp(-2.0 * alpha * eps)
    c_s = 2.0 + (s / (alpha - s)) * (1.0 + e2)
    b_int = (s / (alpha - s)) * e2 / alpha + (s * s * (alpha - s) - 2.0 * alpha**3) / (
        (alpha**2 - s * s) * s * alpha
    )
    m1 = (1.0 + alpha * eps) / alpha**2
    e_int = (
        (s / (alpha - s)) * m1 * e2
        + (s / (s + alpha)) * m1
        + (2.0 * alpha**2 / (alpha**2 - s * s)) * (1.0 - s * eps) / (s * s)
    )
    return LaplacianAuxiliaries(c_s=c_s, b_int=b_int, e_int=e_int)


def analytic_upper_bound_laplacian(s: float, alpha: float, loss: EpsilonLoss) -> RDPoint:
    """Closed-form upper bound on the Laplacian rate at the slope's distortion.

    Bounds h(g * p) from above through the floor constant c_s and the tail
    integrals, then subtracts h(g).  Valid on both sides of |s| = alpha;
    raises :class:`SingularSlopeError` inside the guard window.
    """
    s = _check_slope(s)
    aux = laplacian_upper_bound_terms(s, alpha, loss)
    c = normalizer(s, loss)
    eps = loss.epsilon
    h_r_upper = (
        -math.log(aux.c_s / (2.0 * c))
        - (alpha * eps / c) * aux.b_int
        + (alpha / c) * aux.e_int
    )
    raw = h_r_upper - tilted_entropy(s, loss)
    return _rate_point(distortion_of_slope(s, loss), raw, s)
