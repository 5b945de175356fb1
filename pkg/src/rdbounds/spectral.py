"""Characteristic functions of the tilted kernel and the coincidence certificates.

Every density in scope is even, so all characteristic functions here are
real-valued cosine transforms.  The tilted kernel's CF factors exactly into a
Laplace CF times the CF of a delta-pair/uniform mixture; the two certificate
functions below witness that no valid reproduction CF can close the
factorization for Laplacian (|s| > alpha) or Gaussian sources.
"""

from __future__ import annotations

import math

import numpy as np

from .tilted import EpsilonLoss, _check_slope

__all__ = [
    "laplace_cf",
    "mixture_cf",
    "tilted_cf",
    "laplacian_witness",
    "first_witness_index",
    "gaussian_deconvolution_density",
]


def _sinc(u):
    """sin(u)/u with a series branch near zero to avoid cancellation."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < 1e-4
    safe = np.where(small, 1.0, u)
    series = 1.0 - u * u / 6.0 + u**4 / 120.0
    return np.where(small, series, np.sin(safe) / safe)


def laplace_cf(omega, s: float):
    """CF of the Laplace density with rate |s|: s^2 / (s^2 + omega^2)."""
    s = _check_slope(s)
    omega = np.asarray(omega, dtype=float)
    out = s * s / (s * s + omega * omega)
    return out if out.ndim else float(out)


def mixture_cf(omega, s: float, loss: EpsilonLoss):
    """CF of the delta-pair/uniform mixture on [-eps, eps].

    (eps |s| sinc(omega eps) + cos(omega eps)) / (1 + |s| eps); identically 1
    at eps = 0.
    """
    s = _check_slope(s)
    eps = loss.epsilon
    omega = np.asarray(omega, dtype=float)
    u = omega * eps
    out = (eps * abs(s) * _sinc(u) + np.cos(u)) / (1.0 + abs(s) * eps)
    return out if out.ndim else float(out)


def tilted_cf(omega, s: float, loss: EpsilonLoss):
    """CF of the tilted kernel: the product of the two factors above."""
    return laplace_cf(omega, s) * mixture_cf(omega, s, loss)


def laplacian_witness(alpha: float, s: float, loss: EpsilonLoss, k: int) -> float:
    """Lower bound forced on |Q| at frequency (2k - 1/2) pi / eps.

    Q is the candidate reproduction CF that would make the lower bound tight
    for a Laplacian(alpha) source.  The bound grows linearly in k, so as soon
    as it exceeds 1 no valid characteristic function exists.  Requires eps > 0
    and |s| > alpha.
    """
    s = _check_slope(s)
    alpha = float(alpha)
    if loss.epsilon <= 0.0:
        raise ValueError("witness requires epsilon > 0")
    if abs(s) <= alpha:
        raise ValueError(f"witness requires |s| > alpha, got |s| = {abs(s)!r}, alpha = {alpha!r}")
    k = int(k)
    if k < 1:
        raise ValueError("k must be a positive integer")
    u = loss.epsilon * abs(s)
    return (alpha**2 / (s * s)) * ((1.0 + u) / u) * (2.0 * k - 0.5) * math.pi


def first_witness_index(alpha: float, s: float, loss: EpsilonLoss, threshold: float = 1.0) -> int:
    """Smallest k whose witness exceeds threshold (exists: the bound is unbounded in k)."""
    coef = laplacian_witness(alpha, s, loss, 1) / (1.5 * math.pi)
    k = max(1, int(math.ceil((threshold / coef / math.pi + 0.5) / 2.0)) - 1)
    while laplacian_witness(alpha, s, loss, k) <= threshold:
        k += 1
    while k > 1 and laplacian_witness(alpha, s, loss, k - 1) > threshold:
        k -= 1
    return k


def gaussian_deconvolution_density(x, sigma2: float, s: float):
    """Inverse transform of the Gaussian CF divided by the Laplace factor.

    Equals p(x) (1 + 1/(s^2 sigma^2) - x^2/(s^2 sigma^4)); it integrates to 1
    but turns negative for |x| > sigma sqrt(1 + s^2 sigma^2), so it is not a
    density and the lower bound cannot be tight for Gaussian sources.
    """
    s = _check_slope(s)
    sigma2 = float(sigma2)
    if not math.isfinite(sigma2) or sigma2 <= 0.0:
        raise ValueError(f"sigma2 must be a finite positive real, got {sigma2!r}")
    x = np.asarray(x, dtype=float)
    p = np.exp(-0.5 * x * x / sigma2) / math.sqrt(2.0 * math.pi * sigma2)
    out = p * (1.0 + 1.0 / (s * s * sigma2) - x * x / (s * s * sigma2 * sigma2))
    return out if out.ndim else float(out)
