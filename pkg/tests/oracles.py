"""Independent numeric oracles used to pin expected values in the tests.

Everything here goes through scipy's adaptive QUADPACK routines or plain
brute force, never through the library's own Gauss-Legendre panels, so that
closed forms and quadrature cross-check along genuinely different routes.
"""

import math

import numpy as np
from scipy import integrate


def tilted_quad(s, eps, integrand):
    """Adaptive quadrature of integrand(x) * exp(s * rho(x)) / C over the real line."""
    c = 2.0 * (1.0 + abs(s) * eps) / abs(s)
    upper = eps + 60.0 / abs(s)

    def f(x):
        g = math.exp(s * max(abs(x) - eps, 0.0)) / c
        return integrand(x) * g

    pts = [-eps, 0.0, eps]
    val, _ = integrate.quad(f, -upper, upper, points=pts, limit=400, epsabs=1e-13, epsrel=1e-13)
    return val


def tilted_norm_quad(s, eps):
    return tilted_quad(s, eps, lambda x: 1.0)


def tilted_entropy_quad(s, eps):
    c = 2.0 * (1.0 + abs(s) * eps) / abs(s)

    def neg_log_g(x):
        return -(s * max(abs(x) - eps, 0.0) - math.log(c))

    return tilted_quad(s, eps, neg_log_g)


def tilted_distortion_quad(s, eps):
    return tilted_quad(s, eps, lambda x: max(abs(x) - eps, 0.0))


def tilted_variance_quad(s, eps):
    return tilted_quad(s, eps, lambda x: x * x)


def conv_quad(source_pdf, s, eps, y, extra_points=(0.0,)):
    """(g * p)(y) by adaptive quadrature with the kink locations supplied."""
    c = 2.0 * (1.0 + abs(s) * eps) / abs(s)

    def f(x):
        return math.exp(s * max(abs(y - x) - eps, 0.0)) / c * source_pdf(x)

    half = abs(y) + eps + 60.0 / abs(s) + 40.0
    pts = sorted(p for p in [y - eps, y + eps, *extra_points] if -half < p < half)
    val, _ = integrate.quad(f, -half, half, points=pts, limit=400, epsabs=1e-13, epsrel=1e-13)
    return val


def cosine_transform_quad(s, eps, omega):
    """2 * int_0^inf g(x) cos(omega x) dx by oscillatory-weight quadrature."""
    c = 2.0 * (1.0 + abs(s) * eps) / abs(s)

    def g(x):
        return math.exp(s * max(abs(x) - eps, 0.0)) / c

    upper = eps + 60.0 / abs(s)
    total = 0.0
    for a, b in ((0.0, eps), (eps, upper)):
        if b <= a:
            continue
        val, _ = integrate.quad(g, a, b, weight="cos", wvar=omega, limit=800,
                                epsabs=1e-12, epsrel=1e-12)
        total += val
    return 2.0 * total


def normal_upper_tail_series(x, terms=60):
    """P(Z > x) via the Maclaurin series of the error integral (|x| modest)."""
    total = 0.0
    for k in range(terms):
        total += (-1.0) ** k * x ** (2 * k + 1) / (math.factorial(k) * 2.0**k * (2 * k + 1))
    return 0.5 - total / math.sqrt(2.0 * math.pi)


def two_point_brute_force(s, d_same=0.0, d_cross=2.0, grid=200_001):
    """Exhaustive simplex search of the fixed-slope objective for a 2-point source.

    Returns (distortion, rate) at the best reproduction distribution
    q = (t, 1-t) on the same two points, p uniform.
    """
    a_same = math.exp(s * d_same)
    a_cross = math.exp(s * d_cross)
    ts = np.linspace(1e-12, 1.0 - 1e-12, grid)
    z1 = ts * a_same + (1.0 - ts) * a_cross
    z2 = ts * a_cross + (1.0 - ts) * a_same
    objective = -0.5 * (np.log(z1) + np.log(z2))
    t = float(ts[np.argmin(objective)])
    z1 = t * a_same + (1.0 - t) * a_cross
    z2 = t * a_cross + (1.0 - t) * a_same
    # conditional channel backed out of the optimal q
    q11 = t * a_same / z1
    q12 = (1.0 - t) * a_cross / z1
    q21 = t * a_cross / z2
    q22 = (1.0 - t) * a_same / z2
    distortion = 0.5 * (q11 * d_same + q12 * d_cross + q21 * d_cross + q22 * d_same)
    f_val = -0.5 * (math.log(z1) + math.log(z2))
    rate = s * distortion + f_val
    return distortion, rate


def d_max_quad(source_pdf, eps, y=0.0, half=80.0):
    """E[rho(X - y)] by adaptive quadrature."""

    def f(x):
        return max(abs(x - y) - eps, 0.0) * source_pdf(x)

    pts = sorted(p for p in (y - eps, y, y + eps, 0.0) if -half < p < half)
    val, _ = integrate.quad(f, -half, half, points=pts, limit=400, epsabs=1e-12, epsrel=1e-12)
    return val
