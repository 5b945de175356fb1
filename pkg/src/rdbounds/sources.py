"""Source models: Laplacian, Gaussian, and tabulated piecewise-constant densities.

Each source exposes the four quantities every bound needs: the density, its
differential entropy h(p) in nats, its variance, and the zero-rate distortion
d_max(loss) = inf_y E[loss(X - y)].
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from scipy import special

from .tilted import EpsilonLoss

__all__ = [
    "Source",
    "Laplacian",
    "Gaussian",
    "Tabulated",
    "SourceSummary",
    "summarize",
    "erfc_tail",
    "load_tabulated_csv",
]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def erfc_tail(x):
    """Upper-tail standard normal probability P(Z > x), accurate to ~1e-16."""
    x = np.asarray(x, dtype=float)
    out = 0.5 * special.erfc(x / math.sqrt(2.0))
    return out if out.ndim else float(out)


def _golden_min(f, a: float, b: float, tol: float) -> float:
    """Golden-section minimum of a unimodal f on [a, b]."""
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
    return 0.5 * (a + b)


class Source(ABC):
    """Immutable source density with the summaries the bounds consume."""

    #: locations where the density is not smooth (used by convolution panels)
    pdf_kinks: tuple = ()
    #: symmetric about zero (enables half-line entropy quadrature)
    symmetric: bool = False

    @abstractmethod
    def pdf(self, x):
        """Density evaluated at x (vectorized)."""

    @abstractmethod
    def differential_entropy(self) -> float:
        """h(p) in nats."""

    @abstractmethod
    def variance(self) -> float: ...

    def mean(self) -> float:
        return 0.0

    @abstractmethod
    def d_max(self, loss: EpsilonLoss) -> float:
        """Smallest distortion achievable at zero rate: inf_y E[loss(X - y)]."""

    @abstractmethod
    def tail_mass(self, t: float) -> float:
        """P(|X| > t)."""

    @abstractmethod
    def tail_span(self, mass: float) -> float:
        """Half-width T with tail_mass(T) <= mass."""


@dataclass(frozen=True)
class Laplacian(Source):
    """Two-sided exponential density (alpha/2) exp(-alpha |x|)."""

    alpha: float

    pdf_kinks = (0.0,)
    symmetric = True

    def __post_init__(self):
        a = float(self.alpha)
        if not math.isfinite(a) or a <= 0.0:
            raise ValueError(f"alpha must be a finite positive real, got {self.alpha!r}")
        object.__setattr__(self, "alpha", a)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        out = 0.5 * self.alpha * np.exp(-self.alpha * np.abs(x))
        return out if out.ndim else float(out)

    def differential_entropy(self) -> float:
        return 1.0 - math.log(self.alpha / 2.0)

    def variance(self) -> float:
        return 2.0 / self.alpha**2

    def d_max(self, loss: EpsilonLoss) -> float:
        return math.exp(-self.alpha * loss.epsilon) / self.alpha

    def tail_mass(self, t: float) -> float:
        return math.exp(-self.alpha * max(t, 0.0))

    def tail_span(self, mass: float) -> float:
        return -math.log(mass) / self.alpha


@dataclass(frozen=True)
class Gaussian(Source):
    """Zero-mean normal density with variance sigma2."""

    sigma2: float

    symmetric = True

    def __post_init__(self):
        v = float(self.sigma2)
        if not math.isfinite(v) or v <= 0.0:
            raise ValueError(f"sigma2 must be a finite positive real, got {self.sigma2!r}")
        object.__setattr__(self, "sigma2", v)

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.exp(-0.5 * x * x / self.sigma2) / math.sqrt(2.0 * math.pi * self.sigma2)
        return out if out.ndim else float(out)

    def differential_entropy(self) -> float:
        return 0.5 * (1.0 + math.log(2.0 * math.pi * self.sigma2))

    def variance(self) -> float:
        return self.sigma2

    def d_max(self, loss: EpsilonLoss) -> float:
        eps = loss.epsilon
        return 2.0 * (self.sigma2 * self.pdf(eps) - eps * erfc_tail(eps / self.sigma))

    def tail_mass(self, t: float) -> float:
        return float(special.erfc(max(t, 0.0) / (self.sigma * math.sqrt(2.0))))

    def tail_span(self, mass: float) -> float:
        return self.sigma * math.sqrt(2.0) * float(special.erfcinv(mass))


@dataclass(frozen=True)
class Tabulated(Source):
    """Piecewise-constant density: mass m_i spread over the cell around grid point x_i.

    The grid must be uniform and strictly increasing; masses must be
    nonnegative and sum to 1 within 1e-9 (they are renormalized exactly).
    Moments and d_max use the point-mass convention on the grid nodes.
    """

    grid: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float).copy()
        masses = np.asarray(self.masses, dtype=float).copy()
        if grid.ndim != 1 or grid.size < 2 or masses.shape != grid.shape:
            raise ValueError("grid and masses must be 1-d arrays of equal length >= 2")
        steps = np.diff(grid)
        if np.any(steps <= 0):
            raise ValueError("grid must be strictly increasing")
        h = float(steps.mean())
        if np.max(np.abs(steps - h)) > 1e-8 * max(h, 1.0):
            raise ValueError("grid must be uniformly spaced")
        if np.any(masses < 0) or np.any(~np.isfinite(masses)):
            raise ValueError("masses must be finite and nonnegative")
        total = float(masses.sum())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"masses must sum to 1 within 1e-9, got {total!r}")
        masses /= total
        grid.setflags(write=False)
        masses.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "masses", masses)

    @property
    def spacing(self) -> float:
        return float(self.grid[1] - self.grid[0])

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        h = self.spacing
        idx = np.floor((x - (self.grid[0] - 0.5 * h)) / h).astype(int)
        inside = (idx >= 0) & (idx < self.grid.size)
        out = np.where(inside, self.masses[np.clip(idx, 0, self.grid.size - 1)] / h, 0.0)
        return out if out.ndim else float(out)

    def differential_entropy(self) -> float:
        m = self.masses[self.masses > 0]
        return float(-np.sum(m * np.log(m / self.spacing)))

    def variance(self) -> float:
        mu = self.mean()
        return float(np.dot(self.masses, self.grid**2) - mu * mu)

    def mean(self) -> float:
        return float(np.dot(self.masses, self.grid))

    def d_max(self, loss: EpsilonLoss) -> float:
        # E[loss(X - y)] is convex in y, so golden section over the hull is safe
        def objective(y):
            return float(np.dot(self.masses, loss(self.grid - y)))

        y_star = _golden_min(objective, float(self.grid[0]), float(self.grid[-1]), 1e-10)
        return objective(y_star)

    def tail_mass(self, t: float) -> float:
        return float(self.masses[np.abs(self.grid) > t].sum())

    def tail_span(self, mass: float) -> float:
        return float(np.max(np.abs(self.grid)))


@dataclass(frozen=True)
class SourceSummary:
    """The per-source numbers every bound sweep needs."""

    h_p: float
    v_p: float
    d_max_eps: float
    d_max_zero: float


def summarize(source: Source, loss: EpsilonLoss) -> SourceSummary:
    return SourceSummary(
        h_p=source.differential_entropy(),
        v_p=source.variance(),
        d_max_eps=source.d_max(loss),
        d_max_zero=source.d_max(EpsilonLoss(0.0)),
    )


def load_tabulated_csv(path) -> Tabulated:
    """Load a tabulated source from a two-column CSV of (x, mass) rows.

    An optional single header line is skipped.  Masses must sum to 1 within
    1e-6 and are renormalized; anything further off is rejected.
    """
    xs: list[float] = []
    ms: list[float] = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 2:
                raise ValueError(f"{path}: line {lineno}: expected two comma-separated columns")
            try:
                x, m = float(parts[0]), float(parts[1])
            except ValueError:
                if lineno == 1 and not xs:
                    continue  # header
                raise ValueError(f"{path}: line {lineno}: non-numeric row") from None
            xs.append(x)
            ms.append(m)
    if len(xs) < 2:
        raise ValueError(f"{path}: needs at least two data rows")
    masses = np.asarray(ms, dtype=float)
    total = float(masses.sum())
    if abs(total - 1.0) > 1e-6:
        raise ValueError(f"{path}: masses sum to {total!r}, outside 1 +/- 1e-6")
    return Tabulated(grid=np.asarray(xs, dtype=float), masses=masses / total)
