"""Parametric observation families for regression designs.

Each family models one observation channel p(x, theta) and exposes the
pieces the rest of the pipeline needs: density, score, Fisher
information, the variance-stabilizing antiderivative gamma with
gamma'(theta) = sqrt(fisher(theta)), exact per-point score laws, a
sufficient statistic with its mean map (used by the block kernel), and
exact Hellinger affinities between nearby parameters.

Built-ins: bernoulli, poisson, gaussian_scale, location_normal, plus
location_custom built from a tabulated noise density.  Every family
declares a compact working parameter interval on which the Fisher
information is bounded away from 0 and infinity; regression functions
are expected to live there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special, stats

from .errors import ArgumentError, DomainError, NumericError, SingularityError
from .laws import AtomLaw, ScaledChi2Law, ScoreLaw, StandardNormalLaw

# Discrete supports are enumerated until the omitted tail mass is below
# this level; heavy-power moments keep a wide margin past that point.
DISCRETE_TAIL_MASS = 1e-22


# ---------------------------------------------------------------------------
# base class
# ---------------------------------------------------------------------------


class ParametricFamily:
    """One observation channel p(x, theta), theta in an open interval."""

    name: str = "abstract"
    support_kind: str = "continuous-real"
    theta_interval: tuple[float, float] = (-math.inf, math.inf)
    working_interval: tuple[float, float] = (-math.inf, math.inf)
    gamma_anchor: float = 0.0

    # -- parameter checks ---------------------------------------------------

    def require_theta(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        lo, hi = self.theta_interval
        if np.any(theta <= lo) or np.any(theta >= hi):
            raise DomainError(
                f"{self.name}: parameter outside the open interval ({lo}, {hi})"
            )
        return theta

    def in_working_interval(self, theta) -> bool:
        theta = np.asarray(theta, dtype=float)
        lo, hi = self.working_interval
        return bool(np.all(theta >= lo) and np.all(theta <= hi))

    # -- core maps (overridden per family) ----------------------------------

    def density(self, x, theta):
        raise NotImplementedError

    def log_density(self, x, theta):
        with np.errstate(divide="ignore"):
            return np.log(self.density(x, theta))

    def score(self, x, theta):
        raise NotImplementedError

    def fisher(self, theta):
        raise NotImplementedError

    def gamma(self, theta):
        """Antiderivative of sqrt(fisher) from the anchor (numeric default)."""
        theta = self.require_theta(theta)
        scalar = theta.ndim == 0

        def integrand(v):
            return math.sqrt(float(self.fisher(v)))

        values = [
            integrate.quad(integrand, self.gamma_anchor, float(t), limit=200)[0]
            for t in np.atleast_1d(theta)
        ]
        out = np.array(values)
        return float(out[0]) if scalar else out

    def gamma_inverse(self, y):
        raise NotImplementedError

    def sample(self, theta, rng: np.random.Generator):
        raise NotImplementedError

    def score_law(self, theta) -> ScoreLaw:
        raise NotImplementedError

    # -- sufficient statistic and its variance-stabilizing map --------------

    def suff_stat(self, x):
        raise NotImplementedError

    def stat_mean(self, theta):
        raise NotImplementedError

    def stat_mean_inverse(self, m):
        raise NotImplementedError

    def stat_variance(self, theta):
        raise NotImplementedError

    def vst(self, m):
        """Map F on the statistic-mean scale with F(stat_mean(t)) = gamma(t)."""
        raise NotImplementedError

    # -- expectations --------------------------------------------------------

    def support_atoms(self, theta) -> np.ndarray | None:
        """Enumerated support for discrete families, else None."""
        return None

    def quad_bounds(self, theta) -> tuple[float, float]:
        """Integration window holding all mass above the 1e-22 scale."""
        raise NotImplementedError

    def expect(self, theta, fn) -> float:
        """E_theta fn(X) by exact summation or adaptive quadrature."""
        theta = float(theta)
        atoms = self.support_atoms(theta)
        if atoms is not None:
            return float(np.sum(fn(atoms) * self.density(atoms, theta)))
        lo, hi = self.quad_bounds(theta)
        val, err = integrate.quad(
            lambda x: fn(x) * float(self.density(x, theta)), lo, hi, limit=400
        )
        if not math.isfinite(val) or err > 1e-7 * max(1.0, abs(val)):
            raise NumericError(
                f"{self.name}: quadrature did not converge (err={err:.2e})"
            )
        return float(val)

    # -- pairwise structure ---------------------------------------------------

    def affinity(self, theta, u):
        """Integral of sqrt(p(x,theta) p(x,u)); numeric fallback."""
        theta_a = np.asarray(theta, dtype=float)
        u_a = np.asarray(u, dtype=float)
        if theta_a.ndim or u_a.ndim:
            tb, ub = np.broadcast_arrays(np.atleast_1d(theta_a), np.atleast_1d(u_a))
            return np.array(
                [self.affinity(float(a), float(b)) for a, b in zip(tb, ub)]
            )
        theta_f, u_f = float(theta_a), float(u_a)
        atoms = self.support_atoms(theta_f)
        if atoms is not None:
            return float(
                np.sum(np.sqrt(self.density(atoms, theta_f) * self.density(atoms, u_f)))
            )
        lo1, hi1 = self.quad_bounds(theta_f)
        lo2, hi2 = self.quad_bounds(u_f)
        val = integrate.quad(
            lambda x: math.sqrt(
                float(self.density(x, theta_f)) * float(self.density(x, u_f))
            ),
            min(lo1, lo2),
            max(hi1, hi2),
            limit=400,
        )[0]
        return float(val)

    def sqrt_z_moments(self, theta, u) -> tuple[float, float]:
        """(E(sqrt z - 1), E(sqrt z - 1)^2) for z = p(X,u)/p(X,theta), X~theta.

        Both reduce to the affinity A: the first is A - 1, the second is
        2(1 - A) because E z = 1 on a shared support.
        """
        a = self.affinity(theta, u)
        return a - 1.0, 2.0 * (1.0 - a)


# ---------------------------------------------------------------------------
# built-in families
# ---------------------------------------------------------------------------


class Bernoulli(ParametricFamily):
    """Binary channel: P(X=1) = theta."""

    name = "bernoulli"
    support_kind = "binary"
    theta_interval = (0.0, 1.0)
    working_interval = (0.05, 0.95)
    gamma_anchor = 0.0

    def density(self, x, theta):
        x = np.asarray(x, dtype=float)
        theta = np.asarray(theta, dtype=float)
        out = np.where(x == 1.0, theta, np.where(x == 0.0, 1.0 - theta, 0.0))
        return out if out.ndim else float(out)

    def score(self, x, theta):
        x = np.asarray(x, dtype=float)
        theta = np.asarray(theta, dtype=float)
        out = (x - theta) / (theta * (1.0 - theta))
        return out if out.ndim else float(out)

    def fisher(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = 1.0 / (theta * (1.0 - theta))
        return out if out.ndim else float(out)

    def gamma(self, theta):
        theta = self.require_theta(theta)
        out = 2.0 * np.arcsin(np.sqrt(theta))
        return out if out.ndim else float(out)

    def gamma_inverse(self, y):
        y = np.asarray(y, dtype=float)
        out = np.sin(y / 2.0) ** 2
        return out if out.ndim else float(out)

    def sample(self, theta, rng):
        theta = self.require_theta(theta)
        return rng.binomial(1, theta).astype(float)

    def score_law(self, theta) -> AtomLaw:
        theta = float(theta)
        return AtomLaw(
            values=np.array([-1.0 / (1.0 - theta), 1.0 / theta]),
            probs=np.array([1.0 - theta, theta]),
        )

    def suff_stat(self, x):
        return np.asarray(x, dtype=float)

    def stat_mean(self, theta):
        return np.asarray(theta, dtype=float)

    def stat_mean_inverse(self, m):
        return np.asarray(m, dtype=float)

    def stat_variance(self, theta):
        theta = np.asarray(theta, dtype=float)
        return theta * (1.0 - theta)

    def vst(self, m):
        m = np.asarray(m, dtype=float)
        out = 2.0 * np.arcsin(np.sqrt(np.clip(m, 0.0, 1.0)))
        return out if out.ndim else float(out)

    def support_atoms(self, theta):
        return np.array([0.0, 1.0])

    def affinity(self, theta, u):
        theta = np.asarray(theta, dtype=float)
        u = np.asarray(u, dtype=float)
        out = np.sqrt(theta * u) + np.sqrt((1.0 - theta) * (1.0 - u))
        return out if out.ndim else float(out)


class Poisson(ParametricFamily):
    """Counting channel: X ~ Poisson(theta)."""

    name = "poisson"
    support_kind = "nonnegative-integer"
    theta_interval = (0.0, math.inf)
    working_interval = (0.1, 10.0)
    gamma_anchor = 0.0

    def density(self, x, theta):
        x = np.asarray(x, dtype=float)
        out = np.where(
            (x >= 0) & (x == np.floor(x)), stats.poisson.pmf(np.floor(x), theta), 0.0
        )
        return out if out.ndim else float(out)

    def score(self, x, theta):
        x = np.asarray(x, dtype=float)
        theta = np.asarray(theta, dtype=float)
        out = x / theta - 1.0
        return out if out.ndim else float(out)

    def fisher(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = 1.0 / theta
        return out if out.ndim else float(out)

    def gamma(self, theta):
        theta = self.require_theta(theta)
        out = 2.0 * np.sqrt(theta)
        return out if out.ndim else float(out)

    def gamma_inverse(self, y):
        y = np.asarray(y, dtype=float)
        out = (y / 2.0) ** 2
        return out if out.ndim else float(out)

    def sample(self, theta, rng):
        theta = self.require_theta(theta)
        return rng.poisson(theta).astype(float)

    def score_law(self, theta) -> "PoissonScoreLaw":
        return PoissonScoreLaw(float(theta))

    def suff_stat(self, x):
        return np.asarray(x, dtype=float)

    def stat_mean(self, theta):
        return np.asarray(theta, dtype=float)

    def stat_mean_inverse(self, m):
        return np.asarray(m, dtype=float)

    def stat_variance(self, theta):
        return np.asarray(theta, dtype=float)

    def vst(self, m):
        m = np.asarray(m, dtype=float)
        out = 2.0 * np.sqrt(np.maximum(m, 0.0))
        return out if out.ndim else float(out)

    def support_atoms(self, theta):
        # mean + 20 sigma + margin leaves tail mass far below 1e-22 even
        # for the tilted sums appearing in high-power moment audits
        mu = 1.5 * float(theta)
        cut = int(math.ceil(mu + 20.0 * math.sqrt(mu) + 60.0))
        return np.arange(0.0, cut + 1.0)

    def affinity(self, theta, u):
        theta = np.asarray(theta, dtype=float)
        u = np.asarray(u, dtype=float)
        out = np.exp(-0.5 * (np.sqrt(theta) - np.sqrt(u)) ** 2)
        return out if out.ndim else float(out)


class PoissonScoreLaw(ScoreLaw):
    """Law of X/theta - 1 for X ~ Poisson(theta), with closed-form cf."""

    def __init__(self, theta: float):
        self.theta = float(theta)
        self._atom_cache: AtomLaw | None = None

    def atoms(self) -> AtomLaw:
        if self._atom_cache is None:
            xs = Poisson().support_atoms(self.theta)
            self._atom_cache = AtomLaw(
                xs / self.theta - 1.0, stats.poisson.pmf(xs, self.theta)
            )
        return self._atom_cache

    def second_moment(self) -> float:
        return 1.0 / self.theta

    def cdf(self, s):
        s = np.asarray(s, dtype=float)
        out = stats.poisson.cdf(np.floor(self.theta * (s + 1.0) + 1e-12), self.theta)
        return out if out.ndim else float(out)

    def ppf(self, u):
        u = np.asarray(u, dtype=float)
        out = stats.poisson.ppf(u, self.theta) / self.theta - 1.0
        return out if out.ndim else float(out)

    def sample(self, rng, size):
        return rng.poisson(self.theta, size) / self.theta - 1.0

    def cf(self, omega):
        omega = np.asarray(omega, dtype=float)
        t = omega / self.theta
        return np.exp(self.theta * (np.exp(1j * t) - 1.0) - 1j * omega)

    def clipped_moments(self, k):
        return self.atoms().clipped_moments(k)


class GaussianScale(ParametricFamily):
    """Scale channel: X ~ N(0, theta^2)."""

    name = "gaussian_scale"
    support_kind = "continuous-real"
    theta_interval = (0.0, math.inf)
    working_interval = (0.1, 10.0)
    gamma_anchor = 1.0

    def density(self, x, theta):
        x = np.asarray(x, dtype=float)
        theta = np.asarray(theta, dtype=float)
        out = np.exp(-0.5 * (x / theta) ** 2) / (np.sqrt(2.0 * np.pi) * theta)
        return out if out.ndim else float(out)

    def score(self, x, theta):
        x = np.asarray(x, dtype=float)
        theta = np.asarray(theta, dtype=float)
        out = (x * x - theta * theta) / theta**3
        return out if out.ndim else float(out)

    def fisher(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = 2.0 / theta**2
        return out if out.ndim else float(out)

    def gamma(self, theta):
        theta = self.require_theta(theta)
        out = math.sqrt(2.0) * np.log(theta)
        return out if out.ndim else float(out)

    def gamma_inverse(self, y):
        y = np.asarray(y, dtype=float)
        out = np.exp(y / math.sqrt(2.0))
        return out if out.ndim else float(out)

    def sample(self, theta, rng):
        theta = self.require_theta(theta)
        return theta * rng.standard_normal(np.shape(theta) or None)

    def score_law(self, theta) -> ScaledChi2Law:
        return ScaledChi2Law(float(theta))

    def suff_stat(self, x):
        x = np.asarray(x, dtype=float)
        return x * x

    def stat_mean(self, theta):
        theta = np.asarray(theta, dtype=float)
        return theta * theta

    def stat_mean_inverse(self, m):
        m = np.asarray(m, dtype=float)
        return np.sqrt(np.maximum(m, 0.0))

    def stat_variance(self, theta):
        theta = np.asarray(theta, dtype=float)
        return 2.0 * theta**4

    def vst(self, m):
        m = np.asarray(m, dtype=float)
        out = np.log(np.maximum(m, 1e-300)) / math.sqrt(2.0)
        return out if out.ndim else float(out)

    def quad_bounds(self, theta):
        return (-16.0 * theta, 16.0 * theta)

    def affinity(self, theta, u):
        theta = np.asarray(theta, dtype=float)
        u = np.asarray(u, dtype=float)
        out = np.sqrt(2.0 * theta * u / (theta * theta + u * u))
        return out if out.ndim else float(out)


class LocationNormal(ParametricFamily):
    """Location channel: X ~ N(theta, 1)."""

    name = "location_normal"
    support_kind = "continuous-real"
    theta_interval = (-math.inf, math.inf)
    working_interval = (-5.0, 5.0)
    gamma_anchor = 0.0

    def density(self, x, theta):
        x = np.asarray(x, dtype=float)
        theta = np.asarray(theta, dtype=float)
        out = np.exp(-0.5 * (x - theta) ** 2) / math.sqrt(2.0 * np.pi)
        return out if out.ndim else float(out)

    def score(self, x, theta):
        x = np.asarray(x, dtype=float)
        theta = np.asarray(theta, dtype=float)
        out = x - theta
        return out if out.ndim else float(out)

    def fisher(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.ones_like(theta)
        return out if out.ndim else 1.0

    def gamma(self, theta):
        theta = self.require_theta(theta)
        return theta if theta.ndim else float(theta)

    def gamma_inverse(self, y):
        y = np.asarray(y, dtype=float)
        return y if y.ndim else float(y)

    def sample(self, theta, rng):
        theta = self.require_theta(theta)
        return theta + rng.standard_normal(np.shape(theta) or None)

    def score_law(self, theta) -> StandardNormalLaw:
        return StandardNormalLaw()

    def suff_stat(self, x):
        return np.asarray(x, dtype=float)

    def stat_mean(self, theta):
        return np.asarray(theta, dtype=float)

    def stat_mean_inverse(self, m):
        return np.asarray(m, dtype=float)

    def stat_variance(self, theta):
        theta = np.asarray(theta, dtype=float)
        return np.ones_like(theta)

    def vst(self, m):
        m = np.asarray(m, dtype=float)
        return m if m.ndim else float(m)

    def quad_bounds(self, theta):
        return (theta - 16.0, theta + 16.0)

    def affinity(self, theta, u):
        theta = np.asarray(theta, dtype=float)
        u = np.asarray(u, dtype=float)
        out = np.exp(-((theta - u) ** 2) / 8.0)
        return out if out.ndim else float(out)


class TabulatedLocation(ParametricFamily):
    """Location channel X = theta + noise with a tabulated noise density.

    The table gives (x, p(x)) on a strictly increasing grid; the density
    is trapezoid-normalized and treated as piecewise linear.  Score,
    Fisher information, sampling, and the score law are all derived from
    the table, so their accuracy is grid-resolution limited.
    """

    name = "location_custom"
    support_kind = "continuous-real"
    theta_interval = (-math.inf, math.inf)
    gamma_anchor = 0.0

    def __init__(self, grid, dens, working_interval=(-1.0, 1.0)):
        grid = np.asarray(grid, dtype=float)
        dens = np.asarray(dens, dtype=float)
        if grid.ndim != 1 or grid.size < 8:
            raise ArgumentError("location_custom: need at least 8 grid points")
        if np.any(np.diff(grid) <= 0):
            raise ArgumentError("location_custom: grid must be strictly increasing")
        if np.any(dens < 0) or not np.all(np.isfinite(dens)):
            raise ArgumentError("location_custom: density must be finite nonnegative")
        mass = np.trapezoid(dens, grid)
        if mass <= 0:
            raise ArgumentError("location_custom: density integrates to zero")
        self.grid = grid
        self.dens = dens / mass
        self.working_interval = tuple(working_interval)

        # cell masses on the trapezoid rule, reused for moments and sampling
        cell = 0.5 * (self.dens[1:] + self.dens[:-1]) * np.diff(grid)
        self._cdf = np.concatenate([[0.0], np.cumsum(cell)])
        self._cdf /= self._cdf[-1]

        dp = np.gradient(self.dens, grid)
        safe = np.maximum(self.dens, 1e-12 * self.dens.max())
        score_tab = -dp / safe
        score_tab[self.dens <= 0] = 0.0
        weights = self._point_weights()
        mean_score = float(weights @ score_tab)
        self._score_tab = score_tab - mean_score
        self._fisher = float(weights @ self._score_tab**2)
        if self._fisher <= 0:
            raise ArgumentError("location_custom: zero Fisher information")
        self._noise_mean = float(weights @ grid)

    def _point_weights(self) -> np.ndarray:
        """Trapezoid probability weights attached to the grid points."""
        g, d = self.grid, self.dens
        w = np.zeros_like(g)
        half = 0.5 * np.diff(g)
        w[:-1] += half * d[:-1]
        w[1:] += half * d[1:]
        return w / w.sum()

    @classmethod
    def from_file(cls, path, working_interval=(-1.0, 1.0)) -> "TabulatedLocation":
        data = np.loadtxt(path)
        if data.ndim != 2 or data.shape[1] != 2:
            raise ArgumentError(
                "location_custom: table must have two columns (x, density)"
            )
        return cls(data[:, 0], data[:, 1], working_interval)

    def density(self, x, theta):
        x = np.asarray(x, dtype=float)
        theta = np.asarray(theta, dtype=float)
        out = np.interp(x - theta, self.grid, self.dens, left=0.0, right=0.0)
        return out if out.ndim else float(out)

    def score(self, x, theta):
        x = np.asarray(x, dtype=float)
        theta = np.asarray(theta, dtype=float)
        out = np.interp(x - theta, self.grid, self._score_tab, left=0.0, right=0.0)
        return out if out.ndim else float(out)

    def fisher(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.full_like(theta, self._fisher)
        return out if out.ndim else self._fisher

    def gamma(self, theta):
        theta = self.require_theta(theta)
        out = math.sqrt(self._fisher) * theta
        return out if out.ndim else float(out)

    def gamma_inverse(self, y):
        y = np.asarray(y, dtype=float)
        out = y / math.sqrt(self._fisher)
        return out if out.ndim else float(out)

    def sample(self, theta, rng):
        theta = self.require_theta(theta)
        u = rng.random(np.shape(theta) or None)
        noise = np.interp(u, self._cdf, self.grid)
        return theta + noise

    def score_law(self, theta) -> AtomLaw:
        return AtomLaw.from_unsorted(self._score_tab, self._point_weights())

    def suff_stat(self, x):
        return np.asarray(x, dtype=float)

    def stat_mean(self, theta):
        return np.asarray(theta, dtype=float) + self._noise_mean

    def stat_mean_inverse(self, m):
        return np.asarray(m, dtype=float) - self._noise_mean

    def stat_variance(self, theta):
        w = self._point_weights()
        var = float(w @ (self.grid - self._noise_mean) ** 2)
        theta = np.asarray(theta, dtype=float)
        out = np.full_like(theta, var)
        return out if out.ndim else var

    def vst(self, m):
        m = np.asarray(m, dtype=float)
        out = math.sqrt(self._fisher) * (m - self._noise_mean)
        return out if out.ndim else float(out)

    def quad_bounds(self, theta):
        return (self.grid[0] + theta, self.grid[-1] + theta)

    def expect(self, theta, fn) -> float:
        theta = float(theta)
        w = self._point_weights()
        return float(w @ fn(self.grid + theta))

    def affinity(self, theta, u):
        theta_a = np.asarray(theta, dtype=float)
        u_a = np.asarray(u, dtype=float)
        if theta_a.ndim or u_a.ndim:
            tb, ub = np.broadcast_arrays(np.atleast_1d(theta_a), np.atleast_1d(u_a))
            return np.array(
                [self.affinity(float(a), float(b)) for a, b in zip(tb, ub)]
            )
        theta_f, u_f = float(theta_a), float(u_a)
        lo = min(self.grid[0] + theta_f, self.grid[0] + u_f)
        hi = max(self.grid[-1] + theta_f, self.grid[-1] + u_f)
        xs = np.linspace(lo, hi, 4 * self.grid.size)
        vals = np.sqrt(self.density(xs, theta_f) * self.density(xs, u_f))
        return float(np.trapezoid(vals, xs))


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

BUILTIN_FAMILIES = ("bernoulli", "poisson", "gaussian_scale", "location_normal")


def get_family(name: str, table_path: str | None = None, **kwargs) -> ParametricFamily:
    """Look a family up by its config name."""
    registry = {
        "bernoulli": Bernoulli,
        "poisson": Poisson,
        "gaussian_scale": GaussianScale,
        "location_normal": LocationNormal,
    }
    if name in registry:
        return registry[name]()
    if name == "location_custom":
        if table_path is None:
            raise ArgumentError("location_custom requires a density table file")
        return TabulatedLocation.from_file(table_path, **kwargs)
    raise ArgumentError(
        f"unknown family {name!r}; choose from "
        "bernoulli|poisson|gaussian_scale|location_normal|location_custom"
    )


# ---------------------------------------------------------------------------
# module-level operations
# ---------------------------------------------------------------------------


def fisher_info(family: ParametricFamily, theta):
    """Closed-form Fisher information, domain-checked."""
    family.require_theta(theta)
    return family.fisher(theta)


def fisher_info_quadrature(family: ParametricFamily, theta) -> float:
    """Independent numeric Fisher information: E_theta score(X, theta)^2."""
    family.require_theta(theta)
    t = float(np.asarray(theta))
    return family.expect(t, lambda x: np.asarray(family.score(x, t)) ** 2)


def gamma_transform(family: ParametricFamily, theta):
    """Variance-stabilizing antiderivative, anchored per family."""
    return family.gamma(theta)


def normalization_defect(family: ParametricFamily, theta) -> float:
    """|integral of p(., theta) - 1| by summation or quadrature."""
    return abs(family.expect(float(theta), lambda x: np.ones_like(np.asarray(x, dtype=float))) - 1.0)


def extended_tangent(family: ParametricFamily, x, theta: float, u: float):
    """Secant version of the score: (2/(u-theta))(sqrt(p_u/p_theta) - 1)."""
    family.require_theta(theta)
    family.require_theta(u)
    if u == theta:
        return family.score(x, theta)
    p_t = np.asarray(family.density(x, theta), dtype=float)
    if np.any(p_t <= 0.0):
        raise SingularityError(
            f"{family.name}: zero density at the conditioning parameter"
        )
    p_u = np.asarray(family.density(x, u), dtype=float)
    out = (2.0 / (u - theta)) * (np.sqrt(p_u / p_t) - 1.0)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class RegularityReport:
    """Grid estimates of the three family-regularity supremum conditions.

    These are audits over a finite pair grid, not certificates: r1 is
    the scaled L2 remainder of sqrt-density differentiability, r2 the
    2*delta_r2 moment of the secant score, r3 the Fisher range.
    """

    r1_sup_estimate: float
    r2_sup_estimate: float
    r3_bounds: tuple[float, float]
    grid_spec: str
    delta_r1: float
    delta_r2: float
    epsilon: float
    pair_count: int
    insufficient_pairs: bool
    pass_flags: dict = field(default_factory=dict)

    def all_pass(self) -> bool:
        return all(self.pass_flags.values())


def default_delta_r1(beta: float) -> float:
    """Midpoint of the admissible exponent range (1/(2 beta), 1)."""
    return 0.5 * (1.0 / (2.0 * beta) + 1.0)


def default_delta_r2(beta: float) -> float:
    """Half a unit above the admissible threshold (2b+1)/(2b-1)."""
    return (2.0 * beta + 1.0) / (2.0 * beta - 1.0) + 0.5


def _r1_remainder(family: ParametricFamily, theta: float, u: float) -> float:
    """L2 norm of sqrt(p_u) - sqrt(p_theta) - (u-theta) * half-score * sqrt(p_theta)."""
    d = u - theta

    def integrand(x):
        p_t = np.asarray(family.density(x, theta), dtype=float)
        p_u = np.asarray(family.density(x, u), dtype=float)
        s_dot = 0.5 * np.asarray(family.score(x, theta), dtype=float) * np.sqrt(p_t)
        return (np.sqrt(p_u) - np.sqrt(p_t) - d * s_dot) ** 2

    atoms = family.support_atoms(theta)
    lo1, hi1 = (0.0, 0.0) if atoms is not None else family.quad_bounds(theta)
    if atoms is not None:
        total = float(np.sum(integrand(atoms)))
    elif isinstance(family, TabulatedLocation):
        # piecewise-linear density: dense trapezoid avoids kink trouble
        lo2, hi2 = family.quad_bounds(u)
        xs = np.linspace(min(lo1, lo2), max(hi1, hi2), 8 * family.grid.size)
        total = float(np.trapezoid(integrand(xs), xs))
    else:
        lo2, hi2 = family.quad_bounds(u)
        total = integrate.quad(
            lambda x: float(integrand(x)), min(lo1, lo2), max(hi1, hi2), limit=400
        )[0]
    return math.sqrt(max(total, 0.0))


def check_regularity(
    family: ParametricFamily,
    grid,
    epsilon: float,
    beta: float,
    delta_r1: float | None = None,
    delta_r2: float | None = None,
) -> RegularityReport:
    """Estimate the regularity suprema over a finite (theta, u) pair grid.

    For each grid theta, partners u = theta +- epsilon * {1, 1/2, 1/4}
    are used (clipped to the parameter interval).  Estimates are maxima
    over the realized pairs; the report records the grid so reruns are
    reproducible.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ArgumentError("check_regularity: empty parameter grid")
    if epsilon < 0:
        raise ArgumentError("check_regularity: epsilon must be nonnegative")
    if not 0.5 < beta:
        raise ArgumentError("check_regularity: beta must exceed 1/2")
    family.require_theta(grid)
    d1 = default_delta_r1(beta) if delta_r1 is None else float(delta_r1)
    d2 = default_delta_r2(beta) if delta_r2 is None else float(delta_r2)

    lo, hi = family.theta_interval
    pairs: list[tuple[float, float]] = []
    for theta in grid:
        for frac in (1.0, 0.5, 0.25):
            for sign in (-1.0, 1.0):
                u = float(theta + sign * frac * epsilon)
                if lo < u < hi and u != theta:
                    pairs.append((float(theta), u))

    r1_sup = 0.0
    r2_sup = 0.0
    for theta, u in pairs:
        rem = _r1_remainder(family, theta, u)
        r1_sup = max(r1_sup, rem / abs(u - theta) ** (1.0 + d1))
        moment = family.expect(
            theta,
            lambda x, t=theta, v=u: np.abs(
                np.asarray(extended_tangent(family, x, t, v), dtype=float)
            )
            ** (2.0 * d2),
        )
        r2_sup = max(r2_sup, moment)
    for theta in grid:
        # the u = theta member of the pair family: plain score moment
        moment = family.expect(
            theta,
            lambda x, t=theta: np.abs(np.asarray(family.score(x, t), dtype=float))
            ** (2.0 * d2),
        )
        r2_sup = max(r2_sup, moment)

    fish = np.asarray(family.fisher(grid), dtype=float)
    r3 = (float(fish.min()), float(fish.max()))
    insufficient = len(pairs) == 0
    flags = {
        "r1": (not insufficient) and math.isfinite(r1_sup),
        "r2": (not insufficient) and math.isfinite(r2_sup),
        "r3": r3[0] > 0.0 and math.isfinite(r3[1]),
    }
    spec = (
        f"grid={grid.size} points in [{grid.min():.6g},{grid.max():.6g}], "
        f"epsilon={epsilon:.6g}, offsets=+-{{1,1/2,1/4}}*eps, "
        f"pairs={len(pairs)}, tail_mass={DISCRETE_TAIL_MASS:g}"
    )
    return RegularityReport(
        r1_sup_estimate=r1_sup,
        r2_sup_estimate=r2_sup,
        r3_bounds=r3,
        grid_spec=spec,
        delta_r1=d1,
        delta_r2=d2,
        epsilon=float(epsilon),
        pair_count=len(pairs),
        insufficient_pairs=insufficient,
        pass_flags=flags,
    )
