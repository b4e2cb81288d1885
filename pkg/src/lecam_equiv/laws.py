"""Distribution objects for per-observation score variables.

Each regression design point i carries the law of the score
l_dot(X_i, theta_i) under X_i ~ p(., theta_i).  The coupling and
truncation machinery needs four things from such a law: exact low-order
moments, a distribution function, a (generalized inverse) quantile
function, and a characteristic function for building laws of weighted
sums.  Discrete families get exact atom enumeration; the continuous
built-ins get closed forms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special
from scipy import stats

from .errors import TruncationConstantError


class ScoreLaw:
    """Interface for the law of a single score variable (mean zero)."""

    is_gaussian: bool = False

    def atoms(self) -> "AtomLaw | None":
        """Finite-support representation when one exists."""
        return None

    def second_moment(self) -> float:
        raise NotImplementedError

    def cdf(self, s):
        raise NotImplementedError

    def ppf(self, u):
        """Generalized inverse: smallest s with cdf(s) >= u."""
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size: int):
        raise NotImplementedError

    def cf(self, omega):
        """E exp(i omega xi) on an array of angular frequencies."""
        raise NotImplementedError

    def clipped_moments(self, k: float) -> tuple[float, float, float]:
        """(E xi 1{|xi|<=k}, E xi^2 1{|xi|<=k}, P(|xi|<=k))."""
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class AtomLaw(ScoreLaw):
    """Finite-support law given by sorted atoms and their probabilities."""

    values: np.ndarray
    probs: np.ndarray

    @staticmethod
    def from_unsorted(values, probs) -> "AtomLaw":
        values = np.asarray(values, dtype=float)
        probs = np.asarray(probs, dtype=float)
        order = np.argsort(values, kind="stable")
        return AtomLaw(values[order], probs[order])

    def atoms(self) -> "AtomLaw":
        return self

    def second_moment(self) -> float:
        return float(np.dot(self.probs, self.values**2))

    def mean(self) -> float:
        return float(np.dot(self.probs, self.values))

    def cdf(self, s):
        s = np.asarray(s, dtype=float)
        cum = np.cumsum(self.probs)
        idx = np.searchsorted(self.values, s, side="right")
        out = np.where(idx > 0, cum[np.minimum(idx, len(cum)) - 1], 0.0)
        return out if out.ndim else float(out)

    def ppf(self, u):
        u = np.asarray(u, dtype=float)
        cum = np.cumsum(self.probs)
        # guard the top against cumulative rounding below 1
        cum[-1] = max(cum[-1], 1.0)
        idx = np.searchsorted(cum, u, side="left")
        idx = np.minimum(idx, len(self.values) - 1)
        out = self.values[idx]
        return out if out.ndim else float(out)

    def sample(self, rng: np.random.Generator, size: int):
        return self.ppf(rng.random(size))

    def cf(self, omega):
        omega = np.asarray(omega, dtype=float)
        return np.exp(1j * np.outer(omega, self.values)) @ self.probs

    def clipped_moments(self, k: float) -> tuple[float, float, float]:
        inside = np.abs(self.values) <= k
        p = self.probs[inside]
        v = self.values[inside]
        return float(p @ v), float(p @ v**2), float(p.sum())

    def moment(self, order: float, absolute: bool = False) -> float:
        v = np.abs(self.values) if absolute else self.values
        return float(self.probs @ v**order)


@dataclass(frozen=True, eq=False)
class StandardNormalLaw(ScoreLaw):
    """Score law of the unit-information Gaussian location family."""

    is_gaussian: bool = True

    def second_moment(self) -> float:
        return 1.0

    def cdf(self, s):
        return special.ndtr(np.asarray(s, dtype=float))

    def ppf(self, u):
        return special.ndtri(np.asarray(u, dtype=float))

    def sample(self, rng: np.random.Generator, size: int):
        return rng.standard_normal(size)

    def cf(self, omega):
        omega = np.asarray(omega, dtype=float)
        return np.exp(-0.5 * omega**2) + 0j

    def clipped_moments(self, k: float) -> tuple[float, float, float]:
        # E xi^2 1{|xi|>k} = 2*(k*phi(k) + 1 - Phi(k)) for the standard normal
        phi_k = np.exp(-0.5 * k * k) / np.sqrt(2.0 * np.pi)
        tail = float(special.ndtr(-k))
        m2_out = 2.0 * (k * phi_k + tail)
        return 0.0, 1.0 - m2_out, 1.0 - 2.0 * tail


@dataclass(frozen=True, eq=False)
class ScaledChi2Law(ScoreLaw):
    """Law of (W - 1)/theta with W ~ chi-square(1).

    This is the score law of the Gaussian scale family at parameter
    theta; its second moment is 2/theta^2.
    """

    theta: float

    def second_moment(self) -> float:
        return 2.0 / self.theta**2

    def cdf(self, s):
        s = np.asarray(s, dtype=float)
        w = 1.0 + self.theta * s
        out = np.where(w > 0, stats.chi2.cdf(np.maximum(w, 0.0), df=1), 0.0)
        return out if out.ndim else float(out)

    def ppf(self, u):
        u = np.asarray(u, dtype=float)
        out = (stats.chi2.ppf(u, df=1) - 1.0) / self.theta
        return out if out.ndim else float(out)

    def sample(self, rng: np.random.Generator, size: int):
        return (rng.chisquare(1, size) - 1.0) / self.theta

    def cf(self, omega):
        omega = np.asarray(omega, dtype=float)
        t = omega / self.theta
        return (1.0 - 2j * t) ** (-0.5) * np.exp(-1j * t)

    def clipped_moments(self, k: float) -> tuple[float, float, float]:
        # |xi| <= k maps to W in [max(0, 1-theta*k), 1+theta*k]
        lo = max(0.0, 1.0 - self.theta * k)
        hi = 1.0 + self.theta * k
        # chi2(1) partial moments: E W 1{W<=w} = F_3(w), E W^2 1{W<=w} = 3 F_5(w)
        p_in = stats.chi2.cdf(hi, 1) - stats.chi2.cdf(lo, 1)
        ew = stats.chi2.cdf(hi, 3) - stats.chi2.cdf(lo, 3)
        ew2 = 3.0 * (stats.chi2.cdf(hi, 5) - stats.chi2.cdf(lo, 5))
        m1 = (ew - p_in) / self.theta
        m2 = (ew2 - 2.0 * ew + p_in) / self.theta**2
        return float(m1), float(m2), float(p_in)


@dataclass(frozen=True)
class TruncationParams:
    """Bounded-score modification parameters for one design point.

    clip_level: scores are zeroed outside [-clip_level, clip_level];
    clip_mean: mean of the zeroed-out score (subtracted to recenter);
    v2: variance removed by clipping, restored by the three-point kick;
    x_n: kick magnitude; p: probability of each of the +-x_n kicks.
    """

    clip_level: float
    clip_mean: float
    v2: float
    x_n: float
    p: float


def truncation_params(
    law: ScoreLaw, clip_level: float, c1: float, target_second_moment: float | None = None
) -> TruncationParams:
    """Clipping plus three-point-kick parameters restoring the variance.

    target_second_moment overrides the law's own second moment as the
    variance to restore (used when an exact analytic value is available).
    """
    m1, m2, p_in = law.clipped_moments(clip_level)
    if p_in >= 1.0 - 1e-14:
        # nothing is clipped: the law is mean zero, so the modification
        # must reduce to the identity map exactly
        m1, e_eta2 = 0.0, m2
    else:
        e_eta2 = m2 - m1 * m1
    total = law.second_moment() if target_second_moment is None else target_second_moment
    v2 = max(total - e_eta2, 0.0)
    if v2 <= 1e-13 * max(total, 1.0):
        v2 = 0.0
    x_n = c1 * clip_level
    p = 0.5 * v2 / x_n**2 if x_n > 0 else (0.0 if v2 == 0.0 else np.inf)
    if p > 0.5:
        needed = 1.05 * np.sqrt(v2) / clip_level
        raise TruncationConstantError(
            f"kick probability {p:.4g} exceeds 1/2; "
            f"increase the kick constant to at least {needed:.4g}",
            suggested_c1=float(needed),
        )
    return TruncationParams(clip_level, m1, v2, x_n, p)


def apply_truncation(
    xi: np.ndarray, params: TruncationParams, rng: np.random.Generator
) -> np.ndarray:
    """Realize the bounded modification on sampled raw scores."""
    eta = np.where(np.abs(xi) <= params.clip_level, xi, 0.0) - params.clip_mean
    u = rng.random(xi.shape)
    kick = np.where(u < params.p, params.x_n, 0.0)
    kick = np.where(u >= 1.0 - params.p, -params.x_n, kick)
    return eta + kick


class TruncatedLaw(ScoreLaw):
    """Law of the recentered clipped score plus the three-point kick."""

    def __init__(self, base: ScoreLaw, params: TruncationParams):
        self.base = base
        self.params = params
        self._atoms: AtomLaw | None = None
        base_atoms = base.atoms()
        if base_atoms is not None:
            self._atoms = self._build_atoms(base_atoms, params)

    @staticmethod
    def _build_atoms(base: AtomLaw, tp: TruncationParams) -> AtomLaw:
        eta_vals = (
            np.where(np.abs(base.values) <= tp.clip_level, base.values, 0.0)
            - tp.clip_mean
        )
        kicks = np.array([-tp.x_n, 0.0, tp.x_n])
        kick_probs = np.array([tp.p, 1.0 - 2.0 * tp.p, tp.p])
        vals = (eta_vals[:, None] + kicks[None, :]).ravel()
        probs = (base.probs[:, None] * kick_probs[None, :]).ravel()
        keep = probs > 0
        return AtomLaw.from_unsorted(vals[keep], probs[keep])

    def atoms(self) -> AtomLaw | None:
        return self._atoms

    def second_moment(self) -> float:
        tp = self.params
        m1, m2, _ = self.base.clipped_moments(tp.clip_level)
        return (m2 - m1 * m1) + 2.0 * tp.p * tp.x_n**2

    def _eta_cdf(self, s):
        """CDF of the recentered clipped score eta' (continuous base)."""
        tp = self.params
        t = np.asarray(s, dtype=float) + tp.clip_mean  # back to xi' scale
        f = np.asarray(self.base.cdf(t), dtype=float)
        f_neg = float(np.asarray(self.base.cdf(-tp.clip_level)))
        _, _, p_in = self.base.clipped_moments(tp.clip_level)
        out = f - f_neg
        # the zero atom carries the clipped-out mass 1 - p_in
        out = out + np.where(t >= 0.0, 1.0 - p_in, 0.0)
        out = np.where(t < -tp.clip_level, 0.0, out)
        out = np.where(t >= tp.clip_level, 1.0, out)
        return np.clip(out, 0.0, 1.0)

    def cdf(self, s):
        if self._atoms is not None:
            return self._atoms.cdf(s)
        tp = self.params
        s = np.asarray(s, dtype=float)
        out = (
            tp.p * self._eta_cdf(s + tp.x_n)
            + (1.0 - 2.0 * tp.p) * self._eta_cdf(s)
            + tp.p * self._eta_cdf(s - tp.x_n)
        )
        return out if np.ndim(out) else float(out)

    def ppf(self, u):
        if self._atoms is not None:
            return self._atoms.ppf(u)
        tp = self.params
        u = np.atleast_1d(np.asarray(u, dtype=float))
        span = tp.clip_level + abs(tp.clip_mean) + tp.x_n + 1.0
        lo = np.full(u.shape, -span)
        hi = np.full(u.shape, span)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            below = np.asarray(self.cdf(mid)) < u
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        out = hi
        return out if out.shape != (1,) else float(out[0])

    def sample(self, rng: np.random.Generator, size: int):
        xi = self.base.sample(rng, size)
        return apply_truncation(xi, self.params, rng)

    def cf(self, omega):
        if self._atoms is not None:
            return self._atoms.cf(omega)
        raise NotImplementedError("characteristic function needs an atomic base")

    def clipped_moments(self, k: float) -> tuple[float, float, float]:
        if self._atoms is not None:
            return self._atoms.clipped_moments(k)
        raise NotImplementedError


def stacked_atom_ppf(values: np.ndarray, probs: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Row-wise generalized-inverse quantiles for per-point atom laws.

    values, probs: arrays of shape (n, m) with rows sorted by value
    (zero-probability padding atoms allowed); u: shape (n,).
    """
    cum = np.cumsum(probs, axis=1)
    cum[:, -1] = np.maximum(cum[:, -1], 1.0)
    idx = (cum < u[:, None]).sum(axis=1)
    idx = np.minimum(idx, values.shape[1] - 1)
    return values[np.arange(values.shape[0]), idx]


class WeightedSumLaw:
    """Numeric law of T = sum_i w_i xi_i for independent mean-zero xi_i.

    Built once per (f, h, n) cell from the product of characteristic
    functions on a frequency grid; the inverse FFT gives a density on a
    value grid spanning +-span_sigmas standard deviations.  A one-bin
    Gaussian smoothing is folded in so that quasi-atomic laws produce a
    well-behaved grid density; `uniformize` compensates by jittering the
    input at the same bandwidth, so U = F(T + jitter) is uniform up to
    grid resolution.
    """

    def __init__(
        self,
        laws: list[ScoreLaw],
        weights: np.ndarray,
        grid_size: int = 1 << 16,
        span_sigmas: float = 16.0,
    ):
        weights = np.asarray(weights, dtype=float)
        var = sum(w * w * law.second_moment() for law, w in zip(laws, weights))
        self.sigma = float(np.sqrt(var))
        self.exact_gaussian = all(law.is_gaussian for law in laws)
        self.grid = None
        self.cdf_grid = None
        self.smooth_bw = 0.0
        if self.exact_gaussian or self.sigma == 0.0:
            return
        span = span_sigmas * self.sigma
        dx = 2.0 * span / grid_size
        self.smooth_bw = dx
        omega = 2.0 * np.pi * np.fft.fftfreq(grid_size, d=dx)
        log_phi = np.zeros(grid_size, dtype=complex)
        # accumulate log cf to avoid underflow of the product
        for law, w in zip(laws, weights):
            if w == 0.0:
                continue
            val = law.cf(omega * w)
            log_phi += np.log(np.where(np.abs(val) > 1e-300, val, 1e-300))
        phi = np.exp(log_phi - 0.5 * (self.smooth_bw * omega) ** 2)
        x0 = -span
        dens = np.real(np.fft.ifft(phi * np.exp(-1j * omega * x0))) / dx
        dens = np.maximum(dens, 0.0)
        cdf = np.cumsum(dens) * dx
        cdf /= cdf[-1]
        self.grid = x0 + dx * np.arange(grid_size)
        self.cdf_grid = cdf

    def uniformize(self, t: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """Map draws of T to (0,1) so the output is uniform under the law."""
        t = np.asarray(t, dtype=float)
        if self.sigma == 0.0:
            return np.full(t.shape, 0.5)
        if self.exact_gaussian:
            u = special.ndtr(t / self.sigma)
        else:
            jitter = rng.standard_normal(t.shape) * self.smooth_bw
            u = np.interp(t + jitter, self.grid, self.cdf_grid)
        eps = 1e-14
        return np.clip(u, eps, 1.0 - eps)
