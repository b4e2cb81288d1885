"""Samplers and log-likelihood expansions for the three experiment models.

The original experiment observes X_i ~ p(., f(i/n)) at design points
i/n.  Its local Gaussian approximation observes the shift h(i/n) with
noise of variance 1/I(f(i/n)); the global Gaussian approximation
observes gamma(f(i/n)) with unit noise.  The expansion machinery splits
the original log-likelihood ratio between f and f+h into a weighted
score sum minus a quadratic penalty plus a remainder, with all
per-point expectations computed exactly from affinities rather than by
Monte Carlo.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, DomainError, NeighborhoodError, SingularityError
from .families import ParametricFamily
from .function_space import RegressionFunction, holder_check, neighborhood_contains

MODEL_TAGS = ("original", "local-gaussian", "global-gaussian", "gaussianized")


# ---------------------------------------------------------------------------
# draws and their file format
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentDraw:
    """One realized dataset on the design grid i/n, i = 1..n."""

    model: str
    n: int
    design: np.ndarray
    observations: np.ndarray
    family: str
    f_desc: str
    h_desc: str = ""
    seed: int = 0

    def __post_init__(self):
        if self.model not in MODEL_TAGS:
            raise ArgumentError(f"unknown model tag {self.model!r}")
        if len(self.observations) != self.n or len(self.design) != self.n:
            raise ArgumentError("draw length must equal n")
        if self.n > 0 and np.any(np.diff(self.design) <= 0):
            raise ArgumentError("design points must be strictly increasing")


def design_grid(n: int) -> np.ndarray:
    return np.arange(1, n + 1, dtype=float) / n


def write_draw(draw: ExperimentDraw, path) -> None:
    """Columnar text serialization: four header lines, then i, t_i, x_i."""
    lines = [
        f"# family = {draw.family}",
        f"# model = {draw.model}",
        f"# n = {draw.n}",
        f"# seed = {draw.seed}",
    ]
    for i in range(draw.n):
        lines.append(
            f"{i + 1}, {float(draw.design[i])!r}, {float(draw.observations[i])!r}"
        )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_draw(path) -> ExperimentDraw:
    header: dict[str, str] = {}
    rows: list[tuple[float, float]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, value = body.split("=", 1)
                    header[key.strip()] = value.strip()
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 3:
                raise ArgumentError(f"malformed draw row: {line!r}")
            rows.append((float(parts[1]), float(parts[2])))
    for key in ("family", "model", "n", "seed"):
        if key not in header:
            raise ArgumentError(f"draw file is missing the '# {key} =' header")
    n = int(header["n"])
    if len(rows) != n:
        raise ArgumentError(f"draw file declares n={n} but has {len(rows)} rows")
    design = np.array([r[0] for r in rows])
    obs = np.array([r[1] for r in rows])
    return ExperimentDraw(
        model=header["model"],
        n=n,
        design=design,
        observations=obs,
        family=header["family"],
        f_desc=header.get("f", ""),
        h_desc=header.get("h", ""),
        seed=int(header["seed"]),
    )


# ---------------------------------------------------------------------------
# samplers
# ---------------------------------------------------------------------------


def _working_values(family: ParametricFamily, f: RegressionFunction, n: int) -> np.ndarray:
    t = design_grid(n)
    theta = np.asarray(f(t), dtype=float)
    if theta.size and not family.in_working_interval(theta):
        lo, hi = family.working_interval
        raise DomainError(
            f"{family.name}: regression values leave the working interval [{lo}, {hi}]"
        )
    return theta


def sample_original(
    family: ParametricFamily,
    f: RegressionFunction,
    n: int,
    rng: np.random.Generator,
    seed: int = 0,
) -> ExperimentDraw:
    """n independent observations X_i ~ p(., f(i/n))."""
    theta = _working_values(family, f, n)
    obs = family.sample(theta, rng) if n > 0 else np.empty(0)
    return ExperimentDraw(
        model="original",
        n=n,
        design=design_grid(n),
        observations=np.asarray(obs, dtype=float),
        family=family.name,
        f_desc=f.descriptor,
        seed=seed,
    )


def sample_local_gaussian(
    family: ParametricFamily,
    f: RegressionFunction,
    h: RegressionFunction,
    n: int,
    rng: np.random.Generator,
    radius: float | None = None,
    seed: int = 0,
) -> ExperimentDraw:
    """Heteroscedastic shifts: Y_i = h(i/n) + I(f(i/n))^(-1/2) eps_i."""
    if radius is not None and not neighborhood_contains(f, h, radius):
        raise NeighborhoodError(
            f"shift leaves the radius-{radius:.6g} neighborhood of the base function"
        )
    theta = _working_values(family, f, n)
    t = design_grid(n)
    info = np.asarray(family.fisher(theta), dtype=float)
    obs = np.asarray(h(t), dtype=float) + rng.standard_normal(n) / np.sqrt(info)
    return ExperimentDraw(
        model="local-gaussian",
        n=n,
        design=t,
        observations=obs,
        family=family.name,
        f_desc=f.descriptor,
        h_desc=h.descriptor,
        seed=seed,
    )


def sample_global_gaussian(
    family: ParametricFamily,
    f: RegressionFunction,
    n: int,
    rng: np.random.Generator,
    seed: int = 0,
) -> ExperimentDraw:
    """Unit-noise observations of the stabilized mean: Y_i = gamma(f(i/n)) + eps_i."""
    theta = _working_values(family, f, n)
    t = design_grid(n)
    obs = np.asarray(family.gamma(theta), dtype=float) + rng.standard_normal(n)
    return ExperimentDraw(
        model="global-gaussian",
        n=n,
        design=t,
        observations=obs,
        family=family.name,
        f_desc=f.descriptor,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# log-likelihood ratios and their expansion
# ---------------------------------------------------------------------------


def _theta_pair(
    family: ParametricFamily,
    f: RegressionFunction,
    h: RegressionFunction,
    draw: ExperimentDraw,
) -> tuple[np.ndarray, np.ndarray]:
    t = draw.design
    theta = np.asarray(f(t), dtype=float)
    shifted = theta + np.asarray(h(t), dtype=float)
    family.require_theta(theta)
    family.require_theta(shifted)
    return theta, shifted


def loglik_ratio_original(
    family: ParametricFamily,
    f: RegressionFunction,
    h: RegressionFunction,
    draw: ExperimentDraw,
) -> float:
    """Sum of log p(X_i, f+h) - log p(X_i, f) over the draw."""
    theta, shifted = _theta_pair(family, f, h, draw)
    if draw.n == 0:
        return 0.0
    p0 = np.asarray(family.density(draw.observations, theta), dtype=float)
    p1 = np.asarray(family.density(draw.observations, shifted), dtype=float)
    if np.any(p0 <= 0.0) or np.any(p1 <= 0.0):
        raise SingularityError(
            f"{family.name}: zero density on the draw; shared-support assumption broken"
        )
    return float(np.sum(np.log(p1) - np.log(p0)))


@dataclass(frozen=True)
class LaseTerms:
    """Pieces of the stochastic expansion of one log-likelihood ratio.

    Identities holding by construction on every draw:
      exact_loglik = linear - quadratic + remainder
      exact_loglik = 2*xn - 4*vn + rho_prop
    linear is the weighted score sum, quadratic the half h^2 I sum, xn
    the centered sqrt-ratio fluctuation sum, and vn the accumulated
    per-point squared Hellinger distances (exact expectations).
    """

    linear: float
    quadratic: float
    exact_loglik: float
    remainder: float
    xn: float
    vn: float
    rho_prop: float


def lase_terms(
    family: ParametricFamily,
    f: RegressionFunction,
    h: RegressionFunction,
    draw: ExperimentDraw,
) -> LaseTerms:
    """Expansion terms with exact per-point expectations via affinities."""
    theta, shifted = _theta_pair(family, f, h, draw)
    if draw.n == 0:
        return LaseTerms(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    x = draw.observations
    t = draw.design
    h_vals = np.asarray(h(t), dtype=float)

    p0 = np.asarray(family.density(x, theta), dtype=float)
    p1 = np.asarray(family.density(x, shifted), dtype=float)
    if np.any(p0 <= 0.0):
        raise SingularityError(f"{family.name}: zero density at the base parameter")
    z = p1 / p0
    with np.errstate(divide="ignore"):
        log_z = np.log(z)
    if np.any(~np.isfinite(log_z)):
        raise SingularityError(
            f"{family.name}: zero density under the shifted parameter"
        )
    exact = float(np.sum(log_z))

    scores = np.asarray(family.score(x, theta), dtype=float)
    info = np.asarray(family.fisher(theta), dtype=float)
    linear = float(np.sum(h_vals * scores))
    quadratic = 0.5 * float(np.sum(h_vals**2 * info))

    affin = np.asarray(family.affinity(theta, shifted), dtype=float)
    # E(sqrt z - 1) = A - 1 and E(sqrt z - 1)^2 = 2(1 - A) per point
    xn = float(np.sum((np.sqrt(z) - 1.0) - (affin - 1.0)))
    vn = float(np.sum(1.0 - affin))

    return LaseTerms(
        linear=linear,
        quadratic=quadratic,
        exact_loglik=exact,
        remainder=exact - (linear - quadratic),
        xn=xn,
        vn=vn,
        rho_prop=exact - (2.0 * xn - 4.0 * vn),
    )


def lindeberg_sum(
    family: ParametricFamily,
    f: RegressionFunction,
    n: int,
    alpha: float,
    eps: float,
) -> float:
    """Strengthened Lindeberg functional of the per-point score laws.

    (1/n) sum_i E[(n^{alpha/2} xi_i)^2 1{|n^{alpha/2} xi_i| >= eps sqrt(n)}],
    computed exactly from clipped second moments.
    """
    if not 0.0 < alpha < 1.0:
        raise ArgumentError("alpha must lie in (0, 1)")
    if eps <= 0.0:
        raise ArgumentError("eps must be positive")
    theta = _working_values(family, f, n)
    threshold = eps * n ** ((1.0 - alpha) / 2.0)
    total = 0.0
    for th in theta:
        law = family.score_law(float(th))
        # nudge the clip inward so boundary atoms land in the tail (>=)
        _, m2_in, _ = law.clipped_moments(threshold * (1.0 - 1e-12))
        total += max(law.second_moment() - m2_in, 0.0)
    return n ** (alpha - 1.0) * total


# ---------------------------------------------------------------------------
# canonical test configurations
# ---------------------------------------------------------------------------

# anchors keep f and f +- h inside each family's working interval with a
# comfortable margin while exercising heteroscedasticity
STANDARD_ANCHORS = {
    "bernoulli": (0.4, 0.2, 1.0),
    "poisson": (1.5, 1.0, 3.0),
    "gaussian_scale": (2.0, 1.0, 4.0),
    "location_normal": (0.0, 0.5, 1.0),
    "location_custom": (0.0, 0.2, 1.0),
}


def standard_test_pair(
    family: ParametricFamily,
    n: int,
    beta: float = 1.0,
    rate_mode: str = "parametric",
    c_rate: float = 1.0,
) -> tuple[RegressionFunction, RegressionFunction]:
    """Affine base plus a sinusoid shift scaled into the localization ball.

    rate_mode picks the shift amplitude scale: 'parametric' uses
    c_rate/sqrt(n) and 'nonparametric' uses the localization rate
    c_rate*(log n / n)^(beta/(2 beta + 1)).  The sinusoid amplitude is
    scaled by L/(2 pi + 1) so that both the sup norm and the slope of
    f + h fit the declared class.
    """
    from .function_space import rate_gamma_bar

    if family.name not in STANDARD_ANCHORS:
        raise ArgumentError(f"no standard test pair for family {family.name!r}")
    intercept, slope, big_l = STANDARD_ANCHORS[family.name]
    if rate_mode == "parametric":
        r = c_rate / math.sqrt(n)
    elif rate_mode == "nonparametric":
        r = rate_gamma_bar(n, beta, c_rate)
    else:
        raise ArgumentError("rate_mode must be 'parametric' or 'nonparametric'")
    lo, hi = family.working_interval
    f = RegressionFunction.affine(
        intercept, slope, beta=beta, L=big_l, range_interval=(lo, hi)
    )
    amp = r * big_l / (2.0 * math.pi + 1.0)
    h = RegressionFunction.sinusoid(amp, 1.0, 0.0, beta=beta, L=big_l)
    return f, h
