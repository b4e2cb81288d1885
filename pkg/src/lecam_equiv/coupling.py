"""Joint construction of the original and Gaussian likelihood processes.

Everything here lives on one probability space.  The raw scores of an
original-model draw drive both log-likelihood ratios: the weighted
score sum is pushed through its own distribution function onto a
Gaussian of matching variance (a sum-level quantile coupling), and the
per-point Gaussian vector is then filled in around that coupled sum so
that it has exactly the heteroscedastic product law.  A pointwise
quantile coupler and a bounded-score modification are provided
separately for marginal-law audits.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .errors import ArgumentError, NeighborhoodError, TruncationConstantError
from .experiments import ExperimentDraw, design_grid, lase_terms
from .families import ParametricFamily
from .function_space import RegressionFunction, neighborhood_contains
from .laws import (
    ScoreLaw,
    TruncatedLaw,
    TruncationParams,
    WeightedSumLaw,
    truncation_params,
)

COUPLED_CSV_HEADER = "replicate, n, loglik_orig, loglik_gauss, remainder, seed"


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CoupledLikelihoodDraw:
    """One joint realization of both log-likelihood ratios.

    Construction identities, exact on every draw:
      log_lik_original = sum(shift * scores_tilde) - q + remainder_tilde
      log_lik_gaussian = sum(shift * gaussians) - q
    with q = 0.5 * sum(shift^2 * info).
    """

    n: int
    log_lik_original: float
    log_lik_gaussian: float
    scores_tilde: np.ndarray
    gaussians: np.ndarray
    remainder_tilde: float
    seed: int
    shift_values: np.ndarray = field(default_factory=lambda: np.empty(0))
    info_values: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        if len(self.scores_tilde) != self.n or len(self.gaussians) != self.n:
            raise ArgumentError("score and gaussian vectors must have length n")


@dataclass(frozen=True, eq=False)
class CoupledSummary:
    """Row of a serialized coupled-draw batch (scores not retained)."""

    replicate: int
    n: int
    log_lik_original: float
    log_lik_gaussian: float
    remainder_tilde: float
    seed: int


@dataclass(frozen=True, eq=False)
class TruncationOutput:
    """Realized bounded scores plus the per-point modification inputs."""

    scores_star: np.ndarray
    bound_constant: float
    alpha: float
    r_n: float
    clip_level: float
    x_n: float
    variance_targets: np.ndarray
    kick_probs: np.ndarray
    clip_means: np.ndarray
    laws: list

    def bound_margins(self) -> np.ndarray:
        """bound_constant - |r_n^(1-alpha) * scores|; nonnegative always."""
        scale = self.r_n ** (1.0 - self.alpha)
        return self.bound_constant - np.abs(scale * self.scores_star)


@dataclass(frozen=True)
class CcAuditReport:
    """Empirical frequencies of the three coupling quality conditions.

    gap_freq: closeness failure P(|logLR difference| >= gap_threshold),
    under the central measure.  orig_tail_freq: large original ratio
    under the shifted measure, importance-reweighted from central-draw
    likelihoods.  gauss_tail_freq: large Gaussian ratio under the
    central measure.  target_scale = r_n^(2 alpha1) is the magnitude
    the frequencies are compared against.
    """

    gap_freq: float
    gap_stderr: float
    orig_tail_freq: float
    orig_tail_stderr: float
    gauss_tail_freq: float
    gauss_tail_stderr: float
    gap_threshold: float
    tail_threshold: float
    target_scale: float
    effective_sample_size: float
    reliable: bool
    replicate_count: int


# ---------------------------------------------------------------------------
# bounded-score modification
# ---------------------------------------------------------------------------


def _design_setup(family, f, n):
    t = design_grid(n)
    theta = family.require_theta(np.asarray(f(t), dtype=float))
    if theta.size and not family.in_working_interval(theta):
        lo, hi = family.working_interval
        raise ArgumentError(
            f"{family.name}: regression values leave the working interval [{lo}, {hi}]"
        )
    info = np.asarray(family.fisher(theta), dtype=float)
    return t, theta, info


def _truncation_table(
    family: ParametricFamily,
    theta: np.ndarray,
    info: np.ndarray,
    clip_level: float,
    c1: float,
) -> list[TruncationParams]:
    """Per-point modification parameters; aggregates constant failures."""
    params: list[TruncationParams] = []
    worst: float | None = None
    for th, i_val in zip(theta, info):
        law = family.score_law(float(th))
        try:
            params.append(
                truncation_params(law, clip_level, c1, target_second_moment=float(i_val))
            )
        except TruncationConstantError as err:
            worst = err.suggested_c1 if worst is None else max(worst, err.suggested_c1)
    if worst is not None:
        raise TruncationConstantError(
            f"kick constant {c1:.4g} too small somewhere on the design; "
            f"at least {worst:.4g} is needed",
            suggested_c1=worst,
        )
    return params


def _apply_truncation_rows(xi, clip_level, clip_means, kick_probs, x_n, rng):
    eta = np.where(np.abs(xi) <= clip_level, xi, 0.0) - clip_means
    u = rng.random(np.shape(xi))
    kick = np.where(u < kick_probs, x_n, 0.0)
    kick = np.where(u >= 1.0 - kick_probs, -x_n, kick)
    return eta + kick


def truncate_scores(
    family: ParametricFamily,
    f: RegressionFunction,
    n: int,
    alpha: float,
    rng: np.random.Generator,
    c_rate: float = 1.0,
    c1: float = 1.0,
    beta: float = 1.0,
) -> TruncationOutput:
    """Draw raw scores and realize their bounded modification.

    The raw score at each design point is zeroed outside a window of
    half-width r_n^(alpha-1), recentered, and perturbed by an
    independent three-point variable restoring the exact per-point
    second moment I(f(t_i)).  The output scores obey
    |r_n^(1-alpha) * score| <= 2 + c1 deterministically.
    """
    if not 1.0 / (2.0 * beta) < alpha < 1.0:
        raise ArgumentError("alpha must lie in (1/(2 beta), 1)")
    if n <= 0:
        raise ArgumentError("need at least one design point")
    t, theta, info = _design_setup(family, f, n)
    r_n = c_rate / math.sqrt(n)
    clip_level = r_n ** (alpha - 1.0)
    table = _truncation_table(family, theta, info, clip_level, c1)
    x = family.sample(theta, rng)
    xi = np.asarray(family.score(x, theta), dtype=float)
    clip_means = np.array([p.clip_mean for p in table])
    kick_probs = np.array([p.p for p in table])
    x_n = c1 * clip_level
    scores_star = _apply_truncation_rows(
        xi, clip_level, clip_means, kick_probs, x_n, rng
    )
    laws = [
        TruncatedLaw(family.score_law(float(th)), p) for th, p in zip(theta, table)
    ]
    return TruncationOutput(
        scores_star=scores_star,
        bound_constant=2.0 + c1,
        alpha=alpha,
        r_n=r_n,
        clip_level=clip_level,
        x_n=x_n,
        variance_targets=info,
        kick_probs=kick_probs,
        clip_means=clip_means,
        laws=laws,
    )


# ---------------------------------------------------------------------------
# pointwise quantile coupling
# ---------------------------------------------------------------------------


def quantile_couple_scores(
    family: ParametricFamily,
    f: RegressionFunction,
    n: int,
    rng: np.random.Generator,
    alpha: float | None = None,
    c_rate: float = 1.0,
    c1: float = 1.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-coordinate quantile coupling of scores to Gaussians.

    Draws eps_i i.i.d. standard normal, sets the Gaussian coordinate
    zeta_i = sqrt(I(f(t_i))) eps_i, and the score coordinate through
    the generalized inverse of its distribution function evaluated at
    Phi(eps_i).  Because Phi(eps_i) has a continuous law, the
    generalized inverse alone reproduces atomic marginals exactly; the
    randomized tie handling lives in the forward direction (jittered
    distribution-function transforms), not here.  When alpha is given
    the coupled score follows the bounded-modification law at that
    exponent instead of the raw score law.
    """
    if n <= 0:
        raise ArgumentError("need at least one design point")
    t, theta, info = _design_setup(family, f, n)
    eps = rng.standard_normal(n)
    gaussians = np.sqrt(info) * eps
    laws: list[ScoreLaw] = [family.score_law(float(th)) for th in theta]
    if alpha is not None:
        if not 0.0 < alpha < 1.0:
            raise ArgumentError("alpha must lie in (0, 1)")
        clip_level = (c_rate / math.sqrt(n)) ** (alpha - 1.0)
        table = _truncation_table(family, theta, info, clip_level, c1)
        laws = [TruncatedLaw(law, p) for law, p in zip(laws, table)]
    u = special.ndtr(eps)
    scores = np.empty(n)
    for i, law in enumerate(laws):
        if law.is_gaussian:
            # identical laws couple through the identity map
            scores[i] = eps[i] * math.sqrt(law.second_moment())
        else:
            scores[i] = law.ppf(u[i])
    return scores, gaussians


def coupling_discrepancy(
    shift_values: np.ndarray, scores: np.ndarray, gaussians: np.ndarray
) -> float:
    """Weighted partial-sum gap |sum h (score - gaussian)| of one coupling."""
    shift_values = np.asarray(shift_values, dtype=float)
    return float(abs(np.dot(shift_values, scores - gaussians)))


# ---------------------------------------------------------------------------
# joint likelihood construction
# ---------------------------------------------------------------------------


class CouplingPlan:
    """Per-cell precomputation shared by every replicate draw.

    Holds the design values, the weighted-sum law of the score side
    (one FFT build), and the optional bounded-modification table.
    Building the plan once and passing it to build_coupled_draw
    amortizes the heavy numerics across replicates.
    """

    def __init__(
        self,
        family: ParametricFamily,
        f: RegressionFunction,
        h: RegressionFunction,
        n: int,
        alpha: float,
        c_rate: float = 1.0,
        c1: float = 1.0,
        truncate: bool = False,
        check_neighborhood: bool = True,
        grid_size: int = 1 << 16,
    ):
        if not 0.0 < alpha < 1.0:
            raise ArgumentError("alpha must lie in (0, 1)")
        if n <= 0:
            raise ArgumentError("need at least one design point")
        self.family = family
        self.f = f
        self.h = h
        self.n = n
        self.alpha = alpha
        self.r_n = c_rate / math.sqrt(n)
        if check_neighborhood and not neighborhood_contains(f, h, self.r_n):
            raise NeighborhoodError(
                f"shift leaves the radius-{self.r_n:.6g} localization ball"
            )
        self.t, self.theta, self.info = _design_setup(family, f, n)
        self.h_values = np.asarray(h(self.t), dtype=float)
        self.sigma2 = float(np.dot(self.h_values * self.h_values, self.info))
        self.quadratic = 0.5 * self.sigma2
        laws: list[ScoreLaw] = [family.score_law(float(th)) for th in self.theta]
        self.truncate = truncate
        self.trunc_clip_means = None
        self.trunc_kick_probs = None
        self.trunc_clip_level = 0.0
        self.trunc_x_n = 0.0
        if truncate:
            if any(law.atoms() is None for law in laws):
                raise ArgumentError(
                    "in-place truncation inside the joint construction needs "
                    "finitely supported score laws; audit continuous families "
                    "through truncate_scores instead"
                )
            self.trunc_clip_level = self.r_n ** (alpha - 1.0)
            table = _truncation_table(family, self.theta, self.info, self.trunc_clip_level, c1)
            self.trunc_clip_means = np.array([p.clip_mean for p in table])
            self.trunc_kick_probs = np.array([p.p for p in table])
            self.trunc_x_n = c1 * self.trunc_clip_level
            laws = [TruncatedLaw(law, p) for law, p in zip(laws, table)]
        self.all_gaussian = all(law.is_gaussian for law in laws)
        self.sum_law = WeightedSumLaw(laws, self.h_values, grid_size=grid_size)
        self.sigma = self.sum_law.sigma


def build_coupled_draw(
    family: ParametricFamily,
    f: RegressionFunction,
    h: RegressionFunction,
    n: int,
    alpha: float,
    rng: np.random.Generator,
    plan: CouplingPlan | None = None,
    seed: int = 0,
    c_rate: float = 1.0,
    c1: float = 1.0,
    truncate: bool = False,
) -> CoupledLikelihoodDraw:
    """One joint draw of both log-likelihood ratios.

    An original-model dataset is simulated under the central measure
    (shift zero) and scored; the weighted score sum is mapped to a
    Gaussian of the same variance by the jittered quantile transform of
    its exact sum law, and the per-point Gaussian vector is completed
    around that sum so its law is exactly the heteroscedastic product.
    The remainder attached to the score side is the dataset's own exact
    expansion remainder, so the original-side log-likelihood is the
    dataset's true log-likelihood ratio.  When every score law is
    already standard normal the two sides coincide identically and the
    remainder is zero analytically.
    """
    if plan is None:
        plan = CouplingPlan(
            family, f, h, n, alpha, c_rate=c_rate, c1=c1, truncate=truncate
        )
    h_vals = plan.h_values
    quad = plan.quadratic

    x = family.sample(plan.theta, rng)
    xi = np.asarray(family.score(x, plan.theta), dtype=float)
    if plan.truncate:
        scores = _apply_truncation_rows(
            xi,
            plan.trunc_clip_level,
            plan.trunc_clip_means,
            plan.trunc_kick_probs,
            plan.trunc_x_n,
            rng,
        )
    else:
        scores = xi
    weighted_sum = float(np.dot(h_vals, scores))

    if plan.all_gaussian:
        # scores are exact Gaussians already: identity coupling, and the
        # expansion remainder vanishes analytically
        rho = 0.0
        zeta = scores
        loglik_orig = weighted_sum - quad + rho
        loglik_gauss = weighted_sum - quad
    else:
        draw = ExperimentDraw(
            model="original",
            n=n,
            design=plan.t,
            observations=np.asarray(x, dtype=float),
            family=family.name,
            f_desc=f.descriptor,
            h_desc=h.descriptor,
            seed=seed,
        )
        rho = lase_terms(family, f, h, draw).remainder
        noise = np.sqrt(plan.info) * rng.standard_normal(n)
        if plan.sigma == 0.0:
            zeta = noise
            coupled_sum = 0.0
        else:
            u = plan.sum_law.uniformize(np.asarray(weighted_sum, dtype=float), rng)
            coupled_sum = plan.sigma * float(special.ndtri(u))
            fill = h_vals * plan.info / plan.sigma2
            zeta = noise + (coupled_sum - float(np.dot(h_vals, noise))) * fill
        loglik_orig = weighted_sum - quad + rho
        loglik_gauss = float(np.dot(h_vals, zeta)) - quad

    return CoupledLikelihoodDraw(
        n=n,
        log_lik_original=loglik_orig,
        log_lik_gaussian=loglik_gauss,
        scores_tilde=np.asarray(scores, dtype=float),
        gaussians=np.asarray(zeta, dtype=float),
        remainder_tilde=rho,
        seed=seed,
        shift_values=h_vals,
        info_values=plan.info,
    )


# ---------------------------------------------------------------------------
# condition audits
# ---------------------------------------------------------------------------


def audit_cc_conditions(
    draws,
    r_n: float,
    alpha1: float,
    eps: float,
    gap_constant: float = 1.0,
) -> CcAuditReport:
    """Empirical check of the three closeness conditions on a draw batch.

    The batch must be generated under the central measure.  The
    closeness event uses the gap between the two log-likelihoods at
    scale gap_constant * r_n^alpha1; the tail events ask each ratio to
    stay below r_n^(-eps).  The original-ratio tail is evaluated under
    the shifted measure by self-normalized importance weighting with
    the original likelihood ratio itself.
    """
    if len(draws) < 100:
        raise ArgumentError("need at least 100 draws for the condition audit")
    if not 0.0 < r_n < 1.0:
        raise ArgumentError("r_n must lie in (0, 1)")
    if alpha1 <= 0.0 or eps <= 0.0:
        raise ArgumentError("alpha1 and eps must be positive")
    a = np.array([d.log_lik_original for d in draws], dtype=float)
    b = np.array([d.log_lik_gaussian for d in draws], dtype=float)
    r = a.size

    gap_threshold = gap_constant * r_n**alpha1
    gap_events = (np.abs(a - b) >= gap_threshold).astype(float)
    gap_freq = float(gap_events.mean())
    gap_stderr = math.sqrt(gap_freq * (1.0 - gap_freq) / r)

    tail_threshold = -eps * math.log(r_n)
    w = np.exp(np.minimum(a, 50.0))
    w_sum = float(w.sum())
    orig_events = (a > tail_threshold).astype(float)
    orig_freq = float(np.dot(w, orig_events) / w_sum)
    orig_stderr = math.sqrt(float(np.sum((w / w_sum) ** 2 * (orig_events - orig_freq) ** 2)))
    ess = w_sum**2 / float(np.dot(w, w))
    reliable = ess >= 30.0
    if not reliable:
        warnings.warn(
            f"importance weights are degenerate (effective sample size "
            f"{ess:.1f} < 30); the shifted-measure tail frequency is unreliable",
            RuntimeWarning,
            stacklevel=2,
        )

    gauss_events = (b > tail_threshold).astype(float)
    gauss_freq = float(gauss_events.mean())
    gauss_stderr = math.sqrt(gauss_freq * (1.0 - gauss_freq) / r)

    return CcAuditReport(
        gap_freq=gap_freq,
        gap_stderr=gap_stderr,
        orig_tail_freq=orig_freq,
        orig_tail_stderr=orig_stderr,
        gauss_tail_freq=gauss_freq,
        gauss_tail_stderr=gauss_stderr,
        gap_threshold=gap_threshold,
        tail_threshold=tail_threshold,
        target_scale=r_n ** (2.0 * alpha1),
        effective_sample_size=ess,
        reliable=reliable,
        replicate_count=r,
    )


# ---------------------------------------------------------------------------
# batch serialization
# ---------------------------------------------------------------------------


def write_coupled_batch(draws, path) -> None:
    """CSV batch of coupled-draw summaries, one row per replicate."""
    lines = [COUPLED_CSV_HEADER]
    for rep, d in enumerate(draws):
        lines.append(
            f"{rep}, {d.n}, {float(d.log_lik_original)!r}, "
            f"{float(d.log_lik_gaussian)!r}, {float(d.remainder_tilde)!r}, {d.seed}"
        )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_coupled_batch(path) -> list[CoupledSummary]:
    rows: list[CoupledSummary] = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != COUPLED_CSV_HEADER:
            raise ArgumentError(f"unexpected coupled-batch header: {header!r}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 6:
                raise ArgumentError(f"malformed coupled-batch row: {line!r}")
            rows.append(
                CoupledSummary(
                    replicate=int(parts[0]),
                    n=int(parts[1]),
                    log_lik_original=float(parts[2]),
                    log_lik_gaussian=float(parts[3]),
                    remainder_tilde=float(parts[4]),
                    seed=int(parts[5]),
                )
            )
    return rows
