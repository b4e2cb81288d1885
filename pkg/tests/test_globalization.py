"""Tests for blocks, preliminary estimation, and the Gaussianizing kernel."""

import math
import warnings

import numpy as np
import pytest
from scipy import stats

from lecam_equiv.errors import ArgumentError
from lecam_equiv.experiments import ExperimentDraw, design_grid, sample_original, sample_global_gaussian
from lecam_equiv.families import get_family
from lecam_equiv.function_space import RegressionFunction, rate_gamma_bar
from lecam_equiv.globalization import (
    BLOCK_EXPONENT,
    StepFunction,
    block_partition,
    gamma_scale_estimate,
    gaussianize,
    homoscedastic_transform_check,
    preliminary_estimate,
    risk_transfer_demo,
)

KS_CRIT_1PCT = 1.628


# ---------------------------------------------------------------------------
# step functions
# ---------------------------------------------------------------------------


def test_step_function_window_lookup():
    f = StepFunction(np.array([1.0, 2.0, 3.0, 4.0]))
    # windows are left-open: (0, .25], (.25, .5], (.5, .75], (.75, 1]
    assert f(0.25) == 1.0
    assert f(0.26) == 2.0
    assert f(1.0) == 4.0
    assert f(0.0) == 1.0  # clipped into the first window
    out = f(np.array([0.1, 0.6, 0.9]))
    assert isinstance(out, np.ndarray)
    assert np.array_equal(out, [1.0, 3.0, 4.0])
    assert isinstance(f(0.5), float)
    assert f.descriptor == "steps(4 windows)"


def test_step_function_validation():
    with pytest.raises(ArgumentError):
        StepFunction(np.array([]))
    with pytest.raises(ArgumentError):
        StepFunction(np.ones((2, 2)))


# ---------------------------------------------------------------------------
# block partition
# ---------------------------------------------------------------------------


def test_block_partition_covers_index_set():
    part = block_partition(1024, beta=1.0, q=0.25)
    flat = np.concatenate(part.blocks)
    assert np.array_equal(flat, np.arange(1, 1025))
    assert part.boundaries[0] == 0.0
    assert part.boundaries[-1] == 1.0
    assert np.all(np.diff(part.boundaries) > 0)
    assert part.m_blocks == len(part.blocks)


def test_block_partition_scale_invariants():
    part = block_partition(1024, beta=1.0, q=0.25)
    sizes = part.sizes
    # floor-based cuts keep sizes within one of each other
    assert sizes.max() - sizes.min() <= 1
    assert part.m_blocks * sizes.min() <= part.n <= part.m_blocks * sizes.max()
    # each block holds at least half the nominal count n * delta
    assert sizes.min() >= math.floor(part.n * part.delta_n / 2.0)
    # the count follows the block scale
    assert part.m_blocks == math.floor(1.0 / part.delta_n)
    # alpha' interpolates between 1/(2 beta) and the module exponent
    assert 1.0 / 2.0 < part.alpha_prime < BLOCK_EXPONENT
    assert math.isclose(part.alpha_prime, 0.5 + 0.25 * (BLOCK_EXPONENT - 0.5))


def test_block_count_grows_with_n():
    m_small = block_partition(1024, beta=1.0, q=0.25).m_blocks
    m_large = block_partition(4096, beta=1.0, q=0.25).m_blocks
    assert 2 <= m_small <= m_large


def test_block_partition_single_block_for_tiny_n():
    part = block_partition(4, beta=1.0, q=0.25)
    assert part.single_block
    assert np.array_equal(part.blocks[0], np.arange(1, 5))


def test_block_partition_argument_checks():
    with pytest.raises(ArgumentError):
        block_partition(3, beta=1.0, q=0.25)
    with pytest.raises(ArgumentError):
        block_partition(64, beta=1.0, q=0.0)
    with pytest.raises(ArgumentError):
        block_partition(64, beta=1.0, q=0.3)
    with pytest.raises(ArgumentError):
        block_partition(64, beta=1.0, q=0.25, exponent=0.5)
    with pytest.raises(ArgumentError):
        block_partition(64, beta=1.0, q=0.25, exponent=1.0)


# ---------------------------------------------------------------------------
# preliminary estimator
# ---------------------------------------------------------------------------


def test_preliminary_estimate_sup_error_bernoulli():
    family = get_family("bernoulli")
    f = RegressionFunction.constant(0.5)
    n = 1 << 14
    t = design_grid(n)
    hits = 0
    seeds = 20
    for s in range(seeds):
        rng = np.random.default_rng(500 + s)
        draw = sample_original(family, f, n, rng, seed=s)
        fhat = preliminary_estimate(draw, beta=1.0, L=1.0, family=family)
        if np.max(np.abs(fhat(t) - 0.5)) <= 0.08:
            hits += 1
    assert hits >= 0.9 * seeds


def test_preliminary_estimate_error_decreases_with_n():
    family = get_family("poisson")
    f = RegressionFunction.affine(1.5, 1.0)
    medians = []
    for n in (1 << 10, 1 << 12, 1 << 14):
        t = design_grid(n)
        truth = f(t)
        errs = []
        for s in range(15):
            rng = np.random.default_rng(900 + s)
            draw = sample_original(family, f, n, rng, seed=s)
            fhat = preliminary_estimate(draw, beta=1.0, L=1.0, family=family)
            errs.append(float(np.max(np.abs(fhat(t) - truth))))
        medians.append(float(np.median(errs)))
    assert medians[0] > medians[1] > medians[2]


def test_preliminary_estimate_clips_to_working_interval():
    family = get_family("bernoulli")
    n = 256
    draw = ExperimentDraw(
        model="original",
        n=n,
        design=design_grid(n),
        observations=np.ones(n),
        family="bernoulli",
        f_desc="constant(0.5)",
    )
    fhat = preliminary_estimate(draw, beta=1.0, L=1.0, family=family)
    hi = family.working_interval[1]
    assert np.all(fhat.values == hi)


def test_preliminary_estimate_rejects_other_models():
    family = get_family("poisson")
    rng = np.random.default_rng(3)
    draw = sample_global_gaussian(family, RegressionFunction.constant(1.0), 64, rng)
    with pytest.raises(ArgumentError):
        preliminary_estimate(draw, beta=1.0, L=1.0, family=family)


def test_preliminary_estimate_reports_target_rate():
    family = get_family("poisson")
    rng = np.random.default_rng(4)
    draw = sample_original(family, RegressionFunction.constant(1.0), 512, rng)
    fhat = preliminary_estimate(draw, beta=1.0, L=1.0, family=family)
    assert fhat.sup_target == rate_gamma_bar(512, 1.0, 1.0)


# ---------------------------------------------------------------------------
# the Gaussianizing kernel
# ---------------------------------------------------------------------------


def test_gaussianize_never_reads_the_truth_descriptor():
    family = get_family("bernoulli")
    f = RegressionFunction.affine(0.25, 0.1)
    rng = np.random.default_rng(11)
    draw = sample_original(family, f, 512, rng, seed=1)
    relabeled = ExperimentDraw(
        model="original",
        n=draw.n,
        design=draw.design,
        observations=draw.observations,
        family=draw.family,
        f_desc="constant(0.9)",  # wrong on purpose; the kernel must not care
        h_desc=draw.h_desc,
        seed=draw.seed,
    )
    out_a = gaussianize(family, draw, 1.0, 1.0, np.random.default_rng(77))
    out_b = gaussianize(family, relabeled, 1.0, 1.0, np.random.default_rng(77))
    assert np.array_equal(out_a.draw.observations, out_b.draw.observations)


def test_gaussianize_is_deterministic_given_seed():
    family = get_family("poisson")
    f = RegressionFunction.affine(1.5, 1.0)
    rng = np.random.default_rng(12)
    draw = sample_original(family, f, 256, rng, seed=2)
    out_a = gaussianize(family, draw, 1.0, 1.0, np.random.default_rng(5))
    out_b = gaussianize(family, draw, 1.0, 1.0, np.random.default_rng(5))
    assert np.array_equal(out_a.draw.observations, out_b.draw.observations)


def test_gaussianize_output_shape_and_tags():
    family = get_family("gaussian_scale")
    f = RegressionFunction.affine(2.0, 1.0)
    rng = np.random.default_rng(13)
    draw = sample_original(family, f, 300, rng, seed=3)
    out = gaussianize(family, draw, 1.0, 1.0, np.random.default_rng(6))
    assert out.draw.model == "gaussianized"
    assert out.draw.n == 300
    assert np.array_equal(out.draw.design, draw.design)
    assert out.draw.f_desc == draw.f_desc
    assert out.odd_count == 150 and out.even_count == 150
    assert out.odd_count + out.even_count == draw.n
    assert "window" in out.kernel_descriptor and "block" in out.kernel_descriptor
    assert np.all(np.isfinite(out.draw.observations))


def test_gaussianize_location_residuals_look_standard_normal():
    family = get_family("location_normal")
    f = RegressionFunction.constant(0.3)
    n = 1 << 12
    t = design_grid(n)
    truth = np.asarray(family.gamma(f(t)), dtype=float)
    passes = 0
    seeds = 10
    for s in range(seeds):
        rng = np.random.default_rng(2000 + s)
        draw = sample_original(family, f, n, rng, seed=s)
        out = gaussianize(family, draw, 1.0, 1.0, np.random.default_rng(3000 + s))
        resid = out.draw.observations - truth
        ks = stats.kstest(resid, "norm").statistic
        if ks < KS_CRIT_1PCT / math.sqrt(n):
            passes += 1
    assert passes >= 8


def test_gaussianize_bernoulli_residuals_look_standard_normal():
    family = get_family("bernoulli")
    f = RegressionFunction.constant(0.5)
    n = 1 << 14
    t = design_grid(n)
    truth = np.asarray(family.gamma(f(t)), dtype=float)
    passes = 0
    seeds = 10
    for s in range(seeds):
        rng = np.random.default_rng(4000 + s)
        draw = sample_original(family, f, n, rng, seed=s)
        out = gaussianize(family, draw, 1.0, 1.0, np.random.default_rng(5000 + s))
        resid = out.draw.observations - truth
        ks = stats.kstest(resid, "norm").statistic
        if ks < KS_CRIT_1PCT / math.sqrt(n):
            passes += 1
    assert passes >= 8


def test_gaussianize_argument_checks():
    bern = get_family("bernoulli")
    pois = get_family("poisson")
    rng = np.random.default_rng(14)
    draw = sample_original(bern, RegressionFunction.constant(0.5), 64, rng)
    with pytest.raises(ArgumentError):
        gaussianize(pois, draw, 1.0, 1.0, np.random.default_rng(0))
    small = sample_original(bern, RegressionFunction.constant(0.5), 6, rng)
    with pytest.raises(ArgumentError):
        gaussianize(bern, small, 1.0, 1.0, np.random.default_rng(0))
    out = gaussianize(bern, draw, 1.0, 1.0, np.random.default_rng(0))
    with pytest.raises(ArgumentError):
        gaussianize(bern, out.draw, 1.0, 1.0, np.random.default_rng(0))


def test_gaussianize_warns_when_block_statistics_clip():
    family = get_family("bernoulli")
    n = 128
    draw = ExperimentDraw(
        model="original",
        n=n,
        design=design_grid(n),
        observations=np.ones(n),  # every block mean lands above the working range
        family="bernoulli",
        f_desc="constant(0.5)",
    )
    with pytest.warns(RuntimeWarning):
        out = gaussianize(family, draw, 1.0, 1.0, np.random.default_rng(9))
    assert out.clip_warning_count >= 1
    assert np.all(np.isfinite(out.draw.observations))


def test_gaussianize_single_block_flag_for_small_n():
    family = get_family("location_normal")
    rng = np.random.default_rng(15)
    draw = sample_original(family, RegressionFunction.constant(0.0), 8, rng)
    out = gaussianize(family, draw, 1.0, 1.0, np.random.default_rng(1))
    assert out.single_block
    assert out.partition.n == 4  # even half of eight points


# ---------------------------------------------------------------------------
# estimation on the stabilized scale
# ---------------------------------------------------------------------------


def test_gamma_scale_estimate_recovers_truth():
    family = get_family("poisson")
    f = RegressionFunction.affine(1.5, 1.0)
    n = 1 << 12
    t = design_grid(n)
    rng = np.random.default_rng(16)
    draw = sample_global_gaussian(family, f, n, rng)
    fhat = gamma_scale_estimate(family, draw, beta=1.0)
    assert float(np.max(np.abs(fhat(t) - f(t)))) <= 0.5
    lo, hi = family.working_interval
    assert np.all((fhat.values >= lo) & (fhat.values <= hi))


def test_gamma_scale_estimate_rejects_original_data():
    family = get_family("poisson")
    rng = np.random.default_rng(17)
    draw = sample_original(family, RegressionFunction.constant(1.0), 64, rng)
    with pytest.raises(ArgumentError):
        gamma_scale_estimate(family, draw, beta=1.0)


def test_gamma_scale_estimate_fills_empty_windows():
    family = get_family("poisson")
    n = 16
    design = np.linspace(0.001, 0.05, n)  # all mass in the first windows
    draw = ExperimentDraw(
        model="global-gaussian",
        n=n,
        design=design,
        observations=np.zeros(n),
        family="poisson",
        f_desc="constant(1.0)",
    )
    fhat = gamma_scale_estimate(family, draw, beta=1.0, window_constant=0.05)
    assert fhat.n_windows > 1
    assert np.all(np.isfinite(fhat.values))
    # zero observations sit below the working range of 2 sqrt(theta),
    # so every window clips to the lower endpoint
    assert np.all(fhat.values == family.working_interval[0])


# ---------------------------------------------------------------------------
# homoscedastic transform check
# ---------------------------------------------------------------------------


def test_homoscedastic_check_zero_shift_is_zero():
    family = get_family("poisson")
    rep = homoscedastic_transform_check(
        family,
        RegressionFunction.affine(1.5, 1.0),
        RegressionFunction.constant(0.0),
        256,
    )
    assert rep.value == 0.0
    assert rep.kind == "hellinger2"
    assert rep.method == "closed-form"
    assert rep.n == 256


def test_homoscedastic_check_location_is_exactly_zero():
    family = get_family("location_normal")
    for n in (1 << 8, 1 << 10, 1 << 12):
        amp = 0.5 * rate_gamma_bar(n, 1.0, 1.0)
        rep = homoscedastic_transform_check(
            family,
            RegressionFunction.affine(0.0, 0.5),
            RegressionFunction.sinusoid(amp, 1.0),
            n,
        )
        assert rep.value == 0.0


def test_homoscedastic_check_bernoulli_decreases_below_threshold():
    family = get_family("bernoulli")
    f = RegressionFunction.affine(0.25, 0.1)
    values = []
    for k in range(8, 15, 2):
        n = 1 << k
        amp = 0.5 * rate_gamma_bar(n, 1.0, 1.0)
        rep = homoscedastic_transform_check(
            family, f, RegressionFunction.sinusoid(amp, 1.0), n
        )
        values.append(rep.value)
    assert all(a > b for a, b in zip(values, values[1:]))
    assert values[-1] < 0.01


def test_homoscedastic_check_argument_checks():
    family = get_family("poisson")
    with pytest.raises(ArgumentError):
        homoscedastic_transform_check(
            family,
            RegressionFunction.constant(1.0),
            RegressionFunction.constant(0.0),
            0,
        )


# ---------------------------------------------------------------------------
# risk transfer
# ---------------------------------------------------------------------------


def test_risk_transfer_argument_checks():
    family = get_family("location_normal")
    f = RegressionFunction.constant(0.3)
    rng = np.random.default_rng(18)
    with pytest.raises(ArgumentError):
        risk_transfer_demo(family, f, 256, [1.0], rng, R=49)
    with pytest.raises(ArgumentError):
        risk_transfer_demo(family, f, 256, [], rng, R=50)
    with pytest.raises(ArgumentError):
        risk_transfer_demo(family, f, 256, [-1.0], rng, R=50)


def test_risk_transfer_location_risks_same_order():
    family = get_family("location_normal")
    f = RegressionFunction.constant(0.3)
    rng = np.random.default_rng(19)
    table = risk_transfer_demo(family, f, 1024, [0.005, 1.0], rng, R=60)
    assert table.replicate_count == 60
    assert table.sup_errors_direct.shape == (60,)
    assert table.sup_errors_transferred.shape == (60,)
    assert np.all(table.direct_risk > 0.0)
    assert np.all(table.transferred_risk > 0.0)
    # risks are monotone in the loss cap
    assert table.direct_risk[0] <= table.direct_risk[1]
    assert table.transferred_risk[0] <= table.transferred_risk[1]
    # caps bound the risks
    assert np.all(table.direct_risk <= table.loss_caps)
    assert np.all(table.transferred_risk <= table.loss_caps)
    # the two paths land on the same order of magnitude
    ratio = table.transferred_risk[1] / table.direct_risk[1]
    assert 1.0 / 3.0 < ratio < 3.0


def test_risk_transfer_margin_shrinks_with_n():
    family = get_family("bernoulli")
    f = RegressionFunction.affine(0.25, 0.1)
    margins = []
    for n in (1 << 10, 1 << 14):
        rng = np.random.default_rng(20)
        table = risk_transfer_demo(family, f, n, [1.0], rng, R=80)
        margins.append(abs(float(table.transferred_risk[0] - table.direct_risk[0])))
    assert margins[1] < margins[0]
