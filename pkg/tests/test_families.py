"""Family-level oracles: closed forms, quadrature cross-checks, regularity."""

import math

import numpy as np
import pytest
from scipy import integrate

from lecam_equiv.errors import ArgumentError, DomainError, SingularityError
from lecam_equiv.families import (
    BUILTIN_FAMILIES,
    TabulatedLocation,
    check_regularity,
    extended_tangent,
    fisher_info,
    fisher_info_quadrature,
    gamma_transform,
    get_family,
    normalization_defect,
)


def working_grid(family, count=20):
    lo, hi = family.working_interval
    return np.linspace(lo, hi, count)


# ---------------------------------------------------------------------------
# closed-form point values
# ---------------------------------------------------------------------------


def test_fisher_point_values():
    assert fisher_info(get_family("bernoulli"), 0.5) == pytest.approx(4.0, abs=1e-12)
    assert fisher_info(get_family("poisson"), 1.0) == pytest.approx(1.0, abs=1e-12)
    assert fisher_info(get_family("gaussian_scale"), 1.0) == pytest.approx(2.0, abs=1e-12)
    assert fisher_info(get_family("location_normal"), 0.3) == pytest.approx(1.0, abs=1e-12)


def test_gamma_point_values():
    # 2*arcsin(sqrt(0.25)) = 2*arcsin(0.5) = pi/3
    assert gamma_transform(get_family("bernoulli"), 0.25) == pytest.approx(
        math.pi / 3.0, abs=1e-12
    )
    # 2*sqrt(4) = 4
    assert gamma_transform(get_family("poisson"), 4.0) == pytest.approx(4.0, abs=1e-12)
    # identity map
    assert gamma_transform(get_family("location_normal"), 0.7) == pytest.approx(
        0.7, abs=1e-12
    )
    # sqrt(2)*log(e) = sqrt(2)
    assert gamma_transform(get_family("gaussian_scale"), math.e) == pytest.approx(
        math.sqrt(2.0), abs=1e-12
    )


def test_gamma_anchor_values():
    # anchors: arcsine at 0, square root at 0, log at 1, identity at 0
    assert get_family("gaussian_scale").gamma(1.0) == pytest.approx(0.0, abs=1e-14)
    assert get_family("location_normal").gamma(0.0) == pytest.approx(0.0, abs=1e-14)
    assert get_family("poisson").gamma(1e-12) == pytest.approx(0.0, abs=1e-5)
    assert get_family("bernoulli").gamma(1e-12) == pytest.approx(0.0, abs=1e-5)


def test_gamma_inverse_round_trip():
    for name in BUILTIN_FAMILIES:
        fam = get_family(name)
        grid = working_grid(fam)
        back = fam.gamma_inverse(fam.gamma(grid))
        assert np.allclose(back, grid, atol=1e-10), name


# ---------------------------------------------------------------------------
# quadrature cross-checks
# ---------------------------------------------------------------------------


def test_fisher_quadrature_matches_closed_form():
    for name in BUILTIN_FAMILIES:
        fam = get_family(name)
        for theta in working_grid(fam, 10):
            quad = fisher_info_quadrature(fam, theta)
            assert quad == pytest.approx(float(fam.fisher(theta)), rel=1e-6), (
                name,
                theta,
            )


def test_density_normalization():
    for name in BUILTIN_FAMILIES:
        fam = get_family(name)
        tol = 1e-12 if fam.support_atoms(1.0 if name != "bernoulli" else 0.5) is not None else 1e-8
        for theta in working_grid(fam, 10):
            assert normalization_defect(fam, theta) < tol, (name, theta)


def test_score_mean_zero():
    for name in BUILTIN_FAMILIES:
        fam = get_family(name)
        tol = 1e-12 if name in ("bernoulli", "poisson") else 1e-6
        for theta in working_grid(fam, 8):
            t = float(theta)
            mean = fam.expect(t, lambda x: np.asarray(fam.score(x, t), dtype=float))
            assert abs(mean) < tol, (name, theta)


def test_gamma_derivative_is_sqrt_fisher():
    h = 1e-5
    for name in BUILTIN_FAMILIES:
        fam = get_family(name)
        for theta in working_grid(fam, 20):
            t = float(theta)
            diff = (fam.gamma(t + h) - fam.gamma(t - h)) / (2.0 * h)
            assert diff == pytest.approx(math.sqrt(float(fam.fisher(t))), rel=1e-5), (
                name,
                theta,
            )


def test_gamma_strictly_increasing():
    for name in BUILTIN_FAMILIES:
        fam = get_family(name)
        vals = fam.gamma(working_grid(fam, 50))
        assert np.all(np.diff(vals) > 0), name


# ---------------------------------------------------------------------------
# extended tangent
# ---------------------------------------------------------------------------


def test_extended_tangent_equal_parameters_is_score():
    for name in BUILTIN_FAMILIES:
        fam = get_family(name)
        lo, hi = fam.working_interval
        theta = 0.5 * (lo + hi)
        x = fam.sample(np.full(3, theta), np.random.default_rng(7))
        assert np.allclose(
            extended_tangent(fam, x, theta, theta), fam.score(x, theta)
        ), name


def test_extended_tangent_bernoulli_limit():
    fam = get_family("bernoulli")
    # score(1, 0.5) = 1/0.5 = 2 by hand differentiation of log(theta)
    target = 2.0
    errors = []
    for h in (1e-2, 1e-3, 1e-4):
        val = extended_tangent(fam, 1.0, 0.5, 0.5 + h)
        errors.append(abs(val - target))
    # first-order convergence: error shrinks about tenfold per decade of h
    assert errors[0] > errors[1] > errors[2]
    assert errors[1] / errors[0] == pytest.approx(0.1, rel=0.5)
    assert errors[2] / errors[1] == pytest.approx(0.1, rel=0.5)


def test_extended_tangent_poisson_value():
    # (2/0.1)*(sqrt(e^{-1.1}/e^{-1}) - 1) = 20*(e^{-0.05} - 1) = -0.9754115...
    val = extended_tangent(get_family("poisson"), 0.0, 1.0, 1.1)
    assert val == pytest.approx(20.0 * (math.exp(-0.05) - 1.0), abs=1e-12)
    assert val == pytest.approx(-0.97541150998572, abs=1e-11)


def test_extended_tangent_zero_density_raises():
    with pytest.raises(SingularityError):
        extended_tangent(get_family("poisson"), 0.5, 1.0, 1.1)


def test_fisher_domain_error():
    with pytest.raises(DomainError):
        fisher_info(get_family("bernoulli"), 1.5)
    with pytest.raises(DomainError):
        fisher_info(get_family("poisson"), -1.0)
    with pytest.raises(DomainError):
        get_family("gaussian_scale").gamma(0.0)


# ---------------------------------------------------------------------------
# affinities
# ---------------------------------------------------------------------------


def test_affinity_closed_forms_against_direct_integration():
    pairs = {
        "bernoulli": (0.3, 0.4),
        "poisson": (1.0, 1.3),
        "gaussian_scale": (1.0, 1.5),
        "location_normal": (0.0, 0.4),
    }
    for name, (a, b) in pairs.items():
        fam = get_family(name)
        closed = fam.affinity(a, b)
        direct = ParametricAffinityOracle(fam, a, b)
        assert closed == pytest.approx(direct, abs=1e-9), name
        assert fam.affinity(a, a) == pytest.approx(1.0, abs=1e-12)
        assert fam.affinity(b, a) == pytest.approx(closed, abs=1e-12)


def ParametricAffinityOracle(fam, a, b):
    """Independent affinity evaluation by summation/quadrature."""
    atoms = fam.support_atoms(a)
    if atoms is not None:
        return float(np.sum(np.sqrt(fam.density(atoms, a) * fam.density(atoms, b))))
    lo1, hi1 = fam.quad_bounds(a)
    lo2, hi2 = fam.quad_bounds(b)
    return integrate.quad(
        lambda x: math.sqrt(float(fam.density(x, a)) * float(fam.density(x, b))),
        min(lo1, lo2),
        max(hi1, hi2),
        limit=400,
    )[0]


def test_sqrt_z_moments_identities():
    # E(sqrt z - 1) = A - 1 and E(sqrt z - 1)^2 = 2(1 - A); cross-check the
    # first directly by summation for a Bernoulli pair
    fam = get_family("bernoulli")
    theta, u = 0.3, 0.4
    m1, m2 = fam.sqrt_z_moments(theta, u)
    atoms = np.array([0.0, 1.0])
    z = fam.density(atoms, u) / fam.density(atoms, theta)
    direct1 = float(np.sum((np.sqrt(z) - 1.0) * fam.density(atoms, theta)))
    direct2 = float(np.sum((np.sqrt(z) - 1.0) ** 2 * fam.density(atoms, theta)))
    assert m1 == pytest.approx(direct1, abs=1e-14)
    assert m2 == pytest.approx(direct2, abs=1e-14)
    # the two moments satisfy 2*m1 = -m2 because E z = 1
    assert 2.0 * m1 == pytest.approx(-m2, abs=1e-14)


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------


def test_sampling_moments():
    rng = np.random.default_rng(2024)
    n = 40_000
    cases = {
        "bernoulli": 0.3,
        "poisson": 2.0,
        "gaussian_scale": 1.5,
        "location_normal": 0.7,
    }
    means = {
        "bernoulli": 0.3,
        "poisson": 2.0,
        "gaussian_scale": 0.0,
        "location_normal": 0.7,
    }
    for name, theta in cases.items():
        fam = get_family(name)
        x = fam.sample(np.full(n, theta), rng)
        # 5 sigma tolerance on the sample mean
        sd = {
            "bernoulli": math.sqrt(0.3 * 0.7),
            "poisson": math.sqrt(2.0),
            "gaussian_scale": 1.5,
            "location_normal": 1.0,
        }[name]
        assert abs(x.mean() - means[name]) < 5.0 * sd / math.sqrt(n), name


def test_score_law_matches_sampler():
    rng = np.random.default_rng(11)
    n = 60_000
    for name in BUILTIN_FAMILIES:
        fam = get_family(name)
        lo, hi = fam.working_interval
        theta = 0.25 * lo + 0.75 * hi if name != "location_normal" else 0.4
        law = fam.score_law(theta)
        info = float(fam.fisher(theta))
        assert law.second_moment() == pytest.approx(info, rel=1e-9), name
        direct = fam.score(fam.sample(np.full(n, theta), rng), theta)
        via_law = law.sample(rng, n)
        # compare means and variances at 6 sigma MC tolerance
        for s in (direct, via_law):
            fourth = np.mean(s**4)
            assert abs(s.mean()) < 6.0 * math.sqrt(info / n)
            assert abs(np.mean(s**2) - info) < 6.0 * math.sqrt(max(fourth, 1.0) / n)


# ---------------------------------------------------------------------------
# regularity audits
# ---------------------------------------------------------------------------


def test_regularity_bernoulli_passes():
    rep = check_regularity(
        get_family("bernoulli"), np.linspace(0.1, 0.9, 9), epsilon=0.05, beta=1.0
    )
    assert rep.all_pass()
    assert not rep.insufficient_pairs
    assert rep.r1_sup_estimate >= 0.0
    assert rep.r3_bounds[0] == pytest.approx(4.0, abs=1e-12)


def test_regularity_location_passes():
    rep = check_regularity(
        get_family("location_normal"), np.linspace(-1.0, 1.0, 9), epsilon=0.1, beta=1.0
    )
    assert rep.all_pass()
    assert rep.r3_bounds == (1.0, 1.0)


def test_regularity_degenerate_grid_flags_insufficient_pairs():
    rep = check_regularity(get_family("bernoulli"), [0.5], epsilon=0.0, beta=1.0)
    assert rep.insufficient_pairs
    assert rep.pair_count == 0
    assert not rep.pass_flags["r1"]
    assert not rep.pass_flags["r2"]
    assert rep.pass_flags["r3"]


def test_regularity_empty_grid_raises():
    with pytest.raises(ArgumentError):
        check_regularity(get_family("bernoulli"), [], epsilon=0.05, beta=1.0)


# ---------------------------------------------------------------------------
# registry and tabulated family
# ---------------------------------------------------------------------------


def test_registry_rejects_unknown_and_incomplete():
    with pytest.raises(ArgumentError):
        get_family("weibull")
    with pytest.raises(ArgumentError):
        get_family("location_custom")


def normal_table(half_width=8.0, points=3201):
    xs = np.linspace(-half_width, half_width, points)
    return xs, np.exp(-0.5 * xs * xs) / math.sqrt(2.0 * math.pi)


def test_tabulated_location_recovers_normal_structure():
    xs, dens = normal_table()
    fam = TabulatedLocation(xs, dens, working_interval=(-1.0, 1.0))
    # Fisher information of the standard normal location family is 1
    assert float(fam.fisher(0.0)) == pytest.approx(1.0, rel=2e-3)
    # the tabulated score approximates x
    probe = np.array([-1.0, -0.3, 0.2, 0.9])
    assert np.allclose(fam.score(probe, 0.0), probe, atol=5e-3)
    # gamma is linear with slope sqrt(fisher)
    assert float(fam.gamma(0.5)) == pytest.approx(
        0.5 * math.sqrt(float(fam.fisher(0.0))), abs=1e-12
    )
    # affinity close to the exact normal-location value exp(-d^2/8)
    assert fam.affinity(0.0, 0.2) == pytest.approx(math.exp(-0.04 / 8.0), abs=1e-4)
    rng = np.random.default_rng(5)
    x = fam.sample(np.full(30_000, 0.25), rng)
    assert abs(x.mean() - 0.25) < 5.0 / math.sqrt(30_000)
    assert abs(x.var() - 1.0) < 0.05


def test_tabulated_location_from_file(tmp_path):
    xs, dens = normal_table(points=801)
    path = tmp_path / "noise.txt"
    np.savetxt(path, np.column_stack([xs, dens]))
    fam = get_family("location_custom", table_path=str(path))
    assert float(fam.fisher(0.0)) == pytest.approx(1.0, rel=5e-3)


def test_tabulated_location_rejects_bad_tables():
    xs, dens = normal_table(points=801)
    with pytest.raises(ArgumentError):
        TabulatedLocation(xs[::-1], dens)
    with pytest.raises(ArgumentError):
        TabulatedLocation(xs, -dens)
    with pytest.raises(ArgumentError):
        TabulatedLocation(xs[:4], dens[:4])
