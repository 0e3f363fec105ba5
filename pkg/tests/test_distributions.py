"""Null-distribution and alternative-family contracts.

Score functions are checked against a finite-difference oracle built on
density_at; samplers are checked against their own cdfs (Kolmogorov distance
on large seeded draws) and against closed forms where one exists.
"""

import math

import numpy as np
import pytest
from scipy import integrate

from symmtest.distributions import (
    FAMILY_NAMES,
    NULL_NAMES,
    alternative_family,
    null_distribution,
    sample_alternative,
    sample_null,
    score_h,
)
from symmtest.rng import substream

FD_TOL = 1e-5
FD_DELTA = 1e-4

ALL_PAIRS = [
    (base, fam, {"g4": 3.0, "g6": 1.0}.get(fam))
    for base in NULL_NAMES
    for fam in FAMILY_NAMES
]


def fd_score(family, x, delta=FD_DELTA):
    """Finite-difference theta-derivative of the density at theta = 0.

    One-sided (second order) for g6 and g7: g6 has no density below theta=0,
    and g7's density is not twice differentiable across theta=0 when the
    base density has a kink at the origin.
    """
    if family.name in ("g6", "g7"):
        return (
            -3.0 * family.density_at(x, 0.0)
            + 4.0 * family.density_at(x, delta)
            - family.density_at(x, 2.0 * delta)
        ) / (2.0 * delta)
    return (family.density_at(x, delta) - family.density_at(x, -delta)) / (2.0 * delta)


def ks_distance(draws, cdf_values_at_sorted_draws):
    n = draws.size
    emp_hi = np.arange(1, n + 1) / n
    emp_lo = emp_hi - 1.0 / n
    F = cdf_values_at_sorted_draws
    return max(np.max(np.abs(emp_hi - F)), np.max(np.abs(emp_lo - F)))


# ---------------------------------------------------------------------------
# Null distributions
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("name", NULL_NAMES)
def test_null_symmetry_and_quantile(name):
    dist = null_distribution(name)
    x = substream(1, 0).uniform(-5, 5, 200)
    assert np.allclose(dist.cdf(-x), 1.0 - dist.cdf(x), atol=1e-12)
    assert np.allclose(dist.pdf(-x), dist.pdf(x), atol=1e-12)
    interior = dist.quantile(substream(1, 1).uniform(0.01, 0.99, 200))
    assert np.max(np.abs(dist.quantile(dist.cdf(interior)) - interior)) < 1e-10


@pytest.mark.parametrize("name", ("normal", "logistic", "laplace"))
def test_truncation_bound_captures_mass(name):
    dist = null_distribution(name)
    assert dist.cdf(dist.truncation_A) > 1.0 - 1e-6


def test_uniform_truncation_is_exact_and_cauchy_unbounded():
    assert null_distribution("uniform").truncation_A == 1.0
    assert math.isinf(null_distribution("cauchy").truncation_A)


@pytest.mark.parametrize("name", NULL_NAMES)
def test_pdf_deriv_matches_finite_difference(name):
    dist = null_distribution(name)
    x = substream(2, 0).uniform(0.05, 3.0, 50)  # stay off the laplace origin kink
    x = np.concatenate([x, -x])
    fd = (dist.pdf(x + 1e-6) - dist.pdf(x - 1e-6)) / 2e-6
    assert np.max(np.abs(dist.pdf_deriv(x) - fd)) < 1e-5


def test_null_sampler_inverse_cdf_and_determinism():
    dist = null_distribution("logistic")
    a = sample_null(dist, 1000, substream(3, 0))
    b = sample_null(dist, 1000, substream(3, 0))
    assert np.array_equal(a, b)
    d = np.sort(sample_null(dist, 100000, substream(3, 1)))
    assert ks_distance(d, dist.cdf(d)) < 0.01


# ---------------------------------------------------------------------------
# Score functions
# ---------------------------------------------------------------------------


def test_score_reference_values():
    u = null_distribution("uniform")
    g1 = alternative_family("g1", u)
    assert g1.score_h(0.0) == pytest.approx(0.5 * (1.0 + math.log(0.5)), abs=1e-12)
    assert g1.score_h(0.0) == pytest.approx(0.1534, abs=5e-5)
    g3 = alternative_family("g3", u)
    assert g3.score_h(1.0) == pytest.approx(math.pi / 2.0, abs=1e-12)
    g5 = alternative_family("g5", null_distribution("normal"))
    assert g5.score_h(0.0) == 0.0


@pytest.mark.parametrize("base,fam,beta", ALL_PAIRS)
def test_score_matches_finite_difference(base, fam, beta):
    dist = null_distribution(base)
    family = alternative_family(fam, dist, beta)
    rng = substream(4, NULL_NAMES.index(base), FAMILY_NAMES.index(fam))
    if base == "uniform":
        x = rng.uniform(-0.999, 0.999, 100)
    else:
        x = dist.quantile(rng.uniform(0.001, 0.999, 100))
    assert np.max(np.abs(family.score_h(x) - fd_score(family, x))) < FD_TOL


@pytest.mark.parametrize("base,fam,beta", ALL_PAIRS)
def test_score_integrates_to_zero(base, fam, beta):
    family = alternative_family(fam, null_distribution(base), beta)
    total, _ = integrate.quad(lambda v: float(family.score_h(v)), -np.inf, np.inf, limit=400)
    assert abs(total) < 1e-6


@pytest.mark.parametrize("base,fam,beta", ALL_PAIRS)
def test_density_integrates_to_one(base, fam, beta):
    family = alternative_family(fam, null_distribution(base), beta)
    lo, hi = family.theta_range
    theta = min(0.25, hi)
    total, _ = integrate.quad(
        lambda v: float(family.density_at(v, theta)), -np.inf, np.inf, limit=400
    )
    assert total == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("base,fam,beta", ALL_PAIRS)
def test_cdf_at_zero_theta_is_base(base, fam, beta):
    dist = null_distribution(base)
    family = alternative_family(fam, dist, beta)
    x = np.linspace(-4, 4, 41) if base != "uniform" else np.linspace(-1, 1, 41)
    assert np.max(np.abs(family.cdf_at(x, 0.0) - dist.cdf(x))) < 1e-10


@pytest.mark.parametrize("base,fam,beta", ALL_PAIRS)
def test_cdf_monotone_zero_to_one(base, fam, beta):
    dist = null_distribution(base)
    family = alternative_family(fam, dist, beta)
    lo, hi = family.theta_range
    for theta in (min(0.2, hi), min(1.0, hi)):
        span = 1.0 if base == "uniform" else 12.0
        grid = np.linspace(-span - abs(theta) - 2.0, span + abs(theta) + 2.0, 1000)
        vals = family.cdf_at(grid, theta)
        assert np.all(np.diff(vals) >= -1e-12)
        assert vals[0] < 1e-3 and vals[-1] > 1.0 - 1e-3


# ---------------------------------------------------------------------------
# Samplers
# ---------------------------------------------------------------------------


def test_location_shift_sampler_mean():
    family = alternative_family("g5", null_distribution("normal"))
    draws = sample_alternative(family, 0.5, 100000, substream(5, 0))
    assert draws.mean() == pytest.approx(0.5, abs=0.01)


@pytest.mark.parametrize("fam,beta", [(f, {"g4": 3.0, "g6": 1.0}.get(f)) for f in FAMILY_NAMES])
def test_sampler_recovers_base_at_zero_theta(fam, beta):
    dist = null_distribution("normal")
    family = alternative_family(fam, dist, beta)
    d = np.sort(family.sample(0.0, 100000, substream(6, FAMILY_NAMES.index(fam))))
    assert ks_distance(d, dist.cdf(d)) < 0.01


def test_power_family_closed_form_cdf():
    family = alternative_family("g1", null_distribution("uniform"))
    d = np.sort(family.sample(1.0, 100000, substream(7, 0)))
    assert ks_distance(d, ((d + 1.0) / 2.0) ** 2) < 0.01


@pytest.mark.parametrize("fam,theta", [("g2", 0.8), ("g3", 0.25), ("g7", 0.8)])
def test_sampler_matches_cdf_at_nonzero_theta(fam, theta):
    dist = null_distribution("normal")
    family = alternative_family(fam, dist)
    d = np.sort(family.sample(theta, 50000, substream(8, FAMILY_NAMES.index(fam))))
    assert ks_distance(d, family.cdf_at(d, theta)) < 0.012


def test_sampler_determinism():
    family = alternative_family("g3", null_distribution("logistic"))
    a = family.sample(0.2, 500, substream(9, 0))
    b = family.sample(0.2, 500, substream(9, 0))
    assert np.array_equal(a, b)


def test_mixture_samplers_match_cdf():
    for fam, beta, theta in (("g4", 3.0, 0.6), ("g6", 1.0, 0.4)):
        family = alternative_family(fam, null_distribution("laplace"), beta)
        d = np.sort(family.sample(theta, 50000, substream(10, 0)))
        assert ks_distance(d, family.cdf_at(d, theta)) < 0.012


# ---------------------------------------------------------------------------
# Validation errors
# ---------------------------------------------------------------------------


def test_invalid_names_rejected():
    with pytest.raises(ValueError):
        null_distribution("gamma")
    with pytest.raises(ValueError):
        alternative_family("g9", null_distribution("normal"))


def test_beta_validation():
    nrm = null_distribution("normal")
    with pytest.raises(ValueError):
        alternative_family("g4", nrm, 1.0)  # needs beta > 1
    with pytest.raises(ValueError):
        alternative_family("g4", nrm)  # beta required
    with pytest.raises(ValueError):
        alternative_family("g6", nrm, 0.0)  # needs beta > 0
    with pytest.raises(ValueError):
        alternative_family("g1", nrm, 2.0)  # no beta for g1


def test_theta_range_enforced():
    family = alternative_family("g3", null_distribution("normal"))
    with pytest.raises(ValueError):
        family.sample(0.5, 10, substream(11, 0))  # above 1/pi
    with pytest.raises(ValueError):
        alternative_family("g1", null_distribution("normal")).sample(-0.5, 10, substream(11, 1))


def test_score_h_accessor_returns_callable():
    family = alternative_family("g2", null_distribution("laplace"))
    h = score_h(family)
    x = np.array([-1.0, 0.0, 2.0])
    assert np.array_equal(h(x), family.score_h(x))
