"""Shared fixtures: the expensive spectral constants are computed once per session."""

import pytest

from symmtest import spectral
from symmtest.distributions import null_distribution

TRUNCATABLE_NULLS = ("uniform", "normal", "logistic", "laplace")


@pytest.fixture(scope="session")
def uniform_roots():
    """Fifty largest closed-form eigenvalues of the uniform-null operator."""
    return spectral.solve_uniform_eigenvalues(50)


@pytest.fixture(scope="session")
def nystrom_nu1_m1000():
    """Largest J-operator eigenvalue of each truncatable null at m = 1000."""
    values = {}
    for name in TRUNCATABLE_NULLS:
        op = spectral.build_discrete_operator(null_distribution(name), "J", 1000)
        values[name] = spectral.largest_abs_eigenvalue(op)
    return values


@pytest.fixture(scope="session")
def uniform_curve():
    """Largest-eigenvalue curve of the threshold family for the uniform null."""
    return spectral.nu1_curve(null_distribution("uniform"))


@pytest.fixture(scope="session")
def kappa0_by_null(uniform_curve):
    """(sup_t |nu_1(t)|, argmax t) per null; uniform from its curve sweep."""
    out = {"uniform": (uniform_curve.sup_value, uniform_curve.argmax_t)}
    for name in ("normal", "logistic", "laplace"):
        out[name] = spectral.reference_kappa0(name)
    return out


@pytest.fixture(scope="session")
def spectral_constants(uniform_roots, nystrom_nu1_m1000, kappa0_by_null):
    """{null: (nu1, kappa0)} as used by the efficiency table."""
    consts = {"uniform": (uniform_roots[0], spectral.kappa0_uniform_closed_form())}
    for name in ("normal", "logistic", "laplace"):
        consts[name] = (nystrom_nu1_m1000[name], kappa0_by_null[name][0])
    return consts
