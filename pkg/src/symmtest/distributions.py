"""Symmetric null distributions and the parametric asymmetry families around them.

The nulls are symmetric about zero: uniform on [-1, 1], standard normal,
standard logistic, standard Laplace, and standard Cauchy.  Each carries a
truncation bound ``truncation_A`` used when integral operators over the
distribution are discretized (Cauchy has no finite bound and is rejected by
the spectral code).

Seven one-parameter families depart from a symmetric base F at theta = 0:

    g1  power transform             G(x) = F(x)^(1+theta)
    g2  exponential tilt            G(x) = F(x) exp(-theta (1-F(x)))
    g3  sine perturbation           G(x) = F(x) - theta sin(pi F(x))
    g4  power-transform mixture     G(x) = (1-theta) F(x) + theta F(x)^beta
    g5  location shift              G(x) = F(x - theta)
    g6  shift mixture               G(x) = (1-theta) F(x) + theta F(x - beta)
    g7  skewing                     g(x) = 2 F(theta x) f(x)

``score_h`` exposes the theta-derivative of the density at theta = 0, the
quantity every efficiency computation integrates against.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate, stats

__all__ = [
    "NullDistribution",
    "AlternativeFamily",
    "null_distribution",
    "alternative_family",
    "score_h",
    "sample_alternative",
    "sample_null",
    "NULL_NAMES",
    "FAMILY_NAMES",
]

NULL_NAMES = ("uniform", "normal", "logistic", "laplace", "cauchy")
FAMILY_NAMES = ("g1", "g2", "g3", "g4", "g5", "g6", "g7")


class NullDistribution:
    """A symmetric-about-zero null law: cdf/pdf/pdf-derivative/quantile/sampler."""

    def __init__(self, name, frozen, pdf_deriv, truncation_A):
        self.name = name
        self._dist = frozen
        self._pdf_deriv = pdf_deriv
        self.truncation_A = float(truncation_A)

    def __repr__(self):
        return f"NullDistribution({self.name!r}, A={self.truncation_A})"

    def with_truncation(self, A: float) -> "NullDistribution":
        """The same law with a different operator-truncation bound."""
        if A <= 0:
            raise ValueError(f"truncation bound must be positive, got {A}")
        return NullDistribution(self.name, self._dist, self._pdf_deriv, A)

    def cdf(self, x):
        return self._dist.cdf(x)

    def pdf(self, x):
        return self._dist.pdf(x)

    def pdf_deriv(self, x):
        return self._pdf_deriv(np.asarray(x, dtype=float))

    def quantile(self, u):
        return self._dist.ppf(u)

    def sample(self, n, rng):
        """n i.i.d. draws by inverse-cdf; deterministic given the rng state."""
        if n < 1:
            raise ValueError(f"sample size must be >= 1, got {n}")
        return self.quantile(rng.random(n))


def _make_nulls():
    sqrt2pi = math.sqrt(2.0 * math.pi)

    def d_uniform(x):
        return np.zeros_like(x)

    def d_normal(x):
        return -x * np.exp(-0.5 * x * x) / sqrt2pi

    def d_logistic(x):
        f = stats.logistic.pdf(x)
        return f * (1.0 - 2.0 * stats.logistic.cdf(x))

    def d_laplace(x):
        return -np.sign(x) * 0.5 * np.exp(-np.abs(x))

    def d_cauchy(x):
        return -2.0 * x / (np.pi * (1.0 + x * x) ** 2)

    return {
        "uniform": NullDistribution("uniform", stats.uniform(loc=-1.0, scale=2.0), d_uniform, 1.0),
        "normal": NullDistribution("normal", stats.norm(), d_normal, 10.0),
        "logistic": NullDistribution("logistic", stats.logistic(), d_logistic, 30.0),
        "laplace": NullDistribution("laplace", stats.laplace(), d_laplace, 30.0),
        "cauchy": NullDistribution("cauchy", stats.cauchy(), d_cauchy, math.inf),
    }


_NULLS = _make_nulls()


def null_distribution(name: str) -> NullDistribution:
    """Look up one of the five supported nulls by name."""
    try:
        return _NULLS[name.lower()]
    except KeyError:
        raise ValueError(f"unknown null distribution {name!r}; choose from {NULL_NAMES}") from None


class AlternativeFamily:
    """One of the seven departure families g1..g7 around a symmetric base."""

    def __init__(self, name: str, base: NullDistribution, beta: float | None = None):
        name = name.lower()
        if name not in FAMILY_NAMES:
            raise ValueError(f"unknown alternative family {name!r}; choose from {FAMILY_NAMES}")
        if name == "g4":
            if beta is None or beta <= 1.0:
                raise ValueError("g4 requires shape parameter beta > 1")
        elif name == "g6":
            if beta is None or beta <= 0.0:
                raise ValueError("g6 requires shape parameter beta > 0")
        elif beta is not None:
            raise ValueError(f"family {name} takes no shape parameter beta")
        self.name = name
        self.base = base
        self.beta = beta

    def __repr__(self):
        b = f", beta={self.beta}" if self.beta is not None else ""
        return f"AlternativeFamily({self.name!r}, base={self.base.name!r}{b})"

    @property
    def theta_range(self) -> tuple[float, float]:
        return {
            "g1": (0.0, math.inf),
            "g2": (0.0, math.inf),
            "g3": (0.0, 1.0 / math.pi),
            "g4": (0.0, 1.0),
            "g5": (-math.inf, math.inf),
            "g6": (0.0, 1.0),
            "g7": (-math.inf, math.inf),
        }[self.name]

    def _check_theta(self, theta):
        lo, hi = self.theta_range
        if not (lo <= theta <= hi):
            raise ValueError(f"theta={theta} outside the valid range [{lo}, {hi}] for {self.name}")

    def cdf_at(self, x, theta: float):
        x = np.asarray(x, dtype=float)
        F = self.base.cdf
        if self.name == "g1":
            return F(x) ** (1.0 + theta)
        if self.name == "g2":
            Fx = F(x)
            return Fx * np.exp(-theta * (1.0 - Fx))
        if self.name == "g3":
            Fx = F(x)
            return Fx - theta * np.sin(np.pi * Fx)
        if self.name == "g4":
            Fx = F(x)
            return (1.0 - theta) * Fx + theta * Fx**self.beta
        if self.name == "g5":
            return F(x - theta)
        if self.name == "g6":
            return (1.0 - theta) * F(x) + theta * F(x - self.beta)
        # g7: no closed form; integrate the density
        if theta == 0.0:
            return F(x)
        f = self.base.pdf
        scalar = x.ndim == 0

        def one(xi):
            val, _ = integrate.quad(
                lambda u: 2.0 * F(theta * u) * f(u), -np.inf, xi, limit=200
            )
            return val

        out = np.array([one(xi) for xi in np.atleast_1d(x)])
        return float(out[0]) if scalar else out

    def density_at(self, x, theta: float):
        x = np.asarray(x, dtype=float)
        F, f = self.base.cdf, self.base.pdf
        if self.name == "g1":
            return (1.0 + theta) * F(x) ** theta * f(x) if theta != 0.0 else f(x)
        if self.name == "g2":
            Fx = F(x)
            return f(x) * np.exp(-theta * (1.0 - Fx)) * (1.0 + theta * Fx)
        if self.name == "g3":
            return f(x) * (1.0 - theta * np.pi * np.cos(np.pi * F(x)))
        if self.name == "g4":
            return f(x) * ((1.0 - theta) + theta * self.beta * F(x) ** (self.beta - 1.0))
        if self.name == "g5":
            return f(x - theta)
        if self.name == "g6":
            return (1.0 - theta) * f(x) + theta * f(x - self.beta)
        return 2.0 * F(theta * x) * f(x)

    def score_h(self, x):
        """Theta-derivative of the density at theta = 0."""
        x = np.asarray(x, dtype=float)
        F, f = self.base.cdf, self.base.pdf
        if self.name == "g1":
            Fx, fx = F(x), f(x)
            with np.errstate(divide="ignore"):
                logF = np.log(Fx)
            # the support endpoint where F = 0 never matters under an integral
            return np.where(Fx > 0.0, fx * (1.0 + logF), 0.0)
        if self.name == "g2":
            return f(x) * (2.0 * F(x) - 1.0)
        if self.name == "g3":
            return -np.pi * f(x) * np.cos(np.pi * F(x))
        if self.name == "g4":
            return f(x) * (self.beta * F(x) ** (self.beta - 1.0) - 1.0)
        if self.name == "g5":
            return -self.base.pdf_deriv(x)
        if self.name == "g6":
            return f(x - self.beta) - f(x)
        return 2.0 * x * float(self.base.pdf(0.0)) * f(x)

    def sample(self, theta: float, n: int, rng: np.random.Generator) -> np.ndarray:
        """n i.i.d. draws from G(.; theta)."""
        self._check_theta(theta)
        if n < 1:
            raise ValueError(f"sample size must be >= 1, got {n}")
        Q = self.base.quantile
        if self.name == "g1":
            return Q(rng.random(n) ** (1.0 / (1.0 + theta)))
        if self.name == "g4":
            mix = rng.random(n)
            u = rng.random(n)
            return np.where(mix < theta, Q(u ** (1.0 / self.beta)), Q(u))
        if self.name == "g5":
            return Q(rng.random(n)) + theta
        if self.name == "g6":
            mix = rng.random(n)
            u = rng.random(n)
            return np.where(mix < theta, Q(u) + self.beta, Q(u))
        if self.name == "g7":
            # selection representation: X from f kept when an independent draw
            # from f falls below theta*X, otherwise reflected
            x = Q(rng.random(n))
            y = Q(rng.random(n))
            return np.where(y <= theta * x, x, -x)
        return self._invert_cdf(rng.random(n), theta)

    def _invert_cdf(self, u: np.ndarray, theta: float, tol: float = 1e-12) -> np.ndarray:
        """Bisection inversion of cdf_at(., theta) for the families without one."""
        u = np.clip(u, 1e-16, 1.0 - 1e-16)
        half_width = 50.0 * max(1.0, abs(float(self.base.quantile(1.0 - 1e-12))))
        lo = np.full_like(u, -half_width)
        hi = np.full_like(u, half_width)
        if np.any(self.cdf_at(lo, theta) > u) or np.any(self.cdf_at(hi, theta) < u):
            raise RuntimeError(
                f"cdf inversion bracket [-{half_width}, {half_width}] does not bracket "
                f"all targets for {self.name} at theta={theta}"
            )
        while np.max(hi - lo) > tol:
            mid = 0.5 * (lo + hi)
            below = self.cdf_at(mid, theta) < u
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return 0.5 * (lo + hi)


def alternative_family(name: str, base, beta: float | None = None) -> AlternativeFamily:
    """Build a family by name over a base given as a name or NullDistribution."""
    if isinstance(base, str):
        base = null_distribution(base)
    return AlternativeFamily(name, base, beta)


def score_h(family: AlternativeFamily):
    """The score function h of a family, as a vectorized callable."""
    return family.score_h


def sample_alternative(family: AlternativeFamily, theta: float, n: int, rng) -> np.ndarray:
    return family.sample(theta, n, rng)


def sample_null(dist: NullDistribution, n: int, rng) -> np.ndarray:
    return dist.sample(n, rng)
