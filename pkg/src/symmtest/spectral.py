"""Eigenvalue machinery behind the symmetry-test limit laws.

Under the null, n*J_n converges to 3 * sum_i nu_i (W_i^2 - 1) where the nu_i
are the eigenvalues of the integral operator with kernel

    phi_F(s, t) = (2/3) (F(|s+t|) - F(|s-t|))

acting on L2(dF), and the tail of the Kolmogorov-type statistic is governed
by kappa_0(F) = sup_t |nu_1(t; F)| over the operator family with kernel

    xi(s1, s2; t) = 1{|s1-s2| < t} - 1{|s1+s2| < t}.

For the uniform null both quantities have closed forms: the nu_i solve a
tan/cot equation, and kappa_0 = (sqrt(2)/3) / arctan(1/sqrt(2)).  For the
other nulls the operators are discretized on a symmetric grid over
[-A, A] (A = truncation bound of the null); the resulting symmetric matrix
has entries kernel(A i/m, A j/m) weighted by square roots of the grid-cell
F-masses, and its spectrum converges to the operator's as m grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .distributions import NullDistribution, null_distribution

__all__ = [
    "KernelPhi",
    "KernelXi",
    "DiscreteOperator",
    "EigenCurve",
    "SpectralDomainError",
    "PoleProximityError",
    "PowerIterationError",
    "uniform_eigen_equation",
    "solve_uniform_eigenvalues",
    "build_discrete_operator",
    "largest_abs_eigenvalue",
    "nu1_curve",
    "kappa0_uniform_closed_form",
    "psi1",
    "psi2",
    "fundamental_equation_residual",
    "limit_eigenvalues",
    "sample_limit_null_jn",
    "reference_nu1",
    "reference_kappa0",
]


class SpectralDomainError(ValueError):
    """Raised for distributions the spectral discretization cannot handle."""


class PoleProximityError(ValueError):
    """Raised when a closed-form expression is evaluated too close to a pole."""


class PowerIterationError(RuntimeError):
    """Raised when the dominant-eigenvalue iteration fails to converge."""


@dataclass(frozen=True)
class KernelPhi:
    """Second-projection kernel of the integral-type statistic; odd in each argument."""

    base: NullDistribution

    def __call__(self, s, t):
        F = self.base.cdf
        return (2.0 / 3.0) * (F(np.abs(s + t)) - F(np.abs(s - t)))


@dataclass(frozen=True)
class KernelXi:
    """Indicator-difference kernel of the Kolmogorov-type statistic at threshold t."""

    threshold_t: float

    def __call__(self, s1, s2):
        t = self.threshold_t
        d = (np.abs(np.asarray(s1) - s2) < t).astype(np.int8)
        s = (np.abs(np.asarray(s1) + s2) < t).astype(np.int8)
        return d - s


@dataclass
class DiscreteOperator:
    """Symmetric (2m+1)x(2m+1) discretization of an integral operator on [-A, A]."""

    dist_name: str
    kernel_tag: str  # "J" or "K"
    m: int
    A: float
    t: Optional[float]
    matrix: np.ndarray = field(repr=False)


def _require_truncatable(dist: NullDistribution):
    if not math.isfinite(dist.truncation_A):
        raise SpectralDomainError(
            f"{dist.name} has no finite truncation bound A, so its integral operators "
            "cannot be discretized; spectral quantities are unavailable for it"
        )


def build_discrete_operator(
    dist: NullDistribution, kernel_tag: str, m: int, t: Optional[float] = None
) -> DiscreteOperator:
    """Discretize the J- or K(t)-operator of ``dist`` on the 2m+1 point grid A*i/m."""
    _require_truncatable(dist)
    if m < 10:
        raise ValueError(f"m must be >= 10, got {m}")
    if kernel_tag not in ("J", "K"):
        raise ValueError(f"kernel_tag must be 'J' or 'K', got {kernel_tag!r}")
    if kernel_tag == "K":
        if t is None or t <= 0:
            raise ValueError("the K kernel requires a threshold t > 0")
    elif t is not None:
        raise ValueError("the J kernel takes no threshold")

    A = dist.truncation_A
    F = dist.cdf
    idx = np.arange(-m, m + 1)
    grid = A * idx / m
    # interval masses F(A(i+1)/m) - F(A i/m); the top interval reaches past A
    # where F saturates, so compactly supported nulls clip naturally
    masses = F(A * (idx + 1) / m) - F(A * idx / m)
    sqrt_w = np.sqrt(np.maximum(masses, 0.0))
    S = grid[:, None]
    T = grid[None, :]
    if kernel_tag == "J":
        kernel = (2.0 / 3.0) * (F(np.abs(S + T)) - F(np.abs(S - T)))
    else:
        kernel = (np.abs(S - T) < t).astype(float) - (np.abs(S + T) < t).astype(float)
    matrix = kernel * np.outer(sqrt_w, sqrt_w)
    return DiscreteOperator(dist.name, kernel_tag, m, A, t, matrix)


def _power_iteration(M: np.ndarray, v0, rtol: float, max_iter: int, seed: int = 0):
    """Rayleigh-quotient power iteration; returns (eigenvalue, vector, converged)."""
    if v0 is None:
        v0 = np.random.default_rng(seed).standard_normal(M.shape[0])
    x = v0 / np.linalg.norm(v0)
    lam = 0.0
    for _ in range(max_iter):
        y = M @ x
        norm_y = np.linalg.norm(y)
        if norm_y == 0.0:
            return 0.0, x, True
        lam_new = float(x @ y)
        x = y / norm_y
        if abs(lam_new - lam) <= rtol * max(abs(lam_new), 1e-300):
            return lam_new, x, True
        lam = lam_new
    return lam, x, False


def largest_abs_eigenvalue(
    op, v0: Optional[np.ndarray] = None, rtol: float = 1e-10, max_iter: int = 100000
) -> float:
    """Eigenvalue of maximal absolute value of a symmetric matrix or DiscreteOperator.

    Plain power iteration with the sign recovered from the Rayleigh quotient.
    If it stalls (a near-degenerate +-lambda leading pair), the spectrum is
    shifted by +-sigma with sigma an upper bound on the spectral radius, which
    makes each end dominant in turn; the larger of the two in magnitude wins.
    """
    M = op.matrix if isinstance(op, DiscreteOperator) else np.asarray(op, dtype=float)
    lam, _, ok = _power_iteration(M, v0, rtol, max_iter)
    if ok:
        return lam
    sigma = float(np.linalg.norm(M, "fro"))
    eye = sigma * np.eye(M.shape[0])
    hi, _, ok_hi = _power_iteration(M + eye, v0, rtol, max_iter)
    lo, _, ok_lo = _power_iteration(M - eye, v0, rtol, max_iter)
    if not (ok_hi and ok_lo):
        raise PowerIterationError(
            f"power iteration did not converge within {max_iter} iterations, "
            "even after shifting the spectrum"
        )
    lam_max, lam_min = hi - sigma, lo + sigma
    return lam_max if abs(lam_max) >= abs(lam_min) else lam_min


def _leading_eigenpair(M: np.ndarray, v0, rtol=1e-10, max_iter=100000):
    lam, vec, ok = _power_iteration(M, v0, rtol, max_iter)
    if ok:
        return lam, vec
    return largest_abs_eigenvalue(M, v0, rtol, max_iter), None


# ---------------------------------------------------------------------------
# Closed-form spectrum for the uniform null
# ---------------------------------------------------------------------------

_POLE_GUARD = 1e-10


def _distance_to_tan_pole(x: float) -> float:
    """Distance from x to the nearest pi/2 + k*pi."""
    return abs((x - math.pi / 2.0 + math.pi / 2.0) % math.pi - math.pi / 2.0)


def _distance_to_cot_pole(x: float) -> float:
    """Distance from x to the nearest k*pi."""
    return abs((x + math.pi / 2.0) % math.pi - math.pi / 2.0)


def uniform_eigen_equation(nu: float) -> float:
    """tan(1/(2 sqrt(nu)))/(6 sqrt(nu)) - cot(1/(2 sqrt(3 nu)))/(2 sqrt(3 nu)).

    Its positive roots are the eigenvalues of the J-operator under the
    uniform null; the largest is about 0.1898.
    """
    if nu <= 0:
        raise ValueError(f"nu must be positive, got {nu}")
    a = 1.0 / (2.0 * math.sqrt(nu))
    b = 1.0 / (2.0 * math.sqrt(3.0 * nu))
    if _distance_to_tan_pole(a) < _POLE_GUARD:
        raise PoleProximityError(f"nu={nu} puts the tan argument within {_POLE_GUARD} of a pole")
    if _distance_to_cot_pole(b) < _POLE_GUARD:
        raise PoleProximityError(f"nu={nu} puts the cot argument within {_POLE_GUARD} of a pole")
    return math.tan(a) / (6.0 * math.sqrt(nu)) - (1.0 / math.tan(b)) / (2.0 * math.sqrt(3.0 * nu))


def _uniform_equation_poles(min_nu: float) -> list[float]:
    """All poles of the eigenvalue equation above min_nu, sorted decreasing.

    tan blows up at nu = 1/(pi^2 (2k+1)^2), cot at nu = 1/(12 pi^2 k^2).
    """
    poles = []
    k = 0
    while True:
        p = 1.0 / (math.pi**2 * (2 * k + 1) ** 2)
        if p < min_nu:
            break
        poles.append(p)
        k += 1
    k = 1
    while True:
        p = 1.0 / (12.0 * math.pi**2 * k**2)
        if p < min_nu:
            break
        poles.append(p)
        k += 1
    return sorted(set(poles), reverse=True)


def solve_uniform_eigenvalues(k: int, scan_points: int = 129) -> list[float]:
    """The k largest positive roots of the uniform eigenvalue equation, decreasing.

    The poles of tan/cot are known in closed form, so the positive axis splits
    into pole-free intervals; each is scanned for sign changes and every
    bracket is bisected to full precision.  Spurious sign flips across poles
    never arise because brackets stay strictly inside one interval.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    roots: list[float] = []
    min_nu = 1e-4
    while True:
        poles = _uniform_equation_poles(min_nu)
        edges = [1.0] + poles + [min_nu]
        roots = []
        for hi, lo in zip(edges[:-1], edges[1:]):
            inner = lo + (hi - lo) * np.linspace(1e-6, 1.0 - 1e-6, scan_points)
            vals = np.array([uniform_eigen_equation(v) for v in inner])
            signs = np.sign(vals)
            for a_idx in np.nonzero(signs[:-1] * signs[1:] < 0)[0]:
                root = brentq(
                    uniform_eigen_equation,
                    inner[a_idx],
                    inner[a_idx + 1],
                    xtol=1e-15,
                    rtol=8.9e-16,
                )
                roots.append(root)
        roots.sort(reverse=True)
        if len(roots) >= k:
            return roots[:k]
        min_nu /= 16.0
        if min_nu < 1e-14:
            raise RuntimeError(f"could not locate {k} roots; found {len(roots)}")


def kappa0_uniform_closed_form() -> float:
    """sup_t |nu_1(t)| for the uniform null: (sqrt(2)/3) / arctan(1/sqrt(2))."""
    return (math.sqrt(2.0) / 3.0) / math.atan(1.0 / math.sqrt(2.0))


# ---------------------------------------------------------------------------
# Auxiliary closed forms behind the uniform kappa_0 derivation
# ---------------------------------------------------------------------------


def psi1(c: float) -> float:
    """(cot(pi/4 - c/2) - 1)/c, the resolvent trace of the triangular operator.

    Series form: sum_n a_n^2 / (1 - c mu_n) with mu_n = 2/((4n+1) pi) and
    a_n = 2 sqrt(2)/((4n+1) pi), n over all integers.  psi1(0) = 1.
    """
    if abs(c) < 1e-8:
        return 1.0 + c / 2.0
    arg = math.pi / 4.0 - c / 2.0
    if _distance_to_cot_pole(arg) < _POLE_GUARD:
        raise PoleProximityError(f"c={c} puts cot within {_POLE_GUARD} of a pole")
    return (1.0 / math.tan(arg) - 1.0) / c


def psi2(c: float) -> float:
    """tan(sqrt(c))/sqrt(c); series form sum_n a_n^2 / (1 - c mu_n^2).

    For c < 0 the expression continues to tanh(sqrt(-c))/sqrt(-c); that
    branch is not exercised by the traced eigenvalue curve.
    """
    if abs(c) < 1e-8:
        return 1.0 + c / 3.0
    if c < 0:
        r = math.sqrt(-c)
        return math.tanh(r) / r
    r = math.sqrt(c)
    if _distance_to_tan_pole(r) < _POLE_GUARD:
        raise PoleProximityError(f"c={c} puts tan within {_POLE_GUARD} of a pole")
    return math.tan(r) / r


def fundamental_equation_residual(t: float, nu: float) -> float:
    """Residual of 1 = psi2(c2) (c1^2 psi1(c1) + sqrt(2 c2)) at (t, nu).

    c1 = (3t-2)/nu and c2 = 2(1-t)^2/nu^2.  For the uniform null, nu_1(t)
    solves this for t in [2/3, 1); at t = 2/3 it reduces to
    1 = sqrt(2) tan(sqrt(2)/(3 nu)), whose largest solution is kappa_0.
    """
    if not (2.0 / 3.0 <= t < 1.0):
        raise ValueError(f"t must lie in [2/3, 1), got {t}")
    if nu == 0.0:
        raise ValueError("nu must be nonzero")
    c1 = (3.0 * t - 2.0) / nu
    c2 = 2.0 * (1.0 - t) ** 2 / nu**2
    return 1.0 - psi2(c2) * (c1**2 * psi1(c1) + math.sqrt(2.0 * c2))


# ---------------------------------------------------------------------------
# The largest-eigenvalue curve t -> nu_1(t) and its supremum
# ---------------------------------------------------------------------------


@dataclass
class EigenCurve:
    """nu_1(t) sampled on a t-grid, with the refined location of sup |nu_1|."""

    dist_name: str
    t_grid: np.ndarray
    nu1_values: np.ndarray
    argmax_t: float
    sup_value: float
    m_coarse: int
    m_fine: int

    def to_csv(self) -> str:
        lines = ["t,nu1"]
        lines += [f"{t!r},{v!r}" for t, v in zip(self.t_grid, self.nu1_values)]
        return "\n".join(lines) + "\n"


def _golden_section_max(f, lo: float, hi: float, tol: float) -> tuple[float, float]:
    """Maximize a unimodal f on [lo, hi] to within tol in the argument."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - inv_phi * (b - a), a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def nu1_curve(
    dist: NullDistribution,
    m_coarse: int = 200,
    m_fine: int = 1000,
    grid_size: int = 256,
    t_tol: float = 1e-4,
) -> EigenCurve:
    """Sweep nu_1(t) on grid_size points over (0, 2A], then refine its peak.

    The coarse sweep runs at resolution m_coarse with each power iteration
    warm-started from the previous t's eigenvector; the peak is then located
    by golden section at resolution m_fine.
    """
    _require_truncatable(dist)
    A = dist.truncation_A
    ts = np.linspace(2.0 * A / grid_size, 2.0 * A, grid_size)
    values = np.empty(grid_size)
    vec = None
    for i, t in enumerate(ts):
        op = build_discrete_operator(dist, "K", m_coarse, t)
        lam, new_vec = _leading_eigenpair(op.matrix, vec)
        values[i] = lam
        if new_vec is not None:
            vec = new_vec

    i_max = int(np.argmax(np.abs(values)))
    lo = ts[max(i_max - 1, 0)]
    hi = ts[min(i_max + 1, grid_size - 1)]

    def fine_abs_nu1(t: float) -> float:
        op = build_discrete_operator(dist, "K", m_fine, t)
        return abs(largest_abs_eigenvalue(op))

    argmax_t, sup_value = _golden_section_max(fine_abs_nu1, lo, hi, t_tol)
    return EigenCurve(dist.name, ts, values, argmax_t, sup_value, m_coarse, m_fine)


# ---------------------------------------------------------------------------
# Cached reference constants and the limit-law sampler
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def reference_nu1(dist_name: str, m: int = 1000) -> float:
    """Largest eigenvalue of the J-operator: closed-form root for the uniform
    null, discretized estimate at resolution m otherwise."""
    if dist_name == "uniform":
        return solve_uniform_eigenvalues(1)[0]
    dist = null_distribution(dist_name)
    return largest_abs_eigenvalue(build_discrete_operator(dist, "J", m))


@lru_cache(maxsize=None)
def reference_kappa0(
    dist_name: str, m_coarse: int = 200, m_fine: int = 1000, grid_size: int = 256
) -> tuple[float, float]:
    """(kappa_0, argmax t): closed form for uniform (argmax 2/3), curve sweep otherwise."""
    if dist_name == "uniform":
        return kappa0_uniform_closed_form(), 2.0 / 3.0
    curve = nu1_curve(null_distribution(dist_name), m_coarse, m_fine, grid_size)
    return curve.sup_value, curve.argmax_t


def limit_eigenvalues(dist: NullDistribution, k: int, m: int = 500) -> np.ndarray:
    """Top-k eigenvalues (by magnitude, sign kept) entering the n*J_n limit law.

    Uniform null: closed-form roots.  Others: full symmetric eigensolve of the
    resolution-m discretized J-operator.
    """
    if dist.name == "uniform":
        return np.array(solve_uniform_eigenvalues(k))
    op = build_discrete_operator(dist, "J", m)
    eigs = np.linalg.eigvalsh(op.matrix)
    if k > eigs.size:
        raise ValueError(f"k={k} exceeds the {eigs.size} available discretized eigenvalues")
    order = np.argsort(-np.abs(eigs), kind="stable")
    return eigs[order[:k]]


def sample_limit_null_jn(
    dist: NullDistribution,
    k_eigen: int,
    n_draws: int,
    rng: np.random.Generator,
    m: int = 500,
    eigenvalues: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Draws of the truncated limit law 3 * sum_{i<=k} nu_i (W_i^2 - 1) of n*J_n."""
    if n_draws < 1:
        raise ValueError(f"n_draws must be >= 1, got {n_draws}")
    nus = np.asarray(eigenvalues) if eigenvalues is not None else limit_eigenvalues(dist, k_eigen, m)
    if nus.size < k_eigen:
        raise ValueError(f"k_eigen={k_eigen} exceeds the {nus.size} supplied eigenvalues")
    nus = nus[:k_eigen]
    out = np.empty(n_draws)
    chunk = max(1, int(4e7) // max(1, k_eigen))
    for lo in range(0, n_draws, chunk):
        size = min(chunk, n_draws - lo)
        w = rng.standard_normal((size, nus.size))
        out[lo : lo + size] = 3.0 * (w * w - 1.0) @ nus
    return out
