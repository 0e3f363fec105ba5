"""Test statistics for symmetry about zero, plus a sign-flip resampling p-value.

Two statistics exploit the fact that for X, Y i.i.d. symmetric about zero,
|X - Y| and |X + Y| are equidistributed:

* ``compute_jn`` -- an integral-type U-statistic of degree 3 whose kernel
  compares |X_i - X_j| and |X_i + X_j| against a third |X_k|;
* ``compute_kn`` -- the Kolmogorov-type distance between the pairwise
  empirical distribution functions of |X_i - X_j| and |X_i + X_j|.

``compute_sign_statistic`` and ``compute_ks_symmetry`` are the classical
baselines.  All four are scale-free and invariant under a global sign flip.

Both J_n and K_n run in O(n^2 log n).  The key identity used throughout: if
y = x * u for signs u in {-1, +1}^n, then |y_i - y_j| equals |x_i - x_j| when
u_i = u_j and |x_i + x_j| otherwise, while |y_k| = |x_k|.  Sign flips
therefore only swap each pair's "difference" and "sum" values, which makes
J_n under flips a quadratic form in u and lets the whole bootstrap reuse one
set of pairwise precomputations.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, sqrt
from typing import Optional

import numpy as np

from .rng import substream

__all__ = [
    "TestReport",
    "compute_jn",
    "compute_kn",
    "compute_sign_statistic",
    "compute_ks_symmetry",
    "bootstrap_p_value",
    "STATISTIC_NAMES",
    "MIN_SAMPLE_SIZE",
]

STATISTIC_NAMES = ("jn", "kn", "sign", "ks")
MIN_SAMPLE_SIZE = {"jn": 3, "kn": 2, "sign": 1, "ks": 1}


@dataclass
class TestReport:
    """Outcome of one symmetry test on one sample."""

    statistic_name: str
    statistic_value: float
    scaled_value: Optional[float]  # n*J_n or n*K_n; None for sign/ks
    p_value: Optional[float]
    n: int
    resamples_B: int
    seed: Optional[int]

    def to_dict(self):
        return {
            "statistic": self.statistic_name,
            "value": self.statistic_value,
            "scaled_value": self.scaled_value,
            "p_value": self.p_value,
            "n": self.n,
            "B": self.resamples_B,
            "seed": self.seed,
        }


def _as_sample(x, min_n: int, who: str) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"{who} expects a 1-d sample, got shape {x.shape}")
    if x.size < min_n:
        raise ValueError(f"{who} requires n >= {min_n}, got n = {x.size}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{who} requires finite observations")
    return x


def _pair_values(x: np.ndarray):
    """|x_i - x_j| and |x_i + x_j| over unordered pairs i < j."""
    i, j = np.triu_indices(x.size, k=1)
    return i, j, np.abs(x[i] - x[j]), np.abs(x[i] + x[j])


def _jn_pair_weights(x: np.ndarray):
    """For each pair i<j: (#k excluded of i,j with |x_k| > |x_i - x_j|) minus
    the same count against |x_i + x_j|.  J_n is their sum over pairs divided
    by 3*C(n,3), and under a sign flip u the pair contributes with sign u_i*u_j.
    """
    n = x.size
    absx = np.abs(x)
    sorted_abs = np.sort(absx)
    i, j, d, s = _pair_values(x)
    count_d = n - np.searchsorted(sorted_abs, d, side="right")
    count_s = n - np.searchsorted(sorted_abs, s, side="right")
    count_d -= (absx[i] > d).astype(np.int64) + (absx[j] > d).astype(np.int64)
    count_s -= (absx[i] > s).astype(np.int64) + (absx[j] > s).astype(np.int64)
    return i, j, count_d - count_s


def compute_jn(sample) -> float:
    """Integral-type symmetry statistic J_n; values in [-1, 1], large |J_n| significant."""
    x = _as_sample(sample, 3, "compute_jn")
    _, _, w = _jn_pair_weights(x)
    return float(w.sum()) / (3.0 * comb(x.size, 3))


def compute_jn_oracle(sample) -> float:
    """O(n^3) triple loop over the symmetrized kernel; reference implementation."""
    x = _as_sample(sample, 3, "compute_jn_oracle")
    n = x.size
    total = 0.0
    for a in range(n):
        for b in range(a + 1, n):
            d = abs(x[a] - x[b])
            s = abs(x[a] + x[b])
            for c in range(n):
                if c == a or c == b:
                    continue
                total += int(d < abs(x[c])) - int(s < abs(x[c]))
    return total / (3.0 * comb(n, 3))


def _kn_from_steps(values: np.ndarray, steps: np.ndarray, n_pairs: int) -> float:
    """Maximum of |cumulative step sum| evaluated to the right of each jump."""
    order = np.argsort(values, kind="stable")
    v = values[order]
    cum = np.cumsum(steps[order])
    last_of_ties = np.ones(v.size, dtype=bool)
    last_of_ties[:-1] = v[1:] != v[:-1]
    return float(np.max(np.abs(cum[last_of_ties]))) / n_pairs


def compute_kn(sample) -> float:
    """Kolmogorov-type symmetry statistic K_n; values in [0, 1].

    K_n = sup_t |G_n(t) - H_n(t)| for the pairwise empirical d.f.s G_n of
    |x_i - x_j| and H_n of |x_i + x_j|.  Both jump only at the pairwise
    values, and with strict "<" in their definition the supremum is the right
    limit at a jump, so counting with "<=" at each candidate is exact.
    """
    x = _as_sample(sample, 2, "compute_kn")
    _, _, d, s = _pair_values(x)
    values = np.concatenate([d, s])
    steps = np.concatenate([np.ones(d.size), -np.ones(s.size)])
    return _kn_from_steps(values, steps, comb(x.size, 2))


def compute_sign_statistic(sample) -> float:
    """Standardized two-sided sign statistic |#{x_i > 0} - n/2| / (sqrt(n)/2)."""
    x = _as_sample(sample, 1, "compute_sign_statistic")
    n = x.size
    return abs(float((x > 0).sum()) - n / 2.0) / (sqrt(n) / 2.0)


def compute_ks_symmetry(sample) -> float:
    """Kolmogorov-Smirnov symmetry statistic sup_x |1 - F_n(x) - F_n(-x^-)|.

    The statistic is piecewise constant with jumps only at +-x_i; it is
    evaluated at every jump point and at the midpoints between consecutive
    ones, which covers every attained value exactly.
    """
    x = _as_sample(sample, 1, "compute_ks_symmetry")
    xs = np.sort(x)
    cand = np.unique(np.concatenate([x, -x]))
    pts = np.concatenate([cand, 0.5 * (cand[1:] + cand[:-1])]) if cand.size > 1 else cand
    n = x.size
    right = np.searchsorted(xs, pts, side="right") / n  # F_n(p)
    left_of_neg = np.searchsorted(xs, -pts, side="left") / n  # F_n((-p)^-)
    return float(np.max(np.abs(1.0 - right - left_of_neg)))


_STAT_FN = {
    "jn": compute_jn,
    "kn": compute_kn,
    "sign": compute_sign_statistic,
    "ks": compute_ks_symmetry,
}


def statistic_function(name: str):
    """The statistic callable for a canonical name in STATISTIC_NAMES."""
    key = name.lower()
    if key not in _STAT_FN:
        raise ValueError(f"unknown statistic {name!r}; choose from {STATISTIC_NAMES}")
    return _STAT_FN[key]


def observed_test_value(name: str, x: np.ndarray) -> float:
    """The quantity whose large values are significant: |J_n| for jn, else the statistic."""
    value = statistic_function(name)(x)
    return abs(value) if name == "jn" else value


def resampled_test_values(name: str, x: np.ndarray, flips: np.ndarray) -> np.ndarray:
    """Test values on x * u for each sign row u of ``flips``, in row order.

    jn and kn reuse the pairwise precomputations described in the module
    docstring; sign is a vectorized count; ks recomputes per row.
    """
    name = name.lower()
    B, n = flips.shape
    if n != x.size:
        raise ValueError("flip rows must match the sample length")
    if name == "jn":
        i, j, w = _jn_pair_weights(x)
        W = np.zeros((n, n))
        W[i, j] = w
        W[j, i] = w
        quad = np.einsum("bi,ij,bj->b", flips, W, flips) / 2.0
        return np.abs(quad) / (3.0 * comb(n, 3))
    if name == "kn":
        i, j, d, s = _pair_values(x)
        values = np.concatenate([d, s])
        order = np.argsort(values, kind="stable")
        v = values[order]
        last_of_ties = np.ones(v.size, dtype=bool)
        last_of_ties[:-1] = v[1:] != v[:-1]
        n_pairs = comb(n, 2)
        out = np.empty(B)
        chunk = max(1, int(2e7) // (2 * values.size))
        for lo in range(0, B, chunk):
            u = flips[lo : lo + chunk]
            sigma = u[:, i] * u[:, j]
            steps = np.concatenate([sigma, -sigma], axis=1)[:, order]
            cum = np.cumsum(steps, axis=1)
            out[lo : lo + chunk] = np.max(np.abs(cum[:, last_of_ties]), axis=1) / n_pairs
        return out
    if name == "sign":
        counts = ((flips * x) > 0).sum(axis=1).astype(float)
        return np.abs(counts - n / 2.0) / (sqrt(n) / 2.0)
    fn = statistic_function(name)
    return np.array([fn(x * u) for u in flips])


def bootstrap_p_value(sample, statistic_name: str, B: int, seed: int) -> TestReport:
    """Sign-flip resampling p-value for one of the four statistics.

    Resamples are the observed data with independent Rademacher signs, which
    reproduces the null law of any of these statistics when the data are
    symmetric.  p = (1 + #{T*_b >= T_obs}) / (B + 1), so p is never zero.
    """
    name = statistic_name.lower()
    if name not in _STAT_FN:
        raise ValueError(f"unknown statistic {statistic_name!r}; choose from {STATISTIC_NAMES}")
    if B < 100:
        raise ValueError(f"B must be >= 100, got {B}")
    x = _as_sample(sample, MIN_SAMPLE_SIZE[name], f"bootstrap_p_value[{name}]")
    n = x.size

    value = statistic_function(name)(x)
    t_obs = abs(value) if name == "jn" else value

    rng = substream(seed, 0)
    flips = rng.integers(0, 2, size=(B, n)) * 2 - 1
    t_star = resampled_test_values(name, x, flips)
    p = (1.0 + int(np.sum(t_star >= t_obs))) / (B + 1.0)

    scaled = n * value if name in ("jn", "kn") else None
    return TestReport(
        statistic_name=name,
        statistic_value=float(value),
        scaled_value=scaled,
        p_value=p,
        n=n,
        resamples_B=B,
        seed=seed,
    )


def test_report(sample, statistic_name: str, B: int = 0, seed: Optional[int] = None) -> TestReport:
    """TestReport with or without a bootstrap p-value (B = 0 skips resampling)."""
    name = statistic_name.lower()
    if B > 0:
        if seed is None:
            raise ValueError("a seed is required when B > 0")
        return bootstrap_p_value(sample, name, B, seed)
    x = _as_sample(sample, MIN_SAMPLE_SIZE.get(name, 1), f"test_report[{name}]")
    value = statistic_function(name)(x)
    scaled = x.size * value if name in ("jn", "kn") else None
    return TestReport(name, float(value), scaled, None, x.size, 0, seed)
