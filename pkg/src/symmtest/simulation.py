"""Monte Carlo power studies for the symmetry tests.

``warp_speed_power`` runs the single-resample bootstrap design: every
replication draws one sample x from the alternative, computes the statistic
T, then flips each observation's sign with an independent Rademacher draw and
computes T* on the flipped sample.  Pooling the T* across replications
estimates the null distribution (sign flips restore symmetry exactly), and
the empirical power compares the T pool against the pooled T* critical value.

The algorithm is sometimes printed with the comparison inverted (T* against
the T quantile).  That orientation makes power fall below the nominal size
under any alternative, so the standard orientation is the default here; the
printed one stays available behind ``orientation="as_printed"`` for
side-by-side fidelity checks.

``classical_power`` is the two-phase baseline for the sign and KS tests:
critical values calibrated on null-simulated statistics (the sign test uses
its exact binomial critical region), then rejection rates under the
alternative.

Everything is deterministic given the config seed, at any parallelism, since
each replication owns a counter-derived RNG substream.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import stats as sps

from .distributions import alternative_family, null_distribution
from .rng import rademacher_signs, substream
from .statistics import MIN_SAMPLE_SIZE, STATISTIC_NAMES, observed_test_value

__all__ = [
    "PowerStudyConfig",
    "PowerReport",
    "warp_speed_power",
    "classical_power",
    "run_study_suite",
    "parse_study_config",
    "load_study_config",
    "report_to_csv",
]

_NULL_CALIBRATION_REPS = 10000


@dataclass(frozen=True)
class PowerStudyConfig:
    """Declarative description of one power study."""

    null_dist: str
    alternative: str
    theta_values: tuple
    n: int
    N: int
    seed: int
    beta: Optional[float] = None
    level: float = 0.05
    statistics: tuple = ("jn", "kn")
    orientation: str = "standard"  # or "as_printed"

    def __post_init__(self):
        object.__setattr__(self, "theta_values", tuple(float(t) for t in self.theta_values))
        object.__setattr__(self, "statistics", tuple(s.lower() for s in self.statistics))
        if self.N < 100:
            raise ValueError(f"N must be >= 100, got {self.N}")
        if not 0.0 < self.level < 1.0:
            raise ValueError(f"level must lie in (0, 1), got {self.level}")
        if self.orientation not in ("standard", "as_printed"):
            raise ValueError(f"orientation must be 'standard' or 'as_printed', got {self.orientation!r}")
        unknown = set(self.statistics) - set(STATISTIC_NAMES)
        if unknown:
            raise ValueError(f"unknown statistics {sorted(unknown)}; choose from {STATISTIC_NAMES}")
        needed = max(MIN_SAMPLE_SIZE[s] for s in self.statistics)
        if self.n < needed:
            raise ValueError(f"n={self.n} is below the minimum {needed} for {self.statistics}")
        family = alternative_family(self.alternative, null_distribution(self.null_dist), self.beta)
        lo, hi = family.theta_range
        for t in self.theta_values:
            if not lo <= t <= hi:
                raise ValueError(f"theta={t} outside [{lo}, {hi}] for {self.alternative}")

    def to_dict(self) -> dict:
        return {
            "null": self.null_dist,
            "alt": self.alternative,
            "beta": self.beta,
            "thetas": list(self.theta_values),
            "n": self.n,
            "N": self.N,
            "level": self.level,
            "stats": list(self.statistics),
            "seed": self.seed,
            "orientation": self.orientation,
        }

    def config_hash(self) -> str:
        payload = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha1(payload.encode()).hexdigest()[:16]


@dataclass
class PowerReport:
    """Empirical power per (statistic, theta), plus the config that produced it."""

    config: dict
    method: str  # "warp_speed" or "classical"
    rows: list = field(default_factory=list)  # dicts: statistic, theta, power, se
    wall_time_s: float = 0.0

    def power(self, statistic: str, theta: float) -> float:
        for row in self.rows:
            if row["statistic"] == statistic.lower() and row["theta"] == theta:
                return row["power"]
        raise KeyError(f"no ({statistic}, {theta}) row in this report")

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "method": self.method,
            "rows": self.rows,
            "wall_time_s": self.wall_time_s,
        }


def report_to_csv(report: PowerReport, digits: Optional[int] = None) -> str:
    cfg = report.config
    lines = ["null,alt,theta,n,statistic,power"]
    for row in report.rows:
        p = round(row["power"], digits) if digits is not None else row["power"]
        lines.append(f"{cfg['null']},{cfg['alt']},{row['theta']!r},{cfg['n']},{row['statistic']},{p!r}")
    return "\n".join(lines) + "\n"


def _mc_se(p: float, N: int) -> float:
    return float(np.sqrt(max(p * (1.0 - p), 0.0) / N))


def warp_speed_power(config: PowerStudyConfig) -> PowerReport:
    """Single-resample bootstrap power for J_n/K_n (and optionally sign/KS)."""
    t_start = time.perf_counter()
    family = alternative_family(config.alternative, null_distribution(config.null_dist), config.beta)
    rows = []
    for t_idx, theta in enumerate(config.theta_values):
        t_obs = {s: np.empty(config.N) for s in config.statistics}
        t_star = {s: np.empty(config.N) for s in config.statistics}
        for r in range(config.N):
            rng = substream(config.seed, 1 + t_idx, r)
            x = family.sample(theta, config.n, rng)
            u = rademacher_signs(rng, config.n)
            y = x * u
            for s in config.statistics:
                t_obs[s][r] = observed_test_value(s, x)
                t_star[s][r] = observed_test_value(s, y)
        for s in config.statistics:
            if config.orientation == "standard":
                crit = float(np.quantile(t_star[s], 1.0 - config.level))
                power = float(np.mean(t_obs[s] > crit))
            else:
                crit = float(np.quantile(t_obs[s], 1.0 - config.level))
                power = float(np.mean(t_star[s] > crit))
            rows.append(
                {"statistic": s, "theta": theta, "power": power, "se": _mc_se(power, config.N)}
            )
    return PowerReport(config.to_dict(), "warp_speed", rows, time.perf_counter() - t_start)


def _sign_critical_count(n: int, level: float) -> int:
    """Smallest k with P(X >= k) + P(X <= n-k) <= level for X ~ Bin(n, 1/2)."""
    for k in range((n + 2) // 2, n + 1):
        alpha = sps.binom.sf(k - 1, n, 0.5) + sps.binom.cdf(n - k, n, 0.5)
        if alpha <= level:
            return k
    return n + 1  # never reject; only for tiny n and levels


def classical_power(config: PowerStudyConfig) -> PowerReport:
    """Two-phase Monte Carlo power for the baseline statistics (KS, sign)."""
    unsupported = set(config.statistics) - {"ks", "sign"}
    if unsupported:
        raise ValueError(
            f"classical_power supports only ks and sign, got {sorted(unsupported)}"
        )
    t_start = time.perf_counter()
    dist = null_distribution(config.null_dist)
    family = alternative_family(config.alternative, dist, config.beta)

    crit = {}
    if "ks" in config.statistics:
        null_vals = np.empty(_NULL_CALIBRATION_REPS)
        for r in range(_NULL_CALIBRATION_REPS):
            x = dist.sample(config.n, substream(config.seed, 0, r))
            null_vals[r] = observed_test_value("ks", x)
        crit["ks"] = float(np.quantile(null_vals, 1.0 - config.level))
    if "sign" in config.statistics:
        crit["sign"] = _sign_critical_count(config.n, config.level)

    rows = []
    for t_idx, theta in enumerate(config.theta_values):
        rejections = {s: 0 for s in config.statistics}
        for r in range(config.N):
            x = family.sample(theta, config.n, substream(config.seed, 1 + t_idx, r))
            if "ks" in rejections and observed_test_value("ks", x) > crit["ks"]:
                rejections["ks"] += 1
            if "sign" in rejections:
                positives = int((x > 0).sum())
                k = crit["sign"]
                if positives >= k or positives <= config.n - k:
                    rejections["sign"] += 1
        for s in config.statistics:
            power = rejections[s] / config.N
            rows.append(
                {"statistic": s, "theta": theta, "power": power, "se": _mc_se(power, config.N)}
            )
    return PowerReport(config.to_dict(), "classical", rows, time.perf_counter() - t_start)


def _run_one(config: PowerStudyConfig) -> PowerReport:
    if set(config.statistics) <= {"ks", "sign"}:
        return classical_power(config)
    return warp_speed_power(config)


def run_study_suite(
    configs: Sequence[PowerStudyConfig],
    parallelism: int = 1,
    out_dir: Optional[str] = None,
) -> list[PowerReport]:
    """Run many studies, streaming each finished report to out_dir.

    Reports land in ``<out_dir>/<config_hash>.json`` as they finish, so an
    interrupted suite resumes by skipping configs whose file already exists.
    Results are identical at any parallelism because every config carries its
    own seed.
    """
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)

    def path_for(cfg):
        return os.path.join(out_dir, cfg.config_hash() + ".json") if out_dir else None

    pending = []
    results: dict[int, PowerReport] = {}
    for idx, cfg in enumerate(configs):
        p = path_for(cfg)
        if p is not None and os.path.exists(p):
            with open(p) as fh:
                payload = json.load(fh)
            results[idx] = PowerReport(
                payload["config"], payload["method"], payload["rows"], payload["wall_time_s"]
            )
        else:
            pending.append(idx)

    def store(idx, report):
        results[idx] = report
        p = path_for(configs[idx])
        if p is not None:
            tmp = p + ".tmp"
            with open(tmp, "w") as fh:
                json.dump(report.to_dict(), fh, indent=1)
            os.replace(tmp, p)

    if parallelism <= 1 or len(pending) <= 1:
        for idx in pending:
            store(idx, _run_one(configs[idx]))
    else:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            for idx, report in zip(pending, pool.map(_run_one, [configs[i] for i in pending])):
                store(idx, report)
    return [results[i] for i in range(len(configs))]


# ---------------------------------------------------------------------------
# Study config files: one "key=value" per line, '#' comments
# ---------------------------------------------------------------------------

_CONFIG_KEYS = ("null", "alt", "beta", "thetas", "n", "N", "level", "stats", "seed", "orientation")


def parse_study_config(text: str) -> PowerStudyConfig:
    """Parse the key=value study format (keys: null, alt, beta, thetas, n, N,
    level, stats, seed, orientation)."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in _CONFIG_KEYS:
            raise ValueError(f"line {lineno}: unknown key {key!r}; valid keys: {_CONFIG_KEYS}")
        values[key] = val.strip()
    missing = {"null", "alt", "thetas", "n", "N", "seed"} - set(values)
    if missing:
        raise ValueError(f"missing required keys: {sorted(missing)}")
    return PowerStudyConfig(
        null_dist=values["null"],
        alternative=values["alt"],
        beta=float(values["beta"]) if "beta" in values else None,
        theta_values=tuple(float(v) for v in values["thetas"].split(",") if v.strip()),
        n=int(values["n"]),
        N=int(values["N"]),
        level=float(values.get("level", 0.05)),
        statistics=tuple(s.strip().lower() for s in values.get("stats", "jn,kn").split(",") if s.strip()),
        seed=int(values["seed"]),
        orientation=values.get("orientation", "standard"),
    )


def load_study_config(path: str) -> PowerStudyConfig:
    with open(path) as fh:
        return parse_study_config(fh.read())
