"""Throughput, coverage, and energy metrics over Monte-Carlo realizations."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import from_db

SINR_COVERAGE_THRESHOLD_DB = -6.5   # lowest MCS threshold


@dataclass(frozen=True)
class RealizationStats:
    """Per-realization cluster metrics; probabilities in [0, 1]."""

    t_alpha_bps: float
    sinr_coverage: float
    rate_coverage: float
    energy_saving_pct: float
    n_users: int
    n_outage: int
    theta_mean: float = 0.0


@dataclass(frozen=True)
class MetricSummary:
    """Sample mean with a normal-approximation 95% confidence interval."""

    mean: float
    std: float
    ci95: float
    n: int

    @property
    def degenerate(self) -> bool:
        """Single-realization summaries carry a zero-width interval."""
        return self.n < 2


def alpha_fair_throughput(lams, alpha: float) -> float:
    """Alpha-fair throughput of a positive rate set (geometric mean at 1).

    Callers exclude zero-rate users first and report them as outage.
    """
    lam = np.asarray(lams, dtype=float)
    if lam.size == 0:
        raise ValueError("throughput of an empty rate set is undefined")
    if np.any(lam <= 0):
        raise ValueError("throughput requires strictly positive rates")
    if alpha == 1.0:
        return float(np.exp(np.mean(np.log(lam))))
    return float(np.mean(lam ** (1.0 - alpha)) ** (1.0 / (1.0 - alpha)))


def sinr_coverage(gamma_lin, threshold_db: float = SINR_COVERAGE_THRESHOLD_DB) -> float:
    """Fraction of users whose best (or joint, for CoMP) SINR clears the floor."""
    g = np.asarray(gamma_lin, dtype=float)
    if g.size == 0:
        return 0.0
    return float(np.mean(g >= from_db(threshold_db)))


def rate_coverage(lams, rate_threshold_bps: float) -> float:
    """Fraction of users whose scheduled rate reaches the operator threshold."""
    if rate_threshold_bps < 0:
        raise ValueError("rate threshold must be >= 0")
    lam = np.asarray(lams, dtype=float)
    if lam.size == 0:
        return 0.0
    return float(np.mean(lam >= rate_threshold_bps))


def summarize(values) -> MetricSummary:
    """Mean, sample stddev, and 95% CI half-width of one metric."""
    v = np.asarray(list(values), dtype=float)
    if v.size == 0:
        raise ValueError("at least one realization required")
    mean = float(v.mean())
    if v.size < 2:
        return MetricSummary(mean=mean, std=0.0, ci95=0.0, n=1)
    std = float(v.std(ddof=1))
    return MetricSummary(mean=mean, std=std, ci95=1.96 * std / math.sqrt(v.size), n=v.size)


def aggregate(stats: list[RealizationStats]) -> dict[str, MetricSummary]:
    """Aggregate every metric of a realization batch."""
    fields = ("t_alpha_bps", "sinr_coverage", "rate_coverage",
              "energy_saving_pct", "theta_mean", "n_users", "n_outage")
    return {name: summarize(getattr(s, name) for s in stats) for name in fields}
