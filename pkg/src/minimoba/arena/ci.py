"""Exact (Clopper-Pearson) binomial confidence intervals for win rates."""

from __future__ import annotations

from decimal import ROUND_HALF_UP, Decimal

from scipy.stats import beta


def exact_ci(wins: int, n: int, conf: float = 0.95) -> tuple[float, float]:
    """Clopper-Pearson interval for a binomial proportion, full precision.

    Endpoints come from the beta-quantile identity; wins == 0 pins the lower
    endpoint at exactly 0 and wins == n pins the upper at exactly 1.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    if not 0 <= wins <= n:
        raise ValueError(f"wins must be in [0, {n}]")
    alpha = 1.0 - conf
    lo = 0.0 if wins == 0 else float(beta.ppf(alpha / 2.0, wins, n - wins + 1))
    hi = 1.0 if wins == n else float(beta.ppf(1.0 - alpha / 2.0, wins + 1, n - wins))
    return lo, hi


def display_ci(wins: int, n: int, conf: float = 0.95, digits: int = 3) -> tuple[float, float]:
    """Interval rounded half-up to a fixed number of digits for reporting."""
    lo, hi = exact_ci(wins, n, conf)
    q = Decimal(1).scaleb(-digits)
    r = lambda x: float(Decimal(repr(x)).quantize(q, rounding=ROUND_HALF_UP))
    return r(lo), r(hi)
