"""Scaling-law diagnostics: tail exponents and log-log slope fits.

The smallest squared singular value of the stacked interference matrix has
a lower tail ~ x^psi and its squared condition number an upper tail
~ x^(-psi), with psi = (K-1)S - L + 1.  Only the exponents are asserted in
tests; the multiplicative constants are fitted, never derived.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelSet, ReferenceBasis


@dataclass(frozen=True)
class TailFit:
    exponent: float          # fitted power-law slope (signed)
    intercept: float         # log-scale constant
    r_squared: float
    window: tuple[float, float]   # quantile window used
    n_points: int


def psi(K: int, S: int, L: int) -> int:
    """Tail exponent (K-1)S - L + 1 (may be <= 0; caller interprets)."""
    return (K - 1) * S - L + 1


def condition_number_sq(g: np.ndarray) -> float:
    """sigma_1^2 / sigma_L^2 of the stacked matrix; inf when sigma_L = 0."""
    s = np.linalg.svd(np.asarray(g, dtype=complex), compute_uv=False)
    smin = s[-1] if s.shape[0] >= g.shape[1] else 0.0
    if smin == 0.0:
        return float("inf")
    return float((s[0] / smin) ** 2)


def empirical_tail_exponent(
    samples,
    lo_q: float,
    hi_q: float,
    tail: str = "lower",
    n_points: int = 24,
) -> TailFit:
    """Least-squares power-law slope of the empirical CDF over a quantile window.

    ``tail="lower"`` fits log F(x) vs log x (small-x behavior);
    ``tail="upper"`` fits log(1 - F(x)) vs log x.
    """
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.shape[0]
    if n < 10_000:
        raise ValueError(f"need at least 1e4 samples, got {n}")
    if not 0.0 < lo_q < hi_q < 1.0:
        raise ValueError("need 0 < lo_q < hi_q < 1")
    if tail not in ("lower", "upper"):
        raise ValueError(f"tail must be 'lower' or 'upper', got {tail!r}")
    ranks = np.unique(
        np.clip(
            np.geomspace(max(lo_q * n, 1.0), hi_q * n, n_points).astype(int),
            1,
            n - 1,
        )
    )
    if ranks.shape[0] < 8:
        raise ValueError("quantile window too narrow: fewer than 8 distinct points")
    xs = x[ranks - 1]
    cdf = ranks / n
    ys = cdf if tail == "lower" else 1.0 - cdf
    if np.any(xs <= 0.0) or np.any(ys <= 0.0):
        raise ValueError("tail fit needs positive samples and probabilities")
    slope, intercept, r2 = loglog_slope(xs, ys)
    return TailFit(
        exponent=slope,
        intercept=intercept,
        r_squared=r2,
        window=(lo_q, hi_q),
        n_points=int(ranks.shape[0]),
    )


def loglog_slope(xs, ys) -> tuple[float, float, float]:
    """Least squares of log y on log x: (slope, intercept, r_squared)."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape[0] < 3:
        raise ValueError("need at least 3 points")
    if np.any(xs <= 0.0) or np.any(ys <= 0.0):
        raise ValueError("log-log fit needs strictly positive data")
    lx, ly = np.log(xs), np.log(ys)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - float(np.sum(resid ** 2)) / ss_tot
    return float(slope), float(intercept), r2


def sum_lif(selections) -> float:
    """Total leakage of all selected users across cells."""
    return float(sum(np.sum(sel.lifs) for sel in selections))


def cross_leakage_sum(channels: ChannelSet, bases: ReferenceBasis, selections) -> float:
    """Unaligned inter-cell interference power summed over all receiving BSs.

    Independent regrouping of the same terms as :func:`sum_lif`; the two
    must agree to roundoff (network identity).
    """
    total = 0.0
    K = channels.K
    for i in range(1, K + 1):
        u = bases.u_of(i)
        for sel in selections:
            if sel.cell == i:
                continue
            for t, j in enumerate(sel.selected):
                v = channels.mat(i, sel.cell, j) @ sel.weights[t]
                total += float(np.linalg.norm(u.conj().T @ v) ** 2)
    return total
