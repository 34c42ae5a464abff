"""
Statistics used to compare the two ensembles

Two-sample Kolmogorov-Smirnov test with the asymptotic p-value, sample
standardization, the two principal-vector distance measures and log-log
regression for scaling exponents.
"""

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np
from scipy import special, stats as sps

from .errors import ContractError, DegeneracyError, DimensionError, DomainError, ParameterError

# Allowed deviation of an input's 2-norm from 1 in euclid_half_distance
UNIT_NORM_TOL = 1e-6


@dataclass(frozen=True)
class KsResult:
    """
    Two-sample Kolmogorov-Smirnov outcome

    Attributes:
        d_stat (float): sup |F_x - F_y|, in [0, 1]
        p_value (float): Asymptotic two-sided p-value, in [0, 1]
        n1 (int): Size of the first sample
        n2 (int): Size of the second sample
    """

    d_stat: float
    p_value: float
    n1: int
    n2: int


def _sample(x: Sequence[float], minimum: int, name: str = "sample") -> np.ndarray:
    values = np.asarray(x, dtype=np.float64).ravel()
    if values.size < minimum:
        raise ParameterError(f"{name} needs at least {minimum} values, got {values.size}", size=int(values.size))
    return values


def ks_statistic(x: Sequence[float], y: Sequence[float]) -> float:
    """
    Two-sample KS distance D = sup_t |F_x(t) - F_y(t)|

    Both empirical CDFs are evaluated on the pooled sorted values.

    Args:
        x: First sample
        y: Second sample

    Returns:
        float: D in [0, 1]
    """
    x = np.sort(_sample(x, 1, "x"))
    y = np.sort(_sample(y, 1, "y"))
    pooled = np.concatenate([x, y])
    cdf_x = np.searchsorted(x, pooled, side="right") / x.size
    cdf_y = np.searchsorted(y, pooled, side="right") / y.size
    return float(np.max(np.abs(cdf_x - cdf_y)))


def kolmogorov_sf(lam: float) -> float:
    """
    Survival function of the Kolmogorov distribution

    Q(lam) = 2 * sum_{k>=1} (-1)^(k-1) exp(-2 k^2 lam^2), clipped to [0, 1].
    """
    return float(np.clip(special.kolmogorov(lam), 0.0, 1.0))


def ks_two_sample(x: Sequence[float], y: Sequence[float]) -> KsResult:
    """
    Two-sample Kolmogorov-Smirnov test

    The p-value is Q(lam) with lam = (sqrt(ne) + 0.12 + 0.11 / sqrt(ne)) * D
    and ne = n1 n2 / (n1 + n2).

    Args:
        x: First sample, at least two values
        y: Second sample, at least two values

    Returns:
        KsResult: Statistic, p-value and sample sizes

    Raises:
        ParameterError: If a sample has fewer than two values
    """
    x = _sample(x, 2, "x")
    y = _sample(y, 2, "y")
    d = ks_statistic(x, y)
    root = math.sqrt(x.size * y.size / (x.size + y.size))
    p = kolmogorov_sf((root + 0.12 + 0.11 / root) * d)
    return KsResult(d_stat=d, p_value=p, n1=int(x.size), n2=int(y.size))


def ks_null_distribution(n1: int, n2: int) -> Dict[float, float]:
    """
    Exact null distribution of D for two tiny samples

    Enumerates every assignment of n1 + n2 distinct ranks to the two samples,
    all equally likely under the null hypothesis.

    Args:
        n1 (int): First sample size
        n2 (int): Second sample size

    Returns:
        dict: D value -> probability

    Raises:
        ParameterError: If the enumeration would exceed one million cases
    """
    total = math.comb(n1 + n2, n1)
    if total > 1_000_000:
        raise ParameterError("exact enumeration too large", n1=n1, n2=n2, cases=total)
    ranks = np.arange(n1 + n2, dtype=np.float64)
    counts: Counter = Counter()
    for chosen in itertools.combinations(range(n1 + n2), n1):
        mask = np.zeros(n1 + n2, dtype=bool)
        mask[list(chosen)] = True
        counts[round(ks_statistic(ranks[mask], ranks[~mask]), 12)] += 1
    return {d: c / total for d, c in sorted(counts.items())}


def mean(x: Sequence[float]) -> float:
    """
    Arithmetic mean

    Raises:
        ParameterError: On an empty sample
    """
    return float(np.mean(_sample(x, 1)))


def standardize(x: Sequence[float]) -> np.ndarray:
    """
    Shift to mean 0 and scale to sample standard deviation 1 (divisor n-1)

    Args:
        x: Sample with at least two values

    Returns:
        np.ndarray: Standardized sample

    Raises:
        DegeneracyError: If the sample has zero variance
    """
    values = _sample(x, 2)
    spread = np.std(values, ddof=1)
    if spread == 0:
        raise DegeneracyError("cannot standardize a zero-variance sample", size=int(values.size))
    return (values - values.mean()) / spread


def _pair(a: Sequence[float], b: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionError(f"length mismatch {a.shape} vs {b.shape}")
    return a, b


def inf_distance(a: Sequence[float], b: Sequence[float]) -> float:
    """
    Uniform-norm distance max_i |a_i - b_i|

    Raises:
        DimensionError: If the lengths differ
    """
    a, b = _pair(a, b)
    return float(np.max(np.abs(a - b))) if a.size else 0.0


def euclid_half_distance(a: Sequence[float], b: Sequence[float]) -> float:
    """
    Half-scaled Euclidean distance sqrt(sum (a_i - b_i)^2 / 2)

    For entrywise nonnegative unit vectors the value lies in [0, 1].

    Raises:
        DimensionError: If the lengths differ
        ContractError: If an input is not unit norm within UNIT_NORM_TOL
    """
    a, b = _pair(a, b)
    for name, vector in (("a", a), ("b", b)):
        norm = float(np.linalg.norm(vector))
        if abs(norm - 1.0) > UNIT_NORM_TOL:
            raise ContractError(f"{name} must be a unit vector, has norm {norm:.9f}", norm=norm)
    return float(math.sqrt(0.5 * np.sum((a - b) ** 2)))


def loglog_slope(points: Sequence[Tuple[float, float]]) -> Tuple[float, float]:
    """
    Least-squares fit of ln(value) against ln(n)

    Args:
        points: (n, value) pairs, all positive, at least two distinct n

    Returns:
        tuple: (slope, intercept)

    Raises:
        DomainError: If a coordinate is not positive
        ParameterError: With fewer than two distinct n values
    """
    data = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if np.any(data <= 0):
        raise DomainError("log-log regression needs positive coordinates")
    if np.unique(data[:, 0]).size < 2:
        raise ParameterError("log-log regression needs at least two distinct n values")
    fit = sps.linregress(np.log(data[:, 0]), np.log(data[:, 1]))
    return float(fit.slope), float(fit.intercept)
