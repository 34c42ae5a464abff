"""
Closed-form degree laws of the Barabási-Albert model

- the degree pmf d(k) = 2 m0 (m0 + 1) / (k (k + 1) (k + 2)) on k >= m0
- the proposed expected-degree density p(d) = 2 m0^2 / d^3 on d >= m0

Both are compared with data through the sup distance between CDFs, which
needs no binning.
"""

import math
from typing import Sequence, Union

import numpy as np

from .errors import DomainError, ParameterError

LAWS = ("pmf", "density")

ArrayLike = Union[float, Sequence[float], np.ndarray]


def _check_m0(m0: int) -> None:
    if m0 < 1:
        raise ParameterError(f"m0 must be >= 1, got {m0}", m0=m0)


def ba_degree_pmf(k: int, m0: int) -> float:
    """
    Probability that a BA vertex has degree k

    Args:
        k (int): Degree, k >= m0
        m0 (int): BA parameter

    Returns:
        float: 2 m0 (m0 + 1) / (k (k + 1) (k + 2))

    Raises:
        DomainError: If k < m0
    """
    _check_m0(m0)
    if k < m0:
        raise DomainError(f"degree pmf supported on k >= {m0}, got {k}", k=k, m0=m0)
    return 2.0 * m0 * (m0 + 1) / (k * (k + 1.0) * (k + 2.0))


def ba_degree_cdf(k: ArrayLike, m0: int) -> np.ndarray:
    """
    CDF of the degree pmf, P(D <= k) = 1 - m0 (m0 + 1) / ((k + 1)(k + 2))

    Zero below m0; non-integer k is floored.
    """
    _check_m0(m0)
    k = np.floor(np.asarray(k, dtype=np.float64))
    cdf = 1.0 - m0 * (m0 + 1.0) / ((k + 1.0) * (k + 2.0))
    return np.where(k < m0, 0.0, cdf)


def ba_degree_mean(m0: int) -> float:
    """Mean of the degree pmf, 2 m0"""
    _check_m0(m0)
    return 2.0 * m0


def expected_degree_density(d: float, m0: int) -> float:
    """
    Proposed density of BA expected degrees

    Args:
        d (float): Expected degree, d >= m0
        m0 (int): BA parameter

    Returns:
        float: 2 m0^2 / d^3

    Raises:
        DomainError: If d < m0
    """
    _check_m0(m0)
    if d < m0:
        raise DomainError(f"density supported on d >= {m0}, got {d}", d=d, m0=m0)
    return 2.0 * m0 * m0 / (d ** 3)


def expected_degree_cdf(d: ArrayLike, m0: int) -> np.ndarray:
    """CDF of the proposed density, 1 - m0^2 / d^2 on d >= m0, zero below"""
    _check_m0(m0)
    d = np.asarray(d, dtype=np.float64)
    with np.errstate(divide="ignore"):
        cdf = 1.0 - (m0 * m0) / (d * d)
    return np.where(d < m0, 0.0, cdf)


def law_cdf(law: str, m0: int):
    """
    CDF callable for a named law

    Raises:
        ParameterError: If the law is neither "pmf" nor "density"
    """
    if law == "pmf":
        return lambda x: ba_degree_cdf(x, m0)
    if law == "density":
        return lambda x: expected_degree_cdf(x, m0)
    raise ParameterError(f"unknown law {law!r}", allowed=list(LAWS))


def histogram_compare(sample: Sequence[float], law: str, m0: int) -> float:
    """
    Sup distance between a sample's empirical CDF and a degree law's CDF

    The distance is taken over [m0, max(sample)]. For the continuous density
    both one-sided limits of the empirical CDF at every jump are checked.

    Args:
        sample: Degree or expected-degree values
        law (str): "pmf" (Eq. degree law) or "density" (2 m0^2 / d^3)
        m0 (int): BA parameter

    Returns:
        float: Sup distance in [0, 1]

    Raises:
        ParameterError: On an empty sample or unknown law
    """
    values = np.sort(np.asarray(sample, dtype=np.float64).ravel())
    if values.size == 0:
        raise ParameterError("cannot compare an empty sample")
    cdf = law_cdf(law, m0)
    top = values[-1]
    if top < m0:
        # every observation sits below the law's support
        return 1.0

    if law == "pmf":
        grid = np.arange(m0, math.floor(top) + 1, dtype=np.float64)
        empirical = np.searchsorted(values, grid, side="right") / values.size
        return float(np.max(np.abs(empirical - cdf(grid))))

    points = np.unique(values[values >= m0])
    if values[0] < m0 or points[0] > m0:
        points = np.concatenate([[float(m0)], points])
    upper = np.searchsorted(values, points, side="right") / values.size
    lower = np.searchsorted(values, points, side="left") / values.size
    law_values = cdf(points)
    return float(max(np.max(np.abs(upper - law_values)), np.max(np.abs(lower - law_values))))


def sample_degree_law(law: str, m0: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """
    Inverse-CDF sampler for both laws

    Args:
        law (str): "pmf" or "density"
        m0 (int): BA parameter
        size (int): Number of draws
        rng (np.random.Generator): Random source

    Returns:
        np.ndarray: Integer degrees for "pmf", reals for "density"
    """
    _check_m0(m0)
    u = rng.random(size)
    if law == "density":
        return m0 / np.sqrt(1.0 - u)
    if law != "pmf":
        raise ParameterError(f"unknown law {law!r}", allowed=list(LAWS))
    # smallest k >= m0 with (k + 1)(k + 2) >= m0 (m0 + 1) / (1 - u)
    bound = m0 * (m0 + 1.0) / (1.0 - u)
    k = np.ceil((-3.0 + np.sqrt(1.0 + 4.0 * bound)) / 2.0)
    k = np.maximum(k, m0)
    # repair rounding at the boundary
    k = np.where(ba_degree_cdf(k - 1, m0) >= u, k - 1, k)
    k = np.where(ba_degree_cdf(k, m0) < u, k + 1, k)
    return np.maximum(k, m0).astype(np.int64)
