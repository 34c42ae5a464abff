"""
Continuous-time quantum spatial search on graphs

The walk evolves the uniform superposition |s> under M = gamma A + |w><w|,
where A is the adjacency matrix, w the marked vertex and gamma the jumping
rate 1 / lambda_1(A). The success probability is p(t) = |<w| exp(i t M) |s>|^2.
M is real symmetric and s, w have real amplitudes, so the sign of the
exponent does not change p(t).

Two backends are available: a dense eigendecomposition of M reused for the
whole time grid, and a Krylov backend (SciPy's expm_multiply) stepping the
state from one grid time to the next. expm_multiply picks its Taylor degree
and step count for double-precision truncation, so the tolerance does not
steer it. The tolerance is checked against the norm drift of the stepped
state and a warning is logged when the drift exceeds it.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg, sparse
from scipy.sparse.linalg import expm_multiply

from .errors import CapacityError, DegeneracyError, ParameterError
from .generators import derive_seed, generate_ba, generate_cl
from .graph import Graph
from .parallel import map_ordered
from .spectra import extreme_eigs
from .stats import loglog_slope

logger = logging.getLogger(__name__)

# Largest order accepted by the dense backend
DENSE_LIMIT = 10_000

# "auto" uses the dense backend up to this order
AUTO_DENSE_MAX = 2000

# Grid points with smaller success probability are ignored by the expected-time rule
MIN_PROBABILITY = 1e-12

BACKENDS = ("auto", "dense", "krylov")

RULES = ("plateau", "expected")


@dataclass
class EvolutionConfig:
    """
    Evolution settings

    Attributes:
        backend (str): "dense", "krylov" or "auto"
        tolerance (float): Norm drift of the Krylov state above which a
            warning is logged. The dense backend and expm_multiply both run
            at double precision and do not use it to pick a step size.
        dense_limit (int): Largest order for the dense backend
    """

    backend: str = "auto"
    tolerance: float = 1e-9
    dense_limit: int = DENSE_LIMIT

    def validate(self) -> None:
        if self.backend not in BACKENDS:
            raise ParameterError(f"unknown backend {self.backend!r}", allowed=list(BACKENDS))
        if not self.tolerance > 0:
            raise ParameterError(f"tolerance must be > 0, got {self.tolerance}")


@dataclass
class SearchOperator:
    """
    Search operator M = gamma A + |marked><marked|

    Attributes:
        graph (Graph): Underlying graph
        marked (int): Marked vertex id
        gamma (float): Jumping rate
    """

    graph: Graph
    marked: int
    gamma: float

    def __post_init__(self):
        if not self.gamma > 0:
            raise ParameterError(f"jumping rate must be > 0, got {self.gamma}", gamma=self.gamma)
        if not 0 <= self.marked < self.graph.n:
            raise ParameterError(
                f"marked vertex {self.marked} outside [0, {self.graph.n})", marked=self.marked, n=self.graph.n
            )

    @property
    def n(self) -> int:
        return self.graph.n

    def matrix(self) -> sparse.csr_matrix:
        """M as a sparse CSR matrix"""
        oracle = sparse.csr_matrix(([1.0], ([self.marked], [self.marked])), shape=(self.n, self.n))
        return (self.gamma * self.graph.to_csr() + oracle).tocsr()


@dataclass
class SearchRun:
    """
    Success probabilities over a time grid

    Attributes:
        times (np.ndarray): Ascending grid starting at 0
        probs (np.ndarray): p(t) per grid point
        n (int): Graph order
        marked (int): Marked vertex
        t_opt (float, optional): Chosen measurement time
        p_opt (float, optional): Probability at t_opt
        expected_time (float, optional): (t_opt + c ln n) / p_opt
    """

    times: np.ndarray
    probs: np.ndarray
    n: int
    marked: int
    t_opt: Optional[float] = None
    p_opt: Optional[float] = None
    expected_time: Optional[float] = None


@dataclass
class PlateauChoice:
    """Result of the plateau rule"""

    index: int
    t_opt: float
    p_opt: float
    fallback: bool = False


@dataclass
class ScalingResult:
    """
    Scaling exponent of the minimal expected search time

    Attributes:
        alpha (float): Log-log slope
        intercept (float): Log-log intercept
        table (list): (order, mean expected time) rows
    """

    alpha: float
    intercept: float
    table: List[Tuple[int, float]] = field(default_factory=list)


def jumping_rate(lambda1: float) -> float:
    """
    Jumping rate 1 / lambda_1

    Raises:
        ParameterError: If lambda_1 <= 0 (edgeless graph)
    """
    if not lambda1 > 0:
        raise ParameterError(f"jumping rate needs lambda_1 > 0, got {lambda1}", lambda1=lambda1)
    return 1.0 / lambda1


def search_operator(g: Graph, marked: int, gamma: Optional[float] = None) -> SearchOperator:
    """
    Build the search operator with gamma = 1 / lambda_1 unless given

    Args:
        g (Graph): Graph to search
        marked (int): Marked vertex id
        gamma (float, optional): Jumping rate override

    Returns:
        SearchOperator: The operator
    """
    if gamma is None:
        lambda1 = extreme_eigs(g)[0] if g.n >= 2 else 0.0
        gamma = jumping_rate(lambda1)
    return SearchOperator(graph=g, marked=marked, gamma=gamma)


def uniform_time_grid(tmax: float, dt: float) -> np.ndarray:
    """
    Grid 0, dt, ..., tmax (inclusive when tmax is a multiple of dt)

    Raises:
        ParameterError: If dt <= 0 or tmax < 0
    """
    if not dt > 0 or tmax < 0:
        raise ParameterError(f"invalid grid tmax={tmax} dt={dt}")
    steps = int(math.floor(tmax / dt + 1e-9))
    return np.arange(steps + 1) * dt


def scaling_time_grid(n: int, points: int = 100) -> np.ndarray:
    """Grid 0, 0.01 pi sqrt(n), ..., pi sqrt(n)"""
    return np.linspace(0.0, math.pi * math.sqrt(n), points + 1)


def _resolve_backend(op: SearchOperator, cfg: EvolutionConfig) -> str:
    cfg.validate()
    backend = cfg.backend
    if backend == "auto":
        backend = "dense" if op.n <= AUTO_DENSE_MAX else "krylov"
    if backend == "dense" and op.n > cfg.dense_limit:
        raise CapacityError(
            f"dense evolution limited to n <= {cfg.dense_limit}", n=op.n, limit=cfg.dense_limit
        )
    return backend


def _check_grid(times: Sequence[float]) -> np.ndarray:
    times = np.asarray(times, dtype=np.float64)
    if times.ndim != 1 or times.size == 0:
        raise ParameterError("time grid must be a non-empty 1-D sequence")
    if times[0] != 0 or np.any(np.diff(times) < 0):
        raise ParameterError("time grid must be ascending and start at 0")
    return times


def _krylov_states(op: SearchOperator, times: np.ndarray, cfg: EvolutionConfig):
    generator = 1j * op.matrix().astype(np.complex128)
    state = np.full(op.n, 1.0 / math.sqrt(op.n), dtype=np.complex128)
    current = 0.0
    for t in times:
        step = t - current
        if step > 0:
            state = expm_multiply(step * generator, state)
            current = t
            drift = abs(np.vdot(state, state).real - 1.0)
            if drift > cfg.tolerance:
                logger.warning("norm drift %.2e at t=%.4f exceeds tolerance %.1e", drift, t, cfg.tolerance)
        yield state


def evolve_state(op: SearchOperator, t: float, cfg: Optional[EvolutionConfig] = None) -> np.ndarray:
    """
    Full evolved state exp(i t M) |s>

    Args:
        op (SearchOperator): Search operator
        t (float): Evolution time, t >= 0
        cfg (EvolutionConfig, optional): Backend settings

    Returns:
        np.ndarray: Complex state vector of length n
    """
    cfg = cfg or EvolutionConfig()
    if t < 0:
        raise ParameterError(f"evolution time must be >= 0, got {t}")
    s = np.full(op.n, 1.0 / math.sqrt(op.n))
    if _resolve_backend(op, cfg) == "dense":
        values, vectors = linalg.eigh(op.matrix().toarray())
        return vectors @ (np.exp(1j * t * values) * (vectors.T @ s))
    times = np.array([0.0, t]) if t > 0 else np.array([0.0])
    *_, state = _krylov_states(op, times, cfg)
    return state


def success_probabilities(
    op: SearchOperator, times: Sequence[float], cfg: Optional[EvolutionConfig] = None
) -> SearchRun:
    """
    Success probabilities p(t) = |<marked| exp(i t M) |s>|^2 on a grid

    The dense backend diagonalizes M once and evaluates all grid times from
    the eigendecomposition. The Krylov backend steps the state between
    consecutive grid times.

    Args:
        op (SearchOperator): Search operator
        times: Ascending grid starting at 0
        cfg (EvolutionConfig, optional): Backend settings

    Returns:
        SearchRun: Run with ``probs`` filled

    Raises:
        CapacityError: If the dense backend is requested above its limit
        ParameterError: If the grid is malformed
    """
    cfg = cfg or EvolutionConfig()
    times = _check_grid(times)
    backend = _resolve_backend(op, cfg)
    logger.debug("evolving n=%d marked=%d on %d times (%s)", op.n, op.marked, times.size, backend)

    if backend == "dense":
        values, vectors = linalg.eigh(op.matrix().toarray())
        overlap = vectors.T @ np.full(op.n, 1.0 / math.sqrt(op.n))
        weights = vectors[op.marked, :] * overlap
        amplitudes = np.exp(1j * np.outer(times, values)) @ weights
        probs = np.abs(amplitudes) ** 2
    else:
        probs = np.array([abs(state[op.marked]) ** 2 for state in _krylov_states(op, times, cfg)])

    # p(0) = |<w|s>|^2 exactly
    probs[times == 0] = 1.0 / op.n
    probs = np.clip(probs, 0.0, 1.0)
    return SearchRun(times=times, probs=probs, n=op.n, marked=op.marked)


def optimal_time_plateau(run: SearchRun, rel_tol: float = 0.2) -> PlateauChoice:
    """
    First grid time whose probability is never later exceeded by rel_tol

    Index k is accepted when (p_j - p_k) / p_j < rel_tol for every later j,
    i.e. p_k > (1 - rel_tol) max_{j > k} p_j. The last index always
    qualifies.

    Args:
        run (SearchRun): Run with probabilities
        rel_tol (float): Relative margin

    Returns:
        PlateauChoice: Chosen index, time and probability
    """
    probs = np.asarray(run.probs, dtype=np.float64)
    if probs.size == 0:
        raise ParameterError("empty search run")
    later_max = np.empty_like(probs)
    later_max[-1] = -np.inf
    if probs.size > 1:
        later_max[:-1] = np.maximum.accumulate(probs[::-1])[::-1][1:]
    accepted = np.nonzero(probs > (1.0 - rel_tol) * later_max)[0]
    if accepted.size == 0:
        index, fallback = int(np.argmax(probs)), True
    else:
        index, fallback = int(accepted[0]), False
    return PlateauChoice(index=index, t_opt=float(run.times[index]), p_opt=float(probs[index]), fallback=fallback)


def optimal_expected_time(run: SearchRun, n: int, coeff: float = 0.1) -> Tuple[float, float]:
    """
    Grid time minimizing the expected search time (t + coeff ln n) / p(t)

    Points with p(t) < MIN_PROBABILITY are skipped; ties go to the smaller t.

    Args:
        run (SearchRun): Run with probabilities
        n (int): Graph order
        coeff (float): Per-measurement overhead coefficient

    Returns:
        tuple: (t_opt, expected_time)

    Raises:
        DegeneracyError: If every probability is below MIN_PROBABILITY
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    times = np.asarray(run.times, dtype=np.float64)
    probs = np.asarray(run.probs, dtype=np.float64)
    usable = probs >= MIN_PROBABILITY
    if not np.any(usable):
        raise DegeneracyError("no grid point has a usable success probability", points=int(probs.size))
    cost = np.full(probs.size, np.inf)
    cost[usable] = (times[usable] + coeff * math.log(n)) / probs[usable]
    index = int(np.argmin(cost))
    return float(times[index]), float(cost[index])


def choose_measurement(run: SearchRun, rule: str = "plateau", rel_tol: float = 0.2, coeff: float = 0.1) -> SearchRun:
    """
    Fill t_opt, p_opt and expected_time of a run by the named rule

    Under the plateau rule the expected time is still reported for the chosen
    time, so both rules produce comparable tables.

    Args:
        run (SearchRun): Run with probabilities
        rule (str): "plateau" or "expected"
        rel_tol (float): Plateau margin
        coeff (float): Overhead coefficient of the expected time

    Returns:
        SearchRun: The same run, updated in place

    Raises:
        ParameterError: If the rule is unknown
    """
    if rule == "plateau":
        choice = optimal_time_plateau(run, rel_tol)
        run.t_opt, run.p_opt = choice.t_opt, choice.p_opt
        if choice.p_opt > 0:
            run.expected_time = (choice.t_opt + coeff * math.log(run.n)) / choice.p_opt
        else:
            run.expected_time = math.inf
    elif rule == "expected":
        run.t_opt, run.expected_time = optimal_expected_time(run, run.n, coeff)
        run.p_opt = float(run.probs[int(np.searchsorted(run.times, run.t_opt))])
    else:
        raise ParameterError(f"unknown rule {rule!r}", allowed=list(RULES))
    return run


def sample_graph(model: str, n: int, m0: int, seed: int, weights: Optional[np.ndarray] = None) -> Graph:
    """
    Draw one graph of the named ensemble

    Args:
        model (str): "ba" or "cl"
        n (int): Order
        m0 (int): BA parameter
        seed (int): Random seed
        weights (np.ndarray, optional): Chung-Lu weights, required for "cl"

    Returns:
        Graph: The sample
    """
    if model == "ba":
        return generate_ba(n, m0, seed)
    if model == "cl":
        if weights is None:
            raise ParameterError("Chung-Lu sampling needs a weight vector")
        return generate_cl(weights, seed)
    raise ParameterError(f"unknown model {model!r}", allowed=["ba", "cl"])


def minimal_expected_time_trial(
    model: str,
    n: int,
    m0: int,
    seed: int,
    weights: Optional[np.ndarray] = None,
    coeff: float = 0.1,
    backend: str = "auto",
) -> float:
    """
    Minimal expected search time for one sampled graph

    The marked vertex is id m0, the (m0+1)-th created vertex, and the grid is
    scaling_time_grid(n).
    """
    g = sample_graph(model, n, m0, seed, weights)
    run = success_probabilities(search_operator(g, marked=m0), scaling_time_grid(n), EvolutionConfig(backend=backend))
    return optimal_expected_time(run, n, coeff)[1]


def search_scaling(
    m0: int,
    orders: Sequence[int],
    trials_per_order: int,
    seed: int,
    coeff: float = 0.1,
    model: str = "ba",
    weights_for: Optional[Callable[[int], np.ndarray]] = None,
    trial: Optional[Callable[..., float]] = None,
    backend: str = "auto",
    workers: int = 1,
) -> ScalingResult:
    """
    Scaling exponent of the minimal expected search time

    For every order the minimal expected time is averaged over
    ``trials_per_order`` graphs and the means are regressed in log-log scale.

    Args:
        m0 (int): BA parameter; the marked vertex is id m0
        orders: Ascending graph orders
        trials_per_order (int): Graphs per order
        seed (int): Master seed
        coeff (float): Overhead coefficient of the expected time
        model (str): "ba" or "cl"
        weights_for (callable, optional): order -> Chung-Lu weight vector
        trial (callable, optional): Replacement for
            minimal_expected_time_trial with the same signature
        backend (str): Evolution backend
        workers (int): Process count

    Returns:
        ScalingResult: Exponent, intercept and per-order table
    """
    orders = [int(o) for o in orders]
    if not orders or any(b <= a for a, b in zip(orders, orders[1:])):
        raise ParameterError("orders must be non-empty and strictly ascending", orders=orders)
    if trials_per_order < 1:
        raise ParameterError(f"trials_per_order must be >= 1, got {trials_per_order}")
    trial = trial or minimal_expected_time_trial
    model_key = 0 if model == "ba" else 1

    table = []
    for order in orders:
        weights = weights_for(order) if model == "cl" and weights_for is not None else None
        seeds = [derive_seed(seed, order, m0, model_key, k) for k in range(trials_per_order)]
        count = trials_per_order
        values = map_ordered(
            trial,
            [model] * count,
            [order] * count,
            [m0] * count,
            seeds,
            [weights] * count,
            [coeff] * count,
            [backend] * count,
            workers=workers,
        )
        table.append((order, float(np.mean(values))))
        logger.info("%s n=%d: mean minimal expected time %.4f", model, order, table[-1][1])

    alpha, intercept = loglog_slope(table)
    return ScalingResult(alpha=alpha, intercept=intercept, table=table)
