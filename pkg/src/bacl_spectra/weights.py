"""
Chung-Lu weight derivation from Barabási-Albert ensembles

The weight vector is the running mean of BA degree vectors, aligned by vertex
creation order. BA graphs are generated in batches; after each batch the
cumulative mean is compared with the previous one in sup norm and the
procedure stops at the first change not exceeding epsilon.
"""

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Union

import numpy as np

from .errors import DimensionError, NonConvergenceError, ParameterError
from .generators import derive_seed, generate_ba
from .graph import degrees
from .parallel import map_ordered

logger = logging.getLogger(__name__)


@dataclass
class DerivationConfig:
    """
    Settings of the weight derivation

    Attributes:
        n (int): Graph order
        m0 (int): BA parameter
        batch (int): BA graphs per round
        epsilon (float): Sup-norm stopping tolerance
        seed (int): Master seed
        max_rounds (int): Round cap
        workers (int): Processes used to generate a batch
    """

    n: int
    m0: int
    batch: int = 300
    epsilon: float = 0.05
    seed: int = 0
    max_rounds: int = 200
    workers: int = 1

    def validate(self) -> None:
        if self.batch < 1:
            raise ParameterError(f"batch must be >= 1, got {self.batch}", batch=self.batch)
        if not self.epsilon > 0:
            raise ParameterError(f"epsilon must be > 0, got {self.epsilon}", epsilon=self.epsilon)
        if self.max_rounds < 2:
            raise ParameterError("max_rounds must allow at least two rounds", max_rounds=self.max_rounds)
        if self.m0 < 1 or self.m0 >= self.n:
            raise ParameterError(f"BA requires 1 <= m0 < n, got m0={self.m0}, n={self.n}")


@dataclass
class DerivationResult:
    """
    Outcome of derive_weights

    Attributes:
        w_bar (np.ndarray): Derived expected-degree vector
        rounds (int): Number of batches consumed
        sup_deltas (list): Sup-norm change after every round but the first
        converged (bool): False when max_rounds was hit
    """

    w_bar: np.ndarray
    rounds: int
    sup_deltas: List[float] = field(default_factory=list)
    converged: bool = True


def running_mean_update(mean: np.ndarray, count: int, sample: np.ndarray) -> np.ndarray:
    """
    Fold one sample into a running mean

    Args:
        mean (np.ndarray): Mean of the first ``count`` samples
        count (int): Number of samples already folded in
        sample (np.ndarray): New sample

    Returns:
        np.ndarray: (count * mean + sample) / (count + 1)

    Raises:
        ParameterError: If count < 0
        DimensionError: If the lengths differ
    """
    if count < 0:
        raise ParameterError(f"count must be >= 0, got {count}", count=count)
    mean = np.asarray(mean, dtype=np.float64)
    sample = np.asarray(sample, dtype=np.float64)
    if mean.shape != sample.shape:
        raise DimensionError(f"shape mismatch {mean.shape} vs {sample.shape}")
    return mean + (sample - mean) / (count + 1)


def _ba_degree_vector(n: int, m0: int, seed: int) -> np.ndarray:
    return degrees(generate_ba(n, m0, seed))


def derive_weights(cfg: DerivationConfig) -> DerivationResult:
    """
    Derive the Chung-Lu weight vector for BA(n, m0)

    Round t adds ``cfg.batch`` BA degree vectors to the running mean w_t. The
    first w_{t+1} with ||w_t - w_{t+1}||_inf <= epsilon is returned. Trial k
    always uses seed derive_seed(cfg.seed, k), so the result does not depend
    on the worker count.

    Args:
        cfg (DerivationConfig): Derivation settings

    Returns:
        DerivationResult: Converged weight vector and per-round deltas

    Raises:
        ParameterError: On invalid settings
        NonConvergenceError: If max_rounds is exceeded; ``partial`` holds the
            last result with ``converged=False``
    """
    cfg.validate()
    mean = np.zeros(cfg.n, dtype=np.float64)
    count = 0
    previous = None
    deltas: List[float] = []

    for round_index in range(cfg.max_rounds):
        trial_ids = range(round_index * cfg.batch, (round_index + 1) * cfg.batch)
        seeds = [derive_seed(cfg.seed, k) for k in trial_ids]
        samples = map_ordered(
            _ba_degree_vector,
            [cfg.n] * cfg.batch,
            [cfg.m0] * cfg.batch,
            seeds,
            workers=cfg.workers,
        )
        for sample in samples:
            mean = running_mean_update(mean, count, sample)
            count += 1

        if previous is not None:
            delta = float(np.max(np.abs(mean - previous)))
            deltas.append(delta)
            logger.debug("round %d: sup delta %.5f", round_index + 1, delta)
            if delta <= cfg.epsilon:
                logger.info(
                    "weights for n=%d m0=%d converged after %d rounds", cfg.n, cfg.m0, round_index + 1
                )
                return DerivationResult(w_bar=mean, rounds=round_index + 1, sup_deltas=deltas)
        previous = mean.copy()

    partial = DerivationResult(w_bar=mean, rounds=cfg.max_rounds, sup_deltas=deltas, converged=False)
    raise NonConvergenceError(
        f"weight derivation did not reach epsilon={cfg.epsilon} in {cfg.max_rounds} rounds",
        partial=partial,
        last_delta=deltas[-1] if deltas else None,
        n=cfg.n,
        m0=cfg.m0,
    )


def save_weights(path: Union[str, Path], w: np.ndarray) -> None:
    """
    Write a weight vector as CSV with columns (vertex_id, w)

    Args:
        path: Destination file
        w (np.ndarray): Weight vector
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["vertex_id", "w"])
        for vertex, value in enumerate(np.asarray(w, dtype=np.float64)):
            writer.writerow([vertex, repr(float(value))])


def load_weights(path: Union[str, Path]) -> np.ndarray:
    """
    Read a weight vector written by save_weights

    Args:
        path: Source file

    Returns:
        np.ndarray: Weights ordered by vertex_id

    Raises:
        ParameterError: If a column is missing, a value does not parse, or
            vertex ids are not exactly 0..n-1
    """
    rows = []
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = [name for name in ("vertex_id", "w") if name not in (reader.fieldnames or [])]
        if missing:
            raise ParameterError(f"weight file lacks column(s) {missing}", path=str(path))
        for row in reader:
            try:
                rows.append((int(row["vertex_id"]), float(row["w"])))
            except (TypeError, ValueError):
                # line_num counts the header, so it is the 1-based file line
                raise ParameterError(
                    f"malformed weight row: {row}", path=str(path), line=reader.line_num
                )
    rows.sort()
    ids = [vertex for vertex, _ in rows]
    if ids != list(range(len(rows))):
        raise ParameterError("weight file must list every vertex id 0..n-1 once", path=str(path))
    return np.asarray([value for _, value in rows], dtype=np.float64)
