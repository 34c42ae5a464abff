"""
Seeded random graph generators

Barabási-Albert growth graphs and Chung-Lu expected-degree graphs, plus an
O(n^2) Chung-Lu oracle used to validate the efficient sampler.

Randomness comes from NumPy's PCG64 bit generator seeded through a
SeedSequence, so identical (parameters, seed) pairs yield identical graphs on
every platform.
"""

import logging
import math
from typing import Optional

import numpy as np

from .errors import CapacityError, ParameterError
from .graph import Graph

logger = logging.getLogger(__name__)

# Guard for the Bernoulli-per-pair oracle
NAIVE_CL_LIMIT = 5000


def make_rng(seed: int) -> np.random.Generator:
    """
    Create the library's random generator for a 64-bit seed

    Args:
        seed (int): Non-negative seed

    Returns:
        np.random.Generator: PCG64 generator
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


def derive_seed(master: int, *keys: int) -> int:
    """
    Derive an independent substream seed from a master seed and integer keys

    The derivation hashes (master, *keys) through SeedSequence, so it depends
    on nothing but its arguments.

    Args:
        master (int): Master seed
        *keys (int): Cell and trial identifiers

    Returns:
        int: 64-bit unsigned seed
    """
    sequence = np.random.SeedSequence([int(master)] + [int(k) for k in keys])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def generate_ba(n: int, m0: int, seed: int) -> Graph:
    """
    Generate a Barabási-Albert graph

    Vertices 0..m0-1 form a clique. Each later vertex v attaches to m0
    distinct earlier vertices, chosen by repeated degree-proportional draws
    with rejection of targets already picked in the same step. While the
    total degree is zero (m0 = 1, first step) the draw is uniform.

    Args:
        n (int): Vertex count
        m0 (int): Clique order and attachment count, 1 <= m0 < n
        seed (int): Random seed

    Returns:
        Graph: Graph with C(m0, 2) + m0 (n - m0) edges

    Raises:
        ParameterError: If m0 < 1 or m0 >= n
    """
    if m0 < 1 or m0 >= n:
        raise ParameterError(f"BA requires 1 <= m0 < n, got m0={m0}, n={n}", n=n, m0=m0)
    rng = make_rng(seed)

    edge_total = m0 * (m0 - 1) // 2 + m0 * (n - m0)
    edges = np.empty((edge_total, 2), dtype=np.int64)
    # each vertex appears in `endpoints` once per incident edge
    endpoints = np.empty(2 * edge_total, dtype=np.int64)

    count = 0
    for u in range(m0):
        for v in range(u + 1, m0):
            edges[count] = (u, v)
            endpoints[2 * count] = u
            endpoints[2 * count + 1] = v
            count += 1

    for v in range(m0, n):
        filled = 2 * count
        chosen = set()
        while len(chosen) < m0:
            if filled == 0:
                target = int(rng.integers(v))
            else:
                target = int(endpoints[rng.integers(filled)])
            chosen.add(target)
        for target in sorted(chosen):
            edges[count] = (target, v)
            endpoints[2 * count] = target
            endpoints[2 * count + 1] = v
            count += 1

    return Graph.from_edges(n, edges)


def _check_weights(w: np.ndarray) -> np.ndarray:
    w = np.asarray(w, dtype=np.float64)
    n = len(w)
    if w.ndim != 1 or n < 1:
        raise ParameterError("weight vector must be a non-empty 1-D sequence")
    if np.any(~np.isfinite(w)) or np.any(w < 0) or np.any(w > n - 1):
        raise ParameterError(f"weights must lie in [0, {n - 1}]", n=n)
    if w.sum() <= 0:
        raise ParameterError("weights must have a positive sum", n=n)
    return w


def generate_cl(w: np.ndarray, seed: int) -> Graph:
    """
    Generate a Chung-Lu graph with the sorted-weight skip sampler

    Pair {i, j} is present independently with probability
    min(1, w_i w_j / sum(w)). Weights are visited in decreasing order; for a
    fixed row the pair probabilities are then non-increasing, so candidate
    columns are skipped geometrically with the current probability and
    accepted with the ratio of the true to the proposal probability. Expected
    work is O(n + |E|).

    Args:
        w (np.ndarray): Expected-degree vector with entries in [0, n-1]
        seed (int): Random seed

    Returns:
        Graph: The sampled graph, indexed like ``w``

    Raises:
        ParameterError: If a weight is out of range or all weights are zero
    """
    w = _check_weights(w)
    n = len(w)
    rng = make_rng(seed)
    total = w.sum()

    order = np.argsort(-w, kind="stable")
    ws = w[order]
    us, vs = [], []
    for u in range(n - 1):
        wu = ws[u]
        if wu == 0:
            break
        v = u + 1
        p = min(wu * ws[v] / total, 1.0)
        while v < n and p > 0:
            if p != 1.0:
                # 1 - U lies in (0, 1], keeping the log finite
                r = 1.0 - rng.random()
                v += int(math.floor(math.log(r) / math.log1p(-p)))
            if v < n:
                q = min(wu * ws[v] / total, 1.0)
                if rng.random() < q / p:
                    us.append(u)
                    vs.append(v)
                p = q
                v += 1

    pairs = np.column_stack([order[np.asarray(us, dtype=np.int64)], order[np.asarray(vs, dtype=np.int64)]])
    return Graph.from_edges(n, pairs)


def generate_cl_naive(w: np.ndarray, seed: int, limit: Optional[int] = None) -> Graph:
    """
    Generate a Chung-Lu graph with one Bernoulli trial per pair

    Same distribution as generate_cl, different samples. Meant as a test
    oracle only.

    Args:
        w (np.ndarray): Expected-degree vector with entries in [0, n-1]
        seed (int): Random seed
        limit (int, optional): Order guard, defaults to NAIVE_CL_LIMIT

    Returns:
        Graph: The sampled graph

    Raises:
        CapacityError: If n exceeds the guard
        ParameterError: If the weights are invalid
    """
    limit = NAIVE_CL_LIMIT if limit is None else limit
    if len(w) > limit:
        raise CapacityError(f"naive Chung-Lu oracle limited to n <= {limit}", n=len(w), limit=limit)
    w = _check_weights(w)
    n = len(w)
    rng = make_rng(seed)
    total = w.sum()

    chunks = []
    for i in range(n - 1):
        probs = np.minimum(w[i] * w[i + 1 :] / total, 1.0)
        hits = np.nonzero(rng.random(n - i - 1) < probs)[0] + i + 1
        if hits.size:
            chunks.append(np.column_stack([np.full(hits.size, i), hits]))
    pairs = np.concatenate(chunks) if chunks else np.empty((0, 2), dtype=np.int64)
    return Graph.from_edges(n, pairs)
