"""
Undirected simple graphs in compressed sparse adjacency form

Vertices are dense 0-based integers. Every edge is stored in both directions,
neighbor lists are sorted and free of duplicates and self-loops. Graph values
are immutable, so they can be shared between workers without copying.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, List, Tuple, Union

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .errors import DimensionError, ParameterError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Graph:
    """
    Undirected simple graph in CSR form

    Attributes:
        n (int): Vertex count
        offsets (np.ndarray): n+1 offsets into ``targets``
        targets (np.ndarray): Flat neighbor ids, each edge present twice
    """

    n: int
    offsets: np.ndarray = field(repr=False)
    targets: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError(f"graph order must be positive, got {self.n}", n=self.n)
        if len(self.offsets) != self.n + 1:
            raise DimensionError(
                f"expected {self.n + 1} offsets, got {len(self.offsets)}",
                n=self.n,
            )
        self.offsets.setflags(write=False)
        self.targets.setflags(write=False)

    @classmethod
    def from_edges(cls, n: int, edges: Union[np.ndarray, Iterable[Tuple[int, int]]]) -> "Graph":
        """
        Build a graph from an edge collection

        Self-loops are dropped and duplicate or reversed pairs are merged.

        Args:
            n (int): Vertex count
            edges: Iterable of (u, v) pairs or an (m, 2) integer array

        Returns:
            Graph: The canonical simple graph

        Raises:
            ParameterError: If n < 1 or an endpoint is outside [0, n)
        """
        if n < 1:
            raise ParameterError(f"graph order must be positive, got {n}", n=n)
        pairs = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        pairs = pairs.reshape(-1, 2)
        if pairs.size and (pairs.min() < 0 or pairs.max() >= n):
            raise ParameterError("edge endpoint outside vertex range", n=n)

        pairs = pairs[pairs[:, 0] != pairs[:, 1]]
        src = np.concatenate([pairs[:, 0], pairs[:, 1]])
        dst = np.concatenate([pairs[:, 1], pairs[:, 0]])
        keys = np.unique(src * n + dst)
        src, dst = keys // n, keys % n

        offsets = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=offsets[1:])
        return cls(n=n, offsets=offsets, targets=dst.astype(np.int64))

    @classmethod
    def empty(cls, n: int) -> "Graph":
        """Edgeless graph on n vertices"""
        return cls.from_edges(n, np.empty((0, 2), dtype=np.int64))

    def neighbors(self, v: int) -> np.ndarray:
        """Sorted neighbor ids of vertex v"""
        return self.targets[self.offsets[v] : self.offsets[v + 1]]

    @property
    def edge_count(self) -> int:
        return len(self.targets) // 2

    def edges(self) -> np.ndarray:
        """
        Edge list with u < v, in ascending (u, v) order

        Returns:
            np.ndarray: (|E|, 2) array
        """
        src = np.repeat(np.arange(self.n), np.diff(self.offsets))
        mask = src < self.targets
        return np.column_stack([src[mask], self.targets[mask]])

    @cached_property
    def _sources(self) -> np.ndarray:
        return np.repeat(np.arange(self.n), np.diff(self.offsets))

    def to_csr(self) -> sparse.csr_matrix:
        """0/1 adjacency matrix as a SciPy CSR matrix (float64)"""
        data = np.ones(len(self.targets), dtype=np.float64)
        return sparse.csr_matrix((data, self.targets, self.offsets), shape=(self.n, self.n))

    def validate(self) -> None:
        """
        Check the structural invariants

        Raises:
            AssertionError: On asymmetric storage, self-loops, duplicate or
                unsorted neighbor entries, or a broken handshake count
        """
        src = self._sources
        assert not np.any(src == self.targets), "self-loop present"
        keys = src * self.n + self.targets
        assert np.all(np.diff(keys) > 0), "neighbor lists not strictly ascending"
        reverse = np.sort(self.targets * self.n + src)
        assert np.array_equal(keys, reverse), "adjacency not symmetric"
        assert degrees(self).sum() == 2 * self.edge_count, "handshake lemma violated"


def degrees(g: Graph) -> np.ndarray:
    """
    Per-vertex degree vector

    Args:
        g (Graph): Input graph

    Returns:
        np.ndarray: Integer degrees indexed by vertex id; sums to 2|E|
    """
    return np.diff(g.offsets)


def adjacency_matvec(g: Graph, x: np.ndarray) -> np.ndarray:
    """
    Multiply the adjacency matrix with a vector

    Args:
        g (Graph): Input graph
        x (np.ndarray): Real vector of length n

    Returns:
        np.ndarray: y with y[i] = sum of x[j] over neighbors j of i

    Raises:
        DimensionError: If len(x) != n
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (g.n,):
        raise DimensionError(f"vector of length {g.n} expected, got shape {x.shape}", n=g.n)
    return np.bincount(g._sources, weights=x[g.targets], minlength=g.n)


def connected_components(g: Graph) -> np.ndarray:
    """
    Label connected components

    Labels are ordered by decreasing component size, ties broken by the
    smallest vertex id in the component, so the largest component is 0.

    Args:
        g (Graph): Input graph

    Returns:
        np.ndarray: Integer label per vertex
    """
    count, raw = csgraph.connected_components(g.to_csr(), directed=False)
    sizes = np.bincount(raw, minlength=count)
    _, first_vertex = np.unique(raw, return_index=True)
    order = np.lexsort((first_vertex, -sizes))
    relabel = np.empty(count, dtype=np.int64)
    relabel[order] = np.arange(count)
    return relabel[raw]


def component_sizes(g: Graph) -> np.ndarray:
    """Component sizes, largest first"""
    return np.bincount(connected_components(g))


def dump_edge_list(g: Graph, path: Union[str, Path]) -> None:
    """
    Write a graph as edge-list text

    The first line is ``# n=<n>``, followed by one ``u v`` line per edge with
    u < v in ascending order.

    Args:
        g (Graph): Graph to write
        path: Destination file
    """
    lines: List[str] = [f"# n={g.n}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.debug("wrote %d edges to %s", g.edge_count, path)


def load_edge_list(path: Union[str, Path]) -> Graph:
    """
    Read a graph written by dump_edge_list

    Args:
        path: Source file

    Returns:
        Graph: The loaded graph

    Raises:
        ParameterError: If the ``# n=`` header is missing or malformed, or an
            edge line is not two integer vertex ids
    """
    n = None
    pairs = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            if body.startswith("n="):
                try:
                    n = int(body[2:])
                except ValueError:
                    raise ParameterError(f"malformed header line: {raw!r}", path=str(path), line=lineno)
            continue
        try:
            u, v = line.split()
            pairs.append((int(u), int(v)))
        except ValueError:
            raise ParameterError(f"malformed edge line: {raw!r}", path=str(path), line=lineno)
    if n is None:
        raise ParameterError("edge list lacks '# n=<n>' header", path=str(path))
    return Graph.from_edges(n, np.asarray(pairs, dtype=np.int64).reshape(-1, 2))
