"""
Adjacency spectra of undirected graphs

Full dense spectra, the extreme triple (lambda_1, lambda_2, lambda_n) and the
Perron-fixed principal eigenvector. Small graphs go through dense symmetric
diagonalization; larger ones use ARPACK's implicitly restarted Lanczos with a
fixed start vector so repeated runs agree bit for bit.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import linalg
from scipy.sparse.linalg import eigsh

from .errors import CapacityError, DegeneracyError, ParameterError
from .graph import Graph

logger = logging.getLogger(__name__)

# Largest order accepted by the dense path
DENSE_LIMIT = 10_000

# "auto" switches from dense to Lanczos above this order
LANCZOS_CUTOFF = 500

# Minimal lambda_1 - lambda_2 gap for a well-defined principal vector
DEGENERACY_GAP = 1e-8

METHODS = ("auto", "dense", "lanczos")


@dataclass
class SpectrumSummary:
    """
    Spectrum of one graph

    Attributes:
        eigenvalues (np.ndarray): Descending eigenvalues (all n, or the
            triple lambda_1, lambda_2, lambda_n)
        principal (np.ndarray, optional): Unit, entrywise nonnegative
            eigenvector of lambda_1
        mode (str): "full", "extreme" or "principal"
    """

    eigenvalues: np.ndarray
    principal: Optional[np.ndarray] = None
    mode: str = "full"


def _dense_adjacency(g: Graph, dense_limit: int) -> np.ndarray:
    if g.n > dense_limit:
        raise CapacityError(
            f"dense eigensolver limited to n <= {dense_limit}", n=g.n, limit=dense_limit
        )
    return g.to_csr().toarray()


def _start_vector(n: int) -> np.ndarray:
    # normalized all-ones, perturbed at index 0
    v0 = np.ones(n)
    v0[0] += 0.5
    return v0 / np.linalg.norm(v0)


def _resolve_method(g: Graph, method: str) -> str:
    if method not in METHODS:
        raise ParameterError(f"unknown eigensolver method {method!r}", allowed=list(METHODS))
    if method == "auto":
        return "dense" if g.n <= LANCZOS_CUTOFF else "lanczos"
    if method == "lanczos" and g.n <= 3:
        return "dense"
    return method


def full_spectrum(g: Graph, dense_limit: int = DENSE_LIMIT) -> np.ndarray:
    """
    All adjacency eigenvalues, descending

    Args:
        g (Graph): Input graph
        dense_limit (int): Largest accepted order

    Returns:
        np.ndarray: n eigenvalues in descending order

    Raises:
        CapacityError: If n > dense_limit
    """
    values = linalg.eigh(_dense_adjacency(g, dense_limit), eigvals_only=True)
    return values[::-1].copy()


def extreme_eigs(g: Graph, method: str = "auto", dense_limit: int = DENSE_LIMIT) -> Tuple[float, float, float]:
    """
    Two largest and the smallest adjacency eigenvalues

    lambda_2 is the second entry of the descending list counted with
    multiplicity, so a repeated top eigenvalue gives lambda_1 == lambda_2.

    Args:
        g (Graph): Input graph with n >= 2
        method (str): "auto", "dense" or "lanczos"
        dense_limit (int): Largest order accepted by the dense path

    Returns:
        tuple: (lambda_1, lambda_2, lambda_n)

    Raises:
        ParameterError: If n < 2 or the method is unknown
    """
    if g.n < 2:
        raise ParameterError(f"extreme eigenvalues need n >= 2, got {g.n}", n=g.n)
    method = _resolve_method(g, method)
    if g.edge_count == 0:
        return 0.0, 0.0, 0.0
    if method == "dense":
        values = full_spectrum(g, dense_limit)
        return float(values[0]), float(values[1]), float(values[-1])

    # k=3 with "BE" returns the two largest and the smallest
    values = eigsh(g.to_csr(), k=3, which="BE", v0=_start_vector(g.n), tol=0.0, return_eigenvectors=False)
    values = np.sort(values)[::-1]
    return float(values[0]), float(values[1]), float(values[2])


def principal_eigenvector(g: Graph, method: str = "auto", dense_limit: int = DENSE_LIMIT) -> np.ndarray:
    """
    Perron-fixed principal eigenvector

    The eigenvector of lambda_1 is normalized to unit 2-norm and its sign is
    chosen so that every entry is nonnegative.

    Args:
        g (Graph): Input graph
        method (str): "auto", "dense" or "lanczos"
        dense_limit (int): Largest order accepted by the dense path

    Returns:
        np.ndarray: Unit vector of length n

    Raises:
        DegeneracyError: If the graph has no edges or lambda_1 - lambda_2 is
            below DEGENERACY_GAP
    """
    if g.edge_count == 0:
        raise DegeneracyError("edgeless graph has no principal eigenvector", n=g.n)
    method = _resolve_method(g, method)
    if method == "dense":
        values, vectors = linalg.eigh(_dense_adjacency(g, dense_limit))
        lambda1, lambda2 = values[-1], values[-2]
        vector = vectors[:, -1]
    else:
        values, vectors = eigsh(g.to_csr(), k=2, which="LA", v0=_start_vector(g.n), tol=0.0)
        top = int(np.argmax(values))
        lambda1, lambda2 = values[top], values[1 - top]
        vector = vectors[:, top]

    gap = float(lambda1 - lambda2)
    if gap < DEGENERACY_GAP:
        raise DegeneracyError(
            f"top eigenvalue is degenerate (gap {gap:.3e} < {DEGENERACY_GAP:g})",
            gap=gap,
            lambda1=float(lambda1),
        )
    if vector.sum() < 0:
        vector = -vector
    # entries off the Perron component are rounding noise around zero
    vector = np.abs(vector)
    return vector / np.linalg.norm(vector)


def spectral_gap(g: Graph, method: str = "auto") -> float:
    """
    Gap between lambda_1 and the largest of |lambda_2|, |lambda_n|

    Args:
        g (Graph): Input graph with n >= 2
        method (str): Eigensolver selector

    Returns:
        float: lambda_1 - max(|lambda_2|, |lambda_n|)
    """
    lambda1, lambda2, lambdan = extreme_eigs(g, method=method)
    return lambda1 - max(abs(lambda2), abs(lambdan))


def summarize(g: Graph, mode: str = "full", method: str = "auto") -> SpectrumSummary:
    """
    Build a SpectrumSummary

    Args:
        g (Graph): Input graph
        mode (str): "full" (all eigenvalues), "extreme" (the triple) or
            "principal" (the triple plus the principal eigenvector)
        method (str): Eigensolver selector for the extreme modes

    Returns:
        SpectrumSummary: The requested summary

    Raises:
        ParameterError: If the mode is unknown
    """
    if mode == "full":
        return SpectrumSummary(eigenvalues=full_spectrum(g), mode=mode)
    if mode == "extreme":
        return SpectrumSummary(eigenvalues=np.asarray(extreme_eigs(g, method=method)), mode=mode)
    if mode == "principal":
        return SpectrumSummary(
            eigenvalues=np.asarray(extreme_eigs(g, method=method)),
            principal=principal_eigenvector(g, method=method),
            mode=mode,
        )
    raise ParameterError(f"unknown spectrum mode {mode!r}", allowed=["full", "extreme", "principal"])
