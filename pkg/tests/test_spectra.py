"""
Tests for adjacency spectra

Usage:
    python -m pytest tests/test_spectra.py -v
"""

import math
import os
import sys

import numpy as np
import pytest

# Add src directory to path
sys.path.append(os.path.join(os.path.dirname(__file__), "..", "src"))

from bacl_spectra.errors import CapacityError, DegeneracyError, ParameterError
from bacl_spectra.generators import generate_ba, generate_cl
from bacl_spectra.graph import Graph, degrees
from bacl_spectra.spectra import (
    extreme_eigs,
    full_spectrum,
    principal_eigenvector,
    spectral_gap,
    summarize,
)

from conftest import complete_graph


def check_trace_identities(g, values):
    assert abs(values.sum()) <= 1e-8 * g.n
    assert abs(np.sum(values ** 2) - 2 * g.edge_count) <= 1e-6 * max(1, g.edge_count)


class TestFullSpectrum:
    """Test cases for full_spectrum"""

    def test_k4(self, k4):
        """Test the complete-graph spectrum"""
        values = full_spectrum(k4)
        assert np.allclose(values, [3, -1, -1, -1])
        check_trace_identities(k4, values)

    def test_path(self, p3):
        """Test the P3 spectrum"""
        assert np.allclose(full_spectrum(p3), [math.sqrt(2), 0, -math.sqrt(2)])

    def test_star(self, star4):
        """Test the K(1,3) spectrum"""
        values = full_spectrum(star4)
        assert np.allclose(values, [math.sqrt(3), 0, 0, -math.sqrt(3)], atol=1e-12)

    def test_descending_and_identities_on_ba(self):
        """Test ordering, trace and Frobenius identities on a BA sample"""
        g = generate_ba(300, 3, 12)
        values = full_spectrum(g)
        assert np.all(np.diff(values) <= 0)
        check_trace_identities(g, values)

    def test_residuals(self):
        """Test ||Av - lambda v|| for every eigenpair"""
        g = generate_ba(120, 2, 4)
        a = g.to_csr().toarray()
        values = full_spectrum(g)
        for value in values[:5]:
            _, _, vt = np.linalg.svd(a - value * np.eye(g.n))
            vector = vt[-1]
            assert np.linalg.norm(a @ vector - value * vector) <= 1e-8 * max(1.0, abs(values[0]))

    def test_capacity(self, k4):
        """Test the dense limit"""
        with pytest.raises(CapacityError):
            full_spectrum(k4, dense_limit=3)

    def test_against_networkx(self):
        """Test a CL sample against networkx's adjacency spectrum"""
        nx = pytest.importorskip("networkx")
        w = np.linspace(1.0, 8.0, 80)
        g = generate_cl(w, 2)
        reference = nx.Graph()
        reference.add_nodes_from(range(g.n))
        reference.add_edges_from(map(tuple, g.edges().tolist()))
        expected = np.sort(nx.adjacency_spectrum(reference).real)[::-1]
        assert np.allclose(full_spectrum(g), expected, atol=1e-8)


class TestExtremeEigs:
    """Test cases for extreme_eigs"""

    def test_k4(self, k4):
        """Test K4 triple"""
        assert np.allclose(extreme_eigs(k4), (3, -1, -1))

    def test_path(self, p3):
        """Test P3 triple"""
        assert np.allclose(extreme_eigs(p3), (math.sqrt(2), 0, -math.sqrt(2)), atol=1e-12)

    def test_degenerate_top_pair(self, two_triangles):
        """Test lambda_1 = lambda_2 for two disjoint triangles"""
        lambda1, lambda2, lambdan = extreme_eigs(two_triangles)
        assert lambda1 == pytest.approx(2) and lambda2 == pytest.approx(2)
        assert lambdan == pytest.approx(-1)

    def test_single_vertex(self):
        """Test n < 2"""
        with pytest.raises(ParameterError):
            extreme_eigs(Graph.empty(1))

    def test_unknown_method(self, k4):
        """Test method validation"""
        with pytest.raises(ParameterError):
            extreme_eigs(k4, method="qr")

    def test_edgeless(self):
        """Test the zero matrix"""
        assert extreme_eigs(Graph.empty(5)) == (0.0, 0.0, 0.0)

    @pytest.mark.parametrize("m0", [1, 3, 6])
    def test_lanczos_agrees_with_dense(self, m0):
        """Test the iterative and dense paths agree to 1e-7"""
        g = generate_ba(800, m0, m0)
        dense = extreme_eigs(g, method="dense")
        iterative = extreme_eigs(g, method="lanczos")
        assert np.allclose(dense, iterative, atol=1e-7, rtol=0)
        assert np.allclose(dense, full_spectrum(g)[[0, 1, -1]], atol=1e-7)

    def test_rayleigh_and_degree_bounds(self):
        """Test 2|E|/n <= lambda_1 <= max degree"""
        for seed in range(3):
            g = generate_ba(600, 2, seed)
            lambda1 = extreme_eigs(g)[0]
            assert 2 * g.edge_count / g.n <= lambda1 + 1e-9
            assert lambda1 <= degrees(g).max() + 1e-9

    def test_spectral_gap(self, k4):
        """Test lambda_1 - max(|lambda_2|, |lambda_n|) on K4"""
        assert spectral_gap(k4) == pytest.approx(2.0)


class TestPrincipalEigenvector:
    """Test cases for principal_eigenvector"""

    def test_complete_graph(self):
        """Test the uniform Perron vector of K_n"""
        vector = principal_eigenvector(complete_graph(7))
        assert np.allclose(vector, np.full(7, 1 / math.sqrt(7)))

    def test_star(self, star4):
        """Test the star's Perron vector"""
        vector = principal_eigenvector(star4)
        expected = np.array([math.sqrt(3), 1, 1, 1]) / math.sqrt(6)
        assert np.allclose(vector, expected, atol=1e-10)

    def test_duplicated_component(self, two_triangles):
        """Test degeneracy error naming the gap"""
        with pytest.raises(DegeneracyError) as info:
            principal_eigenvector(two_triangles)
        assert "gap" in info.value.to_record()

    def test_edgeless(self):
        """Test the zero matrix has no principal vector"""
        with pytest.raises(DegeneracyError):
            principal_eigenvector(Graph.empty(4))

    def test_contract_on_ba(self):
        """Test unit norm, nonnegativity and residual for both methods"""
        g = generate_ba(900, 3, 21)
        a = g.to_csr()
        for method in ("dense", "lanczos"):
            vector = principal_eigenvector(g, method=method)
            lambda1 = float(vector @ (a @ vector))
            assert abs(np.linalg.norm(vector) - 1) <= 1e-10
            assert vector.min() >= -1e-10
            assert np.linalg.norm(a @ vector - lambda1 * vector) <= 1e-8 * max(1.0, lambda1)
            # connected BA graph: strictly positive Perron vector
            assert vector.min() > 0

    def test_methods_agree(self):
        """Test dense and Lanczos principal vectors coincide"""
        g = generate_ba(700, 2, 5)
        assert np.allclose(
            principal_eigenvector(g, method="dense"), principal_eigenvector(g, method="lanczos"), atol=1e-7
        )


class TestSummarize:
    """Test cases for summarize"""

    def test_modes(self, star4):
        """Test the three summary modes"""
        assert summarize(star4, "full").eigenvalues.size == 4
        assert summarize(star4, "extreme").eigenvalues.size == 3
        principal = summarize(star4, "principal")
        assert principal.principal is not None and principal.mode == "principal"

    def test_unknown_mode(self, star4):
        """Test mode validation"""
        with pytest.raises(ParameterError):
            summarize(star4, "bulk")
