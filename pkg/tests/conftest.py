"""
Configuration file for pytest
"""

import os
import sys

import pytest

# Add src directory to path
sys.path.append(os.path.join(os.path.dirname(__file__), "..", "src"))

from bacl_spectra.graph import Graph


def pytest_configure(config):
    """Configure pytest with custom markers"""
    config.addinivalue_line(
        "markers", "slow: mark test as a desk-scale experiment rerun (minutes)"
    )


def complete_graph(n):
    return Graph.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


@pytest.fixture
def k3():
    """Triangle"""
    return complete_graph(3)


@pytest.fixture
def k4():
    return complete_graph(4)


@pytest.fixture
def p3():
    """Path 0-1-2"""
    return Graph.from_edges(3, [(0, 1), (1, 2)])


@pytest.fixture
def star4():
    """Star K(1,3) with hub 0"""
    return Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])


@pytest.fixture
def two_triangles():
    """Disjoint union of two triangles"""
    return Graph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
