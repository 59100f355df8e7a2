#!/usr/bin/env python3
"""Pytest configuration and shared fixtures."""

import json
import os
import sys

import networkx as nx
import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.cycle_core import WeightedCycle
from src.experiments import generate_instance


def pytest_addoption(parser):
    parser.addoption(
        "--runslow", action="store_true", default=False, help="Run desk-scale Monte Carlo tests"
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def make_cycle():
    """Factory for random cycles with conductances uniform on [lo, hi]."""

    def _make(n, lo=1.0, hi=100.0, seed=0):
        return generate_instance(n, lo, hi, np.random.default_rng(seed))

    return _make


@pytest.fixture
def random_cycle(make_cycle):
    """A 24-vertex cycle with conductances in [1, 100]."""
    return make_cycle(24, seed=2024)


@pytest.fixture
def uniform4():
    return WeightedCycle.uniform(4)


@pytest.fixture
def nx_laplacian():
    """Dense Laplacian built independently with networkx, optionally with a chord (p, q, w)."""

    def _laplacian(cycle, chord=None):
        G = nx.Graph()
        G.add_nodes_from(range(cycle.n))
        for i, c in enumerate(cycle.conductances):
            G.add_edge(i, (i + 1) % cycle.n, weight=float(c))
        if chord is not None:
            p, q, w = chord
            G.add_edge(p, q, weight=float(w))
        return nx.laplacian_matrix(G, nodelist=range(cycle.n), weight="weight").toarray()

    return _laplacian


@pytest.fixture
def dense_kirchhoff():
    """K_f = n tr(L^+) by dense pseudoinverse."""

    def _kirchhoff(L):
        return L.shape[0] * float(np.trace(np.linalg.pinv(L)))

    return _kirchhoff


@pytest.fixture
def cycle_file(tmp_path):
    """Write a cycle to a temporary JSON file and return its path."""

    def _write(cycle, name="cycle.json"):
        path = tmp_path / name
        path.write_text(json.dumps(cycle.to_dict()))
        return str(path)

    return _write
