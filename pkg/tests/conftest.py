import numpy as np
import pytest

import graphevolve as ge


@pytest.fixture
def interval():
    return ge.MetricGraph(2, [(0, 1)])


@pytest.fixture
def loop():
    return ge.MetricGraph(1, [(0, 0)])


@pytest.fixture
def star():
    """Star with center 0, two internal edges out, and one external edge."""
    return ge.MetricGraph(3, [(0, 1), (0, 2)], [0])


@pytest.fixture
def compact_star():
    """Compact 3-star: pulse edge (leaf1 -> center), two outgoing edges."""
    return ge.MetricGraph(4, [(1, 0), (0, 2), (0, 3)])


def dirichlet_interval_bc():
    return ge.matrices_bc(l=0, m=1, k0=2, k1=0, v0i=[[1], [0]], v1i=[[0], [1]])


def periodic_loop_bc():
    return ge.matrices_bc(l=0, m=1, k0=1, k1=1,
                          v0i=[[1]], v1i=[[-1]], w0i=[[1]], w1i=[[1]])


def coupled_endpoints_bc():
    """f(0) + f(1) = 0, f'(0) + f'(1) = 0 (the a(0) != a(1) dichotomy family)."""
    return ge.matrices_bc(l=0, m=1, k0=1, k1=1,
                          v0i=[[1]], v1i=[[1]], w0i=[[1]], w1i=[[1]])


def star3_bc(alpha=1.0, beta=2.0, gamma=3.0, eps=4.0, delta=0.0):
    return ge.matrices_bc(
        l=1, m=2, k0=2, k1=3,
        v0e=[[0], [1]], v0i=[[1, -1], [0, -1]],
        w0e=[[0], [alpha], [0]], w0i=[[0, 0], [beta, gamma], [0, 0]],
        w1i=[[1, 0], [0, 0], [0, eps]],
        u1i=[[0, 0], [0, 0], [0, -delta]])


def random_graph(rng, max_n=8, max_m=12, max_l=4):
    while True:
        n = int(rng.integers(1, max_n + 1))
        m = int(rng.integers(0, max_m + 1))
        l = int(rng.integers(0, max_l + 1))
        if m + l == 0:
            continue
        internal = [(int(rng.integers(n)), int(rng.integers(n))) for _ in range(m)]
        external = [int(rng.integers(n)) for _ in range(l)]
        import warnings
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return ge.MetricGraph(n, internal, external)


def random_coeffs(rng, g, lo=0.25, hi=4.0):
    internal = tuple(ge.constant(float(rng.uniform(lo, hi))) for _ in range(g.m))
    external = tuple(ge.constant(float(rng.uniform(lo, hi))) for _ in range(g.l))
    return ge.EdgeCoefficients(internal, external)
