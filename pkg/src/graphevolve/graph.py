"""Finite metric-graph model and its incidence / degree linear algebra.

A graph has ``n`` integer-indexed vertices, ``m`` internal edges
parametrized on [0, 1] (0 at the tail vertex, 1 at the head) and ``l``
external edges parametrized on the half line (0 at the anchor vertex).
Traces of edge functions are always ordered ``(f_e(0), f_i(0), f_i(1))``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyGraphError, IndexOutOfRangeError


@dataclass(frozen=True)
class MetricGraph:
    """Vertex count plus internal (tail, head) and external (anchor) edge lists."""

    n: int
    internal_edges: tuple[tuple[int, int], ...] = ()
    external_edges: tuple[int, ...] = ()

    def __init__(self, n, internal_edges=(), external_edges=()):
        object.__setattr__(self, "n", int(n))
        object.__setattr__(
            self, "internal_edges", tuple((int(t), int(h)) for t, h in internal_edges)
        )
        object.__setattr__(self, "external_edges", tuple(int(a) for a in external_edges))
        validate_graph(self)

    @property
    def m(self) -> int:
        return len(self.internal_edges)

    @property
    def l(self) -> int:
        return len(self.external_edges)

    @property
    def trace_dim(self) -> int:
        """Dimension of the endpoint trace space, l + 2m."""
        return self.l + 2 * self.m


@dataclass(frozen=True)
class IncidenceSet:
    """0/1 incidence matrices; each column carries exactly one 1."""

    phi_e_minus: np.ndarray  # n x l
    phi_i_minus: np.ndarray  # n x m
    phi_i_plus: np.ndarray  # n x m


@dataclass(frozen=True)
class DegreeSet:
    """Diagonal degree matrices D^† = Φ^† (Φ^†)ᵀ and their sum."""

    d_e_minus: np.ndarray
    d_i_minus: np.ndarray
    d_i_plus: np.ndarray
    d_total: np.ndarray


def validate_graph(g: MetricGraph) -> None:
    """Raise unless the graph invariants hold; warn on isolated vertices."""
    if g.n < 1:
        raise IndexOutOfRangeError(f"vertex count must be >= 1, got {g.n}")
    if g.m + g.l == 0:
        raise EmptyGraphError("graph must have at least one edge (l + m > 0)")
    for j, (tail, head) in enumerate(g.internal_edges):
        for v in (tail, head):
            if not 0 <= v < g.n:
                raise IndexOutOfRangeError(
                    f"internal edge {j} endpoint {v} outside [0, {g.n})"
                )
    for k, anchor in enumerate(g.external_edges):
        if not 0 <= anchor < g.n:
            raise IndexOutOfRangeError(
                f"external edge {k} anchor {anchor} outside [0, {g.n})"
            )
    touched = incident_vertices(g)
    if len(touched) < g.n:
        isolated = sorted(set(range(g.n)) - touched)
        warnings.warn(f"isolated vertices present: {isolated}", stacklevel=2)


def incident_vertices(g: MetricGraph) -> set[int]:
    """Vertices touched by at least one edge endpoint."""
    touched: set[int] = set()
    for tail, head in g.internal_edges:
        touched.add(tail)
        touched.add(head)
    touched.update(g.external_edges)
    return touched


def incidence_matrices(g: MetricGraph) -> IncidenceSet:
    """Build the three 0/1 incidence matrices of the graph."""
    phi_e = np.zeros((g.n, g.l))
    phi_im = np.zeros((g.n, g.m))
    phi_ip = np.zeros((g.n, g.m))
    for k, anchor in enumerate(g.external_edges):
        phi_e[anchor, k] = 1.0
    for j, (tail, head) in enumerate(g.internal_edges):
        phi_im[tail, j] = 1.0
        phi_ip[head, j] = 1.0
    return IncidenceSet(phi_e, phi_im, phi_ip)


def degree_matrices(g: MetricGraph) -> DegreeSet:
    """Diagonal degree matrices; d_total carries the joint vertex degrees."""
    inc = incidence_matrices(g)
    d_e = inc.phi_e_minus @ inc.phi_e_minus.T
    d_im = inc.phi_i_minus @ inc.phi_i_minus.T
    d_ip = inc.phi_i_plus @ inc.phi_i_plus.T
    return DegreeSet(d_e, d_im, d_ip, d_e + d_im + d_ip)


def trace_stack(g: MetricGraph) -> np.ndarray:
    """Stacked incidence transposes, (l + 2m) x n, in trace order."""
    inc = incidence_matrices(g)
    return np.vstack([inc.phi_e_minus.T, inc.phi_i_minus.T, inc.phi_i_plus.T])


def continuity_space(g: MetricGraph) -> np.ndarray:
    """Basis of the traces of functions continuous across every vertex.

    Columns of the stacked incidence transposes have disjoint supports
    (one column per vertex), so the non-zero columns already form a basis;
    its rank equals the number of non-isolated vertices.
    """
    stack = trace_stack(g)
    keep = [v for v in range(g.n) if stack[:, v].any()]
    return stack[:, keep].astype(complex)
