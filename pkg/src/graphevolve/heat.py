"""Heat propagation by an implicit theta-scheme on per-edge uniform grids.

Interior nodes use the second-order central difference of lambda(s) u_ss.
Boundary conditions enter as rows of the implicit system:

* matrices form -- value rows on trace nodes, derivative rows via
  second-order one-sided stencils, U-terms on trace nodes;
* spaces form built from continuity (standard / delta / nonlocal-matrices
  couplings) -- continuity rows plus conservative half-cell vertex balance
  rows, which conserve discrete mass exactly for edgewise-constant lambda
  under pure Kirchhoff coupling;
* nonlocal interval kernels -- quadrature rows tying each endpoint value to a
  weighted integral of the whole profile;
* external edges -- truncated with a homogeneous far-end row.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .bc import BoundaryMatricesBC, BoundarySpacesBC, to_boundary_matrices
from .coeffs import EdgeCoefficients
from .errors import (
    DimensionMismatchError,
    NotWellPosedError,
    SingularSystemError,
)
from .graph import MetricGraph, continuity_space, incident_vertices
from .initial import InitialData
from .wave import Diagnostics
from .wellposed import auto_shrink_t0, check_boundary_matrices, check_boundary_spaces


@dataclass
class HeatEdgeFields:
    s: np.ndarray
    u: np.ndarray
    lam: np.ndarray  # lambda at the nodes

    @property
    def h(self) -> float:
        return float(self.s[1] - self.s[0])


@dataclass
class HeatState:
    graph: MetricGraph
    t: float
    dt: float
    theta: float
    external: list[HeatEdgeFields]
    internal: list[HeatEdgeFields]
    offsets: list[int]  # per edge in (external + internal) order
    lu: tuple
    explicit: np.ndarray
    step_count: int = 0

    def edges(self):
        return self.external + self.internal

    def vector(self) -> np.ndarray:
        return np.concatenate([e.u for e in self.edges()])

    def scatter(self, vec: np.ndarray) -> None:
        for off, e in zip(self.offsets, self.edges()):
            e.u = vec[off:off + e.u.size].copy()


def _is_continuity_form(bc: BoundarySpacesBC, g: MetricGraph) -> bool:
    ref = continuity_space(g)
    return bc.y1_basis.shape == ref.shape and np.array_equal(bc.y1_basis, ref)


def heat_init(g: MetricGraph, coeffs: EdgeCoefficients, bc, init: InitialData,
              dt: float, theta: float = 0.5, n_per_edge: int = 100,
              external_lengths=()) -> HeatState:
    """Assemble and factorize the implicit system; verify well-posedness first."""
    if not 0.5 <= theta <= 1.0:
        raise ValueError("theta must lie in [1/2, 1]")
    if n_per_edge < 4:
        raise ValueError("need at least 4 cells per edge")
    coeffs.validate_against(g.m, g.l)
    if len(init.internal) != g.m or len(init.external) != g.l:
        raise DimensionMismatchError("initial data does not match the edge counts")
    if len(external_lengths) != g.l:
        raise DimensionMismatchError("external_lengths must list one length per external edge")

    nonlocal_kernels = None
    if isinstance(bc, BoundaryMatricesBC):
        report = check_boundary_matrices(bc, coeffs)
        if not report.well_posed:
            raise NotWellPosedError("boundary conditions fail the determinant criterion")
        mode = "matrices"
    elif isinstance(bc, BoundarySpacesBC):
        if bc.nonlocal_kernels is not None:
            h0, h1 = bc.nonlocal_kernels
            report = auto_shrink_t0(h0, h1, 1.0)
            if not report.well_posed:
                raise NotWellPosedError("nonlocal kernels fail the Young certificate "
                                        "for every tested horizon")
            nonlocal_kernels = (np.asarray(h0, dtype=complex).ravel(),
                                np.asarray(h1, dtype=complex).ravel())
            mode = "nonlocal"
            if g.m != 1 or g.l != 0:
                raise DimensionMismatchError(
                    "nonlocal interval kernels require a single internal edge"
                )
        else:
            report = check_boundary_spaces(bc)
            if not report.well_posed:
                raise NotWellPosedError("boundary spaces fail the direct-sum criterion")
            mode = "continuity" if _is_continuity_form(bc, g) else "matrices"
            if mode == "matrices":
                bc = to_boundary_matrices(bc, g.l, g.m)
    else:
        raise TypeError("bc must be BoundaryMatricesBC or BoundarySpacesBC")

    # grids, per-edge coefficients, initial values
    external, internal, offsets = [], [], []
    total = 0
    for k in range(g.l):
        L = float(external_lengths[k])
        n = max(4, round(n_per_edge * L))
        s = np.linspace(0.0, L, n + 1)
        lam = np.asarray(coeffs.external[k](s), dtype=float)
        u = init.external[k].displacement.value(s).astype(complex)
        external.append(HeatEdgeFields(s, u, lam))
        offsets.append(total)
        total += n + 1
    for j in range(g.m):
        s = np.linspace(0.0, 1.0, n_per_edge + 1)
        lam = np.asarray(coeffs.internal[j](s), dtype=float)
        u = init.internal[j].displacement.value(s).astype(complex)
        internal.append(HeatEdgeFields(s, u, lam))
        offsets.append(total)
        total += n_per_edge + 1

    edges = external + internal
    a = np.zeros((total, total), dtype=complex)
    b = np.zeros((total, total), dtype=complex)
    row = 0

    # interior theta-scheme rows
    for off, e in zip(offsets, edges):
        h = e.h
        n = e.u.size - 1
        for i in range(1, n):
            r = h * h / (e.lam[i] * dt)  # scaled so diagonals stay O(1)
            a[row, off + i] = r + 2.0 * theta
            a[row, off + i - 1] = -theta
            a[row, off + i + 1] = -theta
            b[row, off + i] = r - 2.0 * (1.0 - theta)
            b[row, off + i - 1] = 1.0 - theta
            b[row, off + i + 1] = 1.0 - theta
            row += 1

    # external far-end truncation rows
    for k in range(g.l):
        a[row, offsets[k] + external[k].u.size - 1] = 1.0
        row += 1

    # trace node bookkeeping in (f_e(0), f_i(0), f_i(1)) order
    trace_nodes = ([offsets[k] for k in range(g.l)]
                   + [offsets[g.l + j] for j in range(g.m)]
                   + [offsets[g.l + j] + internal[j].u.size - 1 for j in range(g.m)])

    if mode == "nonlocal":
        row = _assemble_nonlocal_rows(a, row, internal[0], offsets[g.l], nonlocal_kernels)
    elif mode == "continuity":
        row = _assemble_vertex_rows(a, b, row, g, coeffs, bc, edges, offsets,
                                    trace_nodes, dt, theta)
    else:
        row = _assemble_matrix_rows(a, row, bc, edges, offsets, trace_nodes, g.l, g.m)

    if row != total:
        raise AssertionError(f"assembled {row} rows for {total} unknowns")

    sigmas = np.linalg.svd(a, compute_uv=False)
    if sigmas[-1] <= total * 1e-12 * sigmas[0]:
        raise SingularSystemError(
            f"implicit system singular at this resolution (sigma_min = {sigmas[-1]:.3e})"
        )
    lu = scipy.linalg.lu_factor(a)
    return HeatState(g, 0.0, dt, theta, external, internal, offsets, lu, b)


def _assemble_nonlocal_rows(a, row, edge, off, kernels):
    """Endpoint value = trapezoid quadrature of kernel times the profile."""
    s = edge.s
    n = s.size
    grid = np.linspace(0.0, 1.0, kernels[0].size)
    w = np.full(n, edge.h)
    w[0] *= 0.5
    w[-1] *= 0.5
    for j, kernel in enumerate(kernels):
        vals = np.interp(s, grid, kernel.real) + 1j * np.interp(s, grid, kernel.imag)
        node = off if j == 0 else off + n - 1
        a[row, off:off + n] = -w * vals
        a[row, node] += 1.0
        row += 1
    return row


def _assemble_vertex_rows(a, b, row, g, coeffs, bc, edges, offsets,
                          trace_nodes, dt, theta):
    """Continuity rows plus conservative half-cell flux balance per vertex."""
    # endpoint -> (vertex, trace slot, global trace node, neighbor node, h, lam_half)
    endpoint_info = []
    for k in range(g.l):
        e = edges[k]
        lam_half = 0.5 * (e.lam[0] + e.lam[1])
        endpoint_info.append((g.external_edges[k], k, offsets[k], offsets[k] + 1,
                              e.h, lam_half))
    for j in range(g.m):
        e = edges[g.l + j]
        off = offsets[g.l + j]
        n = e.u.size - 1
        tail, head = g.internal_edges[j]
        endpoint_info.append((tail, g.l + j, off, off + 1,
                              e.h, 0.5 * (e.lam[0] + e.lam[1])))
        endpoint_info.append((head, g.l + g.m + j, off + n, off + n - 1,
                              e.h, 0.5 * (e.lam[n] + e.lam[n - 1])))

    by_vertex: dict[int, list] = {}
    for info in endpoint_info:
        by_vertex.setdefault(info[0], []).append(info)

    # continuity rows: all endpoint values at a vertex agree
    for v in sorted(by_vertex):
        nodes = [info[2] for info in by_vertex[v]]
        for node in nodes[1:]:
            a[row, node] = 1.0
            a[row, nodes[0]] = -1.0
            row += 1

    # zeroth-order source per vertex: flux sums equal src_rows @ trace values
    dim = g.trace_dim
    if bc.local_U is not None:
        from .bc import _mu_scaling
        from .graph import trace_stack
        mu_scale = _mu_scaling(bc.mu_endpoints) if bc.mu_endpoints is not None \
            else np.ones(dim)
        src = trace_stack(g).T @ (mu_scale[:, None] * bc.local_U)  # n x dim
    else:
        src = np.zeros((g.n, dim), dtype=complex)

    for v in sorted(by_vertex):
        for (_, slot, tr, adj, h, lam_half) in by_vertex[v]:
            cap = 0.5 * h / dt
            flux = lam_half / h
            a[row, tr] += cap + theta * flux
            a[row, adj] += -theta * flux
            b[row, tr] += cap - (1.0 - theta) * flux
            b[row, adj] += (1.0 - theta) * flux
        for slot in range(dim):
            if src[v, slot] != 0.0:
                a[row, trace_nodes[slot]] += -theta * src[v, slot]
                b[row, trace_nodes[slot]] += (1.0 - theta) * src[v, slot]
        row += 1
    return row


def _assemble_matrix_rows(a, row, bc: BoundaryMatricesBC, edges, offsets,
                          trace_nodes, l, m):
    """Value rows and one-sided-stencil derivative rows of the matrices form."""
    v_rows = np.hstack([bc.v0e, bc.v0i, bc.v1i])
    for r in range(bc.k0):
        for slot in range(l + 2 * m):
            if v_rows[r, slot] != 0.0:
                a[row, trace_nodes[slot]] += v_rows[r, slot]
        row += 1

    def stencil_start(off, h):
        return ((off, -1.5 / h), (off + 1, 2.0 / h), (off + 2, -0.5 / h))

    def stencil_end(off, n, h):
        return ((off + n, 1.5 / h), (off + n - 1, -2.0 / h), (off + n - 2, 0.5 / h))

    u_rows = np.hstack([bc.u0e, bc.u0i, bc.u1i])
    for r in range(bc.k1):
        for k in range(l):
            coeff = bc.w0e[r, k]
            if coeff != 0.0:
                for node, wgt in stencil_start(offsets[k], edges[k].h):
                    a[row, node] += coeff * wgt
        for j in range(m):
            e = edges[l + j]
            off = offsets[l + j]
            n = e.u.size - 1
            c0 = bc.w0i[r, j]
            if c0 != 0.0:
                for node, wgt in stencil_start(off, e.h):
                    a[row, node] += c0 * wgt
            c1 = bc.w1i[r, j]
            if c1 != 0.0:
                for node, wgt in stencil_end(off, n, e.h):
                    a[row, node] += -c1 * wgt
        for slot in range(l + 2 * m):
            if u_rows[r, slot] != 0.0:
                a[row, trace_nodes[slot]] += u_rows[r, slot]
        row += 1
    return row


def heat_step(state: HeatState) -> None:
    vec = state.vector()
    new = scipy.linalg.lu_solve(state.lu, state.explicit @ vec)
    state.scatter(new)
    state.step_count += 1
    state.t = state.step_count * state.dt


def mass(state: HeatState) -> float:
    total = 0.0
    for e in state.edges():
        total += np.trapezoid(e.u.real, dx=e.h)
    return float(total)


def energy(state: HeatState) -> float:
    """Dirichlet energy 1/2 sum int lambda |u_s|^2 (trapezoid, central u_s)."""
    total = 0.0
    for e in state.edges():
        us = np.gradient(e.u, e.h)
        total += 0.5 * np.trapezoid(e.lam * np.abs(us) ** 2, dx=e.h)
    return float(total)


def heat_run(state: HeatState, T: float, record_stride: int = 1):
    """Step until time T; return (state, diagnostics, snapshots of (t, u list))."""
    steps = round(T / state.dt)
    if abs(steps * state.dt - T) > 1e-9 * max(1.0, T):
        raise ValueError("T must be an integer multiple of dt")
    diag = Diagnostics()
    snapshots = []

    def snap():
        snapshots.append((state.t, [e.u.copy() for e in state.edges()]))
        diag.record(state.t, energy(state), mass(state))

    snap()
    for step in range(1, steps + 1):
        heat_step(state)
        if step % record_stride == 0 or step == steps:
            snap()
    return state, diag, snapshots
