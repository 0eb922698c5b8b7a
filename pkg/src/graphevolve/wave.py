"""Wave propagation by exact-shift characteristics with vertex coupling.

Each edge carries the Riemann invariants p = u_t + mu u_s (moving toward
s = 0) and q = u_t - mu u_s (moving toward increasing s).  Grids are snapped
so one time step shifts each invariant exactly one cell -- transport is then
dispersion-free.  The displacement is reconstructed as u = F + G from two
characteristic primitives that also shift exactly in the interior; only their
inflow endpoints are integrated in time (trapezoid, q = 2 dF/dt and
p = 2 dG/dt at the respective inflow ends).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bc import BoundaryMatricesBC
from .coeffs import EdgeCoefficients, constant
from .errors import (
    DimensionMismatchError,
    NotWellPosedError,
    SpeedSnapExceededError,
    SupportViolationError,
    UnsupportedVariableCoefficientError,
)
from .graph import MetricGraph
from .initial import InitialData
from .wellposed import VertexUpdate, check_boundary_matrices, vertex_update_matrix


@dataclass
class WaveEdgeFields:
    """Grid fields of one edge; arrays all share the node grid."""

    s: np.ndarray
    mu: float  # snapped speed
    p: np.ndarray
    q: np.ndarray
    fwd: np.ndarray  # right-moving primitive F (u = F + G)
    bwd: np.ndarray  # left-moving primitive G
    u: np.ndarray

    @property
    def h(self) -> float:
        return float(self.s[1] - self.s[0])


@dataclass
class WaveState:
    graph: MetricGraph
    t: float
    dt: float
    internal: list[WaveEdgeFields]
    external: list[WaveEdgeFields]
    update: VertexUpdate
    step_count: int = 0

    def edges(self):
        return self.external + self.internal


@dataclass
class Diagnostics:
    times: list[float] = field(default_factory=list)
    energy: list[float] = field(default_factory=list)
    mass: list[float] = field(default_factory=list)

    def record(self, t: float, e: float, m: float) -> None:
        self.times.append(t)
        self.energy.append(e)
        self.mass.append(m)


def _constant_speed(profile) -> float:
    if not profile.is_constant():
        raise UnsupportedVariableCoefficientError(
            "the wave propagator requires edgewise-constant coefficients"
        )
    return float(np.sqrt(profile(0.0)))


def _snap(mu: float, length: float, dt: float, snap_tol: float) -> tuple[int, float]:
    """Cells-per-edge and effective speed with exact grid alignment."""
    n = max(1, round(length / (mu * dt)))
    mu_tilde = length / (n * dt)
    if abs(mu_tilde - mu) / mu > snap_tol:
        raise SpeedSnapExceededError(
            f"snapped speed {mu_tilde:.6g} deviates from {mu:.6g} beyond tol {snap_tol}"
        )
    return n, mu_tilde


def _init_fields(s: np.ndarray, mu: float, edge_init) -> WaveEdgeFields:
    u0 = edge_init.displacement.value(s).astype(complex)
    du0 = edge_init.displacement.derivative(s).astype(complex)
    u1 = edge_init.velocity.value(s).astype(complex)
    iu1 = edge_init.velocity.antiderivative(s).astype(complex)
    p = u1 + mu * du0
    q = u1 - mu * du0
    fwd = 0.5 * (u0 - iu1 / mu)
    bwd = 0.5 * (u0 + iu1 / mu)
    return WaveEdgeFields(s, mu, p, q, fwd, bwd, u0.copy())


def wave_init(g: MetricGraph, coeffs: EdgeCoefficients, bc: BoundaryMatricesBC,
              init: InitialData, dt_target: float, T: float,
              snap_tol: float = 0.05, external_lengths=()) -> WaveState:
    """Build a wave state with snapped per-edge grids and a vertex solve.

    Refuses boundary conditions that fail the determinant criterion, variable
    coefficients, excessive speed snapping, and external initial data that
    would reach the truncation cut before time T.
    """
    coeffs.validate_against(g.m, g.l)
    if len(init.internal) != g.m or len(init.external) != g.l:
        raise DimensionMismatchError("initial data does not match the edge counts")
    if len(external_lengths) != g.l:
        raise DimensionMismatchError("external_lengths must list one length per external edge")
    report = check_boundary_matrices(bc, coeffs)
    if not report.well_posed:
        raise NotWellPosedError(
            f"boundary conditions rejected (sigma_min = {report.sigma_min:.3e})"
        )

    steps = max(1, math.ceil(T / dt_target))
    dt = T / steps

    internal = []
    snapped_internal = []
    for j in range(g.m):
        mu = _constant_speed(coeffs.internal[j])
        n, mu_t = _snap(mu, 1.0, dt, snap_tol)
        s = np.linspace(0.0, 1.0, n + 1)
        internal.append(_init_fields(s, mu_t, init.internal[j]))
        snapped_internal.append(constant(mu_t**2))

    external = []
    snapped_external = []
    for k in range(g.l):
        mu = _constant_speed(coeffs.external[k])
        L = float(external_lengths[k])
        n, mu_t = _snap(mu, L, dt, snap_tol)
        s = np.linspace(0.0, L, n + 1)
        fields = _init_fields(s, mu_t, init.external[k])
        reach = L - mu_t * T
        far = s > reach
        scale = 1.0 + max(np.max(np.abs(fields.u)), np.max(np.abs(fields.p)))
        if np.any(np.abs(fields.u[far]) > 1e-12 * scale) or \
                np.any(np.abs(fields.p[far]) > 1e-12 * scale) or \
                np.any(np.abs(fields.q[far]) > 1e-12 * scale):
            raise SupportViolationError(
                f"external edge {k}: initial data must vanish on ({reach:.6g}, {L}]"
            )
        external.append(fields)
        snapped_external.append(constant(mu_t**2))

    snapped = EdgeCoefficients(tuple(snapped_internal), tuple(snapped_external))
    update = vertex_update_matrix(bc, snapped)
    return WaveState(g, 0.0, dt, internal, external, update)


def wave_step(state: WaveState) -> None:
    """Advance one time step in place."""
    dt = state.dt

    old_q0 = [e.q[0] for e in state.edges()]
    old_p_end = [e.p[-1] for e in state.edges()]

    # exact interior shifts: p toward s=0, q toward increasing s
    for e in state.edges():
        e.p[:-1] = e.p[1:]
        e.q[1:] = e.q[:-1]
    for e in state.external:
        e.p[-1] = 0.0  # nothing returns from beyond the truncation cut

    incoming = np.concatenate([
        [e.p[0] for e in state.external],
        [e.q[-1] for e in state.internal],
        [e.p[0] for e in state.internal],
    ]) if state.edges() else np.zeros(0)
    values = np.concatenate([
        [e.u[0] for e in state.external],
        [e.u[0] for e in state.internal],
        [e.u[-1] for e in state.internal],
    ]) if state.edges() else np.zeros(0)
    outgoing = state.update.solve(incoming.astype(complex), values.astype(complex))

    l = len(state.external)
    m = len(state.internal)
    for k, e in enumerate(state.external):
        e.q[0] = outgoing[k]
    for j, e in enumerate(state.internal):
        e.p[-1] = outgoing[l + j]
        e.q[0] = outgoing[l + m + j]

    # primitives: exact shifts plus trapezoid inflow at the endpoints
    for idx, e in enumerate(state.edges()):
        f_in = e.fwd[0] + dt * (old_q0[idx] + e.q[0]) / 4.0
        g_in = e.bwd[-1] + dt * (old_p_end[idx] + e.p[-1]) / 4.0
        e.fwd[1:] = e.fwd[:-1]
        e.bwd[:-1] = e.bwd[1:]
        e.fwd[0] = f_in
        e.bwd[-1] = g_in
        e.u = e.fwd + e.bwd

    state.step_count += 1
    state.t = state.step_count * dt


def energy(state: WaveState) -> float:
    """E = 1/2 sum_j int (|u_t|^2 + lambda |u_s|^2) = 1/4 sum int (|p|^2 + |q|^2)."""
    total = 0.0
    for e in state.edges():
        total += 0.25 * np.trapezoid(np.abs(e.p) ** 2 + np.abs(e.q) ** 2, dx=e.h)
    return float(total)


def mass(state: WaveState) -> float:
    total = 0.0
    for e in state.edges():
        total += np.trapezoid(e.u.real, dx=e.h)
    return float(total)


def wave_run(state: WaveState, T: float, record_stride: int = 1):
    """Step until time T; return (state, diagnostics, snapshots).

    Snapshots are (t, per-edge u copies, per-edge u_t copies) tuples recorded
    every record_stride steps, including the initial and final states.
    """
    steps = round(T / state.dt)
    if abs(steps * state.dt - T) > 1e-9 * max(1.0, T):
        raise ValueError("T must be an integer multiple of dt")
    diag = Diagnostics()
    snapshots = []

    def snap():
        us = [e.u.copy() for e in state.edges()]
        uts = [((e.p + e.q) / 2.0).copy() for e in state.edges()]
        snapshots.append((state.t, us, uts))
        diag.record(state.t, energy(state), mass(state))

    snap()
    for step in range(1, steps + 1):
        wave_step(state)
        if step % record_stride == 0 or step == steps:
            snap()
    return state, diag, snapshots
