"""Boundary-condition representations, builders, and residual evaluation.

Two interchangeable representations are supported:

* matrices form -- ``k0`` value rows (V-blocks) and ``k1`` derivative rows
  (W-blocks plus optional zeroth-order U-blocks), ``k0 + k1 = l + 2m``;
* spaces form -- the value trace must lie in a subspace ``Y1`` and the signed
  mu-weighted flux trace (plus optional zeroth-order terms) in a complementary
  subspace ``Y0``.

Trace ordering is always ``(f_e(0), f_i(0), f_i(1))``; the flux trace carries
``mu``-weighted *outward* derivatives, so the ``f_i(1)`` block has a minus sign.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .coeffs import EdgeCoefficients
from .errors import (
    DimensionMismatchError,
    ExternalEdgesPresentError,
    NotComplementaryError,
    RankDeficientBasisError,
    ZeroDegreeVertexError,
)
from .graph import MetricGraph, continuity_space, degree_matrices, incidence_matrices


@dataclass(frozen=True)
class TraceVector:
    """Endpoint traces of one edge-function family.

    value_trace: (f_e(0), f_i(0), f_i(1)), length l + 2m.
    flux_trace:  (mu_e(0) f_e'(0), mu_i(0) f_i'(0), -mu_i(1) f_i'(1)).
    """

    value_trace: np.ndarray
    flux_trace: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.value_trace, dtype=complex).ravel()
        f = np.asarray(self.flux_trace, dtype=complex).ravel()
        if v.shape != f.shape:
            raise DimensionMismatchError("value and flux traces differ in length")
        object.__setattr__(self, "value_trace", v)
        object.__setattr__(self, "flux_trace", f)


def make_trace(values_e0, values_i0, values_i1,
               derivs_e0, derivs_i0, derivs_i1,
               mu_endpoints=None) -> TraceVector:
    """Assemble a TraceVector from endpoint values and raw derivatives."""
    ve, vi0, vi1 = (np.atleast_1d(np.asarray(x, dtype=complex))
                    for x in (values_e0, values_i0, values_i1))
    de, di0, di1 = (np.atleast_1d(np.asarray(x, dtype=complex))
                    for x in (derivs_e0, derivs_i0, derivs_i1))
    if mu_endpoints is None:
        mu_e0, mu_i0, mu_i1 = np.ones(ve.size), np.ones(vi0.size), np.ones(vi1.size)
    else:
        mu_e0, mu_i0, mu_i1 = mu_endpoints
    value = np.concatenate([ve, vi0, vi1])
    flux = np.concatenate([mu_e0 * de, mu_i0 * di0, -np.asarray(mu_i1) * di1])
    return TraceVector(value, flux)


@dataclass(frozen=True)
class BoundaryMatricesBC:
    """k0 value conditions and k1 derivative conditions in matrix form.

    Value rows:  V0e f_e(0) + V0i f_i(0) + V1i f_i(1) = 0.
    Flux rows:   W0e f_e'(0) + W0i f_i'(0) - W1i f_i'(1)
                 + U0e f_e(0) + U0i f_i(0) + U1i f_i(1) = 0.
    """

    v0e: np.ndarray
    v0i: np.ndarray
    v1i: np.ndarray
    w0e: np.ndarray
    w0i: np.ndarray
    w1i: np.ndarray
    u0e: np.ndarray
    u0i: np.ndarray
    u1i: np.ndarray

    def __post_init__(self):
        for name in ("v0e", "v0i", "v1i", "w0e", "w0i", "w1i", "u0e", "u0i", "u1i"):
            object.__setattr__(self, name,
                               np.atleast_2d(np.asarray(getattr(self, name), dtype=complex)))
        k0 = self.v0e.shape[0]
        k1 = self.w0e.shape[0]
        l = self.v0e.shape[1]
        m = self.v0i.shape[1]
        for name, rows, cols in (("v0i", k0, m), ("v1i", k0, m),
                                 ("w0e", k1, l), ("w0i", k1, m), ("w1i", k1, m),
                                 ("u0e", k1, l), ("u0i", k1, m), ("u1i", k1, m)):
            if getattr(self, name).shape != (rows, cols):
                raise DimensionMismatchError(
                    f"{name} has shape {getattr(self, name).shape}, expected {(rows, cols)}"
                )

    @property
    def k0(self) -> int:
        return self.v0e.shape[0]

    @property
    def k1(self) -> int:
        return self.w0e.shape[0]

    @property
    def l(self) -> int:
        return self.v0e.shape[1]

    @property
    def m(self) -> int:
        return self.v0i.shape[1]

    @property
    def trace_dim(self) -> int:
        return self.l + 2 * self.m


def matrices_bc(*, l: int, m: int, k0: int, k1: int,
                v0e=None, v0i=None, v1i=None,
                w0e=None, w0i=None, w1i=None,
                u0e=None, u0i=None, u1i=None) -> BoundaryMatricesBC:
    """Convenience constructor filling unspecified blocks with zeros."""
    if k0 + k1 != l + 2 * m:
        raise DimensionMismatchError(f"k0 + k1 = {k0 + k1} must equal l + 2m = {l + 2 * m}")

    def blk(x, rows, cols):
        if x is None:
            return np.zeros((rows, cols), dtype=complex)
        x = np.asarray(x, dtype=complex).reshape(rows, cols)
        return x

    return BoundaryMatricesBC(
        blk(v0e, k0, l), blk(v0i, k0, m), blk(v1i, k0, m),
        blk(w0e, k1, l), blk(w0i, k1, m), blk(w1i, k1, m),
        blk(u0e, k1, l), blk(u0i, k1, m), blk(u1i, k1, m),
    )


@dataclass(frozen=True)
class BoundarySpacesBC:
    """Subspace form: value trace in Y1, flux trace + U-terms in Y0.

    local_U, when present, is a dense (l+2m) x (l+2m) matrix acting on the
    value trace; the flux membership condition reads
    ``flux_trace + local_U @ value_trace in Y0``.
    nonlocal_kernels optionally carries per-edge sampled integral kernels
    contributing distributed terms; they never influence trace residuals here
    (they are consumed by the heat assembler).
    mu_endpoints records the endpoint wave speeds (mu_e(0), mu_i(0), mu_i(1))
    used to translate between flux and raw-derivative conventions.
    """

    y1_basis: np.ndarray
    y0_basis: np.ndarray
    local_U: np.ndarray | None = None
    nonlocal_kernels: tuple | None = None
    mu_endpoints: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None

    def __post_init__(self):
        y1 = np.atleast_2d(np.asarray(self.y1_basis, dtype=complex))
        y0 = np.atleast_2d(np.asarray(self.y0_basis, dtype=complex))
        if y1.shape[0] != y0.shape[0]:
            raise DimensionMismatchError("Y0 and Y1 bases live in different trace spaces")
        object.__setattr__(self, "y1_basis", y1)
        object.__setattr__(self, "y0_basis", y0)
        for basis, name in ((y1, "y1_basis"), (y0, "y0_basis")):
            if basis.shape[1] and _rank(basis) < basis.shape[1]:
                raise RankDeficientBasisError(f"{name} does not have full column rank")
        if self.local_U is not None:
            u = np.asarray(self.local_U, dtype=complex)
            n = y1.shape[0]
            if u.shape != (n, n):
                raise DimensionMismatchError(
                    f"local_U has shape {u.shape}, expected {(n, n)}"
                )
            object.__setattr__(self, "local_U", u)

    @property
    def trace_dim(self) -> int:
        return self.y1_basis.shape[0]

    @property
    def d1(self) -> int:
        return self.y1_basis.shape[1]

    @property
    def d0(self) -> int:
        return self.y0_basis.shape[1]


@dataclass(frozen=True)
class DeltaCoupling:
    """Per-vertex coupling coefficients for delta-type conditions."""

    alpha: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "alpha", np.asarray(self.alpha, dtype=complex).ravel())


def _rank(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    tol = max(a.shape) * np.finfo(float).eps * (s[0] if s.size else 0.0)
    return int(np.sum(s > tol))


def _hermitian_complement(basis: np.ndarray, dim: int) -> np.ndarray:
    """Orthonormal basis of the Hermitian orthogonal complement in C^dim."""
    if basis.shape[1] == 0:
        return np.eye(dim, dtype=complex)
    return scipy.linalg.null_space(basis.conj().T)


def _annihilator_rows(basis: np.ndarray, dim: int) -> np.ndarray:
    """Rows R with R @ basis = 0 and ker(R) = span(basis) (bilinear pairing)."""
    if basis.shape[1] == 0:
        return np.eye(dim, dtype=complex)
    return scipy.linalg.null_space(basis.T).T


def _mu_scaling(bc_or_mu) -> np.ndarray:
    """Diagonal of C^{-1} = diag(mu_e(0), mu_i(0), mu_i(1)) as one vector."""
    mu_e0, mu_i0, mu_i1 = bc_or_mu
    return np.concatenate([np.atleast_1d(mu_e0), np.atleast_1d(mu_i0), np.atleast_1d(mu_i1)])


def from_standard(g: MetricGraph, coeffs: EdgeCoefficients) -> BoundarySpacesBC:
    """Continuity across vertices plus Kirchhoff flux balance.

    Y1 is the continuity space; Y0 = C * Y1-perp with
    C = diag(mu_e(0)^-1, mu_i(0)^-1, mu_i(1)^-1), so the flux membership is
    exactly the vanishing of lambda-weighted outward derivative sums.
    """
    coeffs.validate_against(g.m, g.l)
    mu_ends = coeffs.mu_endpoint_diagonals()
    y1 = continuity_space(g)
    perp = _hermitian_complement(y1, g.trace_dim)
    y0 = perp / _mu_scaling(mu_ends)[:, None]
    return BoundarySpacesBC(y1, y0, mu_endpoints=mu_ends)


def from_delta(g: MetricGraph, coeffs: EdgeCoefficients,
               delta: DeltaCoupling) -> BoundarySpacesBC:
    """Delta-type coupling: Kirchhoff flux sums equal alpha_v times the value.

    The vertex coefficient alpha_v is spread over the deg(v) endpoint traces,
    giving per-endpoint diagonal weights alpha_v / deg(v); the resulting
    zeroth-order term is folded into local_U.
    """
    coeffs.validate_against(g.m, g.l)
    if delta.alpha.size != g.n:
        raise DimensionMismatchError(
            f"alpha has length {delta.alpha.size}, graph has {g.n} vertices"
        )
    deg = np.diag(degree_matrices(g).d_total)
    for v in range(g.n):
        if deg[v] == 0 and delta.alpha[v] != 0:
            raise ZeroDegreeVertexError(f"alpha[{v}] != 0 but vertex {v} is isolated")
    weights = np.zeros(g.n, dtype=complex)
    nz = deg > 0
    weights[nz] = delta.alpha[nz] / deg[nz]
    endpoint_vertices = (list(g.external_edges)
                         + [t for t, _ in g.internal_edges]
                         + [h for _, h in g.internal_edges])
    dtilde = np.array([weights[v] for v in endpoint_vertices])
    base = from_standard(g, coeffs)
    local_u = np.diag(-dtilde / _mu_scaling(base.mu_endpoints))
    return BoundarySpacesBC(base.y1_basis, base.y0_basis, local_U=local_u,
                            mu_endpoints=base.mu_endpoints)


def from_nonlocal_matrices(g: MetricGraph, coeffs: EdgeCoefficients,
                           m_e: np.ndarray, m_i_minus: np.ndarray,
                           m_i_plus: np.ndarray) -> BoundarySpacesBC:
    """Vertex flux sums driven by arbitrary linear combinations of all traces.

    The vertex condition couples each flux balance to M-weighted endpoint
    values of possibly distant edges; delta-type coupling is the diagonal
    special case.
    """
    coeffs.validate_against(g.m, g.l)
    m_e = np.asarray(m_e, dtype=complex).reshape(g.l, g.l)
    m_im = np.asarray(m_i_minus, dtype=complex).reshape(g.m, g.m)
    m_ip = np.asarray(m_i_plus, dtype=complex).reshape(g.m, g.m)
    base = from_standard(g, coeffs)
    block = scipy.linalg.block_diag(m_e, m_im, m_ip) if g.trace_dim else np.zeros((0, 0))
    local_u = -block.astype(complex) / _mu_scaling(base.mu_endpoints)[:, None]
    return BoundarySpacesBC(base.y1_basis, base.y0_basis, local_U=local_u,
                            mu_endpoints=base.mu_endpoints)


def from_matrix_mixed(g: MetricGraph, k_matrix: np.ndarray) -> BoundarySpacesBC:
    """Compact-graph conditions (f'(0), f'(1)) = K (f(0), f(1)).

    Y0 = {0}, Y1 = C^{2m}; the derivative constraint is carried entirely by
    local_U in the signed-flux convention with unit speeds.
    """
    if g.l != 0:
        raise ExternalEdgesPresentError("matrix-mixed conditions require a compact graph")
    m = g.m
    k_matrix = np.asarray(k_matrix, dtype=complex).reshape(2 * m, 2 * m)
    sign = np.diag(np.concatenate([np.ones(m), -np.ones(m)])).astype(complex)
    local_u = -sign @ k_matrix
    mu_ends = (np.ones(0), np.ones(m), np.ones(m))
    return BoundarySpacesBC(np.eye(2 * m, dtype=complex),
                            np.zeros((2 * m, 0), dtype=complex),
                            local_U=local_u, mu_endpoints=mu_ends)


def from_generalized_node(g: MetricGraph, y_basis: np.ndarray, w: np.ndarray,
                          coeffs: EdgeCoefficients) -> BoundarySpacesBC:
    """Compact-graph node space Y with feedback matrix W.

    Y1 = Y, Y0 = C * Y-perp (Hermitian complement), and the zeroth-order term
    C * Y * W applied to the Y-coordinates of the value trace is stored as a
    dense local_U using the pseudoinverse coordinate map.
    """
    if g.l != 0:
        raise ExternalEdgesPresentError("generalized node conditions require a compact graph")
    coeffs.validate_against(g.m, 0)
    y_basis = np.atleast_2d(np.asarray(y_basis, dtype=complex))
    if y_basis.shape[0] != 2 * g.m:
        raise DimensionMismatchError(
            f"Y basis has {y_basis.shape[0]} rows, trace space has {2 * g.m}"
        )
    d = y_basis.shape[1]
    if _rank(y_basis) < d:
        raise RankDeficientBasisError("Y basis does not have full column rank")
    w = np.asarray(w, dtype=complex).reshape(d, d)
    mu_ends = coeffs.mu_endpoint_diagonals()
    perp = _hermitian_complement(y_basis, 2 * g.m)
    scale = _mu_scaling(mu_ends)
    y0 = perp / scale[:, None]
    local_u = (y_basis @ w @ np.linalg.pinv(y_basis)) / scale[:, None]
    return BoundarySpacesBC(y_basis, y0, local_U=local_u, mu_endpoints=mu_ends)


def from_nonlocal_interval(h0_samples, h1_samples) -> BoundarySpacesBC:
    """Single-interval conditions tying each endpoint value to a kernel integral.

    The kernels (sampled uniformly on [0,1]) are consumed by the heat
    assembler as quadrature rows; trace residuals carry no constraint.
    """
    h0 = np.asarray(h0_samples, dtype=complex).ravel()
    h1 = np.asarray(h1_samples, dtype=complex).ravel()
    if h0.size < 2 or h1.size < 2:
        raise DimensionMismatchError("kernels need at least two samples")
    mu_ends = (np.ones(0), np.ones(1), np.ones(1))
    return BoundarySpacesBC(np.eye(2, dtype=complex), np.zeros((2, 0), dtype=complex),
                            nonlocal_kernels=(h0, h1), mu_endpoints=mu_ends)


def to_boundary_matrices(bc: BoundarySpacesBC, l: int, m: int) -> BoundaryMatricesBC:
    """Row form of the two membership conditions.

    k0 rows annihilate Y1 (value conditions); k1 rows annihilate Y0 applied to
    the flux trace plus U-terms, unpacked into W/U blocks with the endpoint
    speeds restoring the raw-derivative convention.
    """
    dim = bc.trace_dim
    if l + 2 * m != dim:
        raise DimensionMismatchError(f"l + 2m = {l + 2 * m} does not match trace dim {dim}")
    if bc.d0 + bc.d1 != dim:
        raise NotComplementaryError(
            f"d0 + d1 = {bc.d0 + bc.d1} != {dim}; conversion undefined"
        )
    joint = np.hstack([bc.y0_basis, bc.y1_basis])
    s = np.linalg.svd(joint, compute_uv=False)
    if s[-1] <= dim * np.finfo(float).eps * s[0] * 100:
        raise NotComplementaryError("Y0 and Y1 are not complementary (joint basis singular)")

    r_val = _annihilator_rows(bc.y1_basis, dim)  # k0 x dim
    r_flux = _annihilator_rows(bc.y0_basis, dim)  # k1 x dim

    mu_ends = bc.mu_endpoints
    if mu_ends is None:
        mu_ends = (np.ones(l), np.ones(m), np.ones(m))
    mu_e0, mu_i0, mu_i1 = (np.atleast_1d(x) for x in mu_ends)

    u_rows = r_flux @ bc.local_U if bc.local_U is not None else np.zeros((r_flux.shape[0], dim), dtype=complex)

    sl = slice(0, l)
    si0 = slice(l, l + m)
    si1 = slice(l + m, l + 2 * m)
    return BoundaryMatricesBC(
        r_val[:, sl], r_val[:, si0], r_val[:, si1],
        r_flux[:, sl] * mu_e0, r_flux[:, si0] * mu_i0, r_flux[:, si1] * mu_i1,
        u_rows[:, sl], u_rows[:, si0], u_rows[:, si1],
    )


def value_residual(bc, trace: TraceVector) -> np.ndarray:
    """Residual of the value conditions; zero iff the value trace is admissible."""
    v = trace.value_trace
    if isinstance(bc, BoundaryMatricesBC):
        if v.size != bc.trace_dim:
            raise DimensionMismatchError("trace length does not match the conditions")
        rows = np.hstack([bc.v0e, bc.v0i, bc.v1i])
        return rows @ v
    if v.size != bc.trace_dim:
        raise DimensionMismatchError("trace length does not match the conditions")
    return _annihilator_rows(bc.y1_basis, bc.trace_dim) @ v


def flux_residual(bc, trace: TraceVector,
                  coeffs: EdgeCoefficients | None = None) -> np.ndarray:
    """Residual of the derivative conditions, including zeroth-order U-terms.

    For the matrices form the stored W blocks multiply raw derivatives, so the
    mu-weighted flux trace is rescaled by the endpoint speeds (unit speeds
    unless `coeffs` is given).
    """
    v, f = trace.value_trace, trace.flux_trace
    if isinstance(bc, BoundaryMatricesBC):
        if v.size != bc.trace_dim:
            raise DimensionMismatchError("trace length does not match the conditions")
        if coeffs is not None:
            mu_scale = _mu_scaling(coeffs.mu_endpoint_diagonals())
        else:
            mu_scale = np.ones(bc.trace_dim)
        wbar = np.hstack([bc.w0e, bc.w0i, bc.w1i]) / mu_scale
        u_rows = np.hstack([bc.u0e, bc.u0i, bc.u1i])
        return wbar @ f + u_rows @ v
    if v.size != bc.trace_dim:
        raise DimensionMismatchError("trace length does not match the conditions")
    combined = f + (bc.local_U @ v if bc.local_U is not None else 0.0)
    return _annihilator_rows(bc.y0_basis, bc.trace_dim) @ combined
