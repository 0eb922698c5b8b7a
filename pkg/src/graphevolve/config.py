"""YAML run-configuration parsing and validation.

A config is a YAML map with sections ``graph``, ``coefficients``, ``bc``,
and optionally ``sim`` and ``initial``.  Vertices are referenced by name;
matrix entries may be numbers or strings parseable by ``complex()``
(e.g. ``"2+3j"``).  See the README for the full schema.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import yaml

from . import bc as bc_mod
from . import coeffs as coeffs_mod
from . import initial as initial_mod
from .errors import ParseError, ValidationError
from .graph import MetricGraph

BC_KINDS = ("standard", "delta", "nonlocal_matrices", "matrix_mixed",
            "generalized_node", "boundary_matrices", "boundary_spaces",
            "nonlocal_interval")


@dataclass(frozen=True)
class SimConfig:
    equation: str  # wave | heat
    T: float
    dt: float
    theta: float = 0.5
    n_per_edge: int = 100
    snap_tol: float = 0.05
    record_stride: int = 1


@dataclass(frozen=True)
class RunConfig:
    graph: MetricGraph
    vertex_names: tuple[str, ...]
    external_lengths: tuple[float, ...]
    coeffs: coeffs_mod.EdgeCoefficients
    bc_kind: str
    bc: object
    nonlocal_t0: float | None = None
    sim: SimConfig | None = None
    initial: initial_mod.InitialData | None = None


def _fail(path: str, message: str):
    raise ValidationError(path, message)


def _require(mapping, key, path):
    if not isinstance(mapping, dict):
        _fail(path, "expected a map")
    if key not in mapping:
        _fail(f"{path}.{key}", "missing required key")
    return mapping[key]


def _number(value, path) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(path, f"expected a number, got {value!r}")
    return float(value)


def _scalar(value, path) -> complex:
    """A real number or a string accepted by complex()."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, str):
        try:
            return complex(value.replace(" ", ""))
        except ValueError:
            _fail(path, f"cannot parse {value!r} as a complex number")
    _fail(path, f"expected a number or complex string, got {value!r}")


def _matrix(value, rows, cols, path) -> np.ndarray:
    if not isinstance(value, list) or len(value) != rows:
        _fail(path, f"expected a {rows}x{cols} matrix (list of {rows} rows)")
    out = np.zeros((rows, cols), dtype=complex)
    for i, r in enumerate(value):
        if not isinstance(r, list) or len(r) != cols:
            _fail(f"{path}[{i}]", f"expected a row of {cols} entries")
        for j, entry in enumerate(r):
            out[i, j] = _scalar(entry, f"{path}[{i}][{j}]")
    return out


def _parse_graph(section, path="graph"):
    vertices = _require(section, "vertices", path)
    if isinstance(vertices, int):
        names = tuple(f"v{i}" for i in range(vertices))
    elif isinstance(vertices, list) and all(isinstance(v, str) for v in vertices):
        names = tuple(vertices)
        if len(set(names)) != len(names):
            _fail(f"{path}.vertices", "duplicate vertex names")
    else:
        _fail(f"{path}.vertices", "expected a count or a list of names")
    index = {name: i for i, name in enumerate(names)}

    def resolve(ref, p):
        if isinstance(ref, str):
            if ref not in index:
                _fail(p, f"unknown vertex {ref!r}")
            return index[ref]
        if isinstance(ref, int) and 0 <= ref < len(names):
            return ref
        _fail(p, f"cannot resolve vertex reference {ref!r}")

    internal = []
    for i, pair in enumerate(section.get("internal_edges", []) or []):
        p = f"{path}.internal_edges[{i}]"
        if not isinstance(pair, list) or len(pair) != 2:
            _fail(p, "expected a [tail, head] pair")
        internal.append((resolve(pair[0], p), resolve(pair[1], p)))

    anchors, lengths = [], []
    for i, entry in enumerate(section.get("external_edges", []) or []):
        p = f"{path}.external_edges[{i}]"
        if not isinstance(entry, dict):
            _fail(p, "expected a map with vertex and length")
        anchors.append(resolve(_require(entry, "vertex", p), f"{p}.vertex"))
        lengths.append(_number(entry.get("length", 1.0), f"{p}.length"))

    try:
        g = MetricGraph(len(names), internal, anchors)
    except Exception as exc:  # graph invariant violations
        _fail(path, str(exc))
    return g, names, tuple(lengths), index


def _parse_profile(entry, path) -> coeffs_mod.CoefficientProfile:
    kind = _require(entry, "kind", path)
    if kind == "constant":
        return coeffs_mod.constant(_number(_require(entry, "value", path), f"{path}.value"))
    if kind == "quadratic_square":
        return coeffs_mod.quadratic_square(
            _number(_require(entry, "alpha", path), f"{path}.alpha"),
            _number(_require(entry, "beta", path), f"{path}.beta"))
    if kind == "sampled":
        values = _require(entry, "values", path)
        if not isinstance(values, list):
            _fail(f"{path}.values", "expected a list of samples")
        return coeffs_mod.sampled([_number(v, f"{path}.values") for v in values],
                                  _number(entry.get("domain_length", 1.0),
                                          f"{path}.domain_length"))
    _fail(f"{path}.kind", f"unknown coefficient kind {kind!r}")


def _parse_coeffs(section, g, lengths, path="coefficients"):
    if section is None:
        section = {}
    eps = _number(section.get("epsilon", 1e-8), f"{path}.epsilon")

    def profiles(key, count, default_len):
        entries = section.get(key)
        if entries is None:
            return tuple(coeffs_mod.constant(1.0) for _ in range(count))
        if not isinstance(entries, list) or len(entries) != count:
            _fail(f"{path}.{key}", f"expected {count} profile entries")
        out = []
        for i, e in enumerate(entries):
            prof = _parse_profile(e, f"{path}.{key}[{i}]")
            if prof.kind == "sampled" and default_len[i] != prof.domain_length:
                _fail(f"{path}.{key}[{i}]", "sampled domain_length must match the edge")
            out.append(prof)
        return tuple(out)

    internal = profiles("internal", g.m, [1.0] * g.m)
    external = profiles("external", g.l, list(lengths))
    try:
        return coeffs_mod.EdgeCoefficients(internal, external, eps)
    except Exception as exc:
        _fail(path, str(exc))


def _kernel_samples(entry, path) -> np.ndarray:
    if isinstance(entry, list):
        return np.array([_scalar(v, path) for v in entry])
    if isinstance(entry, (int, float, str)):
        return np.full(101, _scalar(entry, path))
    _fail(path, "expected a constant or a list of kernel samples")


def _parse_bc(section, g, coeffs, index, path="bc"):
    kind = _require(section, "kind", path)
    if kind not in BC_KINDS:
        _fail(f"{path}.kind", f"unknown bc kind {kind!r}")
    l, m = g.l, g.m
    t0 = None
    try:
        if kind == "standard":
            built = bc_mod.from_standard(g, coeffs)
        elif kind == "delta":
            raw = _require(section, "alpha", path)
            alpha = np.zeros(g.n, dtype=complex)
            if isinstance(raw, dict):
                for name, val in raw.items():
                    if name not in index:
                        _fail(f"{path}.alpha", f"unknown vertex {name!r}")
                    alpha[index[name]] = _scalar(val, f"{path}.alpha.{name}")
            elif isinstance(raw, list) and len(raw) == g.n:
                alpha = np.array([_scalar(v, f"{path}.alpha") for v in raw])
            else:
                _fail(f"{path}.alpha", "expected a vertex->value map or per-vertex list")
            built = bc_mod.from_delta(g, coeffs, bc_mod.DeltaCoupling(alpha))
        elif kind == "nonlocal_matrices":
            built = bc_mod.from_nonlocal_matrices(
                g, coeffs,
                _matrix(section.get("me", []) if l else [], l, l, f"{path}.me"),
                _matrix(_require(section, "mi_minus", path), m, m, f"{path}.mi_minus"),
                _matrix(_require(section, "mi_plus", path), m, m, f"{path}.mi_plus"))
        elif kind == "matrix_mixed":
            built = bc_mod.from_matrix_mixed(
                g, _matrix(_require(section, "k_matrix", path), 2 * m, 2 * m,
                           f"{path}.k_matrix"))
        elif kind == "generalized_node":
            y = _require(section, "y_basis", path)
            d = len(y[0]) if isinstance(y, list) and y and isinstance(y[0], list) else 0
            y_basis = _matrix(y, 2 * m, d, f"{path}.y_basis")
            w = _matrix(section.get("w", [[0] * d for _ in range(d)]), d, d, f"{path}.w")
            built = bc_mod.from_generalized_node(g, y_basis, w, coeffs)
        elif kind == "boundary_matrices":
            k0 = int(_number(_require(section, "k0", path), f"{path}.k0"))
            k1 = int(_number(_require(section, "k1", path), f"{path}.k1"))
            blocks = {}
            shapes = {"v0e": (k0, l), "v0i": (k0, m), "v1i": (k0, m),
                      "w0e": (k1, l), "w0i": (k1, m), "w1i": (k1, m),
                      "u0e": (k1, l), "u0i": (k1, m), "u1i": (k1, m)}
            for name, (r, c) in shapes.items():
                if name in section:
                    blocks[name] = _matrix(section[name], r, c, f"{path}.{name}")
            built = bc_mod.matrices_bc(l=l, m=m, k0=k0, k1=k1, **blocks)
        elif kind == "boundary_spaces":
            y1 = _require(section, "y1_basis", path)
            y0 = _require(section, "y0_basis", path)
            dim = l + 2 * m
            d1 = len(y1[0]) if y1 and isinstance(y1[0], list) else 0
            d0 = len(y0[0]) if y0 and isinstance(y0[0], list) else 0
            local_u = None
            if "local_u" in section:
                local_u = _matrix(section["local_u"], dim, dim, f"{path}.local_u")
            built = bc_mod.BoundarySpacesBC(
                _matrix(y1, dim, d1, f"{path}.y1_basis"),
                _matrix(y0, dim, d0, f"{path}.y0_basis"),
                local_U=local_u,
                mu_endpoints=coeffs.mu_endpoint_diagonals())
        else:  # nonlocal_interval
            if m != 1 or l != 0:
                _fail(path, "nonlocal_interval requires exactly one internal edge")
            h0 = _kernel_samples(_require(section, "h0", path), f"{path}.h0")
            h1 = _kernel_samples(_require(section, "h1", path), f"{path}.h1")
            t0 = _number(section.get("t0", 0.25), f"{path}.t0")
            built = bc_mod.from_nonlocal_interval(h0, h1)
    except ValidationError:
        raise
    except Exception as exc:
        _fail(path, str(exc))
    return kind, built, t0


def _parse_field(entry, length, path) -> initial_mod.FieldProfile:
    if entry is None:
        return initial_mod.zero_profile(length)
    kind = _require(entry, "kind", path)
    if kind == "zero":
        return initial_mod.zero_profile(length)
    if kind == "sine_mode":
        return initial_mod.sine_mode(
            int(_number(entry.get("mode", 1), f"{path}.mode")),
            _number(entry.get("amplitude", 1.0), f"{path}.amplitude"), length)
    if kind == "gaussian":
        return initial_mod.gaussian(
            _number(_require(entry, "center", path), f"{path}.center"),
            _number(_require(entry, "width", path), f"{path}.width"),
            _number(entry.get("amplitude", 1.0), f"{path}.amplitude"), length)
    if kind == "custom_samples":
        values = _require(entry, "values", path)
        return initial_mod.custom_samples(
            [_number(v, f"{path}.values") for v in values], length)
    _fail(f"{path}.kind", f"unknown initial kind {kind!r}")


def _parse_initial(section, g, lengths, path="initial"):
    if section is None:
        section = {}

    def edge_entries(key, count, domain):
        entries = section.get(key)
        if entries is None:
            entries = [None] * count
        if not isinstance(entries, list) or len(entries) != count:
            _fail(f"{path}.{key}", f"expected {count} per-edge entries")
        out = []
        for i, e in enumerate(entries):
            p = f"{path}.{key}[{i}]"
            e = e or {}
            out.append(initial_mod.EdgeInitial(
                _parse_field(e.get("u0"), domain[i], f"{p}.u0"),
                _parse_field(e.get("u1"), domain[i], f"{p}.u1")))
        return tuple(out)

    return initial_mod.InitialData(
        edge_entries("internal", g.m, [1.0] * g.m),
        edge_entries("external", g.l, list(lengths)))


def _parse_sim(section, path="sim") -> SimConfig:
    eq = _require(section, "equation", path)
    if eq not in ("wave", "heat"):
        _fail(f"{path}.equation", f"unknown equation {eq!r}")
    return SimConfig(
        equation=eq,
        T=_number(_require(section, "T", path), f"{path}.T"),
        dt=_number(_require(section, "dt", path), f"{path}.dt"),
        theta=_number(section.get("theta", 0.5), f"{path}.theta"),
        n_per_edge=int(_number(section.get("n_per_edge", 100), f"{path}.n_per_edge")),
        snap_tol=_number(section.get("snap_tol", 0.05), f"{path}.snap_tol"),
        record_stride=int(_number(section.get("record_stride", 1),
                                  f"{path}.record_stride")),
    )


def parse_config(text: str) -> RunConfig:
    """Parse and validate a YAML config into a RunConfig."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        line = getattr(getattr(exc, "problem_mark", None), "line", None)
        raise ParseError(line + 1 if line is not None else "?", str(exc))
    if not isinstance(doc, dict):
        _fail("<root>", "config must be a map of sections")

    g, names, lengths, index = _parse_graph(_require(doc, "graph", "<root>"))
    coeffs = _parse_coeffs(doc.get("coefficients"), g, lengths)
    kind, built, t0 = _parse_bc(_require(doc, "bc", "<root>"), g, coeffs, index)
    sim = _parse_sim(doc["sim"]) if "sim" in doc and doc["sim"] is not None else None
    init = _parse_initial(doc.get("initial"), g, lengths) if ("initial" in doc or sim) else None
    return RunConfig(g, names, lengths, coeffs, kind, built,
                     nonlocal_t0=t0, sim=sim, initial=init)
