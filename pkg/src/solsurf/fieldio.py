"""JSON and CSV serialization for grids, fields, meshes, and matrix fields.

JSON documents are tagged with a "kind" key and hold arrays as flat C-order
(x-major) lists, complex data as paired _re/_im lists.  Writing is
deterministic: sorted keys, two-space indent, trailing newline, no
timestamps.  CSV exports use one header row and 17-significant-digit
values, rows in x-major order.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import ConfigError, ShapeError
from .frames import CTFields
from .gauss_codazzi import FundamentalForms, GCData
from .lax import Eigenfunction, LaxPairField
from .numgrid import Grid1D, Grid2D
from .spin import SpinField, SpinSeries
from .surface import SurfaceMesh


def _flat(a: np.ndarray) -> list:
    return np.asarray(a, dtype=float).ravel(order="C").tolist()


def _unflat(data, shape, name: str) -> np.ndarray:
    a = np.asarray(data, dtype=float)
    expected = int(np.prod(shape))
    if a.size != expected:
        raise ShapeError(f"{name} holds {a.size} values, expected {expected}")
    return a.reshape(shape)


def to_jsonable(obj) -> dict:
    """Tagged plain-dict form of a supported object."""
    if isinstance(obj, Grid1D):
        return {"kind": "grid1d", "x0": obj.x0, "dx": obj.dx, "n": obj.n,
                "boundary": obj.boundary}
    if isinstance(obj, Grid2D):
        return {"kind": "grid2d", "gx": to_jsonable(obj.gx), "gt": to_jsonable(obj.gt)}
    if isinstance(obj, SpinField):
        return {"kind": "spin_field", "grid": to_jsonable(obj.grid), "t": obj.t,
                "beta": obj.beta, "S": _flat(obj.S), "u": _flat(obj.u),
                "v": _flat(obj.v)}
    if isinstance(obj, SpinSeries):
        return {"kind": "spin_series", "grid": to_jsonable(obj.grid),
                "times": _flat(obj.times), "beta": obj.beta, "S": _flat(obj.S),
                "u": _flat(obj.u), "v": _flat(obj.v)}
    if isinstance(obj, CTFields):
        return {"kind": "ct_fields", "grid": to_jsonable(obj.grid),
                "k": _flat(obj.k), "tau": _flat(obj.tau),
                "omega2": _flat(obj.omega2), "omega3": _flat(obj.omega3)}
    if isinstance(obj, GCData):
        return {"kind": "gc_data", "grid": to_jsonable(obj.grid),
                "psi1": _flat(obj.psi1), "psi2": _flat(obj.psi2),
                "tpsi1": _flat(obj.tpsi1), "tpsi2": _flat(obj.tpsi2),
                "p": _flat(obj.p), "q": _flat(obj.q)}
    if isinstance(obj, FundamentalForms):
        doc = {"kind": "fundamental_forms", "form_kind": obj.kind,
               "grid": None if obj.grid is None else to_jsonable(obj.grid)}
        names = obj._DIAG if obj.kind == "diagonal" else obj._GEN
        for name in names:
            doc[name] = _flat(getattr(obj, name))
        doc["shape"] = list(getattr(obj, names[0]).shape)
        return doc
    if isinstance(obj, SurfaceMesh):
        return {"kind": "surface_mesh", "grid": to_jsonable(obj.grid),
                "r": _flat(obj.r)}
    if isinstance(obj, LaxPairField):
        return {"kind": "lax_pair", "grid": to_jsonable(obj.grid),
                "U_re": _flat(obj.U.real), "U_im": _flat(obj.U.imag),
                "V_re": _flat(obj.V.real), "V_im": _flat(obj.V.imag)}
    if isinstance(obj, Eigenfunction):
        return {"kind": "eigenfunction", "grid": to_jsonable(obj.grid),
                "phi_re": _flat(obj.phi.real), "phi_im": _flat(obj.phi.imag)}
    if isinstance(obj, np.ndarray):
        doc = {"kind": "array", "shape": list(obj.shape)}
        if np.iscomplexobj(obj):
            doc["re"] = _flat(obj.real)
            doc["im"] = _flat(obj.imag)
        else:
            doc["data"] = _flat(obj)
        return doc
    raise ConfigError(f"cannot serialize object of type {type(obj).__name__}")


def from_jsonable(doc: dict):
    """Inverse of to_jsonable; dispatches on the "kind" tag."""
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ConfigError("document has no 'kind' tag")
    kind = doc["kind"]
    try:
        if kind == "grid1d":
            return Grid1D(x0=float(doc["x0"]), dx=float(doc["dx"]),
                          n=int(doc["n"]), boundary=doc["boundary"])
        if kind == "grid2d":
            return Grid2D(gx=from_jsonable(doc["gx"]), gt=from_jsonable(doc["gt"]))
        if kind == "spin_field":
            grid = from_jsonable(doc["grid"])
            n = grid.n
            return SpinField(S=_unflat(doc["S"], (n, 3), "S"),
                             u=_unflat(doc["u"], (n,), "u"),
                             v=_unflat(doc["v"], (n,), "v"),
                             grid=grid, t=float(doc["t"]), beta=int(doc["beta"]))
        if kind == "spin_series":
            grid = from_jsonable(doc["grid"])
            times = np.asarray(doc["times"], dtype=float)
            shape = (grid.n, times.size)
            return SpinSeries(grid=grid, times=times,
                              S=_unflat(doc["S"], shape + (3,), "S"),
                              u=_unflat(doc["u"], shape, "u"),
                              v=_unflat(doc["v"], shape, "v"),
                              beta=int(doc["beta"]))
        if kind == "ct_fields":
            g2 = from_jsonable(doc["grid"])
            return CTFields(**{name: _unflat(doc[name], g2.shape, name)
                               for name in ("k", "tau", "omega2", "omega3")},
                            grid=g2)
        if kind == "gc_data":
            g2 = from_jsonable(doc["grid"])
            names = ("psi1", "psi2", "tpsi1", "tpsi2", "p", "q")
            return GCData(**{name: _unflat(doc[name], g2.shape, name)
                             for name in names}, grid=g2)
        if kind == "fundamental_forms":
            grid = None if doc["grid"] is None else from_jsonable(doc["grid"])
            shape = tuple(doc["shape"])
            form_kind = doc["form_kind"]
            names = (FundamentalForms._DIAG if form_kind == "diagonal"
                     else FundamentalForms._GEN)
            fields = {name: _unflat(doc[name], shape, name) for name in names}
            return FundamentalForms(kind=form_kind, grid=grid, **fields)
        if kind == "surface_mesh":
            g2 = from_jsonable(doc["grid"])
            return SurfaceMesh(r=_unflat(doc["r"], g2.shape + (3,), "r"), grid=g2)
        if kind == "lax_pair":
            g2 = from_jsonable(doc["grid"])
            shape = g2.shape + (2, 2)
            U = _unflat(doc["U_re"], shape, "U_re") + 1j * _unflat(doc["U_im"], shape, "U_im")
            V = _unflat(doc["V_re"], shape, "V_re") + 1j * _unflat(doc["V_im"], shape, "V_im")
            return LaxPairField(U=U, V=V, grid=g2)
        if kind == "eigenfunction":
            g2 = from_jsonable(doc["grid"])
            shape = g2.shape + (2, 2)
            phi = (_unflat(doc["phi_re"], shape, "phi_re")
                   + 1j * _unflat(doc["phi_im"], shape, "phi_im"))
            return Eigenfunction(phi=phi, grid=g2)
        if kind == "array":
            shape = tuple(doc["shape"])
            if "re" in doc:
                return (_unflat(doc["re"], shape, "re")
                        + 1j * _unflat(doc["im"], shape, "im"))
            return _unflat(doc["data"], shape, "data")
    except KeyError as e:
        raise ConfigError(f"document of kind {kind!r} is missing key {e}") from e
    raise ConfigError(f"unknown document kind {kind!r}")


def dump_json_str(obj) -> str:
    """Deterministic JSON text for a supported object or plain dict."""
    doc = obj if isinstance(obj, dict) else to_jsonable(obj)
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def save_json(obj, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(dump_json_str(obj))


def load_json(path):
    """Load a tagged JSON document and rebuild the object it describes."""
    with open(path, "r", encoding="ascii") as fh:
        doc = json.load(fh)
    return from_jsonable(doc)


def _write_csv(path, header, columns) -> None:
    cols = [np.asarray(c, dtype=float).ravel(order="C") for c in columns]
    n = cols[0].size
    for c in cols:
        if c.size != n:
            raise ShapeError("CSV columns must have equal length")
    lines = [",".join(header)]
    for i in range(n):
        lines.append(",".join(f"{c[i]:.17g}" for c in cols))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def _grid2_columns(g2: Grid2D):
    X, T = g2.meshes()
    return X, T


def save_spin_csv(f: SpinField, path) -> None:
    x = f.grid.points()
    _write_csv(path, ["x", "S1", "S2", "S3", "u", "v"],
               [x, f.S[:, 0], f.S[:, 1], f.S[:, 2], f.u, f.v])


def save_series_csv(s: SpinSeries, path) -> None:
    nx, nt = s.grid.n, s.nt
    X = np.repeat(s.grid.points(), nt)
    T = np.tile(s.times, nx)
    _write_csv(path, ["x", "t", "S1", "S2", "S3", "u", "v"],
               [X, T, s.S[..., 0], s.S[..., 1], s.S[..., 2], s.u, s.v])


def save_ct_csv(ct: CTFields, path) -> None:
    X, T = _grid2_columns(ct.grid)
    _write_csv(path, ["x", "t", "k", "tau", "omega2", "omega3"],
               [X, T, ct.k, ct.tau, ct.omega2, ct.omega3])


def save_gc_csv(d: GCData, path) -> None:
    X, T = _grid2_columns(d.grid)
    _write_csv(path, ["x", "t", "psi1", "psi2", "tpsi1", "tpsi2", "p", "q"],
               [X, T, d.psi1, d.psi2, d.tpsi1, d.tpsi2, d.p, d.q])


def save_mesh_csv(m: SurfaceMesh, path) -> None:
    X, T = _grid2_columns(m.grid)
    _write_csv(path, ["x", "t", "rx", "ry", "rz"],
               [X, T, m.r[..., 0], m.r[..., 1], m.r[..., 2]])


def save_scalars_csv(fields: dict, grid, path) -> None:
    """Named scalar fields over a Grid1D or Grid2D, one column each."""
    if isinstance(grid, Grid2D):
        X, T = _grid2_columns(grid)
        header = ["x", "t"] + list(fields.keys())
        columns = [X, T] + list(fields.values())
    else:
        header = ["x"] + list(fields.keys())
        columns = [grid.points()] + list(fields.values())
    _write_csv(path, header, columns)
