"""Surface reconstruction from spin trajectories, mesh forms, OBJ export.

The spin vector is the unit x-tangent of the swept curve, so each time
level integrates to a curve r(., t) = integral of S dx with r(x0, t) = 0.
The zero anchor is a gauge choice: the result is faithful up to a rigid
translation per time level, which leaves all pointwise form and curvature
quantities unchanged.

Swept surfaces can degenerate (r_x parallel to r_t); such points are
flagged with NaN in the normal-dependent quantities rather than raised,
so curvature reporting stays honest on meshes that are fine elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import GridError, NonFiniteFieldError, ShapeError
from .gauss_codazzi import FundamentalForms
from .numgrid import Grid1D, Grid2D, diff_t, diff_tt, diff_x, diff_xx, integrate_x

DEGENERATE_TOL = 1e-10


@dataclass
class SurfaceMesh:
    """Positions r over a Grid2D; quad connectivity follows the grid."""

    r: np.ndarray
    grid: Grid2D

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        if r.shape != self.grid.shape + (3,):
            raise ShapeError(
                f"r must have shape {self.grid.shape + (3,)}, got {r.shape}")
        if not np.all(np.isfinite(r)):
            raise NonFiniteFieldError("mesh positions contain non-finite values")
        self.r = r

    def vertex_index(self, ix: int, it: int) -> int:
        """0-based vertex index in grid order (x-major)."""
        return ix * self.grid.gt.n + it

    def faces(self) -> np.ndarray:
        """(nfaces, 4) 0-based quad indices, one per grid cell."""
        nx, nt = self.grid.shape
        out = np.empty(((nx - 1) * (nt - 1), 4), dtype=int)
        f = 0
        for ix in range(nx - 1):
            base = ix * nt
            for it in range(nt - 1):
                out[f] = (base + it, base + nt + it, base + nt + it + 1, base + it + 1)
                f += 1
        return out


def reconstruct(series) -> SurfaceMesh:
    """Integrate the spin field in x at every time level (trapezoid, anchor 0).

    Accepts a SpinSeries or a sequence of SpinField slices; slices must
    share one grid and be uniformly spaced in time.
    """
    if hasattr(series, "grid2") and hasattr(series, "S"):
        g2 = series.grid2
        S = series.S
    else:
        slices = list(series)
        if len(slices) < 2:
            raise GridError("need at least two time levels to build a surface")
        grid = slices[0].grid
        for j, f in enumerate(slices[1:], start=1):
            if f.grid != grid:
                raise GridError(f"slice {j} grid differs from slice 0 grid")
        times = np.array([f.t for f in slices], dtype=float)
        steps = np.diff(times)
        if np.any(steps <= 0):
            raise GridError("time levels must be strictly increasing")
        dt = float(steps[0])
        if np.max(np.abs(steps - dt)) > 1e-12 * max(abs(dt), 1.0):
            raise GridError("time levels must be uniformly spaced")
        g2 = Grid2D(grid, Grid1D(float(times[0]), dt, len(slices), "one_sided"))
        S = np.stack([f.S for f in slices], axis=1)
    return SurfaceMesh(r=integrate_x(S, g2, anchor=0.0), grid=g2)


def _dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.einsum("...i,...i->...", a, b)


def mesh_normal(m: SurfaceMesh, tol: float = DEGENERATE_TOL):
    """Unit normal field and the degenerate-point mask.

    Points with |r_x ^ r_t| < tol get NaN normals and a True mask entry.
    """
    r_x = diff_x(m.r, m.grid)
    r_t = diff_t(m.r, m.grid)
    cross = np.cross(r_x, r_t)
    mag = np.linalg.norm(cross, axis=-1)
    degenerate = mag < tol
    n = np.full_like(cross, np.nan)
    good = ~degenerate
    n[good] = cross[good] / mag[good][..., None]
    return n, degenerate


def mesh_forms(m: SurfaceMesh, tol: float = DEGENERATE_TOL) -> FundamentalForms:
    """First and second form coefficients by finite differences.

    E, F, G are defined everywhere; L, M, N are NaN where the tangent plane
    degenerates (mask recoverable as ~isfinite(L)).
    """
    r_x = diff_x(m.r, m.grid)
    r_t = diff_t(m.r, m.grid)
    n, _ = mesh_normal(m, tol)
    r_xx = diff_xx(m.r, m.grid)
    r_tt = diff_tt(m.r, m.grid)
    r_xt = diff_t(diff_x(m.r, m.grid), m.grid)
    return FundamentalForms.general(
        E=_dot(r_x, r_x), F=_dot(r_x, r_t), G=_dot(r_t, r_t),
        L=_dot(r_xx, n), M=_dot(r_xt, n), N=_dot(r_tt, n), grid=m.grid)


def mesh_curvatures(m: SurfaceMesh, tol: float = DEGENERATE_TOL):
    """(K, H) per grid point, NaN where the tangent plane degenerates."""
    f = mesh_forms(m, tol)
    den = f.E * f.G - f.F ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        K = (f.L * f.N - f.M ** 2) / den
        H = (f.E * f.N - 2 * f.F * f.M + f.G * f.L) / (2 * den)
    return K, H


def export_obj(m: SurfaceMesh, path) -> None:
    """Wavefront OBJ: vertices in grid order (x-major), 1-based quad faces.

    Formatting is deterministic (17 significant digits), so identical
    meshes export byte-identically.
    """
    lines = []
    nx, nt = m.grid.shape
    flat = m.r.reshape(nx * nt, 3)
    for p in flat:
        lines.append(f"v {p[0]:.17g} {p[1]:.17g} {p[2]:.17g}")
    for quad in m.faces():
        a, b, c, d = (int(i) + 1 for i in quad)
        lines.append(f"f {a} {b} {c} {d}")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def import_obj(path, grid: Grid2D | None = None) -> SurfaceMesh:
    """Read a grid-shaped OBJ written by export_obj.

    The grid layout is inferred from the first face (vertices are x-major),
    and unit-spacing axes are synthesized when no grid is supplied.
    """
    verts = []
    first_face = None
    n_faces = 0
    with open(path, "r", encoding="ascii") as fh:
        for raw in fh:
            parts = raw.split()
            if not parts:
                continue
            if parts[0] == "v":
                if len(parts) != 4:
                    raise ShapeError(f"malformed vertex line: {raw.rstrip()!r}")
                verts.append([float(parts[1]), float(parts[2]), float(parts[3])])
            elif parts[0] == "f":
                if len(parts) != 5:
                    raise ShapeError(f"expected quad faces, got: {raw.rstrip()!r}")
                n_faces += 1
                if first_face is None:
                    first_face = [int(p) for p in parts[1:]]
    if not verts or first_face is None:
        raise ShapeError(f"no grid mesh found in {path}")
    nt = first_face[1] - first_face[0]
    if nt < 2 or len(verts) % nt != 0:
        raise ShapeError(f"vertex count {len(verts)} does not fit row length {nt}")
    nx = len(verts) // nt
    if n_faces != (nx - 1) * (nt - 1):
        raise ShapeError(
            f"face count {n_faces} does not match a {nx}x{nt} grid")
    if grid is None:
        grid = Grid2D(Grid1D(0.0, 1.0, nx), Grid1D(0.0, 1.0, nt))
    elif grid.shape != (nx, nt):
        raise ShapeError(f"supplied grid shape {grid.shape} does not match ({nx}, {nt})")
    r = np.asarray(verts, dtype=float).reshape(nx, nt, 3)
    return SurfaceMesh(r=r, grid=grid)
