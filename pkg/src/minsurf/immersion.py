"""Integration of the Weierstrass forms to points in 3-space.

Positions come from Gauss-Legendre quadrature of the three holomorphic
forms along straight segments from the surface's base point (the catalog
domains are star-shaped about their base points). Total curvature uses the
midpoint rule on a cell-centered lattice, and meshes are written as ASCII
OBJ quads with a CSV attribute sidecar.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import EmptyReportError, PathThroughPoleError
from .parallel import run_chunked
from .surfaces import (
    MASK_FLAT,
    DomainSpec,
    WeierstrassSurface,
    as_direction,
    sample_geometry,
)

FLOAT_FMT = "%.17g"


@dataclass(frozen=True)
class QuadratureSpec:
    """Gauss-Legendre node count per straight path segment."""

    nodes_per_segment: int = 16

    def __post_init__(self):
        if self.nodes_per_segment < 4:
            raise ValueError("need at least 4 quadrature nodes per segment")


@dataclass(frozen=True)
class ImmersedPoint:
    position: np.ndarray
    zeta: complex
    normal: np.ndarray


@lru_cache(maxsize=32)
def _leggauss01(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights transplanted to [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1.0) / 2.0, w / 2.0


def weierstrass_forms(surface: WeierstrassSurface, w) -> tuple[np.ndarray, np.ndarray]:
    """The three holomorphic 1-form coefficients at points w.

    Returns (phi, pole) where phi has shape w.shape + (3,).
    """
    z = np.asarray(w, dtype=np.complex128)
    with np.errstate(all="ignore"):
        gv, gp = surface.g.evaluate_array(z)
        fv, fp = surface.f.evaluate_array(z)
        g2 = gv * gv
        phi = np.stack(
            [fv * (1.0 - g2) / 2.0, 1j * fv * (1.0 + g2) / 2.0, fv * gv],
            axis=-1,
        )
    pole = gp | fp
    pole |= ~np.isfinite(phi.real).all(axis=-1) | ~np.isfinite(phi.imag).all(axis=-1)
    return phi, pole


def _segment_clearance(a: complex, b: complex, p: complex) -> float:
    """Distance from point p to the segment [a, b]."""
    ab = b - a
    denom = abs(ab) ** 2
    if denom == 0.0:
        return abs(p - a)
    t = ((p - a) * np.conj(ab)).real / denom
    t = min(1.0, max(0.0, t))
    return abs(p - (a + t * ab))


def _check_segment(surface: WeierstrassSurface, a: complex, b: complex):
    for ex in surface.domain.excluded:
        if _segment_clearance(a, b, ex.point) < ex.radius:
            raise PathThroughPoleError(
                ex.point, f"segment {a} -> {b} enters the exclusion radius {ex.radius}"
            )


def _integrate_segments(
    surface: WeierstrassSurface,
    waypoints: list[complex],
    quad: QuadratureSpec,
) -> np.ndarray:
    nodes, weights = _leggauss01(quad.nodes_per_segment)
    total = np.zeros(3)
    for a, b in zip(waypoints[:-1], waypoints[1:]):
        a, b = complex(a), complex(b)
        _check_segment(surface, a, b)
        w = a + (b - a) * nodes
        phi, pole = weierstrass_forms(surface, w)
        if pole.any():
            bad = w[pole][0]
            raise PathThroughPoleError(complex(bad), "form evaluation hit a pole")
        total += ((b - a) * (weights @ phi)).real
    return total


def immerse_path(
    surface: WeierstrassSurface,
    waypoints,
    quad: QuadratureSpec = QuadratureSpec(),
) -> np.ndarray:
    """Integrate the forms along a polyline; returns the 3-space displacement."""
    pts = [complex(p) for p in waypoints]
    if len(pts) < 2:
        raise ValueError("need at least two waypoints")
    return _integrate_segments(surface, pts, quad)


def immerse(
    surface: WeierstrassSurface,
    zeta: complex,
    quad: QuadratureSpec = QuadratureSpec(),
) -> ImmersedPoint:
    """Map a parameter point to 3-space along the straight segment from base."""
    zeta = complex(zeta)
    position = _integrate_segments(surface, [surface.base_point, zeta], quad)
    fld = sample_geometry(surface, np.asarray(zeta))
    if not bool(fld.nonpole):
        raise PathThroughPoleError(zeta, "endpoint is a pole")
    normal = np.asarray(fld.N, dtype=float).reshape(3)
    return ImmersedPoint(position=position, zeta=zeta, normal=normal)


def immerse_batch(
    surface: WeierstrassSurface,
    zetas: np.ndarray,
    quad: QuadratureSpec = QuadratureSpec(),
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized straight-segment immersion of many points.

    Returns (positions (..., 3), ok). Points whose path crosses a pole or an
    exclusion disk are flagged instead of raising. Large batches are split
    across worker threads (capped by MINSURF_THREADS).
    """
    z = np.asarray(zetas, dtype=np.complex128)
    flat = z.reshape(-1)
    nodes, weights = _leggauss01(quad.nodes_per_segment)

    def integrate(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        seg = points - surface.base_point
        w = surface.base_point + seg[:, None] * nodes[None, :]
        phi, pole = weierstrass_forms(surface, w)
        good = ~pole.any(axis=1)
        pos = (seg[:, None] * np.einsum("q,pqc->pc", weights, phi)).real
        return pos, good

    chunk = 16384
    pieces = [flat[i : i + chunk] for i in range(0, len(flat), chunk)] or [flat]
    results = run_chunked(integrate, pieces)
    pos = np.concatenate([r[0] for r in results]) if results else np.zeros((0, 3))
    ok = np.concatenate([r[1] for r in results]) if results else np.zeros(0, dtype=bool)

    for ex in surface.domain.excluded:
        clear = np.array(
            [_segment_clearance(surface.base_point, p, ex.point) >= ex.radius for p in flat]
        )
        ok &= clear
    end_field = sample_geometry(surface, flat)
    ok &= end_field.nonpole
    pos[~ok] = np.nan
    return pos.reshape(z.shape + (3,)), ok.reshape(z.shape)


@dataclass(frozen=True)
class TotalCurvatureResult:
    value: float
    cells_used: int
    flat_cells: int

    def __float__(self) -> float:
        return self.value


def total_curvature(
    surface: WeierstrassSurface,
    region: DomainSpec,
    h: float,
) -> TotalCurvatureResult:
    """Integral of K over the region (midpoint rule on cell centers).

    Flat cells contribute zero and raise a warning; a fully masked region
    raises EmptyReportError.
    """
    x0, y0, x1, y1 = region.bbox()
    nx = max(1, int(round((x1 - x0) / h)))
    ny = max(1, int(round((y1 - y0) / h)))
    xs = x0 + h * (np.arange(nx) + 0.5)
    ys = y0 + h * (np.arange(ny) + 0.5)
    zz = xs[None, :] + 1j * ys[:, None]
    inside = region.contains(zz) & surface.domain.contains(zz)
    field = sample_geometry(surface, zz)
    usable = inside & field.valid
    flat = inside & (field.mask == MASK_FLAT)
    n_used = int(usable.sum())
    n_flat = int(flat.sum())
    if n_used + n_flat == 0:
        raise EmptyReportError("total curvature region is fully masked")
    if n_flat:
        warnings.warn(
            f"{n_flat} flat cells contribute zero curvature", stacklevel=2
        )
    integrand = np.where(usable, field.K * field.lam**2, 0.0)
    value = float(np.nansum(integrand) * h * h)
    return TotalCurvatureResult(value=value, cells_used=n_used, flat_cells=n_flat)


@dataclass
class SurfaceMesh:
    """Immersed quad mesh over a rectangular parameter lattice."""

    vertices: np.ndarray  # (M, 3)
    normals: np.ndarray  # (M, 3)
    zetas: np.ndarray  # (M,) complex
    curvature: np.ndarray  # (M,)
    chi: np.ndarray  # (M,)
    faces: np.ndarray  # (F, 4) 0-based vertex indices
    grid_shape: tuple[int, int]

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @property
    def face_count(self) -> int:
        return len(self.faces)


def build_mesh(
    surface: WeierstrassSurface,
    bounds: tuple[float, float, float, float],
    nx: int,
    ny: int,
    v=(0.0, 0.0, 1.0),
    quad: QuadratureSpec = QuadratureSpec(),
) -> SurfaceMesh:
    """Immerse an nx-by-ny vertex lattice over bounds = (x0, y0, x1, y1).

    Vertices outside the surface domain or with a singular path are dropped;
    faces are emitted only for cells whose four corners survive.
    """
    if nx < 2 or ny < 2:
        raise ValueError("mesh needs at least 2 vertices per axis")
    x0, y0, x1, y1 = bounds
    xs = np.linspace(x0, x1, nx)
    ys = np.linspace(y0, y1, ny)
    zz = xs[None, :] + 1j * ys[:, None]
    usable = surface.domain.contains(zz)
    positions, ok = immerse_batch(surface, zz, quad)
    usable &= ok
    field = sample_geometry(surface, zz)
    usable &= field.nonpole
    direction = as_direction(v)
    chi = field.chi(direction)

    index = -np.ones(zz.shape, dtype=int)
    index[usable] = np.arange(int(usable.sum()))
    faces = []
    for j in range(ny - 1):
        for i in range(nx - 1):
            corners = (index[j, i], index[j, i + 1], index[j + 1, i + 1], index[j + 1, i])
            if all(c >= 0 for c in corners):
                faces.append(corners)
    return SurfaceMesh(
        vertices=positions[usable],
        normals=field.N[usable],
        zetas=zz[usable],
        curvature=field.K[usable],
        chi=chi[usable],
        faces=np.asarray(faces, dtype=int).reshape(-1, 4),
        grid_shape=(ny, nx),
    )


def mesh_to_obj(mesh: SurfaceMesh) -> str:
    """ASCII OBJ: v/vn per usable vertex (row-major), quad faces."""
    lines = []
    for p in mesh.vertices:
        lines.append("v " + " ".join(FLOAT_FMT % c for c in p))
    for n in mesh.normals:
        lines.append("vn " + " ".join(FLOAT_FMT % c for c in n))
    for f in mesh.faces:
        lines.append("f " + " ".join(f"{i + 1}//{i + 1}" for i in f))
    return "\n".join(lines) + "\n"


def mesh_sidecar_csv(mesh: SurfaceMesh) -> str:
    """Per-vertex attributes: x,y,K,N1,N2,N3,chi (same order as the OBJ)."""
    lines = ["x,y,K,N1,N2,N3,chi"]
    for z, K, n, chi in zip(mesh.zetas, mesh.curvature, mesh.normals, mesh.chi):
        row = [z.real, z.imag, K, n[0], n[1], n[2], chi]
        lines.append(",".join(FLOAT_FMT % val for val in row))
    return "\n".join(lines) + "\n"


def export_mesh(
    surface: WeierstrassSurface,
    bounds: tuple[float, float, float, float],
    nx: int,
    ny: int,
    obj_path: str,
    sidecar_path: str | None = None,
    v=(0.0, 0.0, 1.0),
    quad: QuadratureSpec = QuadratureSpec(),
) -> SurfaceMesh:
    mesh = build_mesh(surface, bounds, nx, ny, v=v, quad=quad)
    with open(obj_path, "w", encoding="utf-8") as fh:
        fh.write(mesh_to_obj(mesh))
    if sidecar_path:
        with open(sidecar_path, "w", encoding="utf-8") as fh:
            fh.write(mesh_sidecar_csv(mesh))
    return mesh
