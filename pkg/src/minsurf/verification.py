"""Grid discretization of the metric Laplacian and identity residuals.

The induced metric is conformal, so the Laplace-Beltrami operator on a
uniform grid is the flat 5-point stencil divided by lambda^2. A grid point
is usable for a residual only if it and its 4 neighbors are valid under
every mask the identity needs (one-ring dilation), which keeps stencils
away from poles, flat points, and loci where 1+<N,V> degenerates.

Identity residuals (all vanish analytically on these surfaces):

    ricci       lap ln(-K) - 4K
    chern       lap ln(1+<N,V>) - K
    harmonic    lap chi,  chi = 2 ln(1+<N,V>) - (1/2) ln(-K)
    flat_ricci  curvature of (-K)^(1/2) * metric
    flat_chern  curvature of (1+<N,V>)^2 * metric
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyReportError, InsufficientSamplesError
from .surfaces import (
    CHERN_TOL,
    FLAT_TOL,
    DomainSpec,
    GeometryField,
    WeierstrassSurface,
    as_direction,
    sample_geometry,
)

IDENTITIES = ("ricci", "chern", "harmonic", "flat_ricci", "flat_chern")

# Identities whose residual needs a direction V.
DIRECTIONAL = ("chern", "harmonic", "flat_chern")


@dataclass
class DomainGrid:
    """Uniform lattice over a region with per-point geometry and masks."""

    x0: float
    y0: float
    h: float
    nx: int
    ny: int
    zz: np.ndarray
    field: GeometryField
    in_domain: np.ndarray

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError("grid spacing must be positive")
        if self.nx < 5 or self.ny < 5:
            raise ValueError("grid needs at least 5 points per axis")

    @property
    def valid(self) -> np.ndarray:
        return self.in_domain & self.field.valid

    @property
    def lam(self) -> np.ndarray:
        return self.field.lam

    @property
    def K(self) -> np.ndarray:
        return self.field.K


def _axis(start: float, stop: float, h: float) -> np.ndarray:
    n = int(np.floor((stop - start) / h + 1e-9)) + 1
    return start + h * np.arange(n)


def build_grid(
    surface: WeierstrassSurface,
    region: DomainSpec,
    h: float,
    flat_tol: float = FLAT_TOL,
) -> DomainGrid:
    """Sample the surface on a lattice covering the region's bounding box."""
    x0, y0, x1, y1 = region.bbox()
    xs = _axis(x0, x1, h)
    ys = _axis(y0, y1, h)
    zz = xs[None, :] + 1j * ys[:, None]
    field = sample_geometry(surface, zz, flat_tol=flat_tol)
    in_domain = region.contains(zz) & surface.domain.contains(zz)
    return DomainGrid(
        x0=x0, y0=y0, h=h, nx=len(xs), ny=len(ys),
        zz=zz, field=field, in_domain=in_domain,
    )


def erode_one_ring(mask: np.ndarray) -> np.ndarray:
    """Keep points whose 4-neighborhood is entirely inside the mask."""
    out = np.zeros_like(mask)
    out[1:-1, 1:-1] = (
        mask[1:-1, 1:-1]
        & mask[1:-1, 2:]
        & mask[1:-1, :-2]
        & mask[2:, 1:-1]
        & mask[:-2, 1:-1]
    )
    return out


def laplace_beltrami(
    grid: DomainGrid,
    u: np.ndarray,
    extra_valid: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Metric Laplacian of u on usable points.

    Returns (lap, usable): lap is nan off the usable set. Raises
    EmptyReportError when no point has a fully valid one-ring.
    """
    base = grid.valid & np.isfinite(u)
    if extra_valid is not None:
        base = base & extra_valid
    usable = erode_one_ring(base)
    if not usable.any():
        raise EmptyReportError("no usable grid points for the stencil")
    lap = np.full(grid.zz.shape, np.nan)
    c = u[1:-1, 1:-1]
    stencil = u[1:-1, 2:] + u[1:-1, :-2] + u[2:, 1:-1] + u[:-2, 1:-1] - 4.0 * c
    with np.errstate(invalid="ignore"):
        interior = stencil / (grid.h**2 * grid.lam[1:-1, 1:-1] ** 2)
    lap[1:-1, 1:-1] = np.where(usable[1:-1, 1:-1], interior, np.nan)
    return lap, usable


@dataclass(frozen=True)
class ResidualReport:
    identity: str
    sup_norm: float
    rms: float
    usable_count: int
    h: float
    nx: int
    ny: int

    def to_dict(self) -> dict:
        return {
            "identity": self.identity,
            "h": self.h,
            "nx": self.nx,
            "ny": self.ny,
            "usable": self.usable_count,
            "sup": self.sup_norm,
            "rms": self.rms,
        }


def _report(identity: str, grid: DomainGrid, resid: np.ndarray, usable: np.ndarray) -> ResidualReport:
    vals = np.abs(resid[usable])
    return ResidualReport(
        identity=identity,
        sup_norm=float(vals.max()),
        rms=float(np.sqrt(np.mean(vals**2))),
        usable_count=int(usable.sum()),
        h=grid.h,
        nx=grid.nx,
        ny=grid.ny,
    )


def _log_neg_curvature(grid: DomainGrid) -> np.ndarray:
    with np.errstate(all="ignore"):
        return np.where(grid.valid, np.log(-grid.K), np.nan)


def ricci_residual(surface: WeierstrassSurface, grid: DomainGrid) -> ResidualReport:
    """Defect of lap ln(-K) = 4K over the usable grid."""
    u = _log_neg_curvature(grid)
    lap, usable = laplace_beltrami(grid, u)
    resid = lap - 4.0 * grid.K
    return _report("ricci", grid, resid, usable)


def _angle_terms(grid: DomainGrid, v, chern_tol: float):
    direction = as_direction(v)
    nv = grid.field.angle(direction)
    with np.errstate(invalid="ignore"):
        ok = grid.valid & (1.0 + nv >= chern_tol)
    with np.errstate(all="ignore"):
        log_tilt = np.where(ok, np.log1p(nv), np.nan)
    return ok, log_tilt


def chern_residual(
    surface: WeierstrassSurface,
    grid: DomainGrid,
    v,
    chern_tol: float = CHERN_TOL,
) -> ResidualReport:
    """Defect of lap ln(1+<N,V>) = K; the one-ring must keep 1+<N,V> above tol."""
    ok, log_tilt = _angle_terms(grid, v, chern_tol)
    lap, usable = laplace_beltrami(grid, log_tilt, extra_valid=ok)
    resid = lap - grid.K
    return _report("chern", grid, resid, usable)


def harmonic_residual(
    surface: WeierstrassSurface,
    grid: DomainGrid,
    v,
    chern_tol: float = CHERN_TOL,
) -> ResidualReport:
    """lap chi; analytically zero, so this is a pure consistency check."""
    ok, log_tilt = _angle_terms(grid, v, chern_tol)
    chi = 2.0 * log_tilt - 0.5 * _log_neg_curvature(grid)
    lap, usable = laplace_beltrami(grid, chi, extra_valid=ok)
    return _report("harmonic", grid, lap, usable)


def conformal_curvature(
    surface: WeierstrassSurface,
    grid: DomainGrid,
    u: np.ndarray,
    extra_valid: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Curvature field of the metric e^(2u) * (induced metric).

    exp(-2u) * (K - lap u) on usable points, nan elsewhere.
    """
    lap, usable = laplace_beltrami(grid, u, extra_valid=extra_valid)
    with np.errstate(all="ignore"):
        curv = np.exp(-2.0 * u) * (grid.K - lap)
    return np.where(usable, curv, np.nan), usable


def flatness_residual(
    surface: WeierstrassSurface,
    grid: DomainGrid,
    kind: str,
    v=None,
    chern_tol: float = CHERN_TOL,
) -> ResidualReport:
    """Curvature of the rescaled metric that should be flat.

    kind "ricci": conformal factor (-K)^(1/2); kind "chern": (1+<N,V>)^2.
    """
    if kind == "ricci":
        u = 0.25 * _log_neg_curvature(grid)
        curv, usable = conformal_curvature(surface, grid, u)
    elif kind == "chern":
        if v is None:
            raise ValueError("flat_chern needs a direction")
        ok, log_tilt = _angle_terms(grid, v, chern_tol)
        curv, usable = conformal_curvature(surface, grid, log_tilt, extra_valid=ok)
    else:
        raise ValueError(f"unknown flatness kind {kind!r}")
    return _report(f"flat_{kind}", grid, curv, usable)


def run_identity(
    surface: WeierstrassSurface,
    grid: DomainGrid,
    identity: str,
    v=None,
) -> ResidualReport:
    if identity == "ricci":
        return ricci_residual(surface, grid)
    if identity == "chern":
        return chern_residual(surface, grid, v)
    if identity == "harmonic":
        return harmonic_residual(surface, grid, v)
    if identity == "flat_ricci":
        return flatness_residual(surface, grid, "ricci")
    if identity == "flat_chern":
        return flatness_residual(surface, grid, "chern", v)
    raise ValueError(f"unknown identity {identity!r}; known: {', '.join(IDENTITIES)}")


@dataclass(frozen=True)
class ConvergenceStudy:
    identity: str
    levels: tuple[tuple[float, float], ...]  # (h, sup_norm)
    order: float | None  # None when every level sits at the noise floor

    def to_dict(self) -> dict:
        return {
            "identity": self.identity,
            "levels": [{"h": h, "sup": sup} for h, sup in self.levels],
            "order": self.order,
        }


def fit_order(entries) -> float | None:
    """Least-squares slope of log sup vs log h; None at the noise floor."""
    sups = np.array([s for _, s in entries])
    if np.all(sups < 1e-12):
        return None
    hs = np.log(np.array([h for h, _ in entries]))
    return float(np.polyfit(hs, np.log(np.maximum(sups, 1e-300)), 1)[0])


def convergence_study(
    surface: WeierstrassSurface,
    identity: str,
    region: DomainSpec,
    h0: float,
    levels: int = 3,
    v=None,
    min_usable: int = 25,
) -> ConvergenceStudy:
    """Run a residual at h0, h0/2, ... and fit the order of convergence."""
    if levels < 2:
        raise ValueError("need at least two refinement levels")
    entries = []
    for i in range(levels):
        h = h0 / 2**i
        grid = build_grid(surface, region, h)
        try:
            report = run_identity(surface, grid, identity, v=v)
        except EmptyReportError as exc:
            raise EmptyReportError(f"level {i} (h={h}): {exc}") from exc
        if report.usable_count < min_usable:
            raise InsufficientSamplesError(
                report.usable_count, min_usable, context=f"level {i} (h={h})"
            )
        entries.append((h, report.sup_norm))
    return ConvergenceStudy(
        identity=identity, levels=tuple(entries), order=fit_order(entries)
    )
