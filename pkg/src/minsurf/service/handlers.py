"""Service-layer handlers: pydantic request in, pydantic response out.

Both the HTTP routes and the command-line client call these functions, so
the two front ends cannot drift apart. Domain errors propagate to the
caller, which maps them to HTTP status codes or process exit codes.
"""

from __future__ import annotations

import numpy as np

from .. import classifier, verification
from ..catalog import catalog_entries, default_regions, get_entry
from ..errors import SurfaceSpecError
from ..immersion import QuadratureSpec, build_mesh, mesh_sidecar_csv, mesh_to_obj, total_curvature
from ..surfaces import (
    CHERN_TOL,
    MASK_FLAT,
    MASK_POLE,
    MASK_VALID,
    DomainSpec,
    WeierstrassSurface,
    as_direction,
)
from . import schemas

FLOAT_FMT = "%.17g"

DEFAULT_VERIFY_H = 0.01
DEFAULT_FIELD_H = 0.05
DEFAULT_CLASSIFY_H = 0.05


def _domain_model(spec: DomainSpec) -> schemas.DomainModel:
    d = spec.to_dict()
    corners = d.get("corners")
    return schemas.DomainModel(
        kind=d["kind"],
        center=tuple(d["center"]) if "center" in d else None,
        radius=d.get("radius"),
        inner=d.get("inner"),
        outer=d.get("outer"),
        corners=tuple(tuple(c) for c in corners) if corners else None,
        excluded_points=[
            schemas.ExcludedPointModel(point=tuple(e["point"]), radius=e["radius"])
            for e in d.get("excluded_points", [])
        ],
    )


def _domain_from_model(m: schemas.DomainModel) -> DomainSpec:
    d: dict = {"kind": m.kind}
    if m.center is not None:
        d["center"] = list(m.center)
    if m.radius is not None:
        d["radius"] = m.radius
    if m.inner is not None:
        d["inner"] = m.inner
    if m.outer is not None:
        d["outer"] = m.outer
    if m.corners is not None:
        d["corners"] = [list(c) for c in m.corners]
    if m.excluded_points:
        d["excluded_points"] = [
            {"point": list(e.point), "radius": e.radius} for e in m.excluded_points
        ]
    return DomainSpec.from_dict(d)


def resolve_surface_ref(ref: schemas.SurfaceRef):
    """Return (surface, catalog_entry | None) from a name or inline spec."""
    if isinstance(ref, str):
        entry = get_entry(ref)
        return entry.surface, entry
    surface = WeierstrassSurface(
        name=ref.name,
        g=_parse(ref.g),
        f=_parse(ref.f),
        domain=_domain_from_model(ref.domain),
        base_point=complex(ref.base_point[0], ref.base_point[1]),
    )
    return surface, None


def _parse(text: str):
    from ..expressions import parse

    return parse(text)


def _region_for(surface, entry, grid: schemas.GridSpecModel, chern: bool) -> DomainSpec:
    if grid.bounds is not None:
        x0, y0, x1, y1 = grid.bounds
        return DomainSpec.rectangle(complex(x0, y0), complex(x1, y1))
    standard, chern_region = default_regions(surface, entry)
    return chern_region if chern else standard


def handle_catalog() -> list[schemas.CatalogEntryModel]:
    out = []
    for name, entry in catalog_entries().items():
        s = entry.surface
        out.append(
            schemas.CatalogEntryModel(
                name=name,
                g=str(s.g),
                f=str(s.f),
                domain=_domain_model(s.domain),
                base_point=(s.base_point.real, s.base_point.imag),
                description=entry.description,
            )
        )
    return out


def handle_catalog_entry(name: str) -> schemas.CatalogEntryModel:
    for entry in handle_catalog():
        if entry.name == name:
            return entry
    raise SurfaceSpecError(f"unknown catalog surface {name!r}")


def handle_eval(req: schemas.EvalRequest) -> schemas.PointReportModel:
    from ..surfaces import point_report

    surface, _ = resolve_surface_ref(req.surface)
    zeta = complex(req.at[0], req.at[1])
    rep = point_report(surface, zeta, req.v)
    return schemas.PointReportModel(
        zeta=(zeta.real, zeta.imag),
        mask=rep.mask.value,
        lam=rep.lam,
        K=rep.K,
        N=None if rep.N is None else tuple(float(x) for x in rep.N),
        N_V=rep.n_v,
        chi=rep.chi,
    )


def handle_verify(req: schemas.VerifyRequest) -> schemas.VerifyResponse:
    surface, entry = resolve_surface_ref(req.surface)
    identity = req.identity.replace("-", "_")
    if identity not in verification.IDENTITIES:
        raise SurfaceSpecError(
            f"unknown identity {req.identity!r}; known: "
            + ", ".join(verification.IDENTITIES)
        )
    needs_v = identity in verification.DIRECTIONAL
    if needs_v and req.v is None:
        raise SurfaceSpecError(f"identity {req.identity!r} needs a direction --v")
    region = _region_for(surface, entry, req.grid, chern=needs_v)
    h = req.grid.h or DEFAULT_VERIFY_H
    if req.refine:
        study = verification.convergence_study(
            surface, identity, region, h0=h, levels=req.refine, v=req.v
        )
        lo, hi = req.order_window
        passed = study.order is not None and lo <= study.order <= hi
        return schemas.VerifyResponse(
            mode="study",
            passed=passed,
            study=schemas.StudyModel(
                identity=identity,
                levels=[schemas.StudyLevelModel(h=lh, sup=ls) for lh, ls in study.levels],
                order=study.order,
            ),
        )
    grid = verification.build_grid(surface, region, h)
    report = verification.run_identity(surface, grid, identity, v=req.v)
    return schemas.VerifyResponse(
        mode="residual",
        passed=report.sup_norm <= req.tolerance,
        report=schemas.ResidualReportModel(**report.to_dict()),
    )


def handle_classify(req: schemas.ClassifyRequest) -> schemas.ClassifyResponse:
    surface, entry = resolve_surface_ref(req.surface)
    region = _region_for(surface, entry, req.grid, chern=False)
    h = req.grid.h or DEFAULT_CLASSIFY_H
    grid = verification.build_grid(surface, region, h)
    result = classifier.classify(surface, grid, threshold=req.threshold, net_size=req.net)
    return schemas.ClassifyResponse(
        is_enneper_candidate=result.is_enneper_candidate,
        best_direction=tuple(float(x) for x in result.best_direction),
        sigma_best=result.sigma_best,
        chi_mean=result.chi_mean,
        samples_used=result.samples_used,
    )


def handle_totalcurv(req: schemas.TotalCurvRequest) -> schemas.TotalCurvResponse:
    surface, entry = resolve_surface_ref(req.surface)
    if req.radius is not None:
        if req.radius <= 0:
            raise SurfaceSpecError("radius must be positive")
        center = 0j
        if surface.domain.kind in ("disk", "annulus"):
            center = surface.domain.center
        region = DomainSpec.disk(center, req.radius)
        h = req.h or max(req.radius / 400.0, 0.005)
    else:
        if req.bounds is not None:
            x0, y0, x1, y1 = req.bounds
            region = DomainSpec.rectangle(complex(x0, y0), complex(x1, y1))
        else:
            region, _ = default_regions(surface, entry)
        x0, y0, x1, y1 = region.bbox()
        h = req.h or max(max(x1 - x0, y1 - y0) / 800.0, 0.005)
    result = total_curvature(surface, region, h)
    return schemas.TotalCurvResponse(
        value=result.value,
        cells_used=result.cells_used,
        flat_cells=result.flat_cells,
        h=h,
    )


def handle_field(req: schemas.FieldRequest) -> schemas.FieldResponse:
    surface, entry = resolve_surface_ref(req.surface)
    region = _region_for(surface, entry, req.grid, chern=False)
    h = req.grid.h or DEFAULT_FIELD_H
    grid = verification.build_grid(surface, region, h)
    direction = as_direction(req.v)
    nv = grid.field.angle(direction)
    chi = grid.field.chi(direction)
    mask_names = np.full(grid.zz.shape, "outside", dtype=object)
    mask_names[grid.in_domain & (grid.field.mask == MASK_VALID)] = "valid"
    mask_names[grid.in_domain & (grid.field.mask == MASK_FLAT)] = "flat_point"
    mask_names[grid.in_domain & (grid.field.mask == MASK_POLE)] = "pole"
    with np.errstate(invalid="ignore"):
        singular = grid.in_domain & (grid.field.mask == MASK_VALID) & ~(1.0 + nv >= CHERN_TOL)
    mask_names[singular] = "chern_singular"

    lines = ["x,y,lambda,K,N1,N2,N3,NV,chi,mask"]
    rows = 0
    for jy in range(grid.ny):
        for jx in range(grid.nx):
            if not grid.in_domain[jy, jx]:
                continue
            z = grid.zz[jy, jx]
            vals = [
                z.real, z.imag,
                grid.lam[jy, jx], grid.K[jy, jx],
                grid.field.N[jy, jx, 0], grid.field.N[jy, jx, 1], grid.field.N[jy, jx, 2],
                nv[jy, jx], chi[jy, jx],
            ]
            lines.append(
                ",".join(FLOAT_FMT % val for val in vals) + f",{mask_names[jy, jx]}"
            )
            rows += 1
    return schemas.FieldResponse(csv="\n".join(lines) + "\n", rows=rows)


def handle_mesh(req: schemas.MeshRequest) -> schemas.MeshResponse:
    surface, entry = resolve_surface_ref(req.surface)
    if req.bounds is not None:
        bounds = req.bounds
    else:
        region, _ = default_regions(surface, entry)
        bounds = region.bbox()
    mesh = build_mesh(
        surface,
        bounds,
        nx=req.nx,
        ny=req.ny,
        v=req.v,
        quad=QuadratureSpec(req.nodes),
    )
    return schemas.MeshResponse(
        obj=mesh_to_obj(mesh),
        sidecar=mesh_sidecar_csv(mesh),
        vertices=mesh.vertex_count,
        faces=mesh.face_count,
    )
