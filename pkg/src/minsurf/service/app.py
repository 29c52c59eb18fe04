"""FastAPI application exposing the toolkit over HTTP."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from ..errors import (
    EmptyReportError,
    InsufficientSamplesError,
    MinsurfError,
    ParseError,
    PathThroughPoleError,
    SurfaceSpecError,
)
from . import handlers, schemas

app = FastAPI(
    title="minsurf",
    description=(
        "Minimal-surface computation service: pointwise geometry from "
        "Weierstrass data, curvature identity verification, constant "
        "Chern-Ricci classification, meshes, and curvature integrals."
    ),
)


def _http_error(exc: MinsurfError) -> HTTPException:
    if isinstance(exc, (ParseError, SurfaceSpecError)):
        return HTTPException(status_code=422, detail=str(exc))
    if isinstance(exc, (EmptyReportError, InsufficientSamplesError, PathThroughPoleError)):
        return HTTPException(status_code=409, detail=str(exc))
    return HTTPException(status_code=500, detail=str(exc))


@app.get("/healthz")
def healthz() -> dict:
    return {"status": "ok"}


@app.get("/catalog", response_model=list[schemas.CatalogEntryModel])
def catalog():
    return handlers.handle_catalog()


@app.get("/catalog/{name}", response_model=schemas.CatalogEntryModel)
def catalog_entry(name: str):
    try:
        return handlers.handle_catalog_entry(name)
    except SurfaceSpecError as exc:
        raise HTTPException(status_code=404, detail=str(exc)) from exc


@app.post("/eval", response_model=schemas.PointReportModel, response_model_by_alias=True)
def eval_point(req: schemas.EvalRequest):
    try:
        return handlers.handle_eval(req)
    except MinsurfError as exc:
        raise _http_error(exc) from exc


@app.post("/verify", response_model=schemas.VerifyResponse)
def verify(req: schemas.VerifyRequest):
    try:
        return handlers.handle_verify(req)
    except MinsurfError as exc:
        raise _http_error(exc) from exc


@app.post("/classify", response_model=schemas.ClassifyResponse)
def classify(req: schemas.ClassifyRequest):
    try:
        return handlers.handle_classify(req)
    except MinsurfError as exc:
        raise _http_error(exc) from exc


@app.post("/totalcurv", response_model=schemas.TotalCurvResponse)
def totalcurv(req: schemas.TotalCurvRequest):
    try:
        return handlers.handle_totalcurv(req)
    except MinsurfError as exc:
        raise _http_error(exc) from exc


@app.post("/field", response_model=schemas.FieldResponse)
def field(req: schemas.FieldRequest):
    try:
        return handlers.handle_field(req)
    except MinsurfError as exc:
        raise _http_error(exc) from exc


@app.post("/mesh", response_model=schemas.MeshResponse)
def mesh(req: schemas.MeshRequest):
    try:
        return handlers.handle_mesh(req)
    except MinsurfError as exc:
        raise _http_error(exc) from exc
