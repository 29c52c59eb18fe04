"""Request/response models for the HTTP service (and the CLI thin client)."""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field


class ExcludedPointModel(BaseModel):
    point: tuple[float, float]
    radius: float


class DomainModel(BaseModel):
    kind: str
    center: tuple[float, float] | None = None
    radius: float | None = None
    inner: float | None = None
    outer: float | None = None
    corners: tuple[tuple[float, float], tuple[float, float]] | None = None
    excluded_points: list[ExcludedPointModel] = Field(default_factory=list)


class SurfaceSpecModel(BaseModel):
    """Inline surface description; mirrors the JSON file format."""

    name: str
    g: str
    f: str
    domain: DomainModel
    base_point: tuple[float, float] = (0.0, 0.0)


SurfaceRef = str | SurfaceSpecModel


class CatalogEntryModel(BaseModel):
    name: str
    g: str
    f: str
    domain: DomainModel
    base_point: tuple[float, float]
    description: str


class EvalRequest(BaseModel):
    surface: SurfaceRef
    at: tuple[float, float]
    v: tuple[float, float, float] | None = None


class PointReportModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    zeta: tuple[float, float]
    mask: str
    lam: float | None = Field(default=None, alias="lambda")
    K: float | None = None
    N: tuple[float, float, float] | None = None
    N_V: float | None = None
    chi: float | None = None


class GridSpecModel(BaseModel):
    """Grid controls: spacing plus an optional rectangle override."""

    h: float | None = Field(default=None, gt=0)
    bounds: tuple[float, float, float, float] | None = None


class VerifyRequest(BaseModel):
    surface: SurfaceRef
    identity: str
    v: tuple[float, float, float] | None = None
    grid: GridSpecModel = Field(default_factory=GridSpecModel)
    refine: int | None = Field(default=None, ge=2)
    tolerance: float = Field(default=5e-3, gt=0)
    order_window: tuple[float, float] = (1.8, 2.2)


class ResidualReportModel(BaseModel):
    identity: str
    h: float
    nx: int
    ny: int
    usable: int
    sup: float
    rms: float


class StudyLevelModel(BaseModel):
    h: float
    sup: float


class StudyModel(BaseModel):
    identity: str
    levels: list[StudyLevelModel]
    order: float | None


class VerifyResponse(BaseModel):
    mode: str  # "residual" | "study"
    passed: bool
    report: ResidualReportModel | None = None
    study: StudyModel | None = None


class ClassifyRequest(BaseModel):
    surface: SurfaceRef
    grid: GridSpecModel = Field(default_factory=GridSpecModel)
    threshold: float = Field(default=1e-6, gt=0)
    net: int = Field(default=400, ge=16)


class ClassifyResponse(BaseModel):
    is_enneper_candidate: bool
    best_direction: tuple[float, float, float]
    sigma_best: float
    chi_mean: float
    samples_used: int


class TotalCurvRequest(BaseModel):
    surface: SurfaceRef
    radius: float | None = Field(default=None, gt=0)
    bounds: tuple[float, float, float, float] | None = None
    h: float | None = Field(default=None, gt=0)


class TotalCurvResponse(BaseModel):
    value: float
    cells_used: int
    flat_cells: int
    h: float


class FieldRequest(BaseModel):
    surface: SurfaceRef
    v: tuple[float, float, float] = (0.0, 0.0, 1.0)
    grid: GridSpecModel = Field(default_factory=GridSpecModel)


class FieldResponse(BaseModel):
    csv: str
    rows: int


class MeshRequest(BaseModel):
    surface: SurfaceRef
    nx: int = Field(default=41, ge=2)
    ny: int = Field(default=41, ge=2)
    bounds: tuple[float, float, float, float] | None = None
    v: tuple[float, float, float] = (0.0, 0.0, 1.0)
    nodes: int = Field(default=16, ge=4)


class MeshResponse(BaseModel):
    obj: str
    sidecar: str
    vertices: int
    faces: int


class ErrorResponse(BaseModel):
    error: str
    kind: str
