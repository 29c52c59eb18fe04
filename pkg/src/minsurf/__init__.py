"""Minimal-surface toolkit built on the Weierstrass representation.

Core pieces: a complex-analytic expression language with exact symbolic
differentiation, pointwise surface geometry (conformal factor, Gauss
curvature and map, angle function, Chern-Ricci function), grid residuals
for the curvature identities and flat conformal structures, immersion and
mesh export, and a direction-search classifier for constant Chern-Ricci
patches.
"""

from .catalog import catalog_names, get_entry, get_surface, load_surface
from .errors import (
    EmptyReportError,
    InsufficientSamplesError,
    MinsurfError,
    ParseError,
    PathThroughPoleError,
    SurfaceSpecError,
)
from .expressions import Expression, parse
from .surfaces import (
    DomainSpec,
    Mask,
    PointReport,
    WeierstrassSurface,
    angle_function,
    as_direction,
    chern_ricci,
    conformal_factor,
    gauss_curvature,
    gauss_map,
    point_report,
    sample_geometry,
    scaled,
)

__version__ = "0.1.0"

__all__ = [
    "DomainSpec",
    "EmptyReportError",
    "Expression",
    "InsufficientSamplesError",
    "Mask",
    "MinsurfError",
    "ParseError",
    "PathThroughPoleError",
    "PointReport",
    "SurfaceSpecError",
    "WeierstrassSurface",
    "angle_function",
    "as_direction",
    "catalog_names",
    "chern_ricci",
    "conformal_factor",
    "gauss_curvature",
    "gauss_map",
    "get_entry",
    "get_surface",
    "load_surface",
    "parse",
    "point_report",
    "sample_geometry",
    "scaled",
]
