"""Built-in surface catalog.

Each entry carries the surface plus two default sampling regions:
`standard_region` for generic grid work (field dumps, classification,
curvature integrals) and `chern_region` for identity checks that take the
grid Laplacian of direction-dependent logarithms. The two differ where the
standard region touches zeros of g' or gets too close to them for a
second-difference stencil to resolve ln fields at the default spacing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import SurfaceSpecError
from .expressions import parse
from .surfaces import DomainSpec, ExcludedPoint, WeierstrassSurface


@dataclass(frozen=True)
class CatalogEntry:
    surface: WeierstrassSurface
    standard_region: DomainSpec
    chern_region: DomainSpec
    description: str


def _build_catalog() -> dict[str, CatalogEntry]:
    entries: dict[str, CatalogEntry] = {}

    def add(name, g, f, domain, base, standard, chern, description):
        surface = WeierstrassSurface(
            name=name, g=parse(g), f=parse(f), domain=domain, base_point=base
        )
        entries[name] = CatalogEntry(surface, standard, chern, description)

    add(
        "enneper",
        "z",
        "1",
        DomainSpec.disk(0j, 1000.0),
        0j,
        DomainSpec.disk(0j, 1.5),
        DomainSpec.annulus(0.5, 1.5),
        "Enneper surface; the constant Chern-Ricci direction is (0,0,-1)",
    )
    add(
        "catenoid",
        "z",
        "1/z^2",
        DomainSpec.annulus(0.5, 2.0, excluded=(ExcludedPoint(0j, 0.25),)),
        1 + 0j,
        DomainSpec.annulus(0.5, 2.0, excluded=(ExcludedPoint(0j, 0.25),)),
        DomainSpec.annulus(0.5, 2.0, excluded=(ExcludedPoint(0j, 0.25),)),
        "catenoid on an annulus; f has a double pole at the puncture",
    )
    add(
        "helicoid",
        "exp(z)",
        "i*exp(-z)",
        DomainSpec.rectangle(-1 + 0j, 1 + 2j),
        1j,
        DomainSpec.rectangle(-1 + 0j, 1 + 2j),
        DomainSpec.rectangle(-1 + 0j, 1 + 2j),
        "helicoid on a conformal strip patch",
    )
    add(
        "enneper2",
        "z^2",
        "1",
        DomainSpec.annulus(0.5, 2.0),
        1 + 0j,
        DomainSpec.annulus(0.5, 2.0),
        DomainSpec.annulus(1.0, 2.0),
        "higher-order Enneper (g = z^2); flat point at the origin excluded",
    )
    add(
        "enneper3",
        "z^3",
        "1",
        DomainSpec.annulus(0.5, 2.0),
        1 + 0j,
        DomainSpec.annulus(0.5, 2.0),
        DomainSpec.annulus(1.0, 2.0),
        "higher-order Enneper (g = z^3); flat point at the origin excluded",
    )
    add(
        "plane",
        "0",
        "1",
        DomainSpec.disk(0j, 1000.0),
        0j,
        DomainSpec.disk(0j, 1.5),
        DomainSpec.disk(0j, 1.5),
        "flat plane; every point is a flat point",
    )
    return entries


_CATALOG = _build_catalog()


def catalog_names() -> list[str]:
    return list(_CATALOG)


def catalog_entries() -> dict[str, CatalogEntry]:
    return dict(_CATALOG)


def get_entry(name: str) -> CatalogEntry:
    try:
        return _CATALOG[name]
    except KeyError:
        raise SurfaceSpecError(
            f"unknown catalog surface {name!r}; known: {', '.join(_CATALOG)}"
        ) from None


def get_surface(name: str) -> WeierstrassSurface:
    return get_entry(name).surface


def resolve_surface(name_or_path: str) -> tuple[WeierstrassSurface, CatalogEntry | None]:
    """Accept a catalog name or a path to a JSON surface spec.

    For JSON surfaces the catalog entry is None and callers fall back to
    the surface's own domain for default regions.
    """
    if name_or_path in _CATALOG:
        entry = _CATALOG[name_or_path]
        return entry.surface, entry
    if name_or_path.endswith(".json"):
        surface = WeierstrassSurface.from_json(name_or_path)
        return surface, None
    raise SurfaceSpecError(
        f"unknown surface {name_or_path!r} (not a catalog name or .json path)"
    )


def load_surface(source: str | dict) -> WeierstrassSurface:
    """Resolve from a catalog name, a JSON path, or an inline dict."""
    if isinstance(source, dict):
        return WeierstrassSurface.from_dict(source)
    return resolve_surface(source)[0]


def default_regions(surface: WeierstrassSurface, entry: CatalogEntry | None):
    if entry is not None:
        return entry.standard_region, entry.chern_region
    return surface.domain, surface.domain


def catalog_json() -> str:
    return json.dumps(
        [entry.surface.to_dict() for entry in _CATALOG.values()], indent=2
    )
