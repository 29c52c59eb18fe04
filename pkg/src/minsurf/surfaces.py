"""Weierstrass-data surfaces and their pointwise geometry.

A surface is a pair of complex-analytic expressions (g, f) on a planar
domain. The fixed convention used throughout the package:

    forms     Phi = (f(1-g^2)/2, i f(1+g^2)/2, f g)
    metric    lambda = |f| (1+|g|^2) / 2          (ds^2 = lambda^2 |dz|^2)
    curvature K = -(4|g'| / (|f| (1+|g|^2)^2))^2
    normal    N = (2 Re g, 2 Im g, |g|^2 - 1) / (1+|g|^2)

Degenerate points are masked, never silently evaluated: poles/branch
points (pole), zeros of curvature (flat_point), and directions where the
tilted conformal factor 1+<N,V> degenerates (chern_singular).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import SurfaceSpecError
from .expressions import Expression, parse

# Default mask thresholds. Grid operations accept overrides.
FLAT_TOL = 1e-12
CHERN_TOL = 1e-9
_POLE_FLOOR = 1e-300


class Mask(str, Enum):
    VALID = "valid"
    FLAT_POINT = "flat_point"
    POLE = "pole"
    CHERN_SINGULAR = "chern_singular"


# Integer codes used in vectorized mask arrays.
MASK_VALID = 0
MASK_FLAT = 1
MASK_POLE = 2

_MASK_FROM_CODE = {MASK_VALID: Mask.VALID, MASK_FLAT: Mask.FLAT_POINT, MASK_POLE: Mask.POLE}


def as_direction(v) -> np.ndarray:
    """Normalize a 3-vector to unit length; reject zero vectors."""
    arr = np.asarray(v, dtype=float).reshape(3)
    norm = float(np.linalg.norm(arr))
    if norm < 1e-12:
        raise SurfaceSpecError("direction must be a nonzero 3-vector")
    return arr / norm


@dataclass(frozen=True)
class ExcludedPoint:
    point: complex
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise SurfaceSpecError("exclusion radius must be positive")


@dataclass(frozen=True)
class DomainSpec:
    """Planar sampling domain: disk, annulus, or axis-aligned rectangle."""

    kind: str
    center: complex = 0j
    radius: float = 0.0
    inner: float = 0.0
    outer: float = 0.0
    corner_min: complex = 0j
    corner_max: complex = 0j
    excluded: tuple[ExcludedPoint, ...] = ()

    def __post_init__(self):
        if self.kind == "disk":
            if self.radius <= 0:
                raise SurfaceSpecError("disk radius must be positive")
        elif self.kind == "annulus":
            if self.inner <= 0 or self.outer <= 0:
                raise SurfaceSpecError("annulus radii must be positive")
            if self.inner >= self.outer:
                raise SurfaceSpecError("annulus needs inner < outer")
        elif self.kind == "rectangle":
            if (
                self.corner_min.real >= self.corner_max.real
                or self.corner_min.imag >= self.corner_max.imag
            ):
                raise SurfaceSpecError("rectangle corners must be ordered")
        else:
            raise SurfaceSpecError(f"unknown domain kind {self.kind!r}")

    @classmethod
    def disk(cls, center: complex = 0j, radius: float = 1.0, excluded=()) -> "DomainSpec":
        return cls(kind="disk", center=complex(center), radius=float(radius),
                   excluded=tuple(excluded))

    @classmethod
    def annulus(cls, inner: float, outer: float, center: complex = 0j, excluded=()) -> "DomainSpec":
        return cls(kind="annulus", center=complex(center), inner=float(inner),
                   outer=float(outer), excluded=tuple(excluded))

    @classmethod
    def rectangle(cls, corner_min: complex, corner_max: complex, excluded=()) -> "DomainSpec":
        return cls(kind="rectangle", corner_min=complex(corner_min),
                   corner_max=complex(corner_max), excluded=tuple(excluded))

    def contains(self, zz) -> np.ndarray:
        """Vectorized membership test (closed region minus exclusions)."""
        z = np.asarray(zz, dtype=np.complex128)
        if self.kind == "disk":
            inside = np.abs(z - self.center) <= self.radius
        elif self.kind == "annulus":
            r = np.abs(z - self.center)
            inside = (r >= self.inner) & (r <= self.outer)
        else:
            inside = (
                (z.real >= self.corner_min.real)
                & (z.real <= self.corner_max.real)
                & (z.imag >= self.corner_min.imag)
                & (z.imag <= self.corner_max.imag)
            )
        for ex in self.excluded:
            inside &= np.abs(z - ex.point) > ex.radius
        return inside

    def bbox(self) -> tuple[float, float, float, float]:
        """(x0, y0, x1, y1) bounding box."""
        if self.kind == "disk":
            c, r = self.center, self.radius
            return (c.real - r, c.imag - r, c.real + r, c.imag + r)
        if self.kind == "annulus":
            c, r = self.center, self.outer
            return (c.real - r, c.imag - r, c.real + r, c.imag + r)
        return (
            self.corner_min.real,
            self.corner_min.imag,
            self.corner_max.real,
            self.corner_max.imag,
        )

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.kind == "disk":
            d["center"] = [self.center.real, self.center.imag]
            d["radius"] = self.radius
        elif self.kind == "annulus":
            d["center"] = [self.center.real, self.center.imag]
            d["inner"] = self.inner
            d["outer"] = self.outer
        else:
            d["corners"] = [
                [self.corner_min.real, self.corner_min.imag],
                [self.corner_max.real, self.corner_max.imag],
            ]
        if self.excluded:
            d["excluded_points"] = [
                {"point": [ex.point.real, ex.point.imag], "radius": ex.radius}
                for ex in self.excluded
            ]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "DomainSpec":
        try:
            kind = d["kind"]
            excluded = tuple(
                ExcludedPoint(complex(p["point"][0], p["point"][1]), float(p["radius"]))
                for p in d.get("excluded_points", ())
            )
            if kind == "disk":
                c = d.get("center", [0.0, 0.0])
                return cls.disk(complex(c[0], c[1]), float(d["radius"]), excluded)
            if kind == "annulus":
                c = d.get("center", [0.0, 0.0])
                return cls.annulus(float(d["inner"]), float(d["outer"]),
                                   complex(c[0], c[1]), excluded)
            if kind == "rectangle":
                (a, b), (c2, d2) = d["corners"]
                return cls.rectangle(complex(a, b), complex(c2, d2), excluded)
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise SurfaceSpecError(f"bad domain spec: {exc}") from exc
        raise SurfaceSpecError(f"unknown domain kind {kind!r}")


@dataclass(frozen=True)
class WeierstrassSurface:
    """Immutable surface description; all evaluation is pure."""

    name: str
    g: Expression
    f: Expression
    domain: DomainSpec
    base_point: complex = 0j
    g_prime: Expression = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.g_prime is None:
            object.__setattr__(self, "g_prime", self.g.differentiate())
        if not bool(self.domain.contains(self.base_point)):
            raise SurfaceSpecError(
                f"base point {self.base_point} outside domain of {self.name!r}"
            )
        for expr in (self.f, self.g, self.g_prime):
            if expr.evaluate(self.base_point) is None:
                raise SurfaceSpecError(
                    f"base point {self.base_point} is singular for {self.name!r}"
                )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "g": str(self.g),
            "f": str(self.f),
            "domain": self.domain.to_dict(),
            "base_point": [self.base_point.real, self.base_point.imag],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "WeierstrassSurface":
        try:
            base = d.get("base_point", [0.0, 0.0])
            return cls(
                name=str(d["name"]),
                g=parse(d["g"]),
                f=parse(d["f"]),
                domain=DomainSpec.from_dict(d["domain"]),
                base_point=complex(base[0], base[1]),
            )
        except (KeyError, IndexError, TypeError) as exc:
            raise SurfaceSpecError(f"bad surface spec: {exc}") from exc

    @classmethod
    def from_json(cls, path: str) -> "WeierstrassSurface":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class GeometryField:
    """Vectorized pointwise geometry over an array of sample points.

    mask holds integer codes (MASK_VALID / MASK_FLAT / MASK_POLE); lam, K
    and N are only meaningful where the mask allows (N and lam are still
    finite at flat points, K is finite but below the flat threshold).
    """

    zz: np.ndarray
    lam: np.ndarray
    K: np.ndarray
    N: np.ndarray  # shape zz.shape + (3,)
    mask: np.ndarray

    @property
    def valid(self) -> np.ndarray:
        return self.mask == MASK_VALID

    @property
    def nonpole(self) -> np.ndarray:
        return self.mask != MASK_POLE

    def angle(self, v) -> np.ndarray:
        """<N, V> over the field; nan where the normal is unavailable."""
        direction = as_direction(v)
        nv = self.N @ direction
        return np.where(self.nonpole, nv, np.nan)

    def chern_ok(self, v, chern_tol: float = CHERN_TOL) -> np.ndarray:
        nv = self.angle(v)
        with np.errstate(invalid="ignore"):
            return self.nonpole & (1.0 + nv >= chern_tol)

    def chi(self, v, chern_tol: float = CHERN_TOL) -> np.ndarray:
        """Chern-Ricci function 2 ln(1+<N,V>) - (1/2) ln(-K); nan when masked."""
        nv = self.angle(v)
        ok = self.valid & self.chern_ok(v, chern_tol)
        with np.errstate(all="ignore"):
            chi = 2.0 * np.log1p(nv) - 0.5 * np.log(-self.K)
        return np.where(ok, chi, np.nan)


def sample_geometry(surface: WeierstrassSurface, zz, flat_tol: float = FLAT_TOL) -> GeometryField:
    """Evaluate conformal factor, curvature, and normal over an array."""
    z = np.asarray(zz, dtype=np.complex128)
    with np.errstate(all="ignore"):
        gv, gpole = surface.g.evaluate_array(z)
        fv, fpole = surface.f.evaluate_array(z)
        gpv, gppole = surface.g_prime.evaluate_array(z)

        absf = np.abs(fv)
        absg2 = gv.real**2 + gv.imag**2
        s1 = 1.0 + absg2
        lam = absf * s1 / 2.0

        pole = gpole | fpole | gppole
        pole |= ~np.isfinite(lam) | (lam < _POLE_FLOOR)

        denom = np.where(pole, 1.0, absf * s1 * s1)
        root = 4.0 * np.abs(gpv) / denom
        K = -(root * root)
        pole |= ~np.isfinite(K)

        flat = ~pole & (np.abs(K) < flat_tol)

        safe_s1 = np.where(pole, 1.0, s1)
        N = np.stack(
            [2.0 * gv.real / safe_s1, 2.0 * gv.imag / safe_s1, (absg2 - 1.0) / safe_s1],
            axis=-1,
        )

    mask = np.zeros(z.shape, dtype=np.int8)
    mask[flat] = MASK_FLAT
    mask[pole] = MASK_POLE
    bad = mask == MASK_POLE
    lam = np.where(bad, np.nan, lam)
    K = np.where(bad, np.nan, K)
    N = np.where(bad[..., None], np.nan, N)
    return GeometryField(zz=z, lam=lam, K=K, N=N, mask=mask)


@dataclass(frozen=True)
class PointGeometry:
    lam: float | None
    K: float | None
    N: np.ndarray | None
    mask: Mask


@dataclass(frozen=True)
class PointReport:
    """Full pointwise record: geometry plus the direction-dependent values."""

    zeta: complex
    lam: float | None
    K: float | None
    N: np.ndarray | None
    n_v: float | None
    chi: float | None
    mask: Mask

    def to_dict(self) -> dict:
        return {
            "zeta": [self.zeta.real, self.zeta.imag],
            "lambda": self.lam,
            "K": self.K,
            "N": None if self.N is None else [float(x) for x in self.N],
            "N_V": self.n_v,
            "chi": self.chi,
            "mask": self.mask.value,
        }


def _field_at(surface: WeierstrassSurface, zeta: complex) -> GeometryField:
    return sample_geometry(surface, np.asarray(complex(zeta)))


def conformal_factor(surface: WeierstrassSurface, zeta: complex) -> tuple[float | None, Mask]:
    """Metric scale at a point; (None, pole) at branch points and poles."""
    fld = _field_at(surface, zeta)
    if fld.mask == MASK_POLE:
        return None, Mask.POLE
    return float(fld.lam), Mask.VALID


def gauss_curvature(surface: WeierstrassSurface, zeta: complex) -> tuple[float | None, Mask]:
    """Curvature at a point; flat points are flagged since -K is divided by."""
    fld = _field_at(surface, zeta)
    if fld.mask == MASK_POLE:
        return None, Mask.POLE
    K = float(fld.K)
    if fld.mask == MASK_FLAT:
        return K, Mask.FLAT_POINT
    return K, Mask.VALID


def gauss_map(surface: WeierstrassSurface, zeta: complex) -> tuple[np.ndarray | None, Mask]:
    fld = _field_at(surface, zeta)
    if fld.mask == MASK_POLE:
        return None, Mask.POLE
    return np.asarray(fld.N, dtype=float).reshape(3), Mask.VALID


def angle_function(surface: WeierstrassSurface, zeta: complex, v) -> tuple[float | None, Mask]:
    """<N, V> at a point; chern_singular when 1+<N,V> degenerates."""
    fld = _field_at(surface, zeta)
    if fld.mask == MASK_POLE:
        return None, Mask.POLE
    nv = float(fld.angle(v))
    if 1.0 + nv < CHERN_TOL:
        return nv, Mask.CHERN_SINGULAR
    return nv, Mask.VALID


def chern_ricci(surface: WeierstrassSurface, zeta: complex, v) -> tuple[float | None, Mask]:
    """ln((1+<N,V>)^2 / sqrt(-K)) at a point, with mask propagation."""
    report = point_report(surface, zeta, v)
    return report.chi, report.mask


def point_report(surface: WeierstrassSurface, zeta: complex, v=None) -> PointReport:
    """Bundle lam, K, N, <N,V>, chi with a single evaluation of f, g, g'."""
    fld = _field_at(surface, zeta)
    zeta = complex(zeta)
    if fld.mask == MASK_POLE:
        return PointReport(zeta, None, None, None, None, None, Mask.POLE)
    lam = float(fld.lam)
    K = float(fld.K)
    N = np.asarray(fld.N, dtype=float).reshape(3)
    n_v = None
    chi = None
    mask = _MASK_FROM_CODE[int(fld.mask)]
    if v is not None:
        n_v = float(N @ as_direction(v))
        # The intrinsic mask (flat point) outranks direction degeneracy.
        if mask == Mask.VALID:
            if 1.0 + n_v < CHERN_TOL:
                mask = Mask.CHERN_SINGULAR
            else:
                chi = 2.0 * np.log1p(n_v) - 0.5 * np.log(-K)
    return PointReport(zeta, lam, K, N, n_v, chi, mask)


def scaled(surface: WeierstrassSurface, t: float, name: str | None = None) -> WeierstrassSurface:
    """Homothety: replace f by t*f (t > 0). Leaves N unchanged, shifts chi by ln t."""
    if t <= 0:
        raise SurfaceSpecError("homothety factor must be positive")
    scaled_f = parse(f"({t!r})*({surface.f})")
    return WeierstrassSurface(
        name=name or f"{surface.name}*{t:g}",
        g=surface.g,
        f=scaled_f,
        domain=surface.domain,
        base_point=surface.base_point,
        g_prime=surface.g_prime,
    )
