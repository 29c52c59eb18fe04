"""Detection of Enneper patches by constancy of the Chern-Ricci function.

chi_V = 2 ln(1+<N,V>) - (1/2) ln(-K) is computed from closed forms, so its
spread over a sampled patch carries no discretization error. The search
scans a Fibonacci net of unit directions, then polishes the best direction
with Nelder-Mead on spherical angles. A verdict of "Enneper candidate" is
a numerical statement about the sampled patch, not a proof.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import InsufficientSamplesError
from .surfaces import CHERN_TOL, WeierstrassSurface, as_direction
from .verification import DomainGrid

MIN_SAMPLES = 25
DEFAULT_NET = 400
DEFAULT_THRESHOLD = 1e-6
REFINE_MAX_ITER = 200
REFINE_FTOL = 1e-10


@dataclass(frozen=True)
class TraceEntry:
    direction: tuple[float, float, float]
    sigma: float
    sup_dev: float


@dataclass
class ClassificationResult:
    is_enneper_candidate: bool
    best_direction: np.ndarray
    sigma_best: float
    chi_mean: float
    samples_used: int
    threshold: float
    search_trace: list[TraceEntry] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "is_enneper_candidate": self.is_enneper_candidate,
            "best_direction": [float(x) for x in self.best_direction],
            "sigma_best": self.sigma_best,
            "chi_mean": self.chi_mean,
            "samples_used": self.samples_used,
        }


@dataclass(frozen=True)
class GeometrySamples:
    """Per-point normals and curvatures at the valid points of a grid."""

    normals: np.ndarray  # (P, 3)
    log_neg_k: np.ndarray  # (P,)

    @property
    def count(self) -> int:
        return len(self.log_neg_k)


def geometry_samples(surface: WeierstrassSurface, grid: DomainGrid) -> GeometrySamples:
    valid = grid.valid
    normals = grid.field.N[valid]
    with np.errstate(all="ignore"):
        log_neg_k = np.log(-grid.K[valid])
    keep = np.isfinite(log_neg_k) & np.isfinite(normals).all(axis=1)
    return GeometrySamples(normals=normals[keep], log_neg_k=log_neg_k[keep])


def _spread(samples: GeometrySamples, direction: np.ndarray, chern_tol: float):
    """(mean, sigma, sup_dev, count) of chi over admissible samples."""
    nv = samples.normals @ direction
    ok = 1.0 + nv >= chern_tol
    count = int(ok.sum())
    if count == 0:
        return np.nan, np.inf, np.inf, 0
    with np.errstate(all="ignore"):
        chi = 2.0 * np.log1p(nv[ok]) - 0.5 * samples.log_neg_k[ok]
    mean = float(chi.mean())
    sigma = float(chi.std())
    sup_dev = float(np.abs(chi - mean).max())
    return mean, sigma, sup_dev, count


def chi_spread(
    surface: WeierstrassSurface,
    grid: DomainGrid,
    v,
    chern_tol: float = CHERN_TOL,
) -> tuple[float, float, int]:
    """Mean and population stddev of chi over the usable points for V."""
    samples = geometry_samples(surface, grid)
    mean, sigma, _, count = _spread(samples, as_direction(v), chern_tol)
    if count < MIN_SAMPLES:
        raise InsufficientSamplesError(count, MIN_SAMPLES, context="chi spread")
    return mean, sigma, count


def fibonacci_directions(n: int = DEFAULT_NET) -> np.ndarray:
    """Near-uniform net of n unit vectors (Fibonacci sphere)."""
    i = np.arange(n)
    z = 1.0 - 2.0 * (i + 0.5) / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = i * np.pi * (3.0 - np.sqrt(5.0))
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def _angles_of(v: np.ndarray) -> tuple[float, float]:
    theta = float(np.arccos(np.clip(v[2], -1.0, 1.0)))
    phi = float(np.arctan2(v[1], v[0]))
    return theta, phi


def _direction_of(theta: float, phi: float) -> np.ndarray:
    st = np.sin(theta)
    return np.array([st * np.cos(phi), st * np.sin(phi), np.cos(theta)])


def search_directions(
    samples: GeometrySamples,
    net_size: int = DEFAULT_NET,
    chern_tol: float = CHERN_TOL,
    max_iter: int = REFINE_MAX_ITER,
    ftol: float = REFINE_FTOL,
) -> ClassificationResult:
    """Global net scan plus local refinement of the constancy direction.

    The refined sigma can never exceed the best net value; both are kept in
    the trace. Raises InsufficientSamplesError when no net direction keeps
    at least MIN_SAMPLES admissible points.
    """
    net = fibonacci_directions(net_size)
    trace: list[TraceEntry] = []

    # Vectorized net sweep: sigma of chi per direction.
    nv = net @ samples.normals.T  # (net, P)
    ok = 1.0 + nv >= chern_tol
    counts = ok.sum(axis=1)
    with np.errstate(all="ignore"):
        chi = 2.0 * np.log1p(nv) - 0.5 * samples.log_neg_k[None, :]
        chi = np.where(ok, chi, np.nan)
        means = np.nanmean(chi, axis=1)
        sigmas = np.sqrt(np.nanmean((chi - means[:, None]) ** 2, axis=1))
        sups = np.nanmax(np.abs(chi - means[:, None]), axis=1)
    sigmas = np.where(counts >= MIN_SAMPLES, sigmas, np.inf)
    for d, s, sup in zip(net, sigmas, sups):
        trace.append(TraceEntry(tuple(float(x) for x in d), float(s), float(sup)))
    if not np.isfinite(sigmas).any():
        raise InsufficientSamplesError(int(counts.max(initial=0)), MIN_SAMPLES,
                                       context="direction net")
    best_idx = int(np.argmin(sigmas))
    best_net_sigma = float(sigmas[best_idx])
    best_v = net[best_idx]

    def objective(angles):
        v = _direction_of(angles[0], angles[1])
        _, sigma, sup_dev, count = _spread(samples, v, chern_tol)
        if count < MIN_SAMPLES:
            return np.inf
        trace.append(TraceEntry(tuple(float(x) for x in v), sigma, sup_dev))
        return sigma

    theta0, phi0 = _angles_of(best_v)
    res = minimize(
        objective,
        x0=np.array([theta0, phi0]),
        method="Nelder-Mead",
        options={"maxiter": max_iter, "fatol": ftol, "xatol": 1e-10},
    )
    refined_v = _direction_of(res.x[0], res.x[1])
    refined_sigma = float(res.fun)
    if refined_sigma <= best_net_sigma:
        best_v, sigma_best = refined_v, refined_sigma
    else:
        sigma_best = best_net_sigma
    mean, sigma_chk, _, count = _spread(samples, best_v, chern_tol)
    return ClassificationResult(
        is_enneper_candidate=False,
        best_direction=best_v,
        sigma_best=min(sigma_best, sigma_chk),
        chi_mean=mean,
        samples_used=count,
        threshold=np.nan,
        search_trace=trace,
    )


def optimize_direction(
    surface: WeierstrassSurface,
    grid: DomainGrid,
    net_size: int = DEFAULT_NET,
    chern_tol: float = CHERN_TOL,
) -> ClassificationResult:
    samples = geometry_samples(surface, grid)
    return search_directions(samples, net_size=net_size, chern_tol=chern_tol)


def classify(
    surface: WeierstrassSurface,
    grid: DomainGrid,
    threshold: float = DEFAULT_THRESHOLD,
    net_size: int = DEFAULT_NET,
) -> ClassificationResult:
    """Constant-chi verdict on the sampled patch.

    is_enneper_candidate is True when the best direction keeps the relative
    spread below threshold. The verdict is a sampled-patch decision; it
    never certifies the global statement.
    """
    result = optimize_direction(surface, grid, net_size=net_size)
    result.threshold = threshold
    result.is_enneper_candidate = bool(
        result.sigma_best < threshold * (1.0 + abs(result.chi_mean))
    )
    return result
