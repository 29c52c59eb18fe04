"""Command-line front end.

A thin client over the service layer: every command builds the same
request models the HTTP API accepts, calls the shared handlers in
process, and formats the response. `minsurf serve` exposes the identical
API over HTTP.

Exit codes: 0 success/pass, 1 tolerance failure, 2 degenerate or masked
input, 3 I/O error.
"""

from __future__ import annotations

import json
import sys

import click

from .errors import (
    EmptyReportError,
    InsufficientSamplesError,
    MinsurfError,
    ParseError,
    PathThroughPoleError,
    SurfaceSpecError,
)
from .service import handlers, schemas

EXIT_TOLERANCE = 1
EXIT_DEGENERATE = 2
EXIT_IO = 3

FLOAT_FMT = "%.17g"


def _fail(code: int, message: str):
    click.echo(message, err=True)
    sys.exit(code)


def _surface_ref(source: str) -> schemas.SurfaceRef:
    """Catalog name passes through; a .json path is inlined for the service."""
    if source.endswith(".json"):
        try:
            with open(source, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as exc:
            _fail(EXIT_IO, f"cannot read surface spec: {exc}")
        try:
            return schemas.SurfaceSpecModel(**raw)
        except Exception as exc:
            _fail(EXIT_DEGENERATE, f"bad surface spec {source!r}: {exc}")
    return source


def _triple(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise click.BadParameter(f"expected three comma-separated numbers, got {text!r}")
    return tuple(float(p) for p in parts)  # type: ignore[return-value]


def _pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise click.BadParameter(f"expected re,im, got {text!r}")
    return float(parts[0]), float(parts[1])


def _bounds(text: str) -> tuple[float, float, float, float]:
    parts = text.split(",")
    if len(parts) != 4:
        raise click.BadParameter(f"expected x0,y0,x1,y1, got {text!r}")
    return tuple(float(p) for p in parts)  # type: ignore[return-value]


def _call(fn):
    """Run a handler, mapping domain errors onto the exit-code contract."""
    try:
        return fn()
    except (EmptyReportError, InsufficientSamplesError, PathThroughPoleError) as exc:
        _fail(EXIT_DEGENERATE, str(exc))
    except (ParseError, SurfaceSpecError) as exc:
        _fail(EXIT_DEGENERATE, str(exc))
    except MinsurfError as exc:
        _fail(EXIT_DEGENERATE, str(exc))


def _write_file(path: str, content: str):
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(content)
    except OSError as exc:
        _fail(EXIT_IO, f"cannot write {path!r}: {exc}")


@click.group()
def main():
    """Minimal-surface toolkit: geometry from Weierstrass data, identity
    verification, Enneper detection, meshes, and curvature integrals."""


@main.command()
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.option("--name", default=None, help="Show a single catalog entry.")
def catalog(fmt, name):
    """List the built-in surfaces."""
    if name:
        entry = _call(lambda: handlers.handle_catalog_entry(name))
        entries = [entry]
    else:
        entries = _call(handlers.handle_catalog)
    if fmt == "json":
        click.echo(json.dumps([e.model_dump() for e in entries], indent=2))
        return
    for e in entries:
        dom = e.domain
        if dom.kind == "disk":
            desc = f"disk r<={dom.radius:g}"
        elif dom.kind == "annulus":
            desc = f"annulus {dom.inner:g}<=|z|<={dom.outer:g}"
        else:
            (x0, y0), (x1, y1) = dom.corners
            desc = f"rectangle [{x0:g},{x1:g}]x[{y0:g},{y1:g}]"
        click.echo(f"{e.name:10s} g={e.g:12s} f={e.f:14s} domain={desc}")


@main.command("eval")
@click.option("-s", "--surface", required=True)
@click.option("--at", required=True, help="Point re,im.")
@click.option("--v", default=None, help="Direction x,y,z for angle and chi.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def eval_cmd(surface, at, v, fmt):
    """Report lambda, K, N, <N,V>, chi at a point."""
    req = schemas.EvalRequest(
        surface=_surface_ref(surface),
        at=_pair(at),
        v=_triple(v) if v else None,
    )
    rep = _call(lambda: handlers.handle_eval(req))
    if fmt == "json":
        click.echo(rep.model_dump_json(by_alias=True, indent=2))
    else:
        click.echo(f"zeta   = {rep.zeta[0]:g} + {rep.zeta[1]:g}i")
        click.echo(f"mask   = {rep.mask}")
        if rep.lam is not None:
            click.echo(f"lambda = {FLOAT_FMT % rep.lam}")
        if rep.K is not None:
            click.echo(f"K      = {FLOAT_FMT % rep.K}")
        if rep.N is not None:
            click.echo("N      = " + " ".join(FLOAT_FMT % x for x in rep.N))
        if rep.N_V is not None:
            click.echo(f"N_V    = {FLOAT_FMT % rep.N_V}")
        if rep.chi is not None:
            click.echo(f"chi    = {FLOAT_FMT % rep.chi}")
    if rep.mask != "valid":
        sys.exit(EXIT_DEGENERATE)


@main.command()
@click.option("-s", "--surface", required=True)
@click.option("--identity", required=True,
              help="ricci | chern | harmonic | flat-ricci | flat-chern")
@click.option("--h", "spacing", type=float, default=None, help="Grid spacing (default 0.01).")
@click.option("--v", default=None, help="Direction x,y,z (chern/harmonic/flat-chern).")
@click.option("--refine", type=int, default=None, help="Convergence study with N halvings.")
@click.option("--tol", type=float, default=5e-3, help="Pass threshold on the sup norm.")
@click.option("--bounds", default=None, help="Rectangle override x0,y0,x1,y1.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def verify(surface, identity, spacing, v, refine, tol, bounds, fmt):
    """Measure an identity residual; exit 0 iff it passes."""
    req = schemas.VerifyRequest(
        surface=_surface_ref(surface),
        identity=identity,
        v=_triple(v) if v else None,
        grid=schemas.GridSpecModel(h=spacing, bounds=_bounds(bounds) if bounds else None),
        refine=refine,
        tolerance=tol,
    )
    resp = _call(lambda: handlers.handle_verify(req))
    if fmt == "json":
        click.echo(resp.model_dump_json(indent=2))
    elif resp.mode == "residual":
        r = resp.report
        click.echo(
            f"identity={r.identity} h={r.h:g} usable={r.usable} "
            f"sup={r.sup:.6e} rms={r.rms:.6e} "
            f"{'PASS' if resp.passed else 'FAIL'} (tol {tol:g})"
        )
    else:
        for lv in resp.study.levels:
            click.echo(f"h={lv.h:<8g} sup={lv.sup:.6e}")
        order = "undefined" if resp.study.order is None else f"{resp.study.order:.3f}"
        click.echo(f"fitted order = {order} {'PASS' if resp.passed else 'FAIL'}")
    if not resp.passed:
        sys.exit(EXIT_TOLERANCE)


@main.command()
@click.option("-s", "--surface", required=True)
@click.option("--h", "spacing", type=float, default=None, help="Grid spacing (default 0.05).")
@click.option("--threshold", type=float, default=1e-6)
@click.option("--net", type=int, default=400, help="Direction-net size.")
@click.option("--bounds", default=None, help="Rectangle override x0,y0,x1,y1.")
def classify(surface, spacing, threshold, net, bounds):
    """Search directions for a constant Chern-Ricci function."""
    req = schemas.ClassifyRequest(
        surface=_surface_ref(surface),
        grid=schemas.GridSpecModel(h=spacing, bounds=_bounds(bounds) if bounds else None),
        threshold=threshold,
        net=net,
    )
    resp = _call(lambda: handlers.handle_classify(req))
    click.echo(resp.model_dump_json(indent=2))


@main.command()
@click.option("-s", "--surface", required=True)
@click.option("--radius", type=float, default=None, help="Integrate over a disk of this radius.")
@click.option("--bounds", default=None, help="Rectangle override x0,y0,x1,y1.")
@click.option("--h", "spacing", type=float, default=None,
              help="Cell size (default adapts to the region).")
def totalcurv(surface, radius, bounds, spacing):
    """Signed integral of the Gauss curvature over a region."""
    import warnings

    req = schemas.TotalCurvRequest(
        surface=_surface_ref(surface),
        radius=radius,
        bounds=_bounds(bounds) if bounds else None,
        h=spacing,
    )
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        resp = _call(lambda: handlers.handle_totalcurv(req))
    for w in caught:
        click.echo(f"warning: {w.message}", err=True)
    click.echo(FLOAT_FMT % resp.value)


@main.command()
@click.option("-s", "--surface", required=True)
@click.option("--h", "spacing", type=float, default=None, help="Grid spacing (default 0.05).")
@click.option("--v", default="0,0,1", help="Direction for NV and chi columns.")
@click.option("--bounds", default=None, help="Rectangle override x0,y0,x1,y1.")
@click.option("--out", default="-", help="Output CSV path ('-' for stdout).")
def field(surface, spacing, v, bounds, out):
    """Dump per-point geometry as CSV (x,y,lambda,K,N1,N2,N3,NV,chi,mask)."""
    req = schemas.FieldRequest(
        surface=_surface_ref(surface),
        v=_triple(v),
        grid=schemas.GridSpecModel(h=spacing, bounds=_bounds(bounds) if bounds else None),
    )
    resp = _call(lambda: handlers.handle_field(req))
    if out == "-":
        click.echo(resp.csv, nl=False)
    else:
        _write_file(out, resp.csv)
        click.echo(f"wrote {resp.rows} rows to {out}")


@main.command()
@click.option("-s", "--surface", required=True)
@click.option("--grid", "gridsize", default="41x41", help="Vertex lattice, e.g. 41x41.")
@click.option("--bounds", default=None, help="Parameter rectangle x0,y0,x1,y1.")
@click.option("--v", default="0,0,1", help="Direction for the chi attribute.")
@click.option("--nodes", type=int, default=16, help="Quadrature nodes per segment.")
@click.option("--out", required=True, help="Output OBJ path.")
@click.option("--sidecar", default=None, help="Attribute CSV path (default OBJ path + .csv).")
def mesh(surface, gridsize, bounds, v, nodes, out, sidecar):
    """Immerse a parameter lattice and write an OBJ mesh plus attributes."""
    try:
        nx_s, ny_s = gridsize.lower().split("x")
        nx, ny = int(nx_s), int(ny_s)
    except ValueError:
        raise click.BadParameter(f"expected NXxNY, got {gridsize!r}")
    req = schemas.MeshRequest(
        surface=_surface_ref(surface),
        nx=nx,
        ny=ny,
        bounds=_bounds(bounds) if bounds else None,
        v=_triple(v),
        nodes=nodes,
    )
    resp = _call(lambda: handlers.handle_mesh(req))
    if resp.vertices == 0:
        _fail(EXIT_DEGENERATE, "no usable vertices in the requested lattice")
    _write_file(out, resp.obj)
    sidecar = sidecar or out + ".csv"
    _write_file(sidecar, resp.sidecar)
    click.echo(f"wrote {resp.vertices} vertices, {resp.faces} faces to {out}; attributes in {sidecar}")


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service.app import app as service_app

    uvicorn.run(service_app, host=host, port=port)


if __name__ == "__main__":
    main()
