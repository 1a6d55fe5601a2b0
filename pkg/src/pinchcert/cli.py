"""Command line client.

Every subcommand talks to the HTTP service: against a live server when
--server is given, otherwise against an in-process instance, so the CLI
and the service can never drift apart.  Exit codes: 0 when the request
succeeded and every certificate passed, 2 when the pipeline ran but some
certification did not pass, 3 on invalid input or a transport/server
failure.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click
import httpx

from .certify import canonical_dumps, dicts_to_csv


def _client(server: str | None):
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    from fastapi.testclient import TestClient

    from .service.app import create_app

    return TestClient(create_app(), raise_server_exceptions=False)


def _post(ctx: click.Context, path: str, payload: dict) -> dict:
    try:
        with _client(ctx.obj["server"]) as client:
            resp = client.post(path, json=payload)
    except httpx.HTTPError as exc:
        click.echo(f"request failed: {exc}", err=True)
        sys.exit(3)
    if resp.status_code != 200:
        try:
            detail = resp.json().get("detail")
        except ValueError:
            detail = resp.text
        click.echo(f"error {resp.status_code}: {detail}", err=True)
        sys.exit(3)
    return resp.json()


def _strip_runtime(row: dict) -> dict:
    return {k: v for k, v in row.items() if k != "runtime_ms"}


def _write_outputs(json_path: str | None, csv_path: str | None, doc, rows: list[dict]) -> None:
    if json_path:
        Path(json_path).write_text(canonical_dumps(doc) + "\n")
    if csv_path:
        Path(csv_path).write_text(dicts_to_csv(rows))


def _parse_dims(text: str) -> list[int]:
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(part) for part in text.split(",") if part.strip()]


def _cert_line(row: dict) -> str:
    if "error" in row:
        err = row["error"]
        return f"n={row['n']:>3}  ERROR at {err['stage']}: {err['message']}"
    flag = "pass" if row["passes"] else "FAIL"
    paper = "pass" if row["passes_paper_mode"] else "FAIL"
    return (
        f"n={row['n']:>3}  h={row['h']:<5} diam<={row['diam_upper']:.4f}  "
        f"product={row['product']:.6g}  target={row['target']:.6g}  "
        f"[{flag}]  paper[{paper}]"
    )


def _passed(row: dict, paper_mode: bool) -> bool:
    if "error" in row:
        return False
    return row["passes_paper_mode"] if paper_mode else row["passes"]


@click.group()
@click.option("--server", default=None, metavar="URL", help="base URL of a running service; in-process when omitted")
@click.pass_context
def main(ctx: click.Context, server: str | None) -> None:
    """Certify the curvature-diameter pinching of the solvable construction."""
    ctx.obj = {"server": server}


@main.command()
@click.argument("n", type=int)
@click.option("--budget", default=4096, show_default=True, help="curvature search restarts")
@click.option("--seed", default=0, show_default=True)
@click.option("--t-grid", default=64, show_default=True, help="base-circle sample count for the fiber bound")
@click.option("--paper-mode", is_flag=True, help="select h for the base-1 diameter convention")
@click.option("--json", "json_path", metavar="PATH", help="write the certificate as canonical JSON")
@click.option("--csv", "csv_path", metavar="PATH", help="write the certificate as CSV")
@click.pass_context
def certify(ctx, n, budget, seed, t_grid, paper_mode, json_path, csv_path):
    """Produce the checked certificate for dimension N."""
    row = _post(
        ctx,
        "/certify",
        {"n": n, "budget": budget, "seed": seed, "t_grid": t_grid, "paper_mode": paper_mode},
    )
    click.echo(_cert_line(row))
    _write_outputs(json_path, csv_path, _strip_runtime(row), [row])
    sys.exit(0 if _passed(row, paper_mode) else 2)


@main.command()
@click.option("--dims", required=True, metavar="SPEC", help="dimensions: a range like 2..8 or a list like 2,4,6")
@click.option("--budget", default=4096, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--t-grid", default=64, show_default=True)
@click.option("--paper-mode", is_flag=True)
@click.option("--even-only", is_flag=True, help="drop odd dimensions before certifying")
@click.option("--json", "json_path", metavar="PATH")
@click.option("--csv", "csv_path", metavar="PATH")
@click.pass_context
def table(ctx, dims, budget, seed, t_grid, paper_mode, even_only, json_path, csv_path):
    """Certify a whole range of dimensions."""
    try:
        parsed = _parse_dims(dims)
    except ValueError:
        click.echo(f"cannot parse --dims {dims!r}", err=True)
        sys.exit(3)
    if not parsed:
        click.echo("--dims selects no dimensions", err=True)
        sys.exit(3)
    doc = _post(
        ctx,
        "/table",
        {
            "dims": parsed,
            "budget": budget,
            "seed": seed,
            "t_grid": t_grid,
            "paper_mode": paper_mode,
            "even_only": even_only,
        },
    )
    rows = doc["rows"]
    for row in rows:
        click.echo(_cert_line(row))
    stripped = {"schema": doc["schema"], "rows": [_strip_runtime(r) for r in rows]}
    _write_outputs(json_path, csv_path, stripped, rows)
    sys.exit(0 if all(_passed(r, paper_mode) for r in rows) else 2)


@main.command()
@click.argument("n", type=int)
@click.option("--json", "json_path", metavar="PATH")
@click.pass_context
def roots(ctx, n, json_path):
    """Spectrum of the degree-N construction polynomial, cross-checked."""
    doc = _post(ctx, "/roots", {"n": n})
    verdict = "holds" if doc["spectral_bound_holds"] else "fails"
    click.echo(
        f"n={doc['n']}  lambda_max={doc['lambda_max']:.12g}  "
        f"2/n bound {verdict} (margin {doc['spectral_margin']:+.6g})  "
        f"cross-check {doc['cross_check_mismatch']:.3g}"
    )
    for pair in doc["pairs"]:
        click.echo(f"  pair  lambda={pair['lambda']:+.12g}  phi={pair['phi']:.12g}")
    for lam in doc["reals"]:
        click.echo(f"  real  lambda={lam:+.12g}")
    if json_path:
        Path(json_path).write_text(canonical_dumps(doc) + "\n")
    sys.exit(0)


@main.command()
@click.argument("n", type=int)
@click.option("--budget", default=1024, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--json", "json_path", metavar="PATH")
@click.pass_context
def curvature(ctx, n, budget, seed, json_path):
    """Search the largest |sectional curvature| for dimension N."""
    doc = _post(ctx, "/curvature", {"n": n, "budget": budget, "seed": seed})
    click.echo(
        f"n={doc['n']}  max|K|={doc['max_abs']:.12g}  "
        f"analytic bound={doc['analytic_bound']:.12g}  "
        f"samples={doc['samples_used']}"
    )
    if json_path:
        Path(json_path).write_text(canonical_dumps(doc) + "\n")
    sys.exit(0)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
