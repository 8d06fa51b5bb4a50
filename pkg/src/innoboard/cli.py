"""Command-line entry points: serve, simulate, replay, export.

Exit codes: 0 ok, 1 check failure (non-convergence, golden mismatch),
2 startup error (port busy, missing project).
"""

from __future__ import annotations

import asyncio
import contextlib
import json
import signal
import sys
from pathlib import Path

import click

from .scenario import ScenarioError, compare_with_golden, run_script_file
from .server import run_server
from .sim import DELAY_MODELS, simulate
from .store import ProjectStore, export_project


@click.group()
def main() -> None:
    """Collaborative innovation board server and harness."""


@main.command()
@click.option("--port", type=int, default=8080, show_default=True)
@click.option(
    "--data-dir",
    type=click.Path(path_type=Path),
    envvar="BOARD_DATA_DIR",
    required=True,
    help="Project storage root (env: BOARD_DATA_DIR).",
)
@click.option("--locale-dir", type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--ui-dir", type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--host", default="0.0.0.0", show_default=True)
def serve(port: int, data_dir: Path, locale_dir, ui_dir, host: str) -> None:
    """Run the sync server until SIGINT/SIGTERM."""
    try:
        data_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        click.echo(f"data dir not writable: {exc}", err=True)
        sys.exit(2)

    async def _serve() -> None:
        task = asyncio.ensure_future(
            run_server(port, data_dir, locale_dir=locale_dir, ui_dir=ui_dir, host=host)
        )
        loop = asyncio.get_running_loop()
        for sig in (signal.SIGINT, signal.SIGTERM):
            loop.add_signal_handler(sig, task.cancel)
        with contextlib.suppress(asyncio.CancelledError):
            await task

    try:
        asyncio.run(_serve())
    except OSError as exc:
        click.echo(f"cannot listen on port {port}: {exc}", err=True)
        sys.exit(2)


@main.command("simulate")
@click.option("--clients", type=int, default=3, show_default=True)
@click.option("--ops", type=int, default=200, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option(
    "--delay",
    type=click.Choice(DELAY_MODELS),
    default="uniform",
    show_default=True,
)
def simulate_cmd(clients: int, ops: int, seed: int, delay: str) -> None:
    """Randomized convergence run; exits 1 when replicas diverge."""
    try:
        report = simulate(clients, ops, seed, delay)
    except ValueError as exc:
        click.echo(str(exc), err=True)
        sys.exit(2)
    click.echo(json.dumps(report.to_jsonable(), indent=2))
    if not report.converged:
        sys.exit(1)


@main.command()
@click.option("--script", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--golden-dir", type=click.Path(path_type=Path), default=None)
@click.option("--update-golden", is_flag=True, help="Rewrite golden files.")
def replay(script: Path, golden_dir, update_golden: bool) -> None:
    """Replay a scripted session and compare it to the golden outputs."""
    if golden_dir is None:
        golden_dir = script.parent / "golden"
    try:
        result = run_script_file(script)
    except ScenarioError as exc:
        click.echo(f"bad script: {exc}", err=True)
        sys.exit(2)
    mismatches = compare_with_golden(result, golden_dir, update=update_golden)
    if update_golden:
        click.echo(f"golden files written to {golden_dir}")
        return
    if mismatches:
        for entry in mismatches:
            click.echo(entry, err=True)
        sys.exit(1)
    click.echo("replay matches golden files")


@main.command()
@click.option("--project", required=True)
@click.option("--out", type=click.Path(path_type=Path), required=True)
@click.option(
    "--data-dir",
    type=click.Path(path_type=Path),
    envvar="BOARD_DATA_DIR",
    required=True,
)
def export(project: str, out: Path, data_dir: Path) -> None:
    """Write a project's portable JSON export."""
    store = ProjectStore(data_dir)
    if not store.exists(project):
        click.echo(f"no such project: {project}", err=True)
        sys.exit(2)
    doc, _, _ = store.load(project)
    out.write_bytes(export_project(doc))
    click.echo(f"exported {project} to {out}")


if __name__ == "__main__":
    main()
