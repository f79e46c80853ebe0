"""Command line entry points."""

from __future__ import annotations

import sys

import click

from .config import load_server_config
from .errors import ConfigError


@click.group()
def main():
    """Form-driven RDF curation server with snapshot provenance."""


@main.command()
@click.option(
    "--config",
    "config_path",
    envvar="PROVCURATE_CONFIG",
    required=True,
    type=click.Path(exists=True),
    help="Server configuration YAML (or set PROVCURATE_CONFIG).",
)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option(
    "--static",
    "static_dir",
    default=None,
    type=click.Path(exists=True, file_okay=False),
    help="Serve a built web client from this directory at /.",
)
def serve(config_path: str, host: str, port: int, static_dir: str | None):
    """Run the curation API server."""
    import uvicorn

    from .api import create_app

    try:
        config = load_server_config(config_path)
    except ConfigError as exc:
        raise click.ClickException(str(exc))
    app = create_app(config, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")


@main.command("check-config")
@click.option(
    "--config",
    "config_path",
    envvar="PROVCURATE_CONFIG",
    required=True,
    type=click.Path(exists=True),
)
def check_config(config_path: str):
    """Validate the configuration, shape files, and display rules."""
    from .display import load_rules
    from .shacl import ShapeCatalog, parse_shapes

    try:
        config = load_server_config(config_path)
        catalog = ShapeCatalog()
        for shape_path in config.shape_paths:
            catalog = catalog.merged_with(parse_shapes(shape_path.read_text()))
        entries = 0
        for rule_path in config.rule_paths:
            entries += len(load_rules(rule_path.read_text(), catalog).entries)
    except ConfigError as exc:
        click.echo(f"invalid: {exc}", err=True)
        sys.exit(1)
    click.echo(
        f"ok: {len(catalog.shapes)} shape(s), {entries} display entr(ies), "
        f"{len(catalog.warnings)} warning(s)"
    )
    for warning in catalog.warnings:
        click.echo(f"  warning[{warning.code}]: {warning.message}")


if __name__ == "__main__":
    main()
