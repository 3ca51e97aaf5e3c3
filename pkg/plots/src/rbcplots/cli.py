"""Command line front end: render figures from YAML specs or direct flags."""

from __future__ import annotations

import sys

import click
import yaml

from .figures import KINDS, FigureSpec, plot
from .io import SchemaError


@click.group()
def cli() -> None:
    """Render figures from convection-model run artifacts."""


@cli.command("render")
@click.argument("specs", nargs=-1, required=True, type=click.Path(exists=True))
def cmd_render(specs: tuple[str, ...]) -> None:
    """Render one figure per YAML spec file.

    Each spec is a mapping with keys kind, inputs, out and optional style.
    """
    for path in specs:
        with open(path) as fh:
            doc = yaml.safe_load(fh)
        if not isinstance(doc, dict):
            raise SchemaError(f"figure spec {path!r} is not a mapping")
        for key in ("kind", "inputs", "out"):
            if key not in doc:
                raise SchemaError(f"figure spec {path!r} is missing field {key!r}")
        inputs = doc["inputs"]
        if isinstance(inputs, str):
            inputs = [inputs]
        spec = FigureSpec(
            kind=doc["kind"], inputs=list(inputs), out=doc["out"], style=doc.get("style") or {}
        )
        out = plot(spec)
        click.echo(out)


@cli.command("make")
@click.argument("kind", type=click.Choice(KINDS))
@click.argument("inputs", nargs=-1, required=True, type=click.Path(exists=True))
@click.option("--out", "-o", required=True, help="Output image path (.png, .svg, .pdf).")
@click.option(
    "--style",
    "-s",
    multiple=True,
    help="Style option as key=value; may be repeated.",
)
def cmd_make(kind: str, inputs: tuple[str, ...], out: str, style: tuple[str, ...]) -> None:
    """Render a single figure directly from input files."""
    opts: dict = {}
    for item in style:
        if "=" not in item:
            raise SchemaError(f"style option {item!r} is not key=value")
        key, value = item.split("=", 1)
        opts[key] = value
    path = plot(FigureSpec(kind=kind, inputs=list(inputs), out=out, style=opts))
    click.echo(path)


def main(argv: list[str] | None = None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except (SchemaError, FileNotFoundError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
