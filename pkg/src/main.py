from pathlib import Path
from typing import Optional

import typer

from src.cli.deps import AppState
from src.cli.routes import register
from src.core.config import load_settings
from src.core.errors import EtcError
from src.core.logs import configure_logging

# Initialize the Typer app instance here
app = typer.Typer(
    name="etc",
    help="Grayscale-based block-scrambling encryption for EtC systems with JPEG.",
    no_args_is_help=True,
    add_completion=False,
)


@app.callback()
def main(
    ctx: typer.Context,
    config: Optional[Path] = typer.Option(None, "--config", help="YAML settings file"),
    verbose: int = typer.Option(0, "-v", "--verbose", count=True, help="-v for INFO, -vv for DEBUG"),
):
    try:
        settings = load_settings(config)
    except EtcError as e:
        typer.echo(str(e), err=True)
        raise typer.Exit(code=1)
    configure_logging(settings.log_level, verbose)
    ctx.obj = AppState(settings=settings, verbosity=verbose)


# Include every subcommand in the application
register(app)

if __name__ == "__main__":
    # This block allows running the CLI with 'python -m src.main'
    app()
