"""Command-line package: the Typer commands, their schemas and shared plumbing."""
