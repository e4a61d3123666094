import typer

# command families
from src.cli.commands.analysis import keyspace, properties, rd
from src.cli.commands.attack import attack, evaluate
from src.cli.commands.crypt import decrypt, encrypt
from src.cli.commands.keys import keygen
from src.cli.commands.roundtrip import roundtrip, sns


def register(app: typer.Typer) -> None:
    """Mount every subcommand on the application."""
    app.command("keygen")(keygen)
    app.command("encrypt")(encrypt)
    app.command("decrypt")(decrypt)
    app.command("roundtrip")(roundtrip)
    app.command("sns")(sns)
    app.command("keyspace")(keyspace)
    app.command("properties")(properties)
    app.command("rd")(rd)
    app.command("attack")(attack)
    app.command("evaluate")(evaluate)
