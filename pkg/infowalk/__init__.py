import click
from dotenv import load_dotenv
load_dotenv()

__version__ = "0.1.0"


def create_cli() -> click.Group:
    """CLI Factory Function"""

    @click.group(help="Information-centric random-walk graph embedding.")
    @click.version_option(__version__, prog_name="infowalk")
    def cli():
        pass

    # --- Register Commands ---
    from infowalk.commands import COMMANDS
    for command in COMMANDS:
        cli.add_command(command)

    return cli


def main():
    create_cli()()
