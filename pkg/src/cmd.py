import click
import dotenv
import pydantic_core

from src import __version__
from src import config
from src import errors
from src import log
from src.app.analysis import cli as analysis_cli
from src.app.generate import cli as generate_cli
from src.app.model import cli as model_cli


@click.group()
@click.version_option(__version__, prog_name="raga-markov")
def cli() -> None:
    """Fit, sample and analyze Markov chains of raga note sequences."""
    dotenv.load_dotenv()

    try:
        config.get_config()
    except pydantic_core.ValidationError as err:
        click.echo("Errors occurred while loading the application config:", err=True)
        for e in err.errors():
            click.echo(f" - {e['loc'][0]}: {e['msg']}" if e["loc"] else f" - {e['msg']}", err=True)
        click.echo("Please fix config.toml or the RAGA_MARKOV_* variables.", err=True)
        raise click.exceptions.Exit(errors.EXIT_USAGE)

    log.setup_logging(level=config.config.log_level, fmt=config.config.log_format)


cli.add_command(model_cli.estimate)
cli.add_command(model_cli.export)
cli.add_command(generate_cli.generate)
cli.add_command(generate_cli.validate)
cli.add_command(analysis_cli.analyze)
cli.add_command(analysis_cli.sweep)
