"""
Command plumbing shared by the CLI subcommands: run logging, error mapping
and file access with path context.
"""

import contextlib
import functools
import time
import typing
import uuid
from collections.abc import Callable
from collections.abc import Iterator

import click
import structlog.contextvars

from src import errors
from src import log
from src import storage
from src.app.corpus import service as corpus_service
from src.app.corpus import types as corpus_types
from src.config import DEFAULT_ALPHABET
from src.config import config

__all__ = ["logged_command", "file_context", "read_text", "write_output", "load_alphabet"]

LOG_ACCESS = log.get_logger("cli.access")
LOG_ERROR = log.get_logger("cli.error")

P = typing.ParamSpec("P")
R = typing.TypeVar("R")


def logged_command(fn: Callable[P, R]) -> Callable[P, R]:
    """Run a command with a bound `run_id`, map application errors to exit codes."""

    @functools.wraps(fn)
    def wrapper(*args: P.args, **kwargs: P.kwargs) -> R:
        start_time = time.monotonic()
        run_id = str(uuid.uuid4())[:8]

        structlog.contextvars.clear_contextvars()
        structlog.contextvars.bind_contextvars(run_id=run_id, command=fn.__name__)

        exit_code = errors.EXIT_OK
        try:
            return fn(*args, **kwargs)
        except errors.Error as err:
            exit_code = err.exit_code
            LOG_ERROR.info("Command failed.", code=err.code)
            click.echo(f"error[{err.code}]: {err}", err=True)
            raise click.exceptions.Exit(exit_code)
        except click.exceptions.Exit as err:
            exit_code = err.exit_code
            raise
        except Exception:
            exit_code = 1
            LOG_ERROR.exception("Unexpected error.")
            raise
        finally:
            LOG_ACCESS.info(
                "Command finished.",
                exit_code=exit_code,
                duration_ms=round((time.monotonic() - start_time) * 1000),
            )

    return wrapper


@contextlib.contextmanager
def file_context(key: str) -> Iterator[None]:
    """Prefix the message of application errors raised inside with the file path."""
    try:
        yield
    except errors.Error as err:
        err.args = (f"{key}: {err}",)
        raise


def read_text(key: str) -> str:
    """Read a UTF-8 text file through the storage backend."""
    try:
        return storage.default.get(key).decode("utf-8")
    except UnicodeDecodeError as err:
        raise storage.Error(f"{key}: not a UTF-8 text file ({err.reason}).")


def write_output(text: str, out: str | None) -> None:
    """Write the primary output to `out`, or to stdout when it is not given."""
    if out:
        storage.default.create(out, text.encode("utf-8"))
    else:
        click.echo(text, nl=False)


def load_alphabet(key: str | None) -> corpus_types.AlphabetFile:
    """Load an alphabet file, the bundled default when `key` is not given."""
    key = key or str(config.data_dir / DEFAULT_ALPHABET)
    with file_context(key):
        return corpus_service.load_alphabet(key)
