EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_PRECONDITION = 4


class Error(Exception):
    """Base class for all application level errors.

    :cvar code: The stable machine-parseable error code printed by the CLI.
    :cvar exit_code: The process exit code the CLI terminates with.
    """

    code: str = "ERROR"
    exit_code: int = EXIT_DATA


class UsageError(Error):
    """Raised on invalid option combinations."""

    code = "USAGE"
    exit_code = EXIT_USAGE
