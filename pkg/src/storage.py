"""
The storage backend for corpora, alphabets, models and generated artifacts.
"""

import pathlib
from typing import Protocol

import lazy_object_proxy

from src import errors
from src import log

__all__ = ["default", "FileStorageBackend", "Error", "NotFound"]

LOG = log.get_logger(__name__)


class Error(errors.Error):
    """The storage backend error."""

    code = "IO_FAILURE"


class NotFound(Error):
    """Raised when requested object key not found."""


class StorageBackend(Protocol):
    """Protocol for storage backends."""

    def get(self, key: str) -> bytes:
        """Fetch data for the given `key`."""
        ...

    def create(self, key: str, data: bytes) -> None:
        """Save `data` to the given `key`."""
        ...


class FileStorageBackend:
    """
    Storage Backend implementation using the local filesystem.

    Keys are file paths, relative keys resolve against `root`.
    """

    def __init__(self, root: pathlib.Path | None = None) -> None:
        self._root = root or pathlib.Path.cwd()
        super().__init__()

    def _path(self, key: str) -> pathlib.Path:
        return self._root / pathlib.Path(key).expanduser()

    def get(self, key: str) -> bytes:
        """Read a file."""
        try:
            return self._path(key).read_bytes()
        except FileNotFoundError:
            raise NotFound(f"The {key} file not found.")
        except OSError as err:
            raise Error(f"Cannot read {key}: {err.strerror}.")

    def create(self, key: str, data: bytes) -> None:
        """Write a file, creating the missing parent directories."""
        path = self._path(key)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_bytes(data)
        except OSError as err:
            raise Error(f"Cannot write {key}: {err.strerror}.")
        LOG.debug("Wrote file.", key=key, size=len(data))


def create_default_backend() -> StorageBackend:
    """Create the default storage backend."""
    return FileStorageBackend()


default: "StorageBackend" = lazy_object_proxy.Proxy(create_default_backend)
"""Default storage backend instance (lazy object)."""
