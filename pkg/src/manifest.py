"""
Run manifests: what produced an artifact and how to reproduce it.
"""

import datetime

import orjson
from pydantic import BaseModel
from pydantic import Field

import src
from src import storage

__all__ = ["RunManifest", "write_sidecar"]


class RunManifest(BaseModel):
    """
    The reproduction record of a command run.

    Re-running `command` with the same inputs and seed reproduces the primary
    output byte for byte; only `timestamp` differs.
    """

    command: str = Field(..., description="The subcommand name.")
    inputs: list[str] = Field(default_factory=list, description="The input file paths.")
    alphabet_id: str
    order: int
    seed: int | None = None
    rng_id: str | None = None
    version: str = Field(default=src.__version__, description="The tool version.")
    timestamp: datetime.datetime = Field(
        default_factory=lambda: datetime.datetime.now(datetime.UTC)
    )


def write_sidecar(key: str, manifest: RunManifest, **extra: object) -> None:
    """Write `{"manifest": ..., **extra}` as JSON next to an artifact."""
    document = {"manifest": manifest.model_dump(mode="json"), **extra}
    storage.default.create(
        key, orjson.dumps(document, option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS) + b"\n"
    )
