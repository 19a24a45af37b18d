import functools
import pathlib
import typing

import lazy_object_proxy
from pydantic import Field
from pydantic import model_validator
from pydantic_settings import BaseSettings
from pydantic_settings import EnvSettingsSource
from pydantic_settings import PydanticBaseSettingsSource
from pydantic_settings import SettingsConfigDict
from pydantic_settings import TomlConfigSettingsSource

DEFAULT_DATA_DIR = pathlib.Path(__file__).resolve().parent.parent / "data"
"""Bundled alphabets, models and corpora."""

DEFAULT_ALPHABET = "bageshree.json"
"""The alphabet file used when the CLI is not given one."""


class Config(BaseSettings):
    """The application configuration."""

    model_config = SettingsConfigDict(
        toml_file=pathlib.Path("config.toml"), env_prefix="RAGA_MARKOV_"
    )

    # Main app config.
    log_level: str = Field(default="info", description="The log level.")
    log_format: typing.Literal["console", "json"] = Field(
        default="console", description="The log renderer."
    )
    data_dir: pathlib.Path = Field(
        default=DEFAULT_DATA_DIR, description="The directory with the bundled datasets."
    )

    # Estimation and analysis limits.
    max_rows: int = Field(
        default=10**7, gt=0, description="The maximal K^k row count of a count matrix."
    )
    tolerance: float = Field(
        default=1e-6, gt=0, description="The default limiting matrix tolerance."
    )
    max_power: int = Field(
        default=10**6, gt=0, description="The power at which the limiting matrix search stops."
    )

    # Generation and output.
    wrap_width: int = Field(default=80, gt=0, description="The note string wrap width.")
    dead_end_policy: typing.Literal["error", "backoff", "restart"] = Field(
        default="backoff", description="The default dead-end policy of the generators."
    )
    midi_tonic: int = Field(default=60, description="The MIDI note number of the tonic.")

    @model_validator(mode="after")
    def check_midi_tonic(self) -> "Config":
        """Check that the tonic is a valid MIDI note number."""
        if not 0 <= self.midi_tonic <= 127:
            raise ValueError("The 'midi_tonic' must be within [0, 127].")
        return self

    @classmethod
    def settings_customise_sources(
        cls, settings_cls: type[BaseSettings], *args, **kwargs
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        return (EnvSettingsSource(settings_cls), TomlConfigSettingsSource(settings_cls))


@functools.lru_cache
def get_config() -> Config:
    """Read the configuration."""
    return Config(**{})


config: "Config" = lazy_object_proxy.Proxy(get_config)
"""Global config instance."""
