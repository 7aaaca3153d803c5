"""Spontaneous emission of a sodium atom near an optical nanofibre."""

from ._core import (
    ConfigError,
    DataError,
    DomainError,
    NumericalError,
    __version__,
    channels,
    guided_modes,
    lifetime_us,
    rates,
    run_config,
)

__all__ = [
    "ConfigError",
    "DataError",
    "DomainError",
    "NumericalError",
    "__version__",
    "channels",
    "guided_modes",
    "lifetime_us",
    "rates",
    "run_config",
]
