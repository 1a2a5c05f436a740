"""Toolchain for the eQASM executable quantum instruction set."""

__version__ = "0.1.0"

from .isa import InstantiationConfig, default_config, load_config, validate_config  # noqa: E402

__all__ = ["InstantiationConfig", "default_config", "load_config", "validate_config", "__version__"]
