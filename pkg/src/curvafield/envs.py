"""Bundled benchmark environments (maze, bugtrap, sparse)."""

import importlib.resources
import os
import pathlib

from .errors import ParseError
from .mesh import Environment, load_environment

BUNDLED = ("maze", "bugtrap", "sparse")

DATA_ENV_VAR = "CURVAFIELD_DATA"


def data_dir() -> pathlib.Path:
    """Directory holding the bundled environment documents.

    The ``CURVAFIELD_DATA`` environment variable overrides the packaged
    data directory.
    """
    override = os.environ.get(DATA_ENV_VAR)
    if override:
        return pathlib.Path(override)
    return pathlib.Path(str(importlib.resources.files("curvafield") / "data"))


def bundled_environment(name: str) -> Environment:
    """Load one of the bundled environments by name."""
    path = data_dir() / f"{name}.json"
    if not path.is_file():
        raise ParseError(
            f"unknown bundled environment {name!r}; expected one of "
            f"{', '.join(BUNDLED)} (looked in {path.parent})"
        )
    return load_environment(str(path))


def resolve_environment(spec: str) -> Environment:
    """A bundled name or a path to an environment document."""
    if spec in BUNDLED or (data_dir() / f"{spec}.json").is_file():
        return bundled_environment(spec)
    if pathlib.Path(spec).is_file():
        return load_environment(spec)
    raise ParseError(f"no bundled environment or file named {spec!r}")
