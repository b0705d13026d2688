"""Checks on the file names handed to mbgames.

Inputs are edge lists, pattern files, move scripts, transcripts and factor
certificates; outputs are transcripts, CSV tables and JSON reports. Each
check takes a ``role`` naming which of these the path is for, so that the
error the CLI prints says what was wrong with which argument.
"""

from __future__ import annotations

import logging
import os
from typing import Union

from .exceptions import MBGamesError

__all__ = [
    "PathValidationError",
    "resolve_path",
    "validate_input_path",
    "validate_output_path",
    "MAX_PATH_LEN",
]

_LOG = logging.getLogger(__name__)

MAX_PATH_LEN = 4096

PathArg = Union[str, "os.PathLike[str]", None]


class PathValidationError(MBGamesError, ValueError):
    pass


def resolve_path(path: PathArg, role: str = "file") -> str:
    """Absolute form of ``path`` with ``~`` expanded; no filesystem access."""
    if path is None:
        raise PathValidationError(f"No {role} given.")
    if isinstance(path, os.PathLike):
        path = os.fspath(path)
    if not isinstance(path, str):
        raise PathValidationError(
            f"{role.capitalize()} path must be a string or path-like, got {type(path).__name__}."
        )
    if not path.strip():
        raise PathValidationError(f"{role.capitalize()} path is empty.")
    if "\x00" in path:
        raise PathValidationError(f"{role.capitalize()} path contains a NUL byte.")
    if len(path) > MAX_PATH_LEN:
        raise PathValidationError(
            f"{role.capitalize()} path is {len(path)} characters long; the limit is {MAX_PATH_LEN}."
        )
    return os.path.abspath(os.path.expanduser(path))


def validate_input_path(path: PathArg, role: str = "input file") -> str:
    canonical = resolve_path(path, role)
    if not os.path.exists(canonical):
        raise PathValidationError(f"{role.capitalize()} does not exist: {path!s}")
    if not os.path.isfile(canonical):
        raise PathValidationError(f"{role.capitalize()} is not a regular file: {path!s}")
    return canonical


def validate_output_path(path: PathArg, role: str = "output file") -> str:
    canonical = resolve_path(path, role)
    if os.path.isdir(canonical):
        raise PathValidationError(f"{role.capitalize()} is a directory: {path!s}")
    parent = os.path.dirname(canonical) or "."
    if not os.path.isdir(parent):
        raise PathValidationError(f"Directory for the {role} does not exist: {parent}")
    if not os.access(parent, os.W_OK):
        raise PathValidationError(f"Directory for the {role} is not writable: {parent}")
    _LOG.debug("%s resolved to %s", role, canonical)
    return canonical
