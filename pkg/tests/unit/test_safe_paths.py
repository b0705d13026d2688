from __future__ import annotations

import os

import pytest

from mbgames.exceptions import MBGamesError
from mbgames.safe_paths import (
    MAX_PATH_LEN,
    PathValidationError,
    resolve_path,
    validate_input_path,
    validate_output_path,
)
from mbgames.utils import read_edge_list, read_text


def test_missing_path_names_its_role():
    with pytest.raises(PathValidationError, match="No transcript given"):
        resolve_path(None, "transcript")
    with pytest.raises(PathValidationError, match="Graph file path is empty"):
        resolve_path("   ", "graph file")


def test_rejects_nul_byte(tmp_path):
    with pytest.raises(PathValidationError, match="NUL byte"):
        resolve_path(f"{tmp_path}/game\x00.json")


def test_rejects_oversize_path():
    with pytest.raises(PathValidationError, match=str(MAX_PATH_LEN)):
        resolve_path("a" * (MAX_PATH_LEN + 1))


def test_rejects_non_string():
    with pytest.raises(PathValidationError, match="string or path-like, got int"):
        resolve_path(42)


def test_resolves_relative_pathlike_and_home(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("HOME", str(tmp_path))
    assert resolve_path("graph.txt") == os.path.join(str(tmp_path), "graph.txt")
    assert resolve_path(tmp_path / "g.txt") == str(tmp_path / "g.txt")
    assert resolve_path("~/moves.json") == os.path.join(str(tmp_path), "moves.json")


def test_input_checks(tmp_path):
    existing = tmp_path / "g.txt"
    existing.write_text("2 1\n0 1\n", encoding="utf-8")
    assert validate_input_path(existing, "graph file") == str(existing)
    with pytest.raises(PathValidationError, match="Pattern file does not exist"):
        validate_input_path(str(tmp_path / "missing.txt"), "pattern file")
    with pytest.raises(PathValidationError, match="Certificate is not a regular file"):
        validate_input_path(str(tmp_path), "certificate")


def test_readers_report_what_they_were_reading(tmp_path):
    with pytest.raises(PathValidationError, match="Graph file does not exist"):
        read_edge_list(str(tmp_path / "none.txt"))
    with pytest.raises(PathValidationError, match="Move script does not exist"):
        read_text(str(tmp_path / "none.json"), "move script")


def test_output_checks(tmp_path):
    assert validate_output_path(str(tmp_path / "t.json")).endswith("t.json")
    with pytest.raises(PathValidationError, match="Transcript is a directory"):
        validate_output_path(str(tmp_path), "transcript")
    with pytest.raises(PathValidationError, match="Directory for the sweep table does not exist"):
        validate_output_path(str(tmp_path / "nowhere" / "t.csv"), "sweep table")


def test_path_errors_are_package_errors():
    assert issubclass(PathValidationError, MBGamesError)
    assert issubclass(PathValidationError, ValueError)
