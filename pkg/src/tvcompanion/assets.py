"""Access to the data files bundled with the package."""

from __future__ import annotations

from importlib import resources
from pathlib import Path


def asset_path(*parts: str) -> Path:
    """Filesystem path of a bundled asset, e.g. asset_path("vectors.txt")."""
    root = resources.files("tvcompanion").joinpath("assets")
    return Path(str(root.joinpath(*parts)))
