"""equisynth: equilibrium synthesis for concurrent games where players see
only their communication neighbours' actions and can broadcast a suspected
deviator's identity along the graph."""
from __future__ import annotations

from importlib import resources
from pathlib import Path

__version__ = "0.1.0"


def asset_path(name: str) -> Path:
    """Path of a bundled example input (game or comm graph)."""
    return Path(resources.files("equisynth.assets") / name)
