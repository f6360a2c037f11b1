"""Whole-body teleoperation, posture optimization, and imitation learning
for a simulated floating-base biped."""

from importlib.resources import files

__version__ = "0.1.0"


def data_path(name: str):
    """Path to a packaged data file (reference model, scenarios)."""
    return files("wbteleop") / "data" / name


def reference_model_path():
    return data_path("biped20.json")
