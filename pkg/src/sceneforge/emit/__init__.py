"""Artifacts produced from a concrete scene."""

from .mission import emit_mission_yaml, mission_groups
from .output import model_path_hint, write_output_tree
from .plot import emit_plot_svg
from .world import GeneratedModel, WorldDocument, emit_scaled_model, emit_world, scaled_name

__all__ = [
    "GeneratedModel",
    "WorldDocument",
    "emit_mission_yaml",
    "emit_plot_svg",
    "emit_scaled_model",
    "emit_world",
    "mission_groups",
    "model_path_hint",
    "scaled_name",
    "write_output_tree",
]
