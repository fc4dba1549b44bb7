"""Mission file: poses of mission-only objects grouped by descriptor entry."""

from __future__ import annotations

import yaml

from ..scene import ConcreteScene
from .fmt import plain


def mission_groups(scene: ConcreteScene) -> dict[str, list[dict]]:
    groups: dict[str, list[dict]] = {}
    for o in scene.objects:
        if not o.mission_only:
            continue
        groups.setdefault(o.spec.entry_name, []).append(
            {
                "heading": plain(o.heading + o.spec.heading_offset),
                "x": plain(o.position[0]),
                "y": plain(o.position[1]),
                "z": float(o.z),
            }
        )
    return groups


def emit_mission_yaml(scene: ConcreteScene) -> str:
    return yaml.safe_dump(mission_groups(scene), sort_keys=False, default_flow_style=False)
