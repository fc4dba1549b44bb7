"""Concrete scenes and their JSON record."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .descriptor import ModelKind
from .geometry import OrientedRect
from .registry import ModelSpec

WALL_GROUP = "walls"
RECORD_VERSION = 1


@dataclass
class SceneObject:
    instance_name: str
    spec: ModelSpec
    position: tuple
    z: float = 0.0
    heading: float = 0
    scale: float = 1
    allow_collisions: bool = False
    mission_only: bool = False
    custom_dims: tuple | None = None
    is_ego: bool = False
    group: str | None = None

    @property
    def width(self) -> float:
        return self.custom_dims[0] if self.custom_dims else self.spec.width * self.scale

    @property
    def length(self) -> float:
        return self.custom_dims[1] if self.custom_dims else self.spec.length * self.scale

    @property
    def height(self) -> float:
        return self.custom_dims[2] if self.custom_dims else self.spec.height * self.scale

    @property
    def is_wall(self) -> bool:
        return self.group == WALL_GROUP


@dataclass
class ConcreteScene:
    objects: list = field(default_factory=list)
    workspace: OrientedRect = OrientedRect(0.0, 0.0, 0.0, 5.0, 5.0)
    seed: int = 0
    attempts: int = 1

    @property
    def ego(self) -> SceneObject | None:
        return next((o for o in self.objects if o.is_ego), None)


def rect_of(o: SceneObject) -> OrientedRect:
    return OrientedRect(o.position[0], o.position[1], o.heading, o.width / 2, o.length / 2)


def containment_rect(o: SceneObject) -> OrientedRect:
    """Rectangle that must lie inside the workspace.

    Walls are checked along their centre line, so a room whose walls sit on
    the workspace boundary is admissible.
    """
    r = rect_of(o)
    if not o.is_wall:
        return r
    if r.half_width <= r.half_length:
        return OrientedRect(r.cx, r.cy, r.heading, 0.0, r.half_length)
    return OrientedRect(r.cx, r.cy, r.heading, r.half_width, 0.0)


# -- record ---------------------------------------------------------------

_SPEC_FIELDS = ("width", "length", "height", "z_offset", "heading_offset", "dynamic_size")


def scene_to_record(scene: ConcreteScene) -> dict:
    ws = scene.workspace
    objects = []
    for o in scene.objects:
        s = o.spec
        objects.append(
            {
                "instance_name": o.instance_name,
                "type": s.name,
                "entry_name": s.entry_name,
                "kind": s.kind.value,
                "position": list(o.position),
                "z": o.z,
                "heading": o.heading,
                "scale": o.scale,
                "allow_collisions": o.allow_collisions,
                "mission_only": o.mission_only,
                "is_ego": o.is_ego,
                "group": o.group,
                "custom_dims": list(o.custom_dims) if o.custom_dims else None,
                "spec": {k: getattr(s, k) for k in _SPEC_FIELDS},
            }
        )
    return {
        "version": RECORD_VERSION,
        "seed": scene.seed,
        "attempts": scene.attempts,
        "workspace": {
            "center": [ws.cx, ws.cy],
            "heading": ws.heading,
            "width": ws.half_width * 2,
            "length": ws.half_length * 2,
        },
        "objects": objects,
    }


def scene_from_record(record: dict) -> ConcreteScene:
    ws = record["workspace"]
    workspace = OrientedRect(ws["center"][0], ws["center"][1], ws["heading"], ws["width"] / 2, ws["length"] / 2)
    objects = []
    for d in record["objects"]:
        spec = ModelSpec(
            name=d["type"],
            entry_name=d["entry_name"],
            kind=ModelKind(d["kind"]),
            builtin=d.get("group") == WALL_GROUP,
            **d["spec"],
        )
        objects.append(
            SceneObject(
                instance_name=d["instance_name"],
                spec=spec,
                position=tuple(d["position"]),
                z=d["z"],
                heading=d["heading"],
                scale=d["scale"],
                allow_collisions=d["allow_collisions"],
                mission_only=d["mission_only"],
                custom_dims=tuple(d["custom_dims"]) if d["custom_dims"] else None,
                is_ego=d["is_ego"],
                group=d["group"],
            )
        )
    return ConcreteScene(objects, workspace, record["seed"], record.get("attempts", 1))


def dumps_record(scene: ConcreteScene) -> str:
    return json.dumps(scene_to_record(scene), indent=2) + "\n"


def loads_record(text: str) -> ConcreteScene:
    return scene_from_record(json.loads(text))
