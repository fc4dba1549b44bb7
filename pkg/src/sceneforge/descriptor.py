"""Model-descriptor YAML: the list of models a scenario may use."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Any

import yaml

from .errors import DescriptorError


class ModelKind(str, enum.Enum):
    GAZEBO_MODEL = "GAZEBO_MODEL"
    CUSTOM_MODEL = "CUSTOM_MODEL"
    MISSION_ONLY = "MISSION_ONLY"


ENTRY_KEYS = ("name", "type", "url", "width", "length", "heading", "dynamic_size")
TOP_KEYS = ("models", "models_dir", "world")


@dataclass(frozen=True)
class ModelEntry:
    name: str
    kind: ModelKind
    url: str | None = None
    width: float | None = None
    length: float | None = None
    heading: float | None = None
    dynamic_size: bool | None = None


@dataclass(frozen=True)
class ModelDescriptor:
    models: tuple[ModelEntry, ...] = ()
    models_dir: str | None = None
    world: str | None = None

    def entry(self, name: str) -> ModelEntry:
        for e in self.models:
            if e.name == name:
                return e
        raise KeyError(name)


def _number(value: Any, path: str, *, positive: bool) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DescriptorError(f"expected a number, got {value!r}", path)
    if not math.isfinite(value):
        raise DescriptorError("must be finite", path)
    if positive and value <= 0:
        raise DescriptorError(f"must be > 0, got {value!r}", path)
    return value


def _string(value: Any, path: str) -> str:
    if not isinstance(value, str) or not value.strip():
        raise DescriptorError(f"expected a non-empty string, got {value!r}", path)
    return value


def _parse_entry(raw: Any, path: str) -> ModelEntry:
    if not isinstance(raw, dict):
        raise DescriptorError("each model entry must be a mapping", path)
    for key in raw:
        if key not in ENTRY_KEYS:
            raise DescriptorError(f"unknown key {key!r}", f"{path}.{key}")
    if "name" not in raw:
        raise DescriptorError("missing required key 'name'", path)
    name = _string(raw["name"], f"{path}.name")
    if "type" not in raw:
        raise DescriptorError("missing required key 'type'", path)
    kind_raw = raw["type"]
    try:
        kind = ModelKind(kind_raw)
    except ValueError:
        choices = ", ".join(k.value for k in ModelKind)
        raise DescriptorError(
            f"unknown model type {kind_raw!r} (expected one of {choices})", f"{path}.type"
        ) from None

    url = raw.get("url")
    if url is not None:
        url = _string(url, f"{path}.url")
        if kind is not ModelKind.CUSTOM_MODEL:
            raise DescriptorError("url is only allowed on CUSTOM_MODEL entries", f"{path}.url")

    dims = {}
    for key in ("width", "length"):
        if raw.get(key) is not None:
            dims[key] = _number(raw[key], f"{path}.{key}", positive=True)
    heading = raw.get("heading")
    if heading is not None:
        heading = _number(heading, f"{path}.heading", positive=False)
    dynamic = raw.get("dynamic_size")
    if dynamic is not None and not isinstance(dynamic, bool):
        raise DescriptorError(f"expected a boolean, got {dynamic!r}", f"{path}.dynamic_size")

    return ModelEntry(
        name=name,
        kind=kind,
        url=url,
        width=dims.get("width"),
        length=dims.get("length"),
        heading=heading,
        dynamic_size=dynamic,
    )


def parse_descriptor(text: str) -> ModelDescriptor:
    """Parse and validate a descriptor document.

    Raises DescriptorError naming the offending key path on any problem.
    """
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise DescriptorError(f"malformed YAML: {exc}") from None
    if not isinstance(doc, dict):
        raise DescriptorError("descriptor must be a mapping with a 'models' key")
    for key in doc:
        if key not in TOP_KEYS:
            raise DescriptorError(f"unknown key {key!r}", str(key))
    if "models" not in doc:
        raise DescriptorError("missing required key 'models'")
    raw_models = doc["models"]
    if raw_models is None:
        raw_models = []
    if not isinstance(raw_models, list):
        raise DescriptorError("must be a list", "models")

    entries: list[ModelEntry] = []
    seen: set[str] = set()
    for i, raw in enumerate(raw_models):
        entry = _parse_entry(raw, f"models[{i}]")
        if entry.name in seen:
            raise DescriptorError(f"duplicate model name {entry.name!r}", f"models[{i}].name")
        seen.add(entry.name)
        entries.append(entry)

    models_dir = doc.get("models_dir")
    if models_dir is not None:
        models_dir = _string(models_dir, "models_dir")
    world = doc.get("world")
    if world is not None:
        world = _string(world, "world")

    if models_dir is None:
        for i, e in enumerate(entries):
            if e.kind is ModelKind.CUSTOM_MODEL and e.url is None:
                raise DescriptorError(
                    f"CUSTOM_MODEL {e.name!r} has no url, so models_dir must be set", f"models[{i}]"
                )

    return ModelDescriptor(models=tuple(entries), models_dir=models_dir, world=world)


def serialize_descriptor(descriptor: ModelDescriptor) -> str:
    models = []
    for e in descriptor.models:
        item: dict[str, Any] = {"name": e.name, "type": e.kind.value}
        for key in ("url", "width", "length", "heading", "dynamic_size"):
            value = getattr(e, key)
            if value is not None:
                item[key] = value
        models.append(item)
    doc: dict[str, Any] = {"models": models}
    if descriptor.models_dir is not None:
        doc["models_dir"] = descriptor.models_dir
    if descriptor.world is not None:
        doc["world"] = descriptor.world
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=False)


def load_descriptor(path) -> ModelDescriptor:
    with open(path, encoding="utf-8") as fh:
        return parse_descriptor(fh.read())
