"""World SDF emission and per-scale model generation."""

from __future__ import annotations

import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import EmitError
from ..registry import ModelSpec
from ..scene import ConcreteScene, SceneObject
from .fmt import num, nums

SDF_VERSION = "1.6"
MIN_SCALE, MAX_SCALE = 0.5, 2.0

DEFAULT_WORLD = """<?xml version="1.0"?>
<sdf version="1.6">
  <world name="default">
    <light name="sun" type="directional">
      <cast_shadows>true</cast_shadows>
      <pose>0 0 10 0 0 0</pose>
      <diffuse>0.8 0.8 0.8 1</diffuse>
      <specular>0.2 0.2 0.2 1</specular>
      <direction>-0.5 0.1 -0.9</direction>
    </light>
    <model name="ground_plane">
      <static>true</static>
      <link name="link">
        <collision name="collision">
          <geometry>
            <plane>
              <normal>0 0 1</normal>
              <size>100 100</size>
            </plane>
          </geometry>
        </collision>
        <visual name="visual">
          <geometry>
            <plane>
              <normal>0 0 1</normal>
              <size>100 100</size>
            </plane>
          </geometry>
        </visual>
      </link>
    </model>
  </world>
</sdf>
"""


@dataclass
class GeneratedModel:
    """A model directory to place under ``models/``.

    ``copy_from`` is copied first, then ``files`` (relative path to text)
    are written on top.
    """

    name: str
    files: dict = field(default_factory=dict)
    copy_from: Path | None = None


@dataclass
class WorldDocument:
    xml: str
    models: list = field(default_factory=list)
    instance_names: list = field(default_factory=list)


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _sub(parent, tag: str, text: str | None = None, **attrib):
    e = ET.SubElement(parent, tag, attrib)
    if text is not None:
        e.text = text
    return e


def scaled_name(entry_name: str, scale: float) -> str:
    return f"{entry_name}_scaled_{scale:.2f}"


def model_config(name: str, sdf_file: str = "model.sdf", description: str = "") -> str:
    root = ET.Element("model")
    _sub(root, "name", name)
    _sub(root, "version", "1.0")
    _sub(root, "sdf", sdf_file, version=SDF_VERSION)
    _sub(root, "description", description or name)
    ET.indent(root)
    return '<?xml version="1.0"?>\n' + ET.tostring(root, encoding="unicode") + "\n"


# -- scaled models --------------------------------------------------------


def _scale_pose(elem, scale: float) -> None:
    for pose in [c for c in elem if _local(c.tag) == "pose"]:
        parts = (pose.text or "").split()
        if len(parts) != 6:
            continue
        try:
            values = [float(p) for p in parts]
        except ValueError:
            raise EmitError(f"malformed <pose> {pose.text!r}") from None
        pose.text = nums(*(v * scale for v in values[:3]), *values[3:])


def _scale_text(elem, scale: float) -> None:
    elem.text = nums(*(float(p) * scale for p in (elem.text or "").split()))


def _scale_geometry(geom, scale: float, old_uri_prefix: str, new_uri_prefix: str) -> None:
    for shape in geom:
        kind = _local(shape.tag)
        for child in shape:
            tag = _local(child.tag)
            if kind == "box" and tag == "size":
                _scale_text(child, scale)
            elif kind in ("cylinder", "sphere") and tag in ("radius", "length"):
                _scale_text(child, scale)
            elif kind == "mesh" and tag == "uri" and child.text:
                uri = child.text.strip()
                if uri.startswith(old_uri_prefix):
                    child.text = new_uri_prefix + uri[len(old_uri_prefix):]
        if kind == "mesh":
            scale_elem = next((c for c in shape if _local(c.tag) == "scale"), None)
            if scale_elem is None:
                scale_elem = _sub(shape, "scale", "1 1 1")
            _scale_text(scale_elem, scale)


def scale_model_sdf(xml: str | bytes, new_name: str, scale: float, old_dir_name: str = "") -> str:
    """Rewrite a model SDF so every collision and visual is ``scale`` times larger."""
    try:
        root = ET.fromstring(xml)
    except ET.ParseError as exc:
        raise EmitError(f"cannot scale malformed SDF: {exc}") from None
    model = next((c for c in root if _local(c.tag) == "model"), None)
    if model is None:
        raise EmitError("SDF document has no <model> element")
    model.set("name", new_name)
    old_prefix = f"model://{old_dir_name}/" if old_dir_name else "\0"
    for link in (c for c in model if _local(c.tag) == "link"):
        _scale_pose(link, scale)
        for part in link:
            if _local(part.tag) not in ("collision", "visual"):
                continue
            _scale_pose(part, scale)
            for geom in (c for c in part if _local(c.tag) == "geometry"):
                _scale_geometry(geom, scale, old_prefix, f"model://{new_name}/")
    ET.indent(root)
    return '<?xml version="1.0"?>\n' + ET.tostring(root, encoding="unicode") + "\n"


def emit_scaled_model(spec: ModelSpec, scale: float) -> GeneratedModel:
    """Model directory for ``spec`` uniformly rescaled by ``scale``."""
    if not spec.dynamic_size:
        raise EmitError(f"{spec.entry_name!r} is not resizable (dynamic_size is false)")
    if not (MIN_SCALE <= scale <= MAX_SCALE) or not math.isfinite(scale):
        raise EmitError(f"scale {scale:g} for {spec.entry_name!r} is outside [{MIN_SCALE}, {MAX_SCALE}]")
    if spec.sdf_path is None:
        raise EmitError(f"{spec.entry_name!r} has no SDF file to scale")
    name = scaled_name(spec.entry_name, scale)
    try:
        xml = Path(spec.sdf_path).read_bytes()
    except OSError as exc:
        raise EmitError(f"cannot read {spec.sdf_path}: {exc}") from None
    root_dir = Path(spec.root_dir) if spec.root_dir else Path(spec.sdf_path).parent
    sdf_text = scale_model_sdf(xml, name, scale, root_dir.name)
    return GeneratedModel(
        name=name,
        files={
            "model.sdf": sdf_text,
            "model.config": model_config(name, description=f"{spec.entry_name} scaled by {num(scale)}"),
        },
        copy_from=root_dir,
    )


# -- world ----------------------------------------------------------------


def _wall_model(o: SceneObject, name: str) -> ET.Element:
    m = ET.Element("model", name=name)
    _sub(m, "static", "true")
    _sub(m, "pose", nums(o.position[0], o.position[1], o.z, 0, 0, o.heading))
    link = _sub(m, "link", name="link")
    _sub(link, "pose", nums(0, 0, o.height / 2, 0, 0, 0))
    for part in ("collision", "visual"):
        p = _sub(link, part, name=part)
        box = _sub(_sub(p, "geometry"), "box")
        _sub(box, "size", nums(o.width, o.length, o.height))
    return m


def _find_world(root: ET.Element) -> ET.Element:
    if _local(root.tag) != "sdf":
        raise EmitError(f"world template root must be <sdf>, got <{_local(root.tag)}>")
    world = next((c for c in root if _local(c.tag) == "world"), None)
    if world is None:
        raise EmitError("world template has no <world> element")
    return world


def emit_world(scene: ConcreteScene, template: str | None = None) -> WorldDocument:
    """Build the world SDF for every non-mission object in ``scene``."""
    try:
        root = ET.fromstring(template if template is not None else DEFAULT_WORLD)
    except ET.ParseError as exc:
        raise EmitError(f"world template is not well-formed XML: {exc}") from None
    world = _find_world(root)
    taken = {c.get("name") for c in world if _local(c.tag) in ("model", "include")}

    counters: dict[str, int] = {}
    models: dict[str, GeneratedModel] = {}
    names = []
    for o in scene.objects:
        if o.mission_only:
            continue
        entry = o.spec.entry_name
        k = counters.get(entry, 0)
        counters[entry] = k + 1
        name = f"{entry}_{k}"
        if name in taken:
            raise EmitError(f"instance name {name!r} is already used in the world template")
        taken.add(name)
        names.append(name)

        if o.is_wall or o.spec.builtin:
            world.append(_wall_model(o, name))
            continue

        if o.scale != 1:
            model_name = scaled_name(entry, o.scale)
            if model_name not in models:
                models[model_name] = emit_scaled_model(o.spec, o.scale)
        else:
            model_name = entry
            if model_name not in models:
                if o.spec.root_dir is None:
                    raise EmitError(f"model {entry!r} has no files to copy")
                models[model_name] = GeneratedModel(model_name, copy_from=Path(o.spec.root_dir))

        z = o.z - o.spec.z_offset * o.scale
        inc = _sub(world, "include")
        _sub(inc, "uri", f"model://{model_name}")
        _sub(inc, "name", name)
        _sub(inc, "pose", nums(o.position[0], o.position[1], z, 0, 0, o.heading + o.spec.heading_offset))

    ET.indent(root)
    xml = '<?xml version="1.0"?>\n' + ET.tostring(root, encoding="unicode") + "\n"
    return WorldDocument(xml, sorted(models.values(), key=lambda m: m.name), names)
