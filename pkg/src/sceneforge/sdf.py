"""SDF model parsing and footprint computation.

A model's footprint is the union of per-geometry axis-aligned boxes in the
model frame. Only the elements needed for that are read, which keeps the
parser tolerant of SDFormat 1.4 through 1.7 differences.
"""

from __future__ import annotations

import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Union

import numpy as np

from .errors import GeometryError, UnsupportedGeometry
from .meshes import load_mesh_vertices

SUPPORTED_SHAPES = ("empty", "box", "cylinder", "sphere", "mesh")
UNSUPPORTED_SHAPES = ("plane", "heightmap", "polyline", "image")


@dataclass(frozen=True)
class Pose:
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0
    roll: float = 0.0
    pitch: float = 0.0
    yaw: float = 0.0

    def rotation(self) -> np.ndarray:
        # fixed-axis roll, pitch, yaw: R = Rz(yaw) @ Ry(pitch) @ Rx(roll)
        cr, sr = math.cos(self.roll), math.sin(self.roll)
        cp, sp = math.cos(self.pitch), math.sin(self.pitch)
        cy, sy = math.cos(self.yaw), math.sin(self.yaw)
        return np.array(
            [
                [cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr],
                [sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr],
                [-sp, cp * sr, cp * cr],
            ]
        )

    @property
    def translation(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    def matrix(self) -> np.ndarray:
        m = np.eye(4)
        m[:3, :3] = self.rotation()
        m[:3, 3] = self.translation
        return m

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "Pose":
        r = m[:3, :3]
        pitch = math.asin(max(-1.0, min(1.0, -r[2, 0])))
        if abs(math.cos(pitch)) > 1e-12:
            roll = math.atan2(r[2, 1], r[2, 2])
            yaw = math.atan2(r[1, 0], r[0, 0])
        else:
            roll = 0.0
            yaw = math.atan2(-r[0, 1], r[1, 1])
        x, y, z = (float(v) for v in m[:3, 3])
        return cls(x, y, z, roll, pitch, yaw)

    def compose(self, child: "Pose") -> "Pose":
        """Pose of ``child`` (expressed in this frame) in this frame's parent."""
        if self.is_identity():
            return child
        if child.is_identity():
            return self
        if self.roll == self.pitch == self.yaw == 0.0:
            # pure translation keeps the child's angles exact
            return Pose(self.x + child.x, self.y + child.y, self.z + child.z,
                        child.roll, child.pitch, child.yaw)
        return Pose.from_matrix(self.matrix() @ child.matrix())

    def is_identity(self) -> bool:
        return self == IDENTITY

    def transform_points(self, pts: np.ndarray) -> np.ndarray:
        return pts @ self.rotation().T + self.translation


IDENTITY = Pose()


@dataclass(frozen=True)
class Empty:
    pass


@dataclass(frozen=True)
class Box:
    sx: float
    sy: float
    sz: float


@dataclass(frozen=True)
class Cylinder:
    radius: float
    length: float


@dataclass(frozen=True)
class Sphere:
    radius: float


@dataclass(frozen=True)
class Mesh:
    path: Path
    scale: tuple[float, float, float] = (1.0, 1.0, 1.0)
    uri: str = ""


Shape = Union[Empty, Box, Cylinder, Sphere, Mesh]
SIMPLE_SHAPES = (Empty, Box, Cylinder, Sphere)


@dataclass(frozen=True)
class CollisionGeometry:
    shape: Shape
    pose: Pose = IDENTITY
    name: str = ""


@dataclass(frozen=True)
class Aabb3:
    min: tuple[float, float, float] = (0.0, 0.0, 0.0)
    max: tuple[float, float, float] = (0.0, 0.0, 0.0)
    empty: bool = False

    @classmethod
    def from_points(cls, pts: np.ndarray) -> "Aabb3":
        lo = pts.min(axis=0)
        hi = pts.max(axis=0)
        return cls(tuple(float(v) for v in lo), tuple(float(v) for v in hi))

    def union(self, other: "Aabb3") -> "Aabb3":
        if self.empty:
            return other
        if other.empty:
            return self
        return Aabb3(
            tuple(min(a, b) for a, b in zip(self.min, other.min)),
            tuple(max(a, b) for a, b in zip(self.max, other.max)),
        )

    @property
    def extents(self) -> tuple[float, float, float]:
        return tuple(hi - lo for lo, hi in zip(self.min, self.max))


EMPTY_BOX = Aabb3(empty=True)


@dataclass(frozen=True)
class FootprintInfo:
    length: float
    width: float
    height: float
    z_offset: float
    simple_single_geometry: bool


# -- parsing --------------------------------------------------------------


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _child(elem, name):
    for c in elem:
        if _local(c.tag) == name:
            return c
    return None


def _children(elem, name):
    return [c for c in elem if _local(c.tag) == name]


def _floats(text: str | None, count: int, what: str) -> list[float]:
    parts = (text or "").split()
    if len(parts) != count:
        raise GeometryError(f"<{what}> needs {count} numbers, got {text!r}")
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise GeometryError(f"<{what}> contains a non-number: {text!r}") from None
    if not all(math.isfinite(v) for v in values):
        raise GeometryError(f"<{what}> contains a non-finite value: {text!r}")
    return values


def _positive(elem, name: str, where: str) -> float:
    node = _child(elem, name)
    if node is None:
        raise GeometryError(f"<{where}> is missing <{name}>")
    (value,) = _floats(node.text, 1, name)
    if value <= 0:
        raise GeometryError(f"<{where}><{name}> must be > 0, got {value}")
    return value


def parse_pose(elem) -> Pose:
    node = _child(elem, "pose")
    if node is None or not (node.text or "").strip():
        return IDENTITY
    return Pose(*_floats(node.text, 6, "pose"))


def resolve_uri(uri: str, model_root: Path | None, search_paths: Iterable[Path] = ()) -> Path:
    """Map a mesh URI onto a local path.

    ``model://NAME/rest`` is looked up as a sibling of the model root, inside
    each search path, and finally inside the model root itself.
    """
    uri = uri.strip()
    if uri.startswith("model://"):
        name, _, rest = uri[len("model://"):].partition("/")
        candidates = []
        if model_root is not None:
            candidates.append(model_root.parent / name / rest)
        candidates.extend(Path(p) / name / rest for p in search_paths)
        if model_root is not None:
            candidates.append(model_root / rest)
        for c in candidates:
            if c.exists():
                return c
        return candidates[0] if candidates else Path(rest)
    if uri.startswith("file://"):
        return Path(uri[len("file://"):])
    path = Path(uri)
    if not path.is_absolute() and model_root is not None:
        path = model_root / path
    return path


def parse_geometry(geom_elem, model_root: Path | None, search_paths=(), where: str = "") -> Shape:
    shapes = [c for c in geom_elem if isinstance(c.tag, str)]
    if not shapes:
        return Empty()
    elem = shapes[0]
    kind = _local(elem.tag)
    if kind == "empty":
        return Empty()
    if kind == "box":
        size = _child(elem, "size")
        sx, sy, sz = _floats(size.text if size is not None else None, 3, "size")
        if min(sx, sy, sz) <= 0:
            raise GeometryError(f"box size must be positive in {where}")
        return Box(sx, sy, sz)
    if kind == "cylinder":
        return Cylinder(_positive(elem, "radius", "cylinder"), _positive(elem, "length", "cylinder"))
    if kind == "sphere":
        return Sphere(_positive(elem, "radius", "sphere"))
    if kind == "mesh":
        uri_node = _child(elem, "uri")
        if uri_node is None or not (uri_node.text or "").strip():
            raise GeometryError(f"<mesh> without <uri> in {where}")
        scale_node = _child(elem, "scale")
        scale = (1.0, 1.0, 1.0)
        if scale_node is not None:
            scale = tuple(_floats(scale_node.text, 3, "scale"))
        uri = uri_node.text.strip()
        return Mesh(resolve_uri(uri, model_root, search_paths), scale, uri)
    raise UnsupportedGeometry(kind, where)


def _model_element(xml):
    try:
        root = ET.fromstring(xml)
    except ET.ParseError as exc:
        raise GeometryError(f"malformed SDF: {exc}") from None
    if _local(root.tag) != "sdf":
        raise GeometryError(f"expected <sdf> root element, got <{_local(root.tag)}>")
    model = _child(root, "model")
    if model is None:
        raise GeometryError("SDF document has no <model> element")
    return root, model


def parse_model_sdf(xml, model_root=None, search_paths=()) -> list[CollisionGeometry]:
    """One CollisionGeometry per ``<collision>``, with its link pose composed in.

    The model's own ``<pose>`` is ignored: an ``<include>`` pose replaces it.
    """
    if model_root is not None:
        model_root = Path(model_root)
    _, model = _model_element(xml)
    model_name = model.get("name", "")
    if _child(model, "model") is not None:
        raise GeometryError(f"nested <model> elements are not supported (model {model_name!r})")
    if _child(model, "include") is not None:
        raise GeometryError(f"<include> inside a model is not supported (model {model_name!r})")

    geoms = []
    for link in _children(model, "link"):
        link_pose = parse_pose(link)
        link_name = link.get("name", "")
        for col in _children(link, "collision"):
            where = f"{model_name}/{link_name}/{col.get('name', '')}"
            geom = _child(col, "geometry")
            shape = Empty() if geom is None else parse_geometry(geom, model_root, search_paths, where)
            geoms.append(CollisionGeometry(shape, link_pose.compose(parse_pose(col)), where))
    return geoms


def load_model_geometries(sdf_path, search_paths=()) -> list[CollisionGeometry]:
    sdf_path = Path(sdf_path)
    try:
        data = sdf_path.read_bytes()
    except OSError as exc:
        raise GeometryError(f"cannot read {sdf_path}: {exc}") from None
    return parse_model_sdf(data, sdf_path.parent, search_paths)


# -- bounding boxes -------------------------------------------------------


def _box_corners(half: np.ndarray, center: np.ndarray | None = None) -> np.ndarray:
    signs = np.array([[sx, sy, sz] for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)], float)
    corners = signs * half
    if center is not None:
        corners = corners + center
    return corners


def geometry_bbox(g: CollisionGeometry) -> Aabb3:
    """Axis-aligned bounds of one collision geometry in the model frame."""
    shape, pose = g.shape, g.pose
    if isinstance(shape, Empty):
        return EMPTY_BOX
    if isinstance(shape, Box):
        half = np.array([shape.sx, shape.sy, shape.sz]) / 2.0
        return Aabb3.from_points(pose.transform_points(_box_corners(half)))
    if isinstance(shape, Sphere):
        c = pose.translation
        r = shape.radius
        return Aabb3(tuple(float(v) for v in c - r), tuple(float(v) for v in c + r))
    if isinstance(shape, Cylinder):
        # exact bounds of a rotated cylinder: cap discs plus axis reach
        axis = pose.rotation()[:, 2]
        half = np.abs(axis) * shape.length / 2.0 + shape.radius * np.sqrt(
            np.clip(1.0 - axis * axis, 0.0, None)
        )
        c = pose.translation
        return Aabb3(tuple(float(v) for v in c - half), tuple(float(v) for v in c + half))
    if isinstance(shape, Mesh):
        if not shape.path.exists():
            raise GeometryError(f"mesh file not found: {shape.uri or shape.path}")
        verts = load_mesh_vertices(shape.path) * np.asarray(shape.scale, float)
        return Aabb3.from_points(pose.transform_points(verts))
    raise TypeError(f"unknown shape {shape!r}")


def is_simple_single(geoms: list[CollisionGeometry]) -> bool:
    return len(geoms) == 1 and isinstance(geoms[0].shape, SIMPLE_SHAPES)


def model_footprint(geoms: list[CollisionGeometry]) -> FootprintInfo:
    box = EMPTY_BOX
    for g in geoms:
        box = box.union(geometry_bbox(g))
    simple = is_simple_single(geoms)
    if box.empty:
        return FootprintInfo(0.0, 0.0, 0.0, 0.0, simple)
    w, l, h = box.extents
    return FootprintInfo(length=l, width=w, height=h, z_offset=box.min[2], simple_single_geometry=simple)


def classify_dynamic_size(info: FootprintInfo) -> bool:
    return info.simple_single_geometry


def mesh_files(geoms: list[CollisionGeometry]) -> list[Path]:
    return sorted({g.shape.path for g in geoms if isinstance(g.shape, Mesh)})


# -- database audit -------------------------------------------------------


@dataclass
class AuditReport:
    total: int
    unsupported: dict[str, str]
    failed: dict[str, str]


def audit_models(root) -> AuditReport:
    """Count models under ``root`` whose collisions use an unsupported shape."""
    from .acquire import find_model_sdf

    root = Path(root)
    total = 0
    unsupported: dict[str, str] = {}
    failed: dict[str, str] = {}
    for model_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        sdf_path = find_model_sdf(model_dir)
        if sdf_path is None:
            continue
        total += 1
        try:
            parse_model_sdf(sdf_path.read_bytes(), model_dir, [root])
        except UnsupportedGeometry as exc:
            unsupported[model_dir.name] = exc.shape
        except GeometryError as exc:
            failed[model_dir.name] = str(exc)
    return AuditReport(total, unsupported, failed)
