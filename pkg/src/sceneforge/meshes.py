"""Vertex loaders for the mesh formats Gazebo accepts (STL, OBJ, Collada).

Only vertex positions are read; faces are irrelevant to axis-aligned bounds.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np

from .errors import MeshLoadError

_STL_RECORD = np.dtype(
    [("normal", "<f4", (3,)), ("vertices", "<f4", (3, 3)), ("attr", "<u2")]
)
_ASCII_VERTEX = re.compile(
    rb"vertex\s+([-+0-9.eE]+)\s+([-+0-9.eE]+)\s+([-+0-9.eE]+)"
)


def load_mesh_vertices(path) -> np.ndarray:
    """Return an (N, 3) float array of every vertex position in the mesh file."""
    path = Path(path)
    suffix = path.suffix.lower()
    loaders = {".stl": load_stl, ".obj": load_obj, ".dae": load_collada}
    if suffix not in loaders:
        raise MeshLoadError(f"unsupported mesh format {path.suffix!r} for {path}")
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise MeshLoadError(f"cannot read mesh {path}: {exc}") from None
    return loaders[suffix](data, str(path))


def load_stl(data: bytes, name: str = "<stl>") -> np.ndarray:
    if len(data) >= 84:
        count = int.from_bytes(data[80:84], "little")
        # ASCII files may also start with "solid"; the size check disambiguates
        if len(data) == 84 + 50 * count and count > 0:
            records = np.frombuffer(data, dtype=_STL_RECORD, count=count, offset=84)
            return records["vertices"].reshape(-1, 3).astype(np.float64)
    if data.lstrip()[:5].lower() == b"solid":
        found = _ASCII_VERTEX.findall(data)
        if not found:
            raise MeshLoadError(f"ASCII STL without vertices: {name}")
        try:
            return np.array(found, dtype=np.float64)
        except ValueError:
            raise MeshLoadError(f"malformed vertex in ASCII STL: {name}") from None
    raise MeshLoadError(f"truncated or corrupt binary STL: {name}")


def load_obj(data: bytes, name: str = "<obj>") -> np.ndarray:
    verts = []
    for lineno, raw in enumerate(data.decode("utf-8", errors="replace").splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0] != "v":
            continue
        if len(parts) < 4:
            raise MeshLoadError(f"{name}:{lineno}: vertex needs three coordinates")
        try:
            verts.append([float(p) for p in parts[1:4]])
        except ValueError:
            raise MeshLoadError(f"{name}:{lineno}: malformed vertex") from None
    if not verts:
        raise MeshLoadError(f"OBJ without vertices: {name}")
    return np.array(verts, dtype=np.float64)


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _children(elem, name):
    return [c for c in elem if _local(c.tag) == name]


# maps a declared up axis onto Z-up
_UP_AXIS = {
    "Z_UP": None,
    "Y_UP": np.array([[1.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]]),
    "X_UP": np.array([[0.0, 0.0, -1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]]),
}


def load_collada(data: bytes, name: str = "<dae>") -> np.ndarray:
    """Read geometry positions, applying ``<unit meter>`` and the up-axis remap.

    Scene-graph node transforms are not applied.
    """
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise MeshLoadError(f"malformed Collada {name}: {exc}") from None

    meter = 1.0
    up = "Y_UP"
    for asset in _children(root, "asset"):
        for unit in _children(asset, "unit"):
            try:
                meter = float(unit.get("meter", "1"))
            except ValueError:
                raise MeshLoadError(f"bad <unit meter> in {name}") from None
        for axis in _children(asset, "up_axis"):
            up = (axis.text or "").strip().upper()
    if up not in _UP_AXIS:
        raise MeshLoadError(f"unknown up_axis {up!r} in {name}")

    sources = {}
    for elem in root.iter():
        if _local(elem.tag) == "source" and elem.get("id"):
            sources[elem.get("id")] = elem

    chunks = []
    for mesh in root.iter():
        if _local(mesh.tag) != "mesh":
            continue
        for vertices in _children(mesh, "vertices"):
            for inp in _children(vertices, "input"):
                if inp.get("semantic") != "POSITION":
                    continue
                src = sources.get((inp.get("source") or "").lstrip("#"))
                if src is None:
                    raise MeshLoadError(f"dangling POSITION source in {name}")
                chunks.append(_read_source(src, name))
    if not chunks:
        raise MeshLoadError(f"Collada without position arrays: {name}")

    verts = np.concatenate(chunks) * meter
    remap = _UP_AXIS[up]
    if remap is not None:
        verts = verts @ remap.T
    return verts


def _read_source(src, name: str) -> np.ndarray:
    arrays = _children(src, "float_array")
    if not arrays:
        raise MeshLoadError(f"position source without float_array in {name}")
    try:
        values = np.array((arrays[0].text or "").split(), dtype=np.float64)
    except ValueError:
        raise MeshLoadError(f"malformed float_array in {name}") from None
    stride = 3
    for tech in _children(src, "technique_common"):
        for acc in _children(tech, "accessor"):
            stride = int(acc.get("stride", "3"))
    if stride < 3 or values.size % stride:
        raise MeshLoadError(f"position array size does not match stride in {name}")
    return values.reshape(-1, stride)[:, :3]
