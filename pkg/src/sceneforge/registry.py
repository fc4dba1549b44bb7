"""Placement models derived from descriptor entries, and their on-disk registry."""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Iterable, Sequence

import yaml

from . import sdf
from .acquire import ResolvedModel
from .descriptor import ModelEntry, ModelKind
from .errors import GeometryError, RegistryError, StaleRegistryError, UnsupportedGeometry

REGISTRY_VERSION = 1
MISSION_DEFAULT_SIZE = 0.1
WALL_TYPE = "Wall"


@dataclass(frozen=True)
class ModelSpec:
    name: str
    entry_name: str
    kind: ModelKind
    width: float
    length: float
    height: float = 0.0
    z_offset: float = 0.0
    heading_offset: float = 0.0
    dynamic_size: bool = False
    root_dir: str | None = None
    sdf_path: str | None = None
    source_hash: str | None = None
    builtin: bool = False

    @property
    def collidable(self) -> bool:
        return self.width > 0 and self.length > 0

    @property
    def mission_only(self) -> bool:
        return self.kind is ModelKind.MISSION_ONLY


WALL_SPEC = ModelSpec(
    name=WALL_TYPE,
    entry_name="wall",
    kind=ModelKind.CUSTOM_MODEL,
    width=1.0,
    length=1.0,
    height=1.0,
    dynamic_size=True,
    builtin=True,
)


def type_name(entry_name: str) -> str:
    """cafe_table -> CafeTable; already-capitalized names keep their inner case."""
    parts = [p for p in re.split(r"[_\-\s]+", entry_name) if p]
    name = "".join(p[:1].upper() + p[1:] for p in parts)
    if not name.isidentifier():
        raise RegistryError(f"model name {entry_name!r} does not map to a valid type name ({name!r})")
    return name


def hash_sources(paths: Iterable[Path]) -> str:
    digest = hashlib.sha256()
    for p in sorted(Path(p) for p in paths):
        digest.update(p.name.encode())
        digest.update(b"\0")
        digest.update(p.read_bytes())
        digest.update(b"\0")
    return digest.hexdigest()


def _rotated_footprint(width: float, length: float, angle: float) -> tuple[float, float]:
    c, s = abs(math.cos(angle)), abs(math.sin(angle))
    return width * c + length * s, width * s + length * c


def build_model_spec(entry: ModelEntry, resolved: ResolvedModel | None = None, search_paths=()) -> ModelSpec:
    """Derive the placement model of one entry.

    Descriptor width/length/heading/dynamic_size override computed values.
    When the heading offset is set and the footprint is computed, the
    footprint is the bound of the model rotated by that offset, so the
    rectangle used for placement covers the model as it will be emitted.
    """
    heading = entry.heading if entry.heading is not None else 0.0

    if entry.kind is ModelKind.MISSION_ONLY:
        if (entry.width is None) != (entry.length is None):
            raise RegistryError(f"MISSION_ONLY model {entry.name!r} needs both width and length, or neither")
        return ModelSpec(
            name=type_name(entry.name),
            entry_name=entry.name,
            kind=entry.kind,
            width=entry.width if entry.width is not None else MISSION_DEFAULT_SIZE,
            length=entry.length if entry.length is not None else MISSION_DEFAULT_SIZE,
            heading_offset=heading,
            dynamic_size=bool(entry.dynamic_size),
        )

    if resolved is None or resolved.sdf_path is None:
        raise RegistryError(f"model {entry.name!r} was not resolved to an SDF file")
    paths = list(search_paths)
    if resolved.root_dir is not None:
        paths.append(Path(resolved.root_dir).parent)
    try:
        geoms = sdf.load_model_geometries(resolved.sdf_path, paths)
        info = sdf.model_footprint(geoms)
    except GeometryError as exc:
        raise _named(exc, entry.name) from None

    width, length = info.width, info.length
    if heading:
        width, length = _rotated_footprint(width, length, heading)
    if entry.width is not None:
        width = entry.width
    if entry.length is not None:
        length = entry.length
    dynamic = sdf.classify_dynamic_size(info) if entry.dynamic_size is None else entry.dynamic_size
    source_hash = hash_sources([Path(resolved.sdf_path), *sdf.mesh_files(geoms)])
    return ModelSpec(
        name=type_name(entry.name),
        entry_name=entry.name,
        kind=entry.kind,
        width=width,
        length=length,
        height=info.height,
        z_offset=info.z_offset,
        heading_offset=heading,
        dynamic_size=dynamic,
        root_dir=str(Path(resolved.root_dir).resolve()) if resolved.root_dir else None,
        sdf_path=str(Path(resolved.sdf_path).resolve()),
        source_hash=source_hash,
    )


def _named(exc: GeometryError, model: str) -> GeometryError:
    # same exception type, message naming the failing model
    if isinstance(exc, UnsupportedGeometry):
        return UnsupportedGeometry(exc.shape, f"model {model!r}")
    return type(exc)(f"model {model!r}: {exc}")


class Registry:
    """Immutable lookup of placement models by DSL type name."""

    def __init__(self, specs: Sequence[ModelSpec]):
        specs = list(specs)
        if not any(s.name == WALL_TYPE for s in specs):
            specs.append(WALL_SPEC)
        by_name: dict[str, ModelSpec] = {}
        by_entry: dict[str, ModelSpec] = {}
        for s in specs:
            if s.name in by_name:
                raise RegistryError(
                    f"type name {s.name!r} is produced by both {by_name[s.name].entry_name!r} and {s.entry_name!r}"
                )
            by_name[s.name] = s
            by_entry[s.entry_name] = s
        folded: dict[str, list[str]] = {}
        for n in by_name:
            folded.setdefault(n.lower(), []).append(n)
        self.specs: tuple[ModelSpec, ...] = tuple(specs)
        self._by_name = by_name
        self._by_entry = by_entry
        self._folded = folded

    def __iter__(self):
        return iter(self.specs)

    def __len__(self):
        return len(self.specs)

    def __contains__(self, name: str) -> bool:
        return self.canonical(name) is not None

    @property
    def type_names(self) -> tuple[str, ...]:
        return tuple(self._by_name)

    def canonical(self, name: str) -> str | None:
        """Exact type name, else a unique case-insensitive match."""
        if name in self._by_name:
            return name
        matches = self._folded.get(name.lower(), [])
        return matches[0] if len(matches) == 1 else None

    def lookup(self, name: str) -> ModelSpec:
        canon = self.canonical(name)
        if canon is None:
            raise KeyError(name)
        return self._by_name[canon]

    def by_entry(self, entry_name: str) -> ModelSpec:
        return self._by_entry[entry_name]

    def __eq__(self, other):
        return isinstance(other, Registry) and self.specs == other.specs


def build_registry(entries: Iterable[ModelEntry], resolved: dict[str, ResolvedModel], search_paths=()) -> Registry:
    specs = [build_model_spec(e, resolved.get(e.name), search_paths) for e in entries]
    return Registry(specs)


# -- persistence ----------------------------------------------------------


def _spec_to_dict(spec: ModelSpec) -> dict:
    d = asdict(spec)
    d["kind"] = spec.kind.value
    return d


def _spec_from_dict(d: dict, where: str) -> ModelSpec:
    names = {f.name for f in fields(ModelSpec)}
    unknown = set(d) - names
    if unknown:
        raise RegistryError(f"{where}: unknown fields {sorted(unknown)}")
    try:
        d = dict(d)
        d["kind"] = ModelKind(d["kind"])
        return ModelSpec(**d)
    except (KeyError, TypeError, ValueError) as exc:
        raise RegistryError(f"{where}: invalid entry ({exc})") from None


def save_registry(specs: Iterable[ModelSpec], path, descriptor_hash: str | None = None) -> Path:
    path = Path(path)
    doc = {
        "version": REGISTRY_VERSION,
        "descriptor_hash": descriptor_hash,
        "models": [_spec_to_dict(s) for s in specs],
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(yaml.safe_dump(doc, sort_keys=False), encoding="utf-8")
    tmp.replace(path)
    return path


def read_registry_header(path) -> dict:
    doc = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    return doc if isinstance(doc, dict) else {}


def load_registry(path, *, verify: bool = True) -> list[ModelSpec]:
    """Load persisted specs; with ``verify``, stale source hashes raise StaleRegistryError."""
    path = Path(path)
    try:
        doc = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise RegistryError(f"{path}: malformed registry: {exc}") from None
    if doc is None:
        return []
    if not isinstance(doc, dict):
        raise RegistryError(f"{path}: registry must be a mapping")
    if doc.get("version") != REGISTRY_VERSION:
        raise RegistryError(
            f"{path}: registry version {doc.get('version')!r} is not supported (expected {REGISTRY_VERSION}); regenerate it"
        )
    specs = [_spec_from_dict(d, f"{path}: models[{i}]") for i, d in enumerate(doc.get("models") or [])]
    if verify:
        for spec in specs:
            _verify(spec, path)
    return specs


def _verify(spec: ModelSpec, path: Path) -> None:
    if spec.sdf_path is None:
        return
    hint = "re-run the models step to regenerate the registry"
    sdf_path = Path(spec.sdf_path)
    try:
        geoms = sdf.load_model_geometries(
            sdf_path, [Path(spec.root_dir).parent] if spec.root_dir else []
        )
        current = hash_sources([sdf_path, *sdf.mesh_files(geoms)])
    except (OSError, GeometryError) as exc:
        raise StaleRegistryError(f"{path}: sources of {spec.entry_name!r} are unreadable ({exc}); {hint}") from None
    if current != spec.source_hash:
        raise StaleRegistryError(f"{path}: sources of {spec.entry_name!r} changed since the registry was built; {hint}")
