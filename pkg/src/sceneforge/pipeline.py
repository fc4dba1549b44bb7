"""End-to-end steps: build the model registry, generate scenes, re-plot."""

from __future__ import annotations

import hashlib
import secrets
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .acquire import ModelSource, resolve_model
from .descriptor import ModelDescriptor, parse_descriptor
from .dsl import parse_scenario
from .emit import emit_mission_yaml, emit_plot_svg, emit_world, write_output_tree
from .emit.output import PLOT_FILE, RECORD_FILE
from .errors import InputFileError, OutputExistsError, RegistryError, SceneForgeError
from .registry import Registry, build_model_spec, load_registry, read_registry_header, save_registry
from .sampler import DEFAULT_MAX_ATTEMPTS, sample_scene
from .scene import ConcreteScene, dumps_record, loads_record

DEFAULT_MODEL_DB = "http://models.gazebosim.org/{name}/model.tar.gz"
CACHE_DIRNAME = ".sceneforge_cache"
REGISTRY_FILE = "registry.yaml"


@dataclass
class RunConfig:
    descriptor_path: Path
    scenario_path: Path | None = None
    out_dir: Path | None = None
    seed: int | None = None
    num_scenes: int = 1
    max_attempts: int = DEFAULT_MAX_ATTEMPTS
    offline: bool = False
    force: bool = False
    cache_dir: Path | None = None
    model_db: list = field(default_factory=list)
    jobs: int = 1

    def __post_init__(self):
        self.descriptor_path = Path(self.descriptor_path).resolve()
        if self.scenario_path is not None:
            self.scenario_path = Path(self.scenario_path).resolve()
        if self.out_dir is not None:
            self.out_dir = Path(self.out_dir).resolve()
        if self.cache_dir is None:
            self.cache_dir = self.descriptor_path.parent / CACHE_DIRNAME
        self.cache_dir = Path(self.cache_dir).resolve()
        for name in ("num_scenes", "max_attempts", "jobs"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")

    @property
    def registry_path(self) -> Path:
        return self.cache_dir / REGISTRY_FILE


@dataclass
class Inputs:
    """A parsed descriptor and the places its models are looked up."""

    descriptor: ModelDescriptor
    descriptor_hash: str
    sources: list
    search_paths: list
    world_template: str | None


def _read_text(path: Path, what: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputFileError(f"cannot read {what} {path}: {exc.strerror or exc}") from None


def _relative(base: Path, p: str | None) -> Path | None:
    if p is None:
        return None
    path = Path(p).expanduser()
    return path if path.is_absolute() else (base / path).resolve()


def prepare(config: RunConfig) -> Inputs:
    text = _read_text(config.descriptor_path, "descriptor")
    descriptor = parse_descriptor(text)
    base = config.descriptor_path.parent
    sources, search = [], []
    models_dir = _relative(base, descriptor.models_dir)
    if models_dir is not None:
        sources.append(ModelSource("local_dir", str(models_dir), config.cache_dir))
        search.append(models_dir)
    for db in config.model_db or [DEFAULT_MODEL_DB]:
        if "://" in db:
            sources.append(ModelSource("remote_database", db, config.cache_dir))
        else:
            d = _relative(Path.cwd(), db)
            sources.append(ModelSource("local_dir", str(d), config.cache_dir))
            search.append(d)
    search.append(config.cache_dir)
    world_path = _relative(base, descriptor.world)
    template = None if world_path is None else _read_text(world_path, "world template")
    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
    return Inputs(descriptor, digest, sources, search, template)


def build_models(config: RunConfig, inputs: Inputs | None = None) -> Registry:
    """Resolve every descriptor entry, derive its placement model and persist the registry."""
    inputs = inputs or prepare(config)
    specs = []
    for entry in inputs.descriptor.models:
        resolved = resolve_model(entry, inputs.sources, config.cache_dir, offline=config.offline)
        specs.append(build_model_spec(entry, resolved, inputs.search_paths))
    registry = Registry(specs)
    save_registry(registry.specs, config.registry_path, inputs.descriptor_hash)
    return registry


def load_or_build_registry(config: RunConfig, inputs: Inputs | None = None) -> Registry:
    """Reuse the persisted registry when it matches the descriptor and model sources."""
    inputs = inputs or prepare(config)
    path = config.registry_path
    if path.exists():
        try:
            header = read_registry_header(path)
            if header.get("descriptor_hash") == inputs.descriptor_hash:
                return Registry(load_registry(path))
        except (RegistryError, OSError, yaml.YAMLError):
            pass  # stale or unreadable: rebuild below
    return build_models(config, inputs)


@dataclass
class SceneResult:
    index: int
    seed: int
    out_dir: Path
    objects: int = 0
    error: SceneForgeError | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def render_scene(scene: ConcreteScene, out_dir: Path, template: str | None = None, *, force: bool = False) -> Path:
    world = emit_world(scene, template)
    return write_output_tree(
        world,
        emit_mission_yaml(scene),
        emit_plot_svg(scene),
        out_dir,
        force=force,
        record=dumps_record(scene),
    )


def new_seed() -> int:
    return secrets.randbits(63)


def generate(config: RunConfig, *, registry: Registry | None = None, inputs: Inputs | None = None) -> list[SceneResult]:
    """Sample ``num_scenes`` scenes with seeds seed, seed+1, ... and emit each one.

    Parse errors and unusable inputs raise; per-scene failures are reported
    in the returned results.
    """
    if config.scenario_path is None or config.out_dir is None:
        raise ValueError("generate needs scenario_path and out_dir")
    inputs = inputs or prepare(config)
    registry = registry or load_or_build_registry(config, inputs)
    ast = parse_scenario(_read_text(config.scenario_path, "scenario"), registry.type_names)
    if config.seed is None:
        config.seed = new_seed()

    out = config.out_dir
    if out.exists() and not out.is_dir():
        raise OutputExistsError(f"{out} exists and is not a directory")
    if out.exists() and any(out.iterdir()) and not config.force:
        raise OutputExistsError(f"{out} is not empty; use --force to overwrite")

    def run(k: int) -> SceneResult:
        seed = config.seed + k
        result = SceneResult(k, seed, out / f"scene_{k}")
        try:
            scene = sample_scene(ast, registry, seed, config.max_attempts)
            render_scene(scene, result.out_dir, inputs.world_template, force=config.force)
            result.objects = len(scene.objects)
        except SceneForgeError as exc:
            result.error = exc
        return result

    indices = range(config.num_scenes)
    if config.jobs == 1 or config.num_scenes == 1:
        return [run(k) for k in indices]
    with ThreadPoolExecutor(max_workers=config.jobs) as pool:
        return list(pool.map(run, indices))


def replot(scene_dir) -> Path:
    """Rewrite scene.svg from the persisted scene record without resampling."""
    scene_dir = Path(scene_dir)
    if not scene_dir.is_dir():
        raise InputFileError(f"{scene_dir} is not a scene directory")
    text = _read_text(scene_dir / RECORD_FILE, "scene record")
    try:
        scene = loads_record(text)
    except (ValueError, KeyError, TypeError) as exc:
        raise InputFileError(f"{scene_dir / RECORD_FILE} is not a valid scene record: {exc}") from None
    target = scene_dir / PLOT_FILE
    target.write_text(emit_plot_svg(scene), encoding="utf-8")
    return target
