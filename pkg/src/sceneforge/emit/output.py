"""On-disk layout of one generated scene."""

from __future__ import annotations

import os
import shutil
from pathlib import Path

from ..errors import OutputExistsError
from .world import WorldDocument

WORLD_FILE = "scene.world"
MISSION_FILE = "mission.yaml"
PLOT_FILE = "scene.svg"
RECORD_FILE = "scene.json"
MODELS_DIR = "models"
OUTPUTS = (WORLD_FILE, MISSION_FILE, PLOT_FILE, RECORD_FILE, MODELS_DIR)


def _ignore_hidden(_dir, names):
    return [n for n in names if n.startswith(".")]


def _write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
    os.replace(tmp, path)


def write_output_tree(
    world: WorldDocument,
    mission: str,
    svg: str,
    out_dir,
    *,
    force: bool = False,
    record: str | None = None,
) -> Path:
    """Write scene.world, models/, mission.yaml and scene.svg under ``out_dir``.

    A non-empty ``out_dir`` is refused unless ``force`` is set; with
    ``force`` only files this function produces are replaced.
    """
    out = Path(out_dir)
    if out.exists() and not out.is_dir():
        raise OutputExistsError(f"{out} exists and is not a directory")
    if out.exists() and any(out.iterdir()):
        if not force:
            raise OutputExistsError(f"{out} is not empty; use --force to overwrite")
        for name in OUTPUTS:
            p = out / name
            if p.is_dir():
                shutil.rmtree(p)
            elif p.exists():
                p.unlink()
    models = out / MODELS_DIR
    models.mkdir(parents=True, exist_ok=True)

    for m in world.models:
        dest = models / m.name
        if m.copy_from is not None:
            shutil.copytree(m.copy_from, dest, ignore=_ignore_hidden, dirs_exist_ok=True)
        else:
            dest.mkdir(parents=True, exist_ok=True)
        for rel, text in sorted(m.files.items()):
            target = dest / rel
            target.parent.mkdir(parents=True, exist_ok=True)
            _write(target, text)

    _write(out / WORLD_FILE, world.xml)
    _write(out / MISSION_FILE, mission)
    _write(out / PLOT_FILE, svg)
    if record is not None:
        _write(out / RECORD_FILE, record)
    return out


def model_path_hint(out_dir) -> str:
    models = Path(out_dir).resolve() / MODELS_DIR
    return f"export GAZEBO_MODEL_PATH={models}:$GAZEBO_MODEL_PATH"
