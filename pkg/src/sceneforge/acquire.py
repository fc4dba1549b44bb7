"""Locate model directories: local model trees first, then the cache, then remote archives."""

from __future__ import annotations

import hashlib
import io
import logging
import os
import shutil
import tarfile
import tempfile
import urllib.error
import urllib.parse
import urllib.request
import xml.etree.ElementTree as ET
import zipfile
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .descriptor import ModelEntry, ModelKind
from .errors import ArchiveError, DownloadError, ModelNotFoundError, OfflineError

log = logging.getLogger(__name__)

SOURCE_KINDS = ("local_dir", "remote_database", "remote_url")
NETWORK_SCHEMES = ("http", "https", "ftp")
MARKER = ".source_url"


@dataclass(frozen=True)
class ModelSource:
    """Where models can come from.

    ``local_dir`` bases are directories holding ``<name>/model.sdf`` trees.
    ``remote_database`` and ``remote_url`` bases are archive URLs; ``{name}``
    in the base is replaced by the model name, otherwise ``/<name>.tar.gz``
    is appended.
    """

    kind: str
    base: str
    cache_dir: Path | None = None

    def __post_init__(self):
        if self.kind not in SOURCE_KINDS:
            raise ValueError(f"unknown model source kind {self.kind!r}")

    def archive_url(self, name: str) -> str:
        if "{name}" in self.base:
            return self.base.replace("{name}", urllib.parse.quote(name))
        return f"{self.base.rstrip('/')}/{urllib.parse.quote(name)}.tar.gz"


@dataclass(frozen=True)
class ResolvedModel:
    entry: ModelEntry
    root_dir: Path | None = None
    sdf_path: Path | None = None


def is_network_url(url: str) -> bool:
    return urllib.parse.urlparse(url).scheme.lower() in NETWORK_SCHEMES


def find_model_sdf(root: Path) -> Path | None:
    """The SDF file declared by model.config (highest version wins), else model.sdf."""
    root = Path(root)
    config = root / "model.config"
    if config.is_file():
        try:
            tree = ET.parse(config)
        except ET.ParseError:
            tree = None
        if tree is not None:
            declared = []
            for elem in tree.getroot().iter():
                if elem.tag.rsplit("}", 1)[-1] == "sdf" and (elem.text or "").strip():
                    declared.append((_version_key(elem.get("version", "")), elem.text.strip()))
            for _, name in sorted(declared, key=lambda d: d[0], reverse=True):
                candidate = root / name
                if candidate.is_file():
                    return candidate
    if (root / "model.sdf").is_file():
        return root / "model.sdf"
    sdfs = sorted(root.glob("*.sdf"))
    return sdfs[0] if sdfs else None


def _version_key(text: str) -> tuple[int, ...]:
    parts = []
    for p in text.split("."):
        try:
            parts.append(int(p))
        except ValueError:
            parts.append(-1)
    return tuple(parts)


def _download(url: str) -> bytes:
    try:
        with urllib.request.urlopen(url, timeout=60) as resp:
            return resp.read()
    except (urllib.error.URLError, OSError, ValueError) as exc:
        raise DownloadError(f"cannot download {url}: {exc}") from None


def _extract(data: bytes, dest: Path, url: str) -> None:
    if data[:4] == b"PK\x03\x04":
        try:
            with zipfile.ZipFile(io.BytesIO(data)) as zf:
                for info in zf.infolist():
                    target = (dest / info.filename).resolve()
                    if not str(target).startswith(str(dest.resolve())):
                        raise ArchiveError(f"unsafe path {info.filename!r} in {url}")
                zf.extractall(dest)
        except zipfile.BadZipFile as exc:
            raise ArchiveError(f"corrupt zip archive {url}: {exc}") from None
        return
    if data[:2] == b"\x1f\x8b":
        try:
            with tarfile.open(fileobj=io.BytesIO(data), mode="r:gz") as tf:
                if hasattr(tarfile, "data_filter"):
                    tf.extractall(dest, filter="data")
                else:
                    for member in tf.getmembers():
                        target = (dest / member.name).resolve()
                        if not str(target).startswith(str(dest.resolve())):
                            raise ArchiveError(f"unsafe path {member.name!r} in {url}")
                    tf.extractall(dest)
        except (tarfile.TarError, EOFError, OSError) as exc:
            raise ArchiveError(f"corrupt tar.gz archive {url}: {exc}") from None
        return
    raise ArchiveError(f"unsupported archive format for {url} (expected zip or tar.gz)")


def _model_root(unpacked: Path) -> Path:
    # archives often wrap the model in a single top-level directory
    root = unpacked
    while True:
        if find_model_sdf(root) is not None:
            return root
        entries = [p for p in root.iterdir() if not p.name.startswith(".")]
        if len(entries) == 1 and entries[0].is_dir():
            root = entries[0]
            continue
        return root


def cached_model(cache_dir: Path, key: str, url: str | None = None) -> Path | None:
    target = Path(cache_dir) / key
    marker = target / MARKER
    if not target.is_dir() or not marker.is_file():
        return None
    if url is not None and marker.read_text(encoding="utf-8").strip() != url:
        return None
    return target


def fetch_archive(url: str, cache_dir, name: str | None = None, *, offline: bool = False) -> Path:
    """Download and unpack a model archive into ``<cache_dir>/<name>/``.

    A second call with the same url is served from the cache. Unpacking
    happens in a temporary directory that is renamed into place, so
    concurrent callers never observe a partial tree.
    """
    cache_dir = Path(cache_dir)
    key = name or hashlib.sha256(url.encode()).hexdigest()[:16]
    hit = cached_model(cache_dir, key, url)
    if hit is not None:
        return hit
    if offline and is_network_url(url):
        raise OfflineError(f"offline mode: refusing to download {url}")

    cache_dir.mkdir(parents=True, exist_ok=True)
    data = _download(url)
    log.info("downloaded %s (%d bytes)", url, len(data))
    tmp = Path(tempfile.mkdtemp(prefix=f".{key}-", dir=cache_dir))
    try:
        _extract(data, tmp, url)
        root = _model_root(tmp)
        if find_model_sdf(root) is None:
            raise ArchiveError(f"archive {url} contains no SDF model file")
        (root / MARKER).write_text(url + "\n", encoding="utf-8")
        target = cache_dir / key
        if target.exists():
            stale = Path(tempfile.mkdtemp(prefix=f".{key}-stale-", dir=cache_dir))
            try:
                os.rename(target, stale / key)
            except OSError:
                pass
            shutil.rmtree(stale, ignore_errors=True)
        try:
            os.rename(root, target)
        except OSError:
            # another resolver won the race
            hit = cached_model(cache_dir, key, url)
            if hit is None:
                raise
        return target
    finally:
        shutil.rmtree(tmp, ignore_errors=True)


def _resolved(entry: ModelEntry, root: Path) -> ResolvedModel:
    sdf = find_model_sdf(root)
    if sdf is None:
        raise ArchiveError(f"model {entry.name!r} at {root} has no SDF file")
    return ResolvedModel(entry, root, sdf)


def resolve_model(
    entry: ModelEntry,
    sources: Sequence[ModelSource],
    cache_dir=None,
    *,
    offline: bool = False,
) -> ResolvedModel:
    """Find the files of one descriptor entry.

    Lookup order is local directories, then the cache, then remote sources.
    """
    if entry.kind is ModelKind.MISSION_ONLY:
        return ResolvedModel(entry)

    if cache_dir is None:
        cache_dir = next((s.cache_dir for s in sources if s.cache_dir is not None), None)

    if entry.kind is ModelKind.CUSTOM_MODEL and entry.url is not None:
        if cache_dir is None:
            raise ModelNotFoundError(f"model {entry.name!r} has a url but no cache directory is configured")
        return _resolved(entry, fetch_archive(entry.url, cache_dir, entry.name, offline=offline))

    for src in sources:
        if src.kind == "local_dir":
            candidate = Path(src.base) / entry.name
            if candidate.is_dir() and find_model_sdf(candidate) is not None:
                return _resolved(entry, candidate)

    if entry.kind is ModelKind.CUSTOM_MODEL:
        raise ModelNotFoundError(f"custom model {entry.name!r} not found in any models directory")

    if cache_dir is not None:
        hit = cached_model(cache_dir, entry.name)
        if hit is not None:
            return _resolved(entry, hit)

    errors = []
    for src in sources:
        if src.kind == "local_dir":
            continue
        url = src.archive_url(entry.name)
        if cache_dir is None:
            errors.append(f"{url}: no cache directory configured")
            continue
        try:
            return _resolved(entry, fetch_archive(url, cache_dir, entry.name, offline=offline))
        except OfflineError:
            raise
        except DownloadError as exc:
            errors.append(str(exc))
    detail = "; ".join(errors) if errors else "no source provides it"
    raise ModelNotFoundError(f"model {entry.name!r} not found: {detail}")
