from __future__ import annotations

import shutil
from pathlib import Path

import pytest

from sceneforge.pipeline import RunConfig, build_models

FIXTURES = Path(__file__).parent / "fixtures"
FETCH = FIXTURES / "fetch"
STACKING = FIXTURES / "stacking"

_criteria: dict[int, dict] = {}


def fetch_config(tmp: Path, **kw) -> RunConfig:
    """Config for the Fetch fixture; library models come from the local stand-in database."""
    kw.setdefault("cache_dir", tmp / "cache")
    kw.setdefault("model_db", [str(FETCH / "gazebo_db")])
    kw.setdefault("offline", True)
    return RunConfig(FETCH / "descriptor.yaml", **kw)


@pytest.fixture(scope="session")
def fetch_registry(tmp_path_factory):
    return build_models(fetch_config(tmp_path_factory.mktemp("fetch_registry")))


@pytest.fixture(scope="session")
def stacking_registry(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("stacking_registry")
    config = RunConfig(STACKING / "descriptor.yaml", cache_dir=tmp / "cache", model_db=[str(FETCH / "gazebo_db")], offline=True)
    return build_models(config)


@pytest.fixture
def fetch_copy(tmp_path):
    """A writable copy of the Fetch fixture tree."""
    dest = tmp_path / "fetch"
    shutil.copytree(FETCH, dest)
    return dest


# -- acceptance reporting -------------------------------------------------


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    number, title = marker
    entry = _criteria.setdefault(number, {"title": title, "outcomes": []})
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        entry["outcomes"].append(report.outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is not None:
        report.criterion = (m.args[0], m.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        outcomes = entry["outcomes"]
        if not outcomes:
            status = "NOT RUN"
        elif any(o == "failed" for o in outcomes):
            status = "FAIL"
        elif all(o == "skipped" for o in outcomes):
            status = "SKIP"
        else:
            status = "PASS"
        terminalreporter.write_line(f"criterion {number:2d}: {status:4s}  {entry['title']}")
