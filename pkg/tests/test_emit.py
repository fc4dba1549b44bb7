import math
import re
import xml.etree.ElementTree as ET

import pytest
import yaml

from conftest import FETCH
from meshgen import write_model
from sceneforge.acquire import ResolvedModel
from sceneforge.descriptor import ModelEntry, ModelKind
from sceneforge.dsl import parse_scenario
from sceneforge.emit import (
    emit_mission_yaml,
    emit_plot_svg,
    emit_scaled_model,
    emit_world,
    write_output_tree,
)
from sceneforge.emit.fmt import num
from sceneforge.errors import EmitError, OutputExistsError
from sceneforge.geometry import OrientedRect
from sceneforge.registry import build_model_spec
from sceneforge.sampler import sample_scene
from sceneforge.scene import ConcreteScene, SceneObject

SVG = "{http://www.w3.org/2000/svg}"


def scene_of(registry, src, seed=0):
    return sample_scene(parse_scenario(src, registry.type_names), registry, seed)


def includes(xml):
    world = ET.fromstring(xml).find("world")
    return {i.findtext("name"): i for i in world.findall("include")}


@pytest.mark.parametrize("v, text", [(0, "0"), (1.0, "1"), (-2.0, "-2"), (0.1, "0.1"), (-1.57, "-1.57"), (1e-20, "1e-20"), (-0.0, "0")])
def test_number_format(v, text):
    assert num(v) == text


def test_empty_scene_gives_ground_plane_only():
    doc = emit_world(ConcreteScene())
    root = ET.fromstring(doc.xml)
    assert root.get("version") == "1.6"
    world = root.find("world")
    assert world.findall("include") == []
    assert [m.get("name") for m in world.findall("model")] == ["ground_plane"]
    assert doc.models == [] and doc.instance_names == []


def test_single_table_pose(fetch_registry):
    doc = emit_world(scene_of(fetch_registry, "CafeTable at 0 @ 1\n"))
    inc = includes(doc.xml)["cafe_table_0"]
    assert inc.findtext("uri") == "model://cafe_table"
    assert inc.findtext("pose") == "0 1 0 0 0 0"
    (model,) = doc.models
    assert model.name == "cafe_table" and model.copy_from.name == "cafe_table"


def test_instance_names_count_per_entry(fetch_registry):
    doc = emit_world(scene_of(fetch_registry, "Bookshelf at -2 @ 0\nCafeTable at 2 @ 2\nBookshelf at 2 @ -2\n"))
    assert doc.instance_names == ["bookshelf_0", "cafe_table_0", "bookshelf_1"]
    assert [m.name for m in doc.models] == ["bookshelf", "cafe_table"]


def test_mission_objects_are_not_in_world(fetch_registry):
    doc = emit_world(scene_of(fetch_registry, "ego = Fetch at 0 @ 0\nWaypoint at 1 @ 1\n"))
    assert includes(doc.xml) == {} and doc.models == []


def test_heading_offset_added_to_yaw(tmp_path):
    d = write_model(tmp_path, "rot", [((0, 0, 0, 0, 0, 0), [("box", (1, 2, 1), (0, 0, 0.5, 0, 0, 0))])])
    entry = ModelEntry("rot", ModelKind.CUSTOM_MODEL, heading=0.5)
    spec = build_model_spec(entry, ResolvedModel(entry, d, d / "model.sdf"))
    obj = SceneObject("r", spec, (1.5, -2.25), heading=0.25)
    pose = includes(emit_world(ConcreteScene([obj])).xml)["rot_0"].findtext("pose").split()
    assert float(pose[5]) == 0.75


def test_z_offset_is_subtracted(tmp_path):
    # box centred on the origin: its bottom is 0.5 below the model frame
    d = write_model(tmp_path, "hang", [((0, 0, 0, 0, 0, 0), [("box", (1, 1, 1), (0, 0, 0, 0, 0, 0))])])
    entry = ModelEntry("hang", ModelKind.CUSTOM_MODEL)
    spec = build_model_spec(entry, ResolvedModel(entry, d, d / "model.sdf"))
    assert spec.z_offset == -0.5
    obj = SceneObject("h", spec, (0, 0), z=1.0)
    pose = includes(emit_world(ConcreteScene([obj])).xml)["hang_0"].findtext("pose").split()
    assert float(pose[2]) == 1.5


def test_walls_are_inline_static_boxes(fetch_registry):
    doc = emit_world(scene_of(fetch_registry, "create_room(3, 2, x=1, y=1, sides='NE')\n"))
    world = ET.fromstring(doc.xml).find("world")
    walls = {m.get("name"): m for m in world.findall("model") if m.get("name").startswith("wall")}
    assert set(walls) == {"wall_0", "wall_1"}
    n = walls["wall_0"]
    assert n.findtext("static") == "true"
    assert n.findtext("pose") == "1 2.5 0 0 0 0"
    assert n.find("link/pose").text == "0 0 0.5 0 0 0"
    assert n.find("link/collision/geometry/box/size").text == "2 0.1 1"
    assert n.find("link/visual/geometry/box/size").text == "2 0.1 1"
    assert walls["wall_1"].find("link/collision/geometry/box/size").text == "0.1 3 1"
    assert doc.models == []


def test_template_is_kept(fetch_registry):
    template = (FETCH / "empty_world.world").read_text()
    doc = emit_world(scene_of(fetch_registry, "CafeTable at 0 @ 0\n"), template)
    uris = [i.findtext("uri") for i in ET.fromstring(doc.xml).iter("include")]
    assert uris == ["model://ground_plane", "model://sun", "model://cafe_table"]


@pytest.mark.parametrize("template", ["<sdf><world", "<world/>", "<sdf version='1.6'/>"])
def test_bad_template(template):
    with pytest.raises(EmitError):
        emit_world(ConcreteScene(), template)


def test_template_name_clash(fetch_registry):
    template = '<sdf version="1.7"><world name="w"><model name="cafe_table_0"/></world></sdf>'
    with pytest.raises(EmitError, match="already used"):
        emit_world(scene_of(fetch_registry, "CafeTable at 0 @ 0\n"), template)


def _unit(tmp_path, kind, dims, name="thing", dynamic=None):
    d = write_model(tmp_path, name, [((0, 0, 0.25, 0, 0, 0), [(kind, dims, (0.1, 0, 0, 0, 0, 0))])])
    entry = ModelEntry(name, ModelKind.CUSTOM_MODEL, dynamic_size=dynamic)
    return build_model_spec(entry, ResolvedModel(entry, d, d / "model.sdf"))


def test_scaled_box_model(tmp_path):
    spec = _unit(tmp_path, "box", (1, 1, 1))
    m = emit_scaled_model(spec, 2)
    assert m.name == "thing_scaled_2.00"
    root = ET.fromstring(m.files["model.sdf"])
    assert root.find("model").get("name") == "thing_scaled_2.00"
    assert [e.text for e in root.iter("size")] == ["2 2 2", "2 2 2"]
    assert root.find("model/link/pose").text == "0 0 0.5 0 0 0"
    assert root.find("model/link/collision/pose").text == "0.2 0 0 0 0 0"
    config = ET.fromstring(m.files["model.config"])
    assert config.findtext("name") == "thing_scaled_2.00"
    assert config.find("sdf").text == "model.sdf" and config.find("sdf").get("version") == "1.6"


def test_scaled_cylinder_model(tmp_path):
    spec = _unit(tmp_path, "cylinder", (0.4, 1.0))
    root = ET.fromstring(emit_scaled_model(spec, 0.5).files["model.sdf"])
    assert [e.text for e in root.iter("radius")] == ["0.2", "0.2"]
    assert [e.text for e in root.iter("length")] == ["0.5", "0.5"]


@pytest.mark.parametrize("scale", [0.49, 2.5, 3.0, float("nan")])
def test_scaled_model_range(tmp_path, scale):
    with pytest.raises(EmitError):
        emit_scaled_model(_unit(tmp_path, "sphere", (0.3,)), scale)


def test_scaled_model_needs_dynamic_size(tmp_path):
    with pytest.raises(EmitError, match="not resizable"):
        emit_scaled_model(_unit(tmp_path, "box", (1, 1, 1), dynamic=False), 1.5)


def test_scaled_mesh_model_rewrites_scale_and_uri(tmp_path):
    d = write_model(tmp_path, "statue", [((0, 0, 0, 0, 0, 0), [("mesh", "model://statue/meshes/s.obj", (0, 0, 0, 0, 0, 0))])])
    (d / "meshes").mkdir()
    (d / "meshes" / "s.obj").write_text("v 0 0 0\nv 1 1 1\n")
    entry = ModelEntry("statue", ModelKind.CUSTOM_MODEL, dynamic_size=True)
    spec = build_model_spec(entry, ResolvedModel(entry, d, d / "model.sdf"))
    m = emit_scaled_model(spec, 1.5)
    root = ET.fromstring(m.files["model.sdf"])
    assert [e.text for e in root.iter("uri")] == ["model://statue_scaled_1.50/meshes/s.obj"] * 2
    assert [e.text for e in root.iter("scale")] == ["1.5 1.5 1.5"] * 2
    assert m.copy_from == d


def test_mission_yaml_groups_in_order(fetch_registry):
    s = scene_of(fetch_registry, "ego = Fetch at 0 @ 0\nWaypoint at 1 @ 2\nWaypoint at -1.5 @ 0.25, facing 90 deg\n")
    doc = yaml.safe_load(emit_mission_yaml(s))
    assert doc == {
        "fetch": [{"heading": -1.57, "x": 0, "y": 0, "z": 0.0}],
        "waypoint": [
            {"heading": 0.0, "x": 1, "y": 2, "z": 0.0},
            {"heading": pytest.approx(math.pi / 2), "x": -1.5, "y": 0.25, "z": 0.0},
        ],
    }


def test_mission_yaml_empty(fetch_registry):
    text = emit_mission_yaml(scene_of(fetch_registry, "CafeTable at 0 @ 0\n"))
    assert yaml.safe_load(text) == {}


def test_mission_yaml_is_plain_python_numbers(fetch_registry):
    s = scene_of(fetch_registry, "r = RectangularRegion(0 @ 0, 0, 1, 1)\nWaypoint in r\n")
    text = emit_mission_yaml(s)
    assert "!!" not in text
    assert isinstance(yaml.safe_load(text)["waypoint"][0]["x"], float)


def _svg(scene):
    return ET.fromstring(emit_plot_svg(scene))


def test_plot_of_ego_only(fetch_registry):
    root = _svg(scene_of(fetch_registry, "ego = Fetch at 0 @ 0\n"))
    rects = list(root.iter(SVG + "rect"))
    assert [r.get("class") for r in rects] == ["workspace", "object ego"]
    labels = [t.text for t in root.iter(SVG + "text")]
    assert labels == ["ego"]


def test_plot_of_empty_scene():
    root = _svg(ConcreteScene())
    assert [r.get("class") for r in root.iter(SVG + "rect")] == ["workspace"]
    assert list(root.iter(SVG + "text")) == []


def test_plot_rotation_and_styles(fetch_registry):
    scene = ConcreteScene(
        [
            SceneObject("a", fetch_registry.lookup("CafeTable"), (1, 1), heading=math.pi / 2),
            SceneObject("ego", fetch_registry.lookup("Fetch"), (0, 0), is_ego=True, mission_only=True),
        ],
        OrientedRect(0, 0, 0, 3, 3),
    )
    root = _svg(scene)
    groups = [g for g in root.iter(SVG + "g") if g.find(SVG + "rect") is not None]
    transforms = [g.get("transform") for g in groups]
    assert transforms[1] == "translate(1 1) rotate(90)"
    classes = [g.find(SVG + "rect").get("class") for g in groups]
    assert classes == ["workspace", "object", "object ego"]
    assert re.search(r"\.object \{[^}]*fill: #e74c3c", emit_plot_svg(scene))
    ticks = list(root.iter(SVG + "line"))
    assert len(ticks) == 2


def test_fetch_scene_plot_has_one_rect_per_object(fetch_registry):
    s = scene_of(fetch_registry, (FETCH / "mission.scn").read_text())
    rects = [r for r in _svg(s).iter(SVG + "rect") if r.get("class").startswith("object")]
    assert len(rects) == len(s.objects) == 14


def test_output_tree(tmp_path, fetch_registry):
    s = scene_of(fetch_registry, "CafeTable at 0 @ 0\nego = Fetch at 2 @ 2\n")
    doc = emit_world(s)
    out = write_output_tree(doc, emit_mission_yaml(s), emit_plot_svg(s), tmp_path / "o", record="{}")
    names = sorted(p.name for p in out.iterdir())
    assert names == ["mission.yaml", "models", "scene.json", "scene.svg", "scene.world"]
    assert (out / "models/cafe_table/model.sdf").exists()
    assert not (out / "models/cafe_table/.source_url").exists()


def test_output_tree_refuses_non_empty_dir(tmp_path):
    out = tmp_path / "o"
    out.mkdir()
    (out / "notes.txt").write_text("keep me")
    doc = emit_world(ConcreteScene())
    with pytest.raises(OutputExistsError):
        write_output_tree(doc, "{}\n", "<svg/>", out)
    write_output_tree(doc, "{}\n", "<svg/>", out, force=True)
    assert (out / "notes.txt").read_text() == "keep me"
    assert (out / "mission.yaml").read_text() == "{}\n"
