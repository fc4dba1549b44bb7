import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sceneforge.descriptor import ModelKind
from sceneforge.dsl import parse_scenario
from sceneforge.errors import EvaluationError, UnsatisfiableScenario
from sceneforge.geometry import OrientedRect
from sceneforge.registry import ModelSpec, Registry
from sceneforge.sampler import evaluate_expr, first_violation, make_rng, sample_scene
from sceneforge.scene import dumps_record, loads_record, rect_of

CRATE = ModelSpec("Crate", "crate", ModelKind.GAZEBO_MODEL, width=1.0, length=2.0, height=0.5, dynamic_size=True)
ROBOT = ModelSpec("Robot", "robot", ModelKind.MISSION_ONLY, width=0.5, length=0.5, heading_offset=-1.57)
MARK = ModelSpec("Mark", "mark", ModelKind.MISSION_ONLY, width=0.1, length=0.1)
BIG = ModelSpec("Big", "big", ModelKind.GAZEBO_MODEL, width=3.0, length=3.0)
REG = Registry([CRATE, ROBOT, MARK, BIG])


def one(src, seed=0, **kw):
    return sample_scene(parse_scenario(src, REG.type_names), REG, seed, **kw)


def obj(scene, name):
    return next(o for o in scene.objects if o.instance_name == name)


def close(p, q):
    return math.isclose(p[0], q[0], abs_tol=1e-12) and math.isclose(p[1], q[1], abs_tol=1e-12)


def test_at_and_facing():
    s = one("c = Crate at 1 @ 2, facing 90 deg\n")
    c = obj(s, "c")
    assert c.position == (1, 2) and c.heading == pytest.approx(math.pi / 2)


def test_offset_by_rotates_with_ego_heading():
    s = one("ego = Robot at 1 @ 1, facing 90 deg\nm = Mark offset by 0 @ 2\n")
    # heading 90 deg points along -x
    assert close(obj(s, "m").position, (-1, 1))


def test_offset_by_needs_ego():
    with pytest.raises(EvaluationError, match="ego"):
        one("m = Mark offset by 0 @ 1\n")


def test_ahead_of_object_defaults_to_touching():
    s = one("ego = Robot at 0 @ 0\nc = Crate ahead of ego\n")
    # (0.5 + 2) / 2 ahead along +y
    assert close(obj(s, "c").position, (0, 1.25))


def test_ahead_of_with_distance_and_behind():
    s = one("ego = Robot at 0 @ 0, facing -90 deg\na = Mark ahead of ego by 1\nb = Mark behind ego by 2\n")
    assert close(obj(s, "a").position, (1, 0))
    assert close(obj(s, "b").position, (-2, 0))


def test_left_and_right_of_object():
    s = one("ego = Robot at 0 @ 0\nl = Crate left of ego\nr = Crate right of ego\n")
    assert close(obj(s, "l").position, (-0.75, 0))
    assert close(obj(s, "r").position, (0.75, 0))


def test_left_of_point_uses_own_width_and_heading():
    s = one("l = Crate left of 0 @ 0, facing 180 deg\n")
    # right(180 deg) is -x, so left of the point is +x by half the width
    assert close(obj(s, "l").position, (0.5, 0))


def test_attributes_are_visible_to_later_statements():
    s = one("ego = Robot at 1 @ 2, facing 30 deg\nm = Mark at ego.position + (1 @ 0), facing ego.heading\n")
    assert close(obj(s, "m").position, (2, 2))
    assert obj(s, "m").heading == pytest.approx(math.radians(30))


def test_in_region_samples_inside():
    for seed in range(20):
        s = one("r = RectangularRegion(2 @ -1, 45 deg, 1, 0.5)\nm = Mark in r\n", seed)
        assert OrientedRect(2, -1, math.pi / 4, 0.5, 0.25).contains_point(obj(s, "m").position)


def test_default_position_uses_workspace():
    s = one("workspace = Workspace(RectangularRegion(10 @ 10, 0, 2, 2))\nm = Mark\n")
    x, y = obj(s, "m").position
    assert 9 <= x <= 11 and 9 <= y <= 11


def test_unnamed_instances_bind_with_counter():
    s = one("Mark at 0 @ 0\nMark at 1 @ 1\n")
    assert [o.instance_name for o in s.objects] == ["Mark#0", "Mark#1"]


def test_create_room_layout():
    s = one("create_room(4, 6, x=1, y=-1, sides='NSWE')\n")
    walls = {o.instance_name[-1]: o for o in s.objects}
    assert close(walls["N"].position, (1, 1)) and (walls["N"].width, walls["N"].length) == (6, 0.1)
    assert close(walls["S"].position, (1, -3))
    assert close(walls["E"].position, (4, -1)) and (walls["E"].width, walls["E"].length) == (0.1, 4)
    assert close(walls["W"].position, (-2, -1))
    assert all(o.group == "walls" and o.height == 1.0 for o in s.objects)


def test_room_on_workspace_boundary_is_admissible():
    s = one("workspace = Workspace(RectangularRegion(0 @ 0, 0, 4, 4))\ncreate_room(4, 4)\nc = Crate at 0 @ 0\n")
    assert len(s.objects) == 5


def test_walls_still_block_objects():
    with pytest.raises(UnsatisfiableScenario):
        one("create_room(4, 4)\nc = Crate at 0 @ 1.5\n", max_attempts=5)


def test_collisions_are_rejected_and_reported():
    with pytest.raises(UnsatisfiableScenario) as e:
        one("a = Crate at 0 @ 0\nb = Crate at 0.5 @ 0\n", max_attempts=3)
    assert e.value.attempts == 3
    assert "'a'" in e.value.violation and "'b'" in e.value.violation


def test_allow_collisions_exempts_pairs():
    s = one("a = Crate at 0 @ 0\nb = Crate at 0.5 @ 0, with allowCollisions True\n")
    assert len(s.objects) == 2
    s = one("a = Crate at 0 @ 0\nb = Crate at 0.5 @ 0\na.allowCollisions = True\n")
    assert obj(s, "a").allow_collisions


def test_touching_objects_are_accepted():
    s = one("a = Crate at 0 @ 0\nb = Crate at 1 @ 0\n")
    assert len(s.objects) == 2


def test_containment_is_enforced():
    with pytest.raises(UnsatisfiableScenario, match="workspace"):
        one("workspace = Workspace(RectangularRegion(0 @ 0, 0, 2, 2))\nb = Big at 0 @ 0\n", max_attempts=2)


def test_rejection_retries_until_valid():
    s = one("workspace = Workspace(RectangularRegion(0 @ 0, 0, 4, 4))\na = Crate at Range(-1.5, 1.5) @ 0\nb = Crate at 0 @ 0\n", 1)
    assert s.attempts >= 1
    assert first_violation(s.objects, s.workspace) is None


@pytest.mark.parametrize("width, ok", [(0.5, True), (2.0, True), (0.49, False), (2.01, False), (3.0, False)])
def test_resize_range(width, ok):
    src = f"c = Crate at 0 @ 0, with width {width}\n"
    if ok:
        c = obj(one(src), "c")
        assert c.scale == pytest.approx(width) and c.length == pytest.approx(2 * width)
    else:
        with pytest.raises(EvaluationError, match="outside"):
            one(src)


def test_resize_requires_dynamic_size():
    with pytest.raises(EvaluationError, match="cannot be resized"):
        one("b = Big at 0 @ 0, with width 4\n")


def test_width_and_length_must_agree():
    with pytest.raises(EvaluationError, match="uniform"):
        one("c = Crate at 0 @ 0, with width 2, with length 2\n")
    c = obj(one("c = Crate at 0 @ 0, with width 2, with length 4\n"), "c")
    assert c.scale == 2


def test_z_and_height():
    s = one("c = Crate at 0 @ 0\nd = Crate at 0 @ 0, with allowCollisions True\nd.z = c.height + d.height\n")
    assert obj(s, "d").z == 1.0


def test_mission_only_flags_and_ego():
    s = one("ego = Robot at 0 @ 0\nMark at 1 @ 1\n")
    assert s.ego.instance_name == "ego" and s.ego.mission_only
    assert obj(s, "Mark#0").mission_only and not obj(s, "Mark#0").is_ego


@pytest.mark.parametrize(
    "src, msg",
    [
        ("x = Range(2, 1)\n", "lower bound"),
        ("x = 1 / 0\n", "division by zero"),
        ("x = (1 @ 2) * (3 @ 4)\n", "cannot apply"),
        ("r = RectangularRegion(0 @ 0, 0, -1, 1)\n", "> 0"),
        ("create_room(0, 1)\n", "> 0"),
        ("p = 1 @ 2\nm = Mark facing p\n", "heading"),
    ],
)
def test_evaluation_errors(src, msg):
    with pytest.raises(EvaluationError, match=msg):
        one(src)


def test_evaluation_errors_carry_position():
    with pytest.raises(EvaluationError, match="line 2, column"):
        one("a = 1\nx = Range(2, a)\n")


def test_point_arithmetic():
    from sceneforge.dsl import parse_expr

    env = {"p": (1.0, 2.0)}
    e = parse_expr("p * 2 + (1 @ 1)", {"p": "value"})
    assert evaluate_expr(e, env, make_rng(0)) == (3.0, 5.0)


def test_uniform_choice_covers_all_options():
    seen = {obj(one("m = Mark at Uniform(1, 2, 3) @ 0\n", seed), "m").position[0] for seed in range(60)}
    assert seen == {1, 2, 3}


def test_same_seed_same_scene():
    src = "c = Crate at Range(-3, 3) @ Range(-3, 3), facing Range(0, 360) deg\nm = Mark\n"
    a, b = one(src, 99), one(src, 99)
    assert dumps_record(a) == dumps_record(b)
    assert dumps_record(one(src, 100)) != dumps_record(a)


def test_headings_are_normalized():
    c = obj(one("c = Crate at 0 @ 0, facing 540 deg\n"), "c")
    assert -math.pi < c.heading <= math.pi and math.isclose(abs(c.heading), math.pi)


def test_scene_record_round_trip():
    s = one("ego = Robot at 0 @ 0\ncreate_room(6, 6)\nc = Crate at 1 @ 1, with width 0.75\n")
    back = loads_record(dumps_record(s))
    assert dumps_record(back) == dumps_record(s)
    assert [rect_of(o) for o in back.objects] == [rect_of(o) for o in s.objects]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32))
def test_accepted_scenes_satisfy_constraints(seed):
    src = (
        "workspace = Workspace(RectangularRegion(0 @ 0, 0, 6, 6))\n"
        "create_room(6, 6)\n"
        "a = Crate facing Range(0, 360) deg\n"
        "b = Crate facing Range(0, 360) deg\n"
        "m = Mark\n"
    )
    s = one(src, seed)
    rects = [rect_of(o) for o in s.objects if o.group is None]
    from sceneforge.geometry import rects_intersect, rect_inside

    for i in range(len(rects)):
        assert rect_inside(s.workspace, rects[i])
        for j in range(i + 1, len(rects)):
            assert not rects_intersect(rects[i], rects[j])
