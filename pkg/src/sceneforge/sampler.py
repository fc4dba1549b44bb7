"""Scene sampling: evaluate a scenario tree and reject invalid layouts.

Every attempt resamples all random values and places objects in
declaration order. Within one declaration the specifier arguments are
evaluated left to right, then properties and heading are applied, and the
position is resolved last so relative placements can use the object's own
size and heading.
"""

from __future__ import annotations

import math
from typing import Any

import numpy as np

from .dsl import nodes as n
from .errors import EvaluationError, UnsatisfiableScenario
from .geometry import OrientedRect, forward, normalize_heading, rect_inside, rects_intersect, right, rotate
from .registry import WALL_TYPE, Registry
from .scene import WALL_GROUP, ConcreteScene, SceneObject, containment_rect, rect_of

DEFAULT_MAX_ATTEMPTS = 2000
DEFAULT_WORKSPACE = OrientedRect(0.0, 0.0, 0.0, 5.0, 5.0)
WALL_THICKNESS = 0.1
WALL_HEIGHT = 1.0
MIN_SCALE, MAX_SCALE = 0.5, 2.0
_SCALE_EPS = 1e-12


def _where(node) -> str:
    pos = getattr(node, "pos", (0, 0))
    return f"line {pos[0]}, column {pos[1]}: " if pos and pos[0] else ""


def _fail(node, message: str):
    raise EvaluationError(_where(node) + message)


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _is_point(v) -> bool:
    return isinstance(v, tuple) and len(v) == 2


def as_number(v, node, what: str = "a number"):
    if not _is_number(v):
        _fail(node, f"expected {what}, got {_kind(v)}")
    return v


def as_point(v, node):
    if isinstance(v, SceneObject):
        return v.position
    if not _is_point(v):
        _fail(node, f"expected a point, got {_kind(v)}")
    return v


def _kind(v) -> str:
    if isinstance(v, bool):
        return "a boolean"
    if _is_number(v):
        return "a number"
    if _is_point(v):
        return "a point"
    if isinstance(v, OrientedRect):
        return "a region"
    if isinstance(v, SceneObject):
        return f"object {v.instance_name!r}"
    return type(v).__name__


def _arith(op: str, a, b, node):
    if isinstance(a, bool) or isinstance(b, bool):
        _fail(node, f"cannot apply {op!r} to a boolean")
    if isinstance(a, SceneObject):
        a = a.position
    if isinstance(b, SceneObject):
        b = b.position
    if _is_number(a) and _is_number(b):
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if b == 0:
            _fail(node, "division by zero")
        return a / b
    if _is_point(a) and _is_point(b) and op in "+-":
        sign = 1 if op == "+" else -1
        return (a[0] + sign * b[0], a[1] + sign * b[1])
    if _is_point(a) and _is_number(b) and op in "*/":
        if op == "/" and b == 0:
            _fail(node, "division by zero")
        return (a[0] * b, a[1] * b) if op == "*" else (a[0] / b, a[1] / b)
    if _is_number(a) and _is_point(b) and op == "*":
        return (a * b[0], a * b[1])
    _fail(node, f"cannot apply {op!r} to {_kind(a)} and {_kind(b)}")


def evaluate_expr(e, env: dict, rng) -> Any:
    """Evaluate an expression to a number, boolean, point, region or object."""
    if isinstance(e, n.Num):
        return e.value
    if isinstance(e, n.Bool):
        return e.value
    if isinstance(e, n.PointLit):
        x = as_number(evaluate_expr(e.x, env, rng), e.x)
        y = as_number(evaluate_expr(e.y, env, rng), e.y)
        return (x, y)
    if isinstance(e, n.Range):
        lo = as_number(evaluate_expr(e.lo, env, rng), e.lo)
        hi = as_number(evaluate_expr(e.hi, env, rng), e.hi)
        if lo > hi:
            _fail(e, f"Range({lo}, {hi}) has lower bound above upper bound")
        return float(rng.uniform(lo, hi))
    if isinstance(e, n.UniformChoice):
        values = [evaluate_expr(v, env, rng) for v in e.values]
        return values[int(rng.integers(len(values)))]
    if isinstance(e, n.Deg):
        return as_number(evaluate_expr(e.inner, env, rng), e.inner) * math.pi / 180.0
    if isinstance(e, n.BinOp):
        left = evaluate_expr(e.left, env, rng)
        right_value = evaluate_expr(e.right, env, rng)
        return _arith(e.op, left, right_value, e)
    if isinstance(e, n.Neg):
        v = evaluate_expr(e.inner, env, rng)
        if isinstance(v, SceneObject):
            v = v.position
        if _is_number(v):
            return -v
        if _is_point(v):
            return (-v[0], -v[1])
        _fail(e, f"cannot negate {_kind(v)}")
    if isinstance(e, n.VarRef):
        if e.name not in env:
            _fail(e, f"name {e.name!r} is not bound")
        return env[e.name]
    if isinstance(e, n.ObjectRef):
        obj = env.get(e.name)
        if not isinstance(obj, SceneObject):
            _fail(e, f"{e.name!r} is not a placed object")
        return obj
    if isinstance(e, n.AttrRef):
        obj = env.get(e.obj)
        if not isinstance(obj, SceneObject):
            _fail(e, f"{e.obj!r} is not a placed object")
        return getattr(obj, e.attr)
    if isinstance(e, n.RectRegion):
        return evaluate_region(e, env, rng)
    raise TypeError(f"unknown expression node {e!r}")


def evaluate_region(r: n.RectRegion, env: dict, rng) -> OrientedRect:
    center = as_point(evaluate_expr(r.center, env, rng), r.center)
    heading = as_number(evaluate_expr(r.heading, env, rng), r.heading)
    width = as_number(evaluate_expr(r.width, env, rng), r.width)
    length = as_number(evaluate_expr(r.length, env, rng), r.length)
    if width <= 0 or length <= 0:
        _fail(r, f"region width and length must be > 0, got {width} x {length}")
    return OrientedRect(center[0], center[1], heading, width / 2, length / 2)


def _region(name: str, env: dict, node) -> OrientedRect:
    value = env.get(name)
    if not isinstance(value, OrientedRect):
        _fail(node, f"{name!r} is not a region")
    return value


def _operand(op, env, rng):
    if isinstance(op, n.ObjectRef):
        return evaluate_expr(op, env, rng)
    return as_point(evaluate_expr(op, env, rng), op)


def _scale_for(spec, requested: dict, node) -> float:
    scales = []
    for prop, base in (("width", spec.width), ("length", spec.length)):
        if prop in requested:
            value = as_number(requested[prop], node, f"a number for {prop}")
            if base <= 0:
                _fail(node, f"{spec.name} has no {prop} to resize")
            scales.append(value / base)
    if not scales:
        return 1
    scale = scales[0]
    if len(scales) == 2 and not math.isclose(scales[0], scales[1], rel_tol=1e-9, abs_tol=1e-12):
        _fail(node, f"width and length imply different scales ({scales[0]:g} vs {scales[1]:g}); resizing is uniform")
    if abs(scale - 1) <= _SCALE_EPS:
        return 1
    if not spec.dynamic_size:
        _fail(node, f"{spec.name} cannot be resized (dynamic_size is false)")
    if not (MIN_SCALE - _SCALE_EPS <= scale <= MAX_SCALE + _SCALE_EPS):
        _fail(node, f"scale {scale:g} for {spec.name} is outside [{MIN_SCALE}, {MAX_SCALE}]")
    return scale


def place_instance(decl: n.InstanceDecl, env: dict, rng, registry: Registry) -> SceneObject:
    spec = registry.lookup(decl.type_name)
    workspace = env.get("workspace", DEFAULT_WORKSPACE)

    # 1. specifier arguments, left to right
    position_spec = None
    position_args = None
    facing = None
    props: dict[str, Any] = {}
    for s in decl.specifiers:
        if isinstance(s, n.At):
            position_spec, position_args = s, as_point(evaluate_expr(s.point, env, rng), s.point)
        elif isinstance(s, n.OffsetBy):
            position_spec, position_args = s, as_point(evaluate_expr(s.vector, env, rng), s.vector)
        elif isinstance(s, n.Facing):
            facing = as_number(evaluate_expr(s.heading, env, rng), s.heading, "a heading")
        elif isinstance(s, (n.LeftOf, n.RightOf)):
            position_spec, position_args = s, _operand(s.operand, env, rng)
        elif isinstance(s, (n.AheadOf, n.Behind)):
            by = None if s.by is None else as_number(evaluate_expr(s.by, env, rng), s.by, "a distance")
            position_spec, position_args = s, (_operand(s.operand, env, rng), by)
        elif isinstance(s, n.InRegion):
            region = _region(s.region, env, s)
            position_spec, position_args = s, region.sample_point(rng)
        elif isinstance(s, n.With):
            props[s.prop] = evaluate_expr(s.value, env, rng)

    # 2. properties and heading
    scale = _scale_for(spec, props, decl)
    obj = SceneObject(
        instance_name=decl.binding,
        spec=spec,
        position=(0, 0),
        scale=scale,
        mission_only=spec.mission_only,
        is_ego=decl.binding == "ego",
    )
    if "z" in props:
        obj.z = as_number(props["z"], decl, "a number for z")
    if "allowCollisions" in props:
        if not isinstance(props["allowCollisions"], bool):
            _fail(decl, "allowCollisions must be True or False")
        obj.allow_collisions = props["allowCollisions"]
    if facing is not None:
        obj.heading = normalize_heading(facing)

    # 3. position
    obj.position = _resolve_position(position_spec, position_args, obj, env, workspace, rng)
    return obj


def _resolve_position(spec_node, args, obj: SceneObject, env, workspace, rng):
    if spec_node is None:
        return workspace.sample_point(rng)
    if isinstance(spec_node, (n.At, n.InRegion)):
        return args
    if isinstance(spec_node, n.OffsetBy):
        ego = env.get("ego")
        if not isinstance(ego, SceneObject):
            _fail(spec_node, "'offset by' needs ego to be defined first")
        dx, dy = rotate(args, ego.heading)
        return (ego.position[0] + dx, ego.position[1] + dy)
    if isinstance(spec_node, (n.LeftOf, n.RightOf)):
        sign = -1 if isinstance(spec_node, n.LeftOf) else 1
        if isinstance(args, SceneObject):
            rx, ry = right(args.heading)
            d = args.width / 2 + obj.width / 2
            base = args.position
        else:
            rx, ry = right(obj.heading)
            d = obj.width / 2
            base = args
        return (base[0] + sign * d * rx, base[1] + sign * d * ry)
    if isinstance(spec_node, (n.AheadOf, n.Behind)):
        target, by = args
        sign = 1 if isinstance(spec_node, n.AheadOf) else -1
        if isinstance(target, SceneObject):
            fx, fy = forward(target.heading)
            d = (target.length + obj.length) / 2 if by is None else by
            base = target.position
        else:
            fx, fy = forward(obj.heading)
            d = obj.length / 2 if by is None else by
            base = target
        return (base[0] + sign * d * fx, base[1] + sign * d * fy)
    raise TypeError(f"unknown position specifier {spec_node!r}")


def expand_create_room(stmt: n.CreateRoom, env: dict, rng, registry: Registry, index: int = 0) -> list[SceneObject]:
    """One wall per requested side around a room centred at (x, y)."""
    length = as_number(evaluate_expr(stmt.length, env, rng), stmt.length)
    width = as_number(evaluate_expr(stmt.width, env, rng), stmt.width)
    x = as_number(evaluate_expr(stmt.x, env, rng), stmt.x)
    y = as_number(evaluate_expr(stmt.y, env, rng), stmt.y)
    if length <= 0 or width <= 0:
        _fail(stmt, f"room dimensions must be > 0, got {length} x {width}")
    if not stmt.sides or len(set(stmt.sides)) != len(stmt.sides) or set(stmt.sides) - set(n.SIDES):
        _fail(stmt, f"invalid sides {stmt.sides!r}")
    spec = registry.lookup(WALL_TYPE)
    layout = {
        "N": ((x, y + length / 2), (width, WALL_THICKNESS)),
        "S": ((x, y - length / 2), (width, WALL_THICKNESS)),
        "E": ((x + width / 2, y), (WALL_THICKNESS, length)),
        "W": ((x - width / 2, y), (WALL_THICKNESS, length)),
    }
    walls = []
    for side in stmt.sides:
        center, (w, l) = layout[side]
        walls.append(
            SceneObject(
                instance_name=f"room{index}_{side}",
                spec=spec,
                position=center,
                z=0.0,
                heading=0,
                custom_dims=(w, l, WALL_HEIGHT),
                group=WALL_GROUP,
            )
        )
    return walls


def _instantiate(ast: n.ScenarioAst, registry: Registry, rng):
    env: dict[str, Any] = {"workspace": DEFAULT_WORKSPACE}
    objects: list[SceneObject] = []
    rooms = 0
    for stmt in ast.statements:
        if isinstance(stmt, n.Assign):
            env[stmt.name] = evaluate_expr(stmt.value, env, rng)
        elif isinstance(stmt, n.WorkspaceDecl):
            region = evaluate_expr(stmt.region, env, rng)
            env["workspace"] = _region_value(region, stmt)
        elif isinstance(stmt, n.CreateRoom):
            objects.extend(expand_create_room(stmt, env, rng, registry, rooms))
            rooms += 1
        elif isinstance(stmt, n.InstanceDecl):
            obj = place_instance(stmt, env, rng, registry)
            env[stmt.binding] = obj
            objects.append(obj)
        elif isinstance(stmt, n.PropertySet):
            obj = env.get(stmt.obj)
            if not isinstance(obj, SceneObject):
                _fail(stmt, f"{stmt.obj!r} is not a placed object")
            value = evaluate_expr(stmt.value, env, rng)
            if stmt.prop == "z":
                obj.z = as_number(value, stmt.value, "a number for z")
            else:
                if not isinstance(value, bool):
                    _fail(stmt.value, "allowCollisions must be True or False")
                obj.allow_collisions = value
        else:
            raise TypeError(f"unknown statement {stmt!r}")
    return objects, env["workspace"]


def _region_value(v, node) -> OrientedRect:
    if not isinstance(v, OrientedRect):
        _fail(node, f"workspace must be a region, got {_kind(v)}")
    return v


def _exempt(a: SceneObject, b: SceneObject) -> bool:
    if a.allow_collisions or b.allow_collisions:
        return True
    if a.group is not None and a.group == b.group:
        return True
    return not (a.width > 0 and a.length > 0 and b.width > 0 and b.length > 0)


def first_violation(objects, workspace: OrientedRect) -> str | None:
    """Describe the first failed containment or collision check, or None."""
    for o in objects:
        if not rect_inside(workspace, containment_rect(o)):
            return f"{o.instance_name!r} is not inside the workspace"
    rects = [rect_of(o) for o in objects]
    for i in range(len(objects)):
        for j in range(i + 1, len(objects)):
            if _exempt(objects[i], objects[j]):
                continue
            if rects_intersect(rects[i], rects[j]):
                return f"{objects[i].instance_name!r} collides with {objects[j].instance_name!r}"
    return None


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed) & (2**64 - 1)))


def sample_scene(ast: n.ScenarioAst, registry: Registry, seed: int, max_attempts: int = DEFAULT_MAX_ATTEMPTS) -> ConcreteScene:
    """Generate-and-test until a scene satisfies every constraint.

    Raises UnsatisfiableScenario after ``max_attempts`` rejected layouts.
    """
    if max_attempts < 1:
        raise ValueError("max_attempts must be >= 1")
    rng = make_rng(seed)
    violation = None
    for attempt in range(1, max_attempts + 1):
        objects, workspace = _instantiate(ast, registry, rng)
        violation = first_violation(objects, workspace)
        if violation is None:
            return ConcreteScene(objects, workspace, seed, attempt)
    raise UnsatisfiableScenario(violation, max_attempts)
