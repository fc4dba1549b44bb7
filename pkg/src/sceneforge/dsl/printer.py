"""Source rendering of a scenario tree; output re-parses to an equal tree."""

from __future__ import annotations

from . import nodes as n

# binding strength: point < additive < multiplicative (and deg) < unary < atom
_POINT, _ADD, _MUL, _UNARY, _ATOM = range(5)


def _num(v) -> str:
    if isinstance(v, bool):
        raise TypeError("boolean in numeric literal")
    if isinstance(v, int):
        return str(v)
    text = repr(float(v))
    return text if ("." in text or "e" in text or "inf" in text or "nan" in text) else text + ".0"


def _prec(e) -> int:
    if isinstance(e, n.PointLit):
        return _POINT
    if isinstance(e, n.BinOp):
        return _ADD if e.op in "+-" else _MUL
    if isinstance(e, n.Deg):
        return _MUL
    if isinstance(e, n.Neg):
        return _UNARY
    if isinstance(e, n.Num) and (isinstance(e.value, (int, float)) and e.value < 0):
        return _UNARY
    return _ATOM


def _wrap(e, need: int) -> str:
    text = format_expr(e)
    return f"({text})" if _prec(e) < need else text


def format_expr(e) -> str:
    if isinstance(e, n.Num):
        if e.value < 0:
            return "-" + _num(-e.value)
        return _num(e.value)
    if isinstance(e, n.Bool):
        return "True" if e.value else "False"
    if isinstance(e, n.PointLit):
        return f"{_wrap(e.x, _ADD)} @ {_wrap(e.y, _ADD)}"
    if isinstance(e, n.Range):
        return f"Range({format_expr(e.lo)}, {format_expr(e.hi)})"
    if isinstance(e, n.UniformChoice):
        return "Uniform(" + ", ".join(format_expr(v) for v in e.values) + ")"
    if isinstance(e, n.Deg):
        return f"{_wrap(e.inner, _MUL)} deg"
    if isinstance(e, n.BinOp):
        level = _ADD if e.op in "+-" else _MUL
        return f"{_wrap(e.left, level)} {e.op} {_wrap(e.right, level + 1)}"
    if isinstance(e, n.Neg):
        return "-" + _wrap(e.inner, _UNARY)
    if isinstance(e, (n.VarRef, n.ObjectRef)):
        return e.name
    if isinstance(e, n.AttrRef):
        return f"{e.obj}.{e.attr}"
    if isinstance(e, n.RectRegion):
        return (
            f"RectangularRegion({format_expr(e.center)}, {format_expr(e.heading)}, "
            f"{format_expr(e.width)}, {format_expr(e.length)})"
        )
    raise TypeError(f"cannot format {e!r}")


def _by(by) -> str:
    return "" if by is None else f" by {format_expr(by)}"


def format_specifier(s) -> str:
    if isinstance(s, n.At):
        return f"at {format_expr(s.point)}"
    if isinstance(s, n.OffsetBy):
        return f"offset by {format_expr(s.vector)}"
    if isinstance(s, n.Facing):
        return f"facing {format_expr(s.heading)}"
    if isinstance(s, n.LeftOf):
        return f"left of {format_expr(s.operand)}"
    if isinstance(s, n.RightOf):
        return f"right of {format_expr(s.operand)}"
    if isinstance(s, n.AheadOf):
        return f"ahead of {format_expr(s.operand)}{_by(s.by)}"
    if isinstance(s, n.Behind):
        return f"behind {format_expr(s.operand)}{_by(s.by)}"
    if isinstance(s, n.InRegion):
        return f"in {s.region}"
    if isinstance(s, n.With):
        return f"with {s.prop} {format_expr(s.value)}"
    raise TypeError(f"cannot format {s!r}")


def format_statement(s) -> str:
    if isinstance(s, n.Assign):
        return f"{s.name} = {format_expr(s.value)}"
    if isinstance(s, n.WorkspaceDecl):
        return f"workspace = Workspace({format_expr(s.region)})"
    if isinstance(s, n.CreateRoom):
        return (
            f"create_room({format_expr(s.length)}, {format_expr(s.width)}, "
            f"x={format_expr(s.x)}, y={format_expr(s.y)}, sides='{s.sides}')"
        )
    if isinstance(s, n.PropertySet):
        return f"{s.obj}.{s.prop} = {format_expr(s.value)}"
    if isinstance(s, n.InstanceDecl):
        head = f"{s.name} = {s.type_name}" if s.name else s.type_name
        if not s.specifiers:
            return head
        return head + " " + ", ".join(format_specifier(sp) for sp in s.specifiers)
    raise TypeError(f"cannot format {s!r}")


def format_scenario(ast: n.ScenarioAst) -> str:
    return "".join(format_statement(s) + "\n" for s in ast.statements)
