import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FETCH, STACKING
from sceneforge.dsl import format_expr, format_scenario, parse_scenario, tokenize
from sceneforge.dsl import nodes as n
from sceneforge.errors import LexError, ParseError

TYPES = ("Fetch", "Waypoint", "CafeTable", "Bookshelf", "LampAndStand", "DemoCube", "Wall")


def kinds(text):
    return [(t.kind, t.value) for t in tokenize(text)]


def test_tokens_of_an_instance_line():
    assert kinds("ego = Fetch at 0 @ 1.5, facing 90 deg\n") == [
        ("IDENT", "ego"),
        ("EQ", "="),
        ("IDENT", "Fetch"),
        ("KW", "at"),
        ("NUM", 0),
        ("AT", "@"),
        ("NUM", 1.5),
        ("COMMA", ","),
        ("KW", "facing"),
        ("NUM", 90),
        ("KW", "deg"),
        ("NEWLINE", "\n"),
    ]


def test_newlines_inside_parentheses_are_ignored():
    toks = kinds("x = Range(1,\n 2)\n\n\ny = 3")
    assert [k for k, _ in toks].count("NEWLINE") == 1


def test_comments_and_blank_lines_produce_no_tokens():
    assert kinds("# only a comment\n\n   \n") == []


def test_token_positions():
    toks = tokenize("a = 1\n  b = 2")
    b = [t for t in toks if t.value == "b"][0]
    assert (b.line, b.col) == (2, 3)


def test_illegal_character_reports_position():
    with pytest.raises(LexError) as e:
        tokenize("a = 1\nb = $")
    assert (e.value.line, e.value.col) == (2, 5)
    assert "line 2, column 5" in str(e.value)


def test_fetch_scenario_structure():
    ast = parse_scenario((FETCH / "scenario.scn").read_text(), TYPES)
    assert len(ast.instances()) == 5
    assert ast.count(n.CreateRoom) == 2
    assert ast.count(n.WorkspaceDecl) == 1
    lamp = ast.instances()[-1]
    assert lamp.type_name == "LampAndStand"  # written as Lampandstand
    assert lamp.specifiers == (n.InRegion("back_right_region"),)
    shelf = ast.instances()[3]
    assert shelf.name is None and shelf.binding.startswith("Bookshelf")
    assert isinstance(shelf.specifiers[0].point, n.PointLit)
    assert shelf.specifiers[1] == n.Facing(n.Deg(n.Num(180)))


@pytest.mark.parametrize("path", [FETCH / "scenario.scn", FETCH / "mission.scn", STACKING / "scenario.scn"])
def test_fixture_scenarios_round_trip(path):
    types = TYPES + ("Cube",)
    ast = parse_scenario(path.read_text(), types)
    assert parse_scenario(format_scenario(ast), types) == ast


@pytest.mark.parametrize(
    "src, line, col, fragment",
    [
        ("ego = Fetch at 0 @\n", 1, 19, "expected"),
        ("ego = Fetch\nego = Fetch\n", 2, 1, "ego"),
        ("x = Chair at 0 @ 0\n", 1, 5, "Chair"),
        ("Fetch at y @ 0\n", 1, 10, "y"),
        ("Fetch at 0 @ 0, at 1 @ 1\n", 1, 17, "position"),
        ("Fetch facing 0, facing 1\n", 1, 17, "facing"),
        ("create_room(2, 2, sides='NQ')\n", 1, 25, "side"),
        ("workspace = Workspace(RectangularRegion(0 @ 0, 0, 1, 1))\n"
         "workspace = Workspace(RectangularRegion(0 @ 0, 0, 1, 1))\n", 2, 1, "workspace"),
        ("Fetch with colour 3\n", 1, 12, "colour"),
        ("x = (1 + 2\n", 2, 1, "')'"),
    ],
)
def test_parse_errors_cite_position(src, line, col, fragment):
    with pytest.raises(ParseError) as e:
        parse_scenario(src, TYPES)
    assert (e.value.line, e.value.col) == (line, col), str(e.value)
    assert fragment in str(e.value)


def test_deg_binds_after_product():
    ast = parse_scenario("h = 2 * 45 deg\n", TYPES)
    assert ast.statements[0].value == n.Deg(n.BinOp("*", n.Num(2), n.Num(45)))


def test_objects_and_values_are_distinguished():
    ast = parse_scenario("ego = Fetch\nd = 2\nWaypoint ahead of ego by d\nWaypoint left of 1 @ 1\n", TYPES)
    ahead = ast.instances()[1].specifiers[0]
    assert ahead == n.AheadOf(n.ObjectRef("ego"), n.VarRef("d"))
    left = ast.instances()[2].specifiers[0]
    assert left == n.LeftOf(n.PointLit(n.Num(1), n.Num(1)))


def test_create_room_defaults():
    (stmt,) = parse_scenario("create_room(3, 2)\n", TYPES).statements
    assert stmt == n.CreateRoom(n.Num(3), n.Num(2), n.Num(0), n.Num(0), "NSWE")


# -- printer round trip over generated expressions --------------------------

_leaf = st.one_of(
    st.integers(0, 1000).map(n.Num),
    st.floats(0, 1e6, allow_nan=False, allow_infinity=False).map(n.Num),
    st.sampled_from(["a", "b"]).map(n.VarRef),
    st.sampled_from(n.ATTRIBUTES).map(lambda attr: n.AttrRef("ego", attr)),
)


def _extend(inner):
    return st.one_of(
        st.builds(n.BinOp, st.sampled_from("+-*/"), inner, inner),
        st.builds(n.Neg, inner),
        st.builds(n.Deg, inner),
        st.builds(n.Range, inner, inner),
        st.lists(inner, min_size=1, max_size=3).map(lambda xs: n.UniformChoice(tuple(xs))),
    )


expressions = st.recursive(_leaf, _extend, max_leaves=12)


@settings(max_examples=300, deadline=None)
@given(expressions, st.one_of(st.none(), expressions))
def test_printed_expressions_reparse_equal(x, y):
    value = x if y is None else n.PointLit(x, y)
    prelude = "a = 1\nb = 2\nego = Fetch\n"
    src = prelude + f"c = {format_expr(value)}\n"
    parsed = parse_scenario(src, TYPES).statements[-1].value
    assert parsed == value


@settings(max_examples=100, deadline=None)
@given(st.floats(-1e9, 1e9, allow_nan=False))
def test_number_literals_keep_value(v):
    (stmt,) = parse_scenario(f"x = {format_expr(n.Num(v))}\n", TYPES).statements
    got = stmt.value
    if isinstance(got, n.Neg):
        assert -got.inner.value == v
    else:
        assert got.value == v and math.copysign(1, got.value) == math.copysign(1, v) or v == 0
