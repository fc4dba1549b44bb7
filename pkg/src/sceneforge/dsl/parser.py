"""Recursive-descent parser for the scenario language.

Grammar (newlines end statements, specifiers are comma separated)::

    scenario   := statement*
    statement  := workspace | createroom | propset | assign | instance
    workspace  := "workspace" "=" "Workspace" "(" region ")"
    region     := "RectangularRegion" "(" point "," expr "," expr "," expr ")"
    createroom := "create_room" "(" expr "," expr ["," "x" "=" expr] ["," "y" "=" expr]
                  ["," "sides" "=" STRING] ")"
    propset    := IDENT "." IDENT "=" expr
    assign     := IDENT "=" (expr | region)
    instance   := [IDENT "="] TYPENAME [specifier ("," specifier)*]
    specifier  := "at" point | "offset" "by" point | "facing" expr
                | ("left" | "right") "of" operand
                | ("ahead" "of" | "behind") operand ["by" expr]
                | "in" IDENT | "with" IDENT expr
    point      := expr ["@" expr]
    expr       := term (("+" | "-") term)*
    term       := unary (("*" | "/") unary | "deg")*
    unary      := "-" unary | primary
    primary    := NUM | "True" | "False" | "Range" "(" expr "," expr ")"
                | "Uniform" "(" point ("," point)* ")" | IDENT ["." IDENT]
                | "(" point ")"
"""

from __future__ import annotations

from collections import Counter
from typing import Callable, Iterable

from ..errors import ParseError
from . import nodes as n
from .lexer import Token, tokenize

SPECIFIER_KEYWORDS = ("at", "offset", "facing", "left", "right", "ahead", "behind", "in", "with")


def _canonicalizer(type_names) -> Callable[[str], str | None]:
    if hasattr(type_names, "canonical"):
        return type_names.canonical
    names = list(type_names)
    exact = set(names)
    folded: dict[str, list[str]] = {}
    for name in names:
        folded.setdefault(name.lower(), []).append(name)

    def canonical(name: str) -> str | None:
        if name in exact:
            return name
        hits = folded.get(name.lower(), [])
        return hits[0] if len(hits) == 1 else None

    return canonical


def _end_position(text: str | None, tokens: list[Token]) -> tuple[int, int]:
    if text is not None:
        lines = text.split("\n")
        return len(lines), len(lines[-1]) + 1
    if tokens:
        last = tokens[-1]
        return last.line, last.col + len(str(last.value))
    return 1, 1


def _describe(tok: Token | None) -> str:
    if tok is None:
        return "end of input"
    if tok.kind == "NEWLINE":
        return "end of line"
    if tok.kind == "STRING":
        return f"string {tok.value!r}"
    return f"{tok.value!r}"


class Parser:
    def __init__(self, tokens: list[Token], type_names, text: str | None = None):
        self.toks = tokens
        self.i = 0
        self.canonical = _canonicalizer(type_names)
        self.end = _end_position(text, tokens)
        self.symbols: dict[str, str] = {}
        self.has_workspace = False
        self.unnamed = Counter()

    # -- token helpers --

    def peek(self, k: int = 0) -> Token | None:
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def at(self, kind: str, value=None, k: int = 0) -> bool:
        t = self.peek(k)
        return t is not None and t.kind == kind and (value is None or t.value == value)

    def at_end_of_statement(self) -> bool:
        return self.peek() is None or self.at("NEWLINE")

    def advance(self) -> Token:
        t = self.peek()
        if t is None:
            self.error("unexpected end of input")
        self.i += 1
        return t

    def position(self, tok: Token | None = None) -> tuple[int, int]:
        tok = tok if tok is not None else self.peek()
        return (tok.line, tok.col) if tok is not None else self.end

    def error(self, message: str, tok: Token | None = None):
        line, col = self.position(tok)
        raise ParseError(message, line, col)

    def expect(self, kind: str, value=None, what: str | None = None) -> Token:
        if not self.at(kind, value):
            wanted = what or (repr(value) if value is not None else kind.lower())
            self.error(f"expected {wanted}, got {_describe(self.peek())}")
        return self.advance()

    # -- statements --

    def parse(self) -> n.ScenarioAst:
        statements = []
        while self.peek() is not None:
            if self.at("NEWLINE"):
                self.advance()
                continue
            statements.append(self.statement())
            if not self.at_end_of_statement():
                self.error(f"expected ',' or end of line, got {_describe(self.peek())}")
        return n.ScenarioAst(tuple(statements))

    def statement(self):
        t = self.peek()
        if self.at("KW", "workspace"):
            return self.workspace()
        if self.at("KW", "create_room"):
            return self.create_room()
        if t.kind == "IDENT":
            if self.at("DOT", k=1):
                return self.property_set()
            if self.at("EQ", k=1):
                target = self.peek(2)
                if target is not None and target.kind == "IDENT":
                    if self.canonical(target.value) is not None:
                        return self.instance(named=True)
                    if target.value not in self.symbols and target.value[:1].isupper() and not self.at("DOT", k=3):
                        self.error(f"unknown type name {target.value!r}", target)
                if self.at("KW", "RectangularRegion", k=2):
                    return self.assign(region=True)
                return self.assign(region=False)
            if self.canonical(t.value) is not None:
                return self.instance(named=False)
            if t.value in self.symbols:
                self.error(f"expected '=' or '.' after {t.value!r}, got {_describe(self.peek(1))}", self.peek(1))
            self.error(f"unknown type name {t.value!r}", t)
        self.error(f"expected a statement, got {_describe(t)}")

    def workspace(self) -> n.WorkspaceDecl:
        start = self.advance()
        if self.has_workspace:
            self.error("workspace is already defined", start)
        self.expect("EQ", what="'='")
        self.expect("KW", "Workspace")
        self.expect("LPAREN", what="'('")
        if self.at("KW", "RectangularRegion"):
            region = self.rect_region()
        else:
            region = self.region_ref()
        self.expect("RPAREN", what="')'")
        self.has_workspace = True
        self.symbols["workspace"] = "region"
        return n.WorkspaceDecl(region, pos=self.position(start))

    def region_ref(self) -> n.VarRef:
        t = self.expect("IDENT", what="a region")
        if self.symbols.get(t.value) != "region":
            self.error(f"{t.value!r} is not a defined region", t)
        return n.VarRef(t.value, pos=(t.line, t.col))

    def rect_region(self) -> n.RectRegion:
        start = self.expect("KW", "RectangularRegion")
        self.expect("LPAREN", what="'('")
        center = self.point()
        self.expect("COMMA", what="','")
        heading = self.expr()
        self.expect("COMMA", what="','")
        width = self.expr()
        self.expect("COMMA", what="','")
        length = self.expr()
        self.expect("RPAREN", what="')'")
        return n.RectRegion(center, heading, width, length, pos=(start.line, start.col))

    def create_room(self) -> n.CreateRoom:
        start = self.advance()
        self.expect("LPAREN", what="'('")
        length = self.expr()
        self.expect("COMMA", what="','")
        width = self.expr()
        kwargs: dict = {}
        while self.at("COMMA"):
            self.advance()
            key = self.expect("IDENT", what="x=, y= or sides=")
            if key.value not in ("x", "y", "sides"):
                self.error(f"unknown create_room argument {key.value!r}", key)
            if key.value in kwargs:
                self.error(f"repeated create_room argument {key.value!r}", key)
            self.expect("EQ", what="'='")
            if key.value == "sides":
                tok = self.expect("STRING", what="a sides string such as 'NSWE'")
                _check_sides(tok.value, tok)
                kwargs["sides"] = tok.value
            else:
                kwargs[key.value] = self.expr()
        self.expect("RPAREN", what="')'")
        return n.CreateRoom(
            length,
            width,
            kwargs.get("x", n.Num(0)),
            kwargs.get("y", n.Num(0)),
            kwargs.get("sides", n.SIDES),
            pos=(start.line, start.col),
        )

    def property_set(self) -> n.PropertySet:
        obj = self.advance()
        if self.symbols.get(obj.value) != "object":
            self.error(f"{obj.value!r} is not a defined object", obj)
        self.expect("DOT")
        prop = self.expect("IDENT", what="a property name")
        if prop.value not in n.SETTABLE_PROPERTIES:
            self.error(f"property {prop.value!r} cannot be assigned (allowed: allowCollisions, z)", prop)
        self.expect("EQ", what="'='")
        value = self.expr()
        return n.PropertySet(obj.value, prop.value, value, pos=(obj.line, obj.col))

    def assign(self, region: bool) -> n.Assign:
        name = self.advance()
        if self.symbols.get(name.value) == "object":
            self.error(f"{name.value!r} already names an object", name)
        if self.canonical(name.value) is not None:
            self.error(f"{name.value!r} is a model type name", name)
        self.expect("EQ")
        value = self.rect_region() if region else self.point()
        self.symbols[name.value] = "region" if region else "value"
        return n.Assign(name.value, value, pos=(name.line, name.col))

    def instance(self, named: bool) -> n.InstanceDecl:
        start = self.peek()
        name = None
        if named:
            name_tok = self.advance()
            name = name_tok.value
            if name in self.symbols:
                kind = self.symbols[name]
                what = "an object" if kind == "object" else "a variable"
                self.error(f"{name!r} is already defined as {what}", name_tok)
            self.expect("EQ")
        type_tok = self.advance()
        type_name = self.canonical(type_tok.value)

        specs = []
        if not self.at_end_of_statement():
            specs.append(self.specifier())
            while self.at("COMMA"):
                self.advance()
                specs.append(self.specifier())
        self._check_specifiers(specs)

        if name is None:
            binding = f"{type_name}#{self.unnamed[type_name]}"
            self.unnamed[type_name] += 1
        else:
            binding = name
        self.symbols[binding] = "object"
        return n.InstanceDecl(name, type_name, tuple(specs), binding, pos=(start.line, start.col))

    def _check_specifiers(self, specs):
        position = facing = None
        props = set()
        for s in specs:
            if isinstance(s, n.POSITION_SPECIFIERS):
                if position is not None:
                    self._error_at(s, "duplicate position specifier (only one of at/offset by/left of/right of/ahead of/behind/in is allowed)")
                position = s
            elif isinstance(s, n.Facing):
                if facing is not None:
                    self._error_at(s, "duplicate facing specifier")
                facing = s
            elif isinstance(s, n.With):
                if s.prop in props:
                    self._error_at(s, f"property {s.prop!r} specified twice")
                props.add(s.prop)

    def _error_at(self, node, message):
        line, col = node.pos
        raise ParseError(message, line, col)

    # -- specifiers --

    def specifier(self):
        t = self.peek()
        pos = self.position(t)
        if t is None or t.kind != "KW" or t.value not in SPECIFIER_KEYWORDS:
            self.error(
                "expected a specifier (at, offset by, facing, left of, right of, ahead of, behind, in, with), "
                f"got {_describe(t)}"
            )
        word = self.advance().value
        if word == "at":
            return n.At(self.point(), pos=pos)
        if word == "offset":
            self.expect("KW", "by")
            return n.OffsetBy(self.point(), pos=pos)
        if word == "facing":
            return n.Facing(self.expr(), pos=pos)
        if word in ("left", "right"):
            self.expect("KW", "of")
            operand = self.operand()
            return (n.LeftOf if word == "left" else n.RightOf)(operand, pos=pos)
        if word == "ahead":
            self.expect("KW", "of")
            operand = self.operand()
            return n.AheadOf(operand, self.optional_by(), pos=pos)
        if word == "behind":
            operand = self.operand()
            return n.Behind(operand, self.optional_by(), pos=pos)
        if word == "in":
            if self.at("KW", "workspace"):
                self.advance()
                return n.InRegion("workspace", pos=pos)
            return n.InRegion(self.region_ref().name, pos=pos)
        # with
        prop = self.expect("IDENT", what="a property name")
        if prop.value not in n.WITH_PROPERTIES:
            self.error(f"unknown property {prop.value!r} (allowed: {', '.join(n.WITH_PROPERTIES)})", prop)
        return n.With(prop.value, self.expr(), pos=pos)

    def optional_by(self):
        if self.at("KW", "by"):
            self.advance()
            return self.expr()
        return None

    def operand(self):
        e = self.point()
        if isinstance(e, n.VarRef) and self.symbols.get(e.name) == "object":
            return n.ObjectRef(e.name, pos=e.pos)
        return e

    # -- expressions --

    def point(self):
        x = self.expr()
        if self.at("AT"):
            at = self.advance()
            y = self.expr()
            return n.PointLit(x, y, pos=(at.line, at.col))
        return x

    def expr(self):
        left = self.term()
        while self.at("PLUS") or self.at("MINUS"):
            op = self.advance()
            left = n.BinOp(op.value, left, self.term(), pos=(op.line, op.col))
        return left

    def term(self):
        left = self.unary()
        while True:
            if self.at("STAR") or self.at("SLASH"):
                op = self.advance()
                left = n.BinOp(op.value, left, self.unary(), pos=(op.line, op.col))
            elif self.at("KW", "deg"):
                d = self.advance()
                left = n.Deg(left, pos=(d.line, d.col))
            else:
                return left

    def unary(self):
        if self.at("MINUS"):
            t = self.advance()
            return n.Neg(self.unary(), pos=(t.line, t.col))
        return self.primary()

    def primary(self):
        t = self.peek()
        if t is None or t.kind == "NEWLINE":
            self.error(f"expected an expression, got {_describe(t)}")
        pos = (t.line, t.col)
        if t.kind == "NUM":
            self.advance()
            return n.Num(t.value, pos=pos)
        if t.kind == "KW" and t.value in ("True", "False"):
            self.advance()
            return n.Bool(t.value == "True", pos=pos)
        if t.kind == "KW" and t.value == "Range":
            self.advance()
            self.expect("LPAREN", what="'('")
            lo = self.expr()
            self.expect("COMMA", what="','")
            hi = self.expr()
            self.expect("RPAREN", what="')'")
            return n.Range(lo, hi, pos=pos)
        if t.kind == "KW" and t.value == "Uniform":
            self.advance()
            self.expect("LPAREN", what="'('")
            values = [self.point()]
            while self.at("COMMA"):
                self.advance()
                values.append(self.point())
            self.expect("RPAREN", what="')'")
            return n.UniformChoice(tuple(values), pos=pos)
        if t.kind == "IDENT":
            self.advance()
            if self.at("DOT"):
                self.advance()
                attr = self.expect("IDENT", what="an attribute name")
                if self.symbols.get(t.value) != "object":
                    self.error(f"{t.value!r} is not a defined object", t)
                if attr.value not in n.ATTRIBUTES:
                    self.error(f"unknown attribute {attr.value!r} (allowed: {', '.join(n.ATTRIBUTES)})", attr)
                return n.AttrRef(t.value, attr.value, pos=pos)
            if t.value not in self.symbols:
                self.error(f"name {t.value!r} is used before it is defined", t)
            return n.VarRef(t.value, pos=pos)
        if t.kind == "LPAREN":
            self.advance()
            inner = self.point()
            self.expect("RPAREN", what="')'")
            return inner
        self.error(f"expected an expression, got {_describe(t)}")


def _check_sides(sides: str, tok: Token):
    if not sides:
        raise ParseError("sides must name at least one of N, S, W, E", tok.line, tok.col)
    for ch in sides:
        if ch not in n.SIDES:
            raise ParseError(f"invalid side {ch!r} (expected N, S, W or E)", tok.line, tok.col)
    if len(set(sides)) != len(sides):
        raise ParseError(f"repeated side letter in {sides!r}", tok.line, tok.col)


def parse_scenario(source: str | Iterable[Token], type_names) -> n.ScenarioAst:
    """Parse scenario text (or a token list) against the known model type names."""
    if isinstance(source, str):
        return Parser(tokenize(source), type_names, source).parse()
    return Parser(list(source), type_names).parse()


def parse_expr(text: str, symbols: dict[str, str] | None = None):
    """Parse a single point/expression; used by tests and tooling."""
    p = Parser(tokenize(text), (), text)
    p.symbols.update(symbols or {})
    e = p.point()
    if p.peek() is not None and not p.at("NEWLINE"):
        p.error(f"unexpected {_describe(p.peek())}")
    return e
