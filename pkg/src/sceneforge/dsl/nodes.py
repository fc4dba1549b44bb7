"""Scenario syntax tree.

Source positions are kept for error messages but excluded from equality,
so a re-parsed pretty-print compares equal to the original tree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

ATTRIBUTES = ("position", "heading", "width", "length", "height", "z")
WITH_PROPERTIES = ("allowCollisions", "z", "width", "length")
SETTABLE_PROPERTIES = ("allowCollisions", "z")
SIDES = "NSWE"


def _pos():
    return field(default=(0, 0), compare=False, repr=False)


# -- expressions ----------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: Union[int, float]
    pos: tuple = _pos()


@dataclass(frozen=True)
class Bool:
    value: bool
    pos: tuple = _pos()


@dataclass(frozen=True)
class PointLit:
    x: "Expr"
    y: "Expr"
    pos: tuple = _pos()


@dataclass(frozen=True)
class Range:
    lo: "Expr"
    hi: "Expr"
    pos: tuple = _pos()


@dataclass(frozen=True)
class UniformChoice:
    values: tuple
    pos: tuple = _pos()


@dataclass(frozen=True)
class Deg:
    inner: "Expr"
    pos: tuple = _pos()


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"
    pos: tuple = _pos()


@dataclass(frozen=True)
class Neg:
    inner: "Expr"
    pos: tuple = _pos()


@dataclass(frozen=True)
class VarRef:
    name: str
    pos: tuple = _pos()


@dataclass(frozen=True)
class AttrRef:
    obj: str
    attr: str
    pos: tuple = _pos()


@dataclass(frozen=True)
class RectRegion:
    center: "Expr"
    heading: "Expr"
    width: "Expr"
    length: "Expr"
    pos: tuple = _pos()


Expr = Union[Num, Bool, PointLit, Range, UniformChoice, Deg, BinOp, Neg, VarRef, AttrRef]


@dataclass(frozen=True)
class ObjectRef:
    """Operand of left/right/ahead/behind naming an already-placed object."""

    name: str
    pos: tuple = _pos()


Operand = Union[Expr, ObjectRef]


# -- specifiers -----------------------------------------------------------


@dataclass(frozen=True)
class At:
    point: Expr
    pos: tuple = _pos()


@dataclass(frozen=True)
class OffsetBy:
    vector: Expr
    pos: tuple = _pos()


@dataclass(frozen=True)
class Facing:
    heading: Expr
    pos: tuple = _pos()


@dataclass(frozen=True)
class LeftOf:
    operand: Operand
    pos: tuple = _pos()


@dataclass(frozen=True)
class RightOf:
    operand: Operand
    pos: tuple = _pos()


@dataclass(frozen=True)
class AheadOf:
    operand: Operand
    by: Optional[Expr] = None
    pos: tuple = _pos()


@dataclass(frozen=True)
class Behind:
    operand: Operand
    by: Optional[Expr] = None
    pos: tuple = _pos()


@dataclass(frozen=True)
class InRegion:
    region: str
    pos: tuple = _pos()


@dataclass(frozen=True)
class With:
    prop: str
    value: Expr
    pos: tuple = _pos()


Specifier = Union[At, OffsetBy, Facing, LeftOf, RightOf, AheadOf, Behind, InRegion, With]
POSITION_SPECIFIERS = (At, OffsetBy, LeftOf, RightOf, AheadOf, Behind, InRegion)


# -- statements -----------------------------------------------------------


@dataclass(frozen=True)
class Assign:
    name: str
    value: Union[Expr, RectRegion]
    pos: tuple = _pos()


@dataclass(frozen=True)
class InstanceDecl:
    name: Optional[str]
    type_name: str
    specifiers: tuple
    binding: str = ""
    pos: tuple = _pos()


@dataclass(frozen=True)
class WorkspaceDecl:
    region: Union[RectRegion, VarRef]
    pos: tuple = _pos()


@dataclass(frozen=True)
class PropertySet:
    obj: str
    prop: str
    value: Expr
    pos: tuple = _pos()


@dataclass(frozen=True)
class CreateRoom:
    length: Expr
    width: Expr
    x: Expr
    y: Expr
    sides: str
    pos: tuple = _pos()


Statement = Union[Assign, InstanceDecl, WorkspaceDecl, PropertySet, CreateRoom]


@dataclass(frozen=True)
class ScenarioAst:
    statements: tuple = ()

    def instances(self):
        return [s for s in self.statements if isinstance(s, InstanceDecl)]

    def count(self, kind) -> int:
        return sum(isinstance(s, kind) for s in self.statements)
