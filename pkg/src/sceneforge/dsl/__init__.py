"""Scenario language front end: tokens, syntax tree, parser and printer."""

from .lexer import KEYWORDS, Token, tokenize
from .nodes import ScenarioAst
from .parser import parse_expr, parse_scenario
from .printer import format_expr, format_scenario

__all__ = [
    "KEYWORDS",
    "ScenarioAst",
    "Token",
    "format_expr",
    "format_scenario",
    "parse_expr",
    "parse_scenario",
    "tokenize",
]
