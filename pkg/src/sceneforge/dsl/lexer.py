from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..errors import LexError

KEYWORDS = frozenset(
    {
        "at", "offset", "by", "facing", "left", "right", "ahead", "behind",
        "of", "in", "with", "deg", "workspace", "True", "False",
        # constructors
        "Range", "Uniform", "Workspace", "RectangularRegion", "create_room",
    }
)

PUNCT = {
    "=": "EQ",
    "(": "LPAREN",
    ")": "RPAREN",
    ",": "COMMA",
    "@": "AT",
    "+": "PLUS",
    "-": "MINUS",
    "*": "STAR",
    "/": "SLASH",
    ".": "DOT",
}

_NUMBER = re.compile(r"(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_STRING = re.compile(r"'([^'\\\n]*)'|\"([^\"\\\n]*)\"")


@dataclass(frozen=True)
class Token:
    kind: str
    value: object
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)

    def __repr__(self):
        return f"{self.kind} {self.value!r}@{self.line}:{self.col}"


def tokenize(text: str) -> list[Token]:
    """Split scenario text into tokens.

    Blank and comment-only lines produce nothing; a NEWLINE token ends each
    line that produced tokens. Newlines inside parentheses are ignored.
    """
    tokens: list[Token] = []
    depth = 0
    line_has_tokens = False
    line, line_start = 1, 0
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        col = i - line_start + 1
        if ch == "\n":
            if depth == 0 and line_has_tokens:
                tokens.append(Token("NEWLINE", "\n", line, col))
                line_has_tokens = False
            line += 1
            line_start = i + 1
            i += 1
            continue
        if ch in " \t\r\f":
            i += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == "\\" and text[i + 1 : i + 2] == "\n":
            line += 1
            i += 2
            line_start = i
            continue
        m = _NUMBER.match(text, i)
        if m and (ch.isdigit() or ch == "."):
            raw = m.group()
            value = float(raw) if any(c in raw for c in ".eE") else int(raw)
            tokens.append(Token("NUM", value, line, col))
            i = m.end()
            line_has_tokens = True
            continue
        m = _IDENT.match(text, i)
        if m:
            word = m.group()
            tokens.append(Token("KW" if word in KEYWORDS else "IDENT", word, line, col))
            i = m.end()
            line_has_tokens = True
            continue
        m = _STRING.match(text, i)
        if m:
            value = m.group(1) if m.group(1) is not None else m.group(2)
            tokens.append(Token("STRING", value, line, col))
            i = m.end()
            line_has_tokens = True
            continue
        if ch in PUNCT:
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth = max(0, depth - 1)
            tokens.append(Token(PUNCT[ch], ch, line, col))
            i += 1
            line_has_tokens = True
            continue
        if ch in "'\"":
            raise LexError("unterminated string", line, col)
        raise LexError(f"illegal character {ch!r}", line, col)
    return tokens
