"""Tokenizer for Lisp-style planning description files.

Token classes: parentheses, names (identifiers), variables (leading `?`),
keywords (leading `:`), and the bare dash used as the type separator.
`;` starts a comment running to end of line.  Positions are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

__all__ = ["TokenKind", "Token", "LexError", "tokenize"]


class TokenKind(Enum):
    LPAREN = "("
    RPAREN = ")"
    NAME = "name"
    VARIABLE = "variable"
    KEYWORD = "keyword"
    DASH = "-"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str  # normalized (lowercase) lexeme, including any ?/: sigil
    line: int
    col: int

    def __str__(self) -> str:
        return self.text


class LexError(Exception):
    def __init__(self, message: str, line: int, col: int):
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {message}")


def _is_ident_start(c: str) -> bool:
    return c.isascii() and c.isalpha()


def _is_ident_char(c: str) -> bool:
    return c.isascii() and (c.isalnum() or c in "-_")


def tokenize(text: str) -> list[Token]:
    """Split `text` into tokens; raises LexError on characters outside the grammar."""
    tokens: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
        elif c.isspace():
            i += 1
            col += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c == "(":
            tokens.append(Token(TokenKind.LPAREN, "(", line, col))
            i += 1
            col += 1
        elif c == ")":
            tokens.append(Token(TokenKind.RPAREN, ")", line, col))
            i += 1
            col += 1
        elif c == "-" :
            tokens.append(Token(TokenKind.DASH, "-", line, col))
            i += 1
            col += 1
        elif c in "?:":
            start_line, start_col = line, col
            if i + 1 >= n or not _is_ident_start(text[i + 1]):
                raise LexError(f"expected identifier after {c!r}", line, col)
            j = i + 1
            while j < n and _is_ident_char(text[j]):
                j += 1
            lexeme = text[i:j].lower()
            kind = TokenKind.VARIABLE if c == "?" else TokenKind.KEYWORD
            tokens.append(Token(kind, lexeme, start_line, start_col))
            col += j - i
            i = j
        elif _is_ident_start(c):
            start_col = col
            j = i
            while j < n and _is_ident_char(text[j]):
                j += 1
            tokens.append(Token(TokenKind.NAME, text[i:j].lower(), line, start_col))
            col += j - i
            i = j
        else:
            raise LexError(f"illegal character {c!r}", line, col)
    return tokens
