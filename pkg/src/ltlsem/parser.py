"""Text syntax for formulas.

Grammar, loosest binding first::

    imp   := or ('->' imp)?
    or    := and ('|' and)*
    and   := until ('&' until)*
    until := unary ('U' until)?
    unary := ('!' | 'X' | 'F' | 'G') unary | primary
    primary := 'true' | 'false' | ATOM | '(' imp ')'

Adjacent unary operators may be fused (``GF a`` reads as ``G F a``).
"""
from __future__ import annotations

import re

from .formula import (
    FALSE,
    TRUE,
    Formula,
    atom,
    canonicalize,
    conj,
    disj,
    eventually,
    always,
    neg,
    next_,
    until,
)


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownOperatorError(ParseError):
    pass


_TOKEN = re.compile(r"\s*(?:(->)|([!&|()])|([a-z][a-z0-9_]*)|([A-Z]+)|(\S))")
_UNARY = {"!": neg, "X": next_, "F": eventually, "G": always}


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        arrow, sym, word, upper, junk = m.groups()
        start = m.start(m.lastindex)
        if junk is not None:
            raise UnknownOperatorError(f"unknown operator {junk!r}", start)
        if upper is not None:
            if any(c not in "XFGU" for c in upper):
                raise UnknownOperatorError(f"unknown operator {upper!r}", start)
            tokens.extend((c, start + i) for i, c in enumerate(upper))
        else:
            tokens.append((arrow or sym or word, start))
        pos = m.end()
    tokens.append(("", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> str:
        return self.tokens[self.i][0]

    def pos(self) -> int:
        return self.tokens[self.i][1]

    def take(self) -> str:
        tok = self.tokens[self.i][0]
        self.i += 1
        return tok

    def expect(self, tok: str) -> None:
        if self.peek() != tok:
            found = self.peek() or "end of input"
            raise ParseError(f"expected {tok!r}, found {found!r}", self.pos())
        self.take()

    def imp(self) -> Formula:
        lhs = self.or_()
        if self.peek() == "->":
            self.take()
            return disj(neg(lhs), self.imp())
        return lhs

    def or_(self) -> Formula:
        parts = [self.and_()]
        while self.peek() == "|":
            self.take()
            parts.append(self.and_())
        return disj(*parts) if len(parts) > 1 else parts[0]

    def and_(self) -> Formula:
        parts = [self.until()]
        while self.peek() == "&":
            self.take()
            parts.append(self.until())
        return conj(*parts) if len(parts) > 1 else parts[0]

    def until(self) -> Formula:
        lhs = self.unary()
        if self.peek() == "U":
            self.take()
            return until(lhs, self.until())
        return lhs

    def unary(self) -> Formula:
        tok = self.peek()
        if tok in _UNARY:
            self.take()
            return _UNARY[tok](self.unary())
        return self.primary()

    def primary(self) -> Formula:
        tok, at = self.tokens[self.i]
        if tok == "(":
            self.take()
            inner = self.imp()
            self.expect(")")
            return inner
        if tok == "true":
            self.take()
            return TRUE
        if tok == "false":
            self.take()
            return FALSE
        if tok and (tok[0].isalpha() and tok[0].islower()):
            self.take()
            return atom(tok)
        raise ParseError(f"unexpected {tok or 'end of input'!r}", at)


def parse(text: str) -> Formula:
    """Parse ``text`` into a canonical formula."""
    p = _Parser(text)
    f = p.imp()
    if p.peek() != "":
        raise ParseError(f"unexpected {p.peek()!r}", p.pos())
    return canonicalize(f)
