"""Formula progression: what remains to be satisfied after one letter."""
from __future__ import annotations

from functools import lru_cache
from typing import Iterable

from .formula import (
    AND,
    ATOM,
    FALSE,
    FF,
    FINALLY,
    GLOBALLY,
    NEXT,
    NOT,
    OR,
    TRUE,
    TT,
    UNTIL,
    Formula,
    canonicalize,
    conj,
    disj,
    neg,
)


@lru_cache(maxsize=None)
def _prog(f: Formula, sigma: frozenset[str]) -> Formula:
    op = f.op
    if op == TT or op == FF:
        return f
    if op == ATOM:
        return TRUE if f.name in sigma else FALSE
    if op == NOT:
        return neg(_prog(f.args[0], sigma))
    if op == AND:
        return conj(*(_prog(a, sigma) for a in f.args))
    if op == OR:
        return disj(*(_prog(a, sigma) for a in f.args))
    if op == NEXT:
        return f.args[0]
    if op == FINALLY:
        return disj(_prog(f.args[0], sigma), f)
    if op == GLOBALLY:
        return conj(_prog(f.args[0], sigma), f)
    if op == UNTIL:
        lhs, rhs = f.args
        return disj(_prog(rhs, sigma), conj(_prog(lhs, sigma), f))
    raise ValueError(f"unknown node kind {op!r}")  # pragma: no cover


def prog(f: Formula, sigma: Iterable[str]) -> Formula:
    """Progress ``f`` through the letter ``sigma``; the result is canonical."""
    return _prog(canonicalize(f), frozenset(sigma))


def prog_word(f: Formula, word: Iterable[Iterable[str]]) -> Formula:
    for sigma in word:
        f = prog(f, sigma)
    return f
