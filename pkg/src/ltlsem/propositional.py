"""Propositional approximations of temporal formulas."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

import numpy as np

from .errors import TruenessCapError
from .formula import AND, ATOM, FF, NOT, OR, TT, UNTIL, Formula

DEFAULT_VARIABLE_CAP = 20


@dataclass(frozen=True)
class Trueness:
    """Exact ratio ``satisfying / 2**variables``."""

    satisfying: int
    variables: int

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.satisfying, 2**self.variables)

    @property
    def value(self) -> float:
        return self.satisfying / 2**self.variables

    def __float__(self) -> float:
        return self.value

    def __str__(self) -> str:
        return str(self.fraction)


def skeleton_variables(f: Formula) -> list[Formula]:
    """Maximal temporal subformulas and free atoms, in first-seen order.

    Canonically equal subformulas are the same object and share a variable.
    """
    seen: dict[Formula, None] = {}

    def walk(g: Formula) -> None:
        if g.is_temporal or g.op == ATOM:
            seen.setdefault(g)
            return
        for a in g.args:
            walk(a)

    walk(f)
    return list(seen)


@lru_cache(maxsize=65536)
def _trueness(f: Formula, cap: int) -> Trueness:
    variables = skeleton_variables(f)
    n = len(variables)
    if n > cap:
        raise TruenessCapError(f"{n} propositional variables exceed the cap of {cap}")
    rows = np.arange(2**n, dtype=np.int64)
    columns = {v: ((rows >> i) & 1).astype(bool) for i, v in enumerate(variables)}

    def ev(g: Formula) -> np.ndarray:
        hit = columns.get(g)
        if hit is not None:
            return hit
        if g.op == TT:
            return np.ones(rows.shape, dtype=bool)
        if g.op == FF:
            return np.zeros(rows.shape, dtype=bool)
        if g.op == NOT:
            return ~ev(g.args[0])
        parts = [ev(a) for a in g.args]
        return np.logical_and.reduce(parts) if g.op == AND else np.logical_or.reduce(parts)

    return Trueness(int(np.count_nonzero(ev(f))), n)


def trueness(f: Formula, cap: int = DEFAULT_VARIABLE_CAP) -> Trueness:
    """Satisfying-assignment ratio after abstracting temporal subformulas."""
    return _trueness(f, cap)


@lru_cache(maxsize=65536)
def _obligations(f: Formula, alphabet: frozenset) -> frozenset:
    op = f.op
    if op == TT:
        return alphabet
    if op == FF:
        return frozenset()
    if op == ATOM:
        return frozenset(s for s in alphabet if f.name in s)
    if op == NOT:
        return alphabet - _obligations(f.args[0], alphabet)
    if op == AND:
        out = alphabet
        for a in f.args:
            out = out & _obligations(a, alphabet)
        return out
    if op == OR:
        out = frozenset()
        for a in f.args:
            out = out | _obligations(a, alphabet)
        return out
    if op == UNTIL:
        return _obligations(f.args[1], alphabet)
    return _obligations(f.args[0], alphabet)  # X, F, G


def obligations(f: Formula, alphabet: Iterable[Iterable[str]]) -> frozenset[frozenset[str]]:
    """Letters of ``alphabet`` whose infinite repetition satisfies ``f``."""
    sigma = frozenset(frozenset(s) for s in alphabet)
    if not sigma:
        raise ValueError("alphabet must be nonempty")
    return _obligations(f, sigma)
