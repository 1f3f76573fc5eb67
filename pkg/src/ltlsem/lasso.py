"""Letters, ultimately periodic words and the satisfaction oracle."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import chain, combinations
from typing import Iterable, Sequence

from .formula import (
    AND,
    ATOM,
    FF,
    FINALLY,
    GLOBALLY,
    NEXT,
    NOT,
    OR,
    TT,
    UNTIL,
    Formula,
)

Letter = frozenset  # frozenset[str]
EMPTY = frozenset()


def letter(names: Iterable[str] = ()) -> frozenset[str]:
    return frozenset(names)


def letter_key(sigma: frozenset[str]) -> tuple:
    return (len(sigma), tuple(sorted(sigma)))


def sorted_letters(letters: Iterable[frozenset[str]]) -> list[frozenset[str]]:
    return sorted(set(letters), key=letter_key)


def powerset(ap: Iterable[str]) -> list[frozenset[str]]:
    """All letters over ``ap`` in (size, names) order."""
    names = sorted(set(ap))
    subsets = chain.from_iterable(combinations(names, k) for k in range(len(names) + 1))
    return [frozenset(s) for s in subsets]


def format_letter(sigma: frozenset[str]) -> str:
    return ",".join(sorted(sigma))


def parse_letter(text: str) -> frozenset[str]:
    """``"a,b"`` -> {a, b}; the empty string is the empty letter."""
    return frozenset(p.strip() for p in text.split(",") if p.strip())


def parse_word(text: str) -> tuple[frozenset[str], ...]:
    """Letters separated by ``;``; an empty segment is the empty letter.

    The empty string is the empty word.
    """
    if text == "":
        return ()
    return tuple(parse_letter(seg) for seg in text.split(";"))


@dataclass(frozen=True)
class LassoWord:
    """The infinite word ``prefix . loop^omega``."""

    prefix: tuple[frozenset[str], ...]
    loop: tuple[frozenset[str], ...]

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(frozenset(s) for s in self.prefix))
        object.__setattr__(self, "loop", tuple(frozenset(s) for s in self.loop))
        if not self.loop:
            raise ValueError("lasso loop must be nonempty")

    def __len__(self) -> int:
        return len(self.prefix) + len(self.loop)

    def __getitem__(self, i: int) -> frozenset[str]:
        u = len(self.prefix)
        if i < u:
            return self.prefix[i]
        return self.loop[(i - u) % len(self.loop)]

    def successor(self, i: int) -> int:
        """Next position among the ``len(self)`` distinct ones."""
        return i + 1 if i + 1 < len(self) else len(self.prefix)

    def prepend(self, sigma: Iterable[str]) -> "LassoWord":
        return LassoWord((frozenset(sigma),) + self.prefix, self.loop)

    def letters(self) -> set[frozenset[str]]:
        return set(self.prefix) | set(self.loop)


def _fixpoint(w: LassoWord, base: Sequence[bool], step) -> list[bool]:
    n, u = len(w), len(w.prefix)
    # base is a lower bound of a least fixpoint and an upper bound of a greatest one
    res = list(base)
    # two backward sweeps settle the loop, one more settles the prefix
    for _ in range(2):
        for i in range(n - 1, u - 1, -1):
            res[i] = step(i, res[w.successor(i)])
    for i in range(u - 1, -1, -1):
        res[i] = step(i, res[i + 1])
    return res


def eval_positions(w: LassoWord, f: Formula, memo: dict | None = None) -> list[bool]:
    """Truth value of ``f`` at each of the ``len(w)`` distinct positions."""
    if memo is None:
        memo = {}
    hit = memo.get(f)
    if hit is not None:
        return hit
    n = len(w)
    op = f.op
    if op == TT:
        res = [True] * n
    elif op == FF:
        res = [False] * n
    elif op == ATOM:
        res = [f.name in w[i] for i in range(n)]
    elif op == NOT:
        res = [not v for v in eval_positions(w, f.args[0], memo)]
    elif op == AND:
        parts = [eval_positions(w, a, memo) for a in f.args]
        res = [all(p[i] for p in parts) for i in range(n)]
    elif op == OR:
        parts = [eval_positions(w, a, memo) for a in f.args]
        res = [any(p[i] for p in parts) for i in range(n)]
    elif op == NEXT:
        sub = eval_positions(w, f.args[0], memo)
        res = [sub[w.successor(i)] for i in range(n)]
    elif op == FINALLY:
        sub = eval_positions(w, f.args[0], memo)
        res = _fixpoint(w, sub, lambda i, nxt: sub[i] or nxt)
    elif op == GLOBALLY:
        sub = eval_positions(w, f.args[0], memo)
        res = _fixpoint(w, sub, lambda i, nxt: sub[i] and nxt)
    elif op == UNTIL:
        lhs = eval_positions(w, f.args[0], memo)
        rhs = eval_positions(w, f.args[1], memo)
        res = _fixpoint(w, rhs, lambda i, nxt: rhs[i] or (lhs[i] and nxt))
    else:  # pragma: no cover
        raise ValueError(f"unknown node kind {op!r}")
    memo[f] = res
    return res


def eval_lasso(w: LassoWord, f: Formula) -> bool:
    """Decide ``w |= f``."""
    return eval_positions(w, f)[0]
