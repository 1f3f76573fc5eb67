"""LTL formula terms.

Formulas are hash-consed: two structurally equal terms built through this
module are the same Python object, so equality is identity and hashing is
constant time. The smart constructors (``neg``, ``conj``, ``disj``,
``next_``, ``eventually``, ``always``, ``until``) assume canonical arguments
and always return canonical terms.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Iterator

TT = "tt"
FF = "ff"
ATOM = "atom"
NOT = "not"
AND = "and"
OR = "or"
NEXT = "X"
FINALLY = "F"
GLOBALLY = "G"
UNTIL = "U"

_RANK = {TT: 0, FF: 1, ATOM: 2, NOT: 3, NEXT: 4, FINALLY: 5, GLOBALLY: 6, UNTIL: 7, AND: 8, OR: 9}
TEMPORAL_OPS = frozenset({NEXT, FINALLY, GLOBALLY, UNTIL})


class Formula:
    """An immutable, interned LTL syntax node.

    ``op`` is the node kind, ``args`` the child formulas and ``name`` the
    proposition name for atoms. Instances order by a structural key
    (node-kind rank, then atom name, then children), which fixes the
    canonical order of conjuncts and disjuncts.
    """

    __slots__ = ("op", "args", "name", "_hash", "_key")
    _table: dict[tuple, "Formula"] = {}

    def __new__(cls, op: str, args: tuple["Formula", ...] = (), name: str = "") -> "Formula":
        ident = (op, name, args)
        node = cls._table.get(ident)
        if node is None:
            if op not in _RANK:
                raise ValueError(f"unknown node kind {op!r}")
            node = object.__new__(cls)
            object.__setattr__(node, "op", op)
            object.__setattr__(node, "args", args)
            object.__setattr__(node, "name", name)
            object.__setattr__(node, "_hash", hash(ident))
            object.__setattr__(node, "_key", (_RANK[op], name, tuple(a._key for a in args)))
            cls._table[ident] = node
        return node

    def __setattr__(self, name, value):
        raise AttributeError("Formula is immutable")

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "Formula") -> bool:
        return self._key < other._key

    def __le__(self, other: "Formula") -> bool:
        return self._key <= other._key

    def __reduce__(self):
        return (Formula, (self.op, self.args, self.name))

    def __repr__(self) -> str:
        return f"Formula({render(self)!r})"

    def __str__(self) -> str:
        return render(self)

    @property
    def is_temporal(self) -> bool:
        return self.op in TEMPORAL_OPS

    def subformulas(self) -> Iterator["Formula"]:
        """Pre-order traversal, duplicates included."""
        stack = [self]
        while stack:
            f = stack.pop()
            yield f
            stack.extend(reversed(f.args))


TRUE = Formula(TT)
FALSE = Formula(FF)


def atom(name: str) -> Formula:
    return Formula(ATOM, (), name)


# -- smart constructors ------------------------------------------------------

def _is_gf(f: Formula) -> bool:
    return f.op == GLOBALLY and f.args[0].op == FINALLY


def _is_fg(f: Formula) -> bool:
    return f.op == FINALLY and f.args[0].op == GLOBALLY


def neg(f: Formula) -> Formula:
    if f is TRUE:
        return FALSE
    if f is FALSE:
        return TRUE
    if f.op == NOT:
        return f.args[0]
    return Formula(NOT, (f,))


def next_(f: Formula) -> Formula:
    # tt, ff, GF and FG are suffix-invariant
    if f is TRUE or f is FALSE or _is_gf(f) or _is_fg(f):
        return f
    return Formula(NEXT, (f,))


def eventually(f: Formula) -> Formula:
    if f is TRUE or f is FALSE or f.op == FINALLY or _is_gf(f):
        return f
    return Formula(FINALLY, (f,))


def always(f: Formula) -> Formula:
    if f is TRUE or f is FALSE or f.op == GLOBALLY or _is_fg(f):
        return f
    return Formula(GLOBALLY, (f,))


def until(lhs: Formula, rhs: Formula) -> Formula:
    if rhs is TRUE or rhs is FALSE or lhs is FALSE or lhs is rhs:
        return rhs
    if lhs is TRUE:
        return eventually(rhs)
    return Formula(UNTIL, (lhs, rhs))


def _junction(op: str, args: Iterable[Formula]) -> Formula:
    unit, zero = (TRUE, FALSE) if op == AND else (FALSE, TRUE)
    items: set[Formula] = set()
    for a in args:
        if a is zero:
            return zero
        if a is unit:
            continue
        if a.op == op:
            items.update(a.args)
        else:
            items.add(a)
    for a in items:
        if a.op == NOT and a.args[0] in items:
            return zero
    ordered = sorted(items)
    if len(ordered) > 1:
        dropped: set[int] = set()
        for i, a in enumerate(ordered):
            for j, b in enumerate(ordered):
                if i == j or j in dropped:
                    continue
                # conjunction: a is redundant if b implies it; disjunction: if a implies b
                if (op == AND and implies_syntactic(b, a)) or (op == OR and implies_syntactic(a, b)):
                    dropped.add(i)
                    break
        ordered = [a for i, a in enumerate(ordered) if i not in dropped]
    if not ordered:
        return unit
    if len(ordered) == 1:
        return ordered[0]
    return Formula(op, tuple(ordered))


def conj(*args: Formula) -> Formula:
    return _junction(AND, args)


def disj(*args: Formula) -> Formula:
    return _junction(OR, args)


def implies(lhs: Formula, rhs: Formula) -> Formula:
    return disj(neg(lhs), rhs)


_BUILD = {
    NOT: lambda a: neg(a[0]),
    AND: lambda a: conj(*a),
    OR: lambda a: disj(*a),
    NEXT: lambda a: next_(a[0]),
    FINALLY: lambda a: eventually(a[0]),
    GLOBALLY: lambda a: always(a[0]),
    UNTIL: lambda a: until(a[0], a[1]),
}


def rebuild(op: str, args: Iterable[Formula]) -> Formula:
    """Apply the smart constructor for ``op`` to canonical ``args``."""
    return _BUILD[op](tuple(args))


@lru_cache(maxsize=None)
def canonicalize(f: Formula) -> Formula:
    """Return the canonical representative of ``f``.

    Rebuilding bottom-up through the smart constructors flattens, sorts,
    deduplicates, folds constants, removes double negation, collapses
    FF/GG (and the suffix-invariant GF/FG under F, G, X) and prunes
    conjuncts/disjuncts subsumed by a sibling.
    """
    if not f.args:
        return f
    return rebuild(f.op, (canonicalize(a) for a in f.args))


# -- syntactic implication ---------------------------------------------------

def _absorbs_future(g: Formula) -> bool:
    # g holds now iff it holds at some later point that the left side reaches
    return g.op == FINALLY or _is_gf(g)


@lru_cache(maxsize=None)
def implies_syntactic(f: Formula, g: Formula) -> bool:
    """Sound, incomplete check that ``f`` entails ``g``.

    ``False`` carries no semantic claim.
    """
    if f is g or g is TRUE or f is FALSE:
        return True
    if f.op == AND and any(implies_syntactic(c, g) for c in f.args):
        return True
    if g.op == OR and any(implies_syntactic(f, d) for d in g.args):
        return True
    if f.op == OR and all(implies_syntactic(d, g) for d in f.args):
        return True
    if g.op == AND and all(implies_syntactic(f, c) for c in g.args):
        return True
    if g.op == FINALLY and implies_syntactic(f, g.args[0]):
        return True
    if f.op == GLOBALLY:
        if implies_syntactic(f.args[0], g):
            return True
        if g.op in (GLOBALLY, NEXT) and implies_syntactic(f, g.args[0]):
            return True
    if f.op == NEXT:
        if g.op == NEXT and implies_syntactic(f.args[0], g.args[0]):
            return True
        if _absorbs_future(g) and implies_syntactic(f.args[0], g):
            return True
    if f.op == FINALLY and _absorbs_future(g) and implies_syntactic(f.args[0], g):
        return True
    if f.op == UNTIL:
        lhs, rhs = f.args
        if implies_syntactic(rhs, g) and (_absorbs_future(g) or implies_syntactic(lhs, g)):
            return True
        if g.op == UNTIL and implies_syntactic(lhs, g.args[0]) and implies_syntactic(rhs, g.args[1]):
            return True
    if g.op == UNTIL and implies_syntactic(f, g.args[1]):
        return True
    if f.op == NOT and g.op == NOT and implies_syntactic(g.args[0], f.args[0]):
        return True
    return False


# -- rendering ----------------------------------------------------------------

_SIMPLE = (TT, FF, ATOM)


def _wrap_binary(f: Formula) -> str:
    s = render(f)
    return s if f.op in _SIMPLE else f"({s})"


def _wrap_unary(f: Formula) -> str:
    s = render(f)
    return s if f.op in _SIMPLE or f.op in (NOT, NEXT, FINALLY, GLOBALLY) else f"({s})"


def render(f: Formula) -> str:
    """ASCII text form; reparses to the same term."""
    op = f.op
    if op == TT:
        return "true"
    if op == FF:
        return "false"
    if op == ATOM:
        return f.name
    if op == NOT:
        return "!" + _wrap_unary(f.args[0])
    if op in (NEXT, FINALLY, GLOBALLY):
        return f"{op} {_wrap_unary(f.args[0])}"
    if op == UNTIL:
        return f"{_wrap_binary(f.args[0])} U {_wrap_binary(f.args[1])}"
    sep = " & " if op == AND else " | "
    return sep.join(_wrap_binary(a) for a in f.args)


# -- measures -----------------------------------------------------------------

def atoms(f: Formula) -> frozenset[str]:
    return frozenset(g.name for g in f.subformulas() if g.op == ATOM)


@lru_cache(maxsize=None)
def height(f: Formula) -> int:
    """Syntax tree height; atoms and constants have height 1."""
    return 1 + max((height(a) for a in f.args), default=0)


def count_junctions(f: Formula, op: str) -> int:
    """Binary-equivalent count of ``op`` nodes: an n-ary node counts n - 1."""
    return sum(len(g.args) - 1 for g in f.subformulas() if g.op == op)


def is_propositional(f: Formula) -> bool:
    return not any(g.is_temporal for g in f.subformulas())


def has_op(f: Formula, op: str) -> bool:
    return any(g.op == op for g in f.subformulas())
