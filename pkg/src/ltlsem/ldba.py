"""Limit-deterministic Büchi automata with (Main, Breakpoint) state labels.

States are built on demand from formulas alone: the main formula is the
progressed task, the breakpoint collects the pending recurrent obligations
and emits the acceptance signal whenever it progresses to ``tt``.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial
from typing import Callable, Hashable, Iterable, Mapping, Sequence

import networkx as nx

from .errors import PathCountCapError, StateCapError
from .formula import (
    AND,
    FALSE,
    FINALLY,
    GLOBALLY,
    NEXT,
    NOT,
    OR,
    TRUE,
    UNTIL,
    Formula,
    always,
    atoms,
    canonicalize,
    conj,
    disj,
    eventually,
    is_propositional,
    neg,
    next_,
    rebuild,
    render,
)
from .lasso import LassoWord, format_letter, letter_key, powerset
from .progression import prog

INITIAL = "initial"
ACCEPTING = "accepting"
DEFAULT_STATE_CAP = 10_000


@dataclass(frozen=True)
class SemanticState:
    main: Formula
    breakpoint: Formula | None = None
    component: str = INITIAL
    accepting: bool = False

    def __post_init__(self):
        if self.component == INITIAL and (self.breakpoint is not None or self.accepting):
            raise ValueError("initial-component states carry no breakpoint and never accept")
        if self.component not in (INITIAL, ACCEPTING):
            raise ValueError(f"unknown component {self.component!r}")

    @property
    def is_rejecting_sink(self) -> bool:
        return self.main is FALSE

    @property
    def is_accepting_sink(self) -> bool:
        return self.main is TRUE

    @property
    def is_sink(self) -> bool:
        return self.main is FALSE or self.main is TRUE

    def sort_key(self) -> tuple:
        bp = self.breakpoint._key if self.breakpoint is not None else ()
        return (self.component != INITIAL, self.main._key, bp, self.accepting)

    def __str__(self) -> str:
        bp = "-" if self.breakpoint is None else render(self.breakpoint)
        flag = ", acc" if self.accepting else ""
        return f"<M: {render(self.main)} | B: {bp} | {self.component}{flag}>"


TT_SINK = SemanticState(TRUE, TRUE, ACCEPTING, True)
REJECT_INITIAL = SemanticState(FALSE, None, INITIAL, False)
REJECT_ACCEPTING = SemanticState(FALSE, None, ACCEPTING, False)


# -- breakpoint extraction -----------------------------------------------------

@lru_cache(maxsize=None)
def reset(f: Formula, in_disjunction: bool = False) -> Formula:
    """Pending recurrent obligations of ``f``.

    Safety parts are erased (their violation shows up in the main formula),
    eventualities and untils are kept whole, next-steps are shifted. A
    propositional disjunct is a one-step obligation and is kept: erasing it
    would let a self-regenerating sibling like ``F X b`` emit acceptance
    forever without ever being discharged.
    """
    op = f.op
    if is_propositional(f):
        return f if in_disjunction else TRUE
    if op == AND:
        return conj(*(reset(a, in_disjunction) for a in f.args))
    if op == OR:
        return disj(*(reset(a, True) for a in f.args))
    if op == GLOBALLY:
        return reset(f.args[0])
    if op in (FINALLY, UNTIL):
        return f
    if op == NEXT:
        return next_(reset(f.args[0], in_disjunction))
    return _reset_negated(f.args[0], in_disjunction)


def _reset_negated(g: Formula, in_disjunction: bool) -> Formula:
    # reset of !g, pushing the negation inwards
    op = g.op
    if is_propositional(g):
        return neg(g) if in_disjunction else TRUE
    if op == UNTIL:
        # !(a U b) is a weak until: its violation shows up in the main formula
        return TRUE
    if op == AND:
        return disj(*(_reset_negated(a, True) for a in g.args))
    if op == OR:
        return conj(*(_reset_negated(a, in_disjunction) for a in g.args))
    if op == FINALLY:
        return _reset_negated(g.args[0], False)
    if op == GLOBALLY:
        return eventually(neg(g.args[0]))
    if op == NEXT:
        return next_(_reset_negated(g.args[0], in_disjunction))
    return reset(g.args[0], in_disjunction)  # !!g


def is_cosafe(f: Formula) -> bool:
    """No G at positive polarity and no temporal operator under negation."""
    if is_propositional(f):
        return True
    if f.op == NOT:
        return False
    if f.op == GLOBALLY:
        return False
    return all(is_cosafe(a) for a in f.args)


def _as_safety(f: Formula) -> Formula | None:
    """``f`` as an and/or combination of G-formulas, or None."""
    if f.op == GLOBALLY:
        return f
    if f.op == NOT and f.args[0].op == FINALLY:
        return always(neg(f.args[0].args[0]))
    if f.op in (AND, OR):
        parts = [_as_safety(a) for a in f.args]
        if all(p is not None for p in parts):
            return rebuild(f.op, parts)
    return None


@lru_cache(maxsize=None)
def stabilize(f: Formula, positive: bool = True) -> Formula:
    """Replace every positive ``F G x`` by ``G x``.

    ``F`` over and/or combinations of G-formulas is treated alike.
    """
    if is_propositional(f):
        return f
    if positive and f.op == FINALLY:
        inner = _as_safety(f.args[0])
        if inner is not None:
            return stabilize(inner, positive)
    if f.op == NOT:
        g = f.args[0]
        if g.op == GLOBALLY:
            return stabilize(eventually(neg(g.args[0])), positive)
        if g.op == FINALLY:
            return stabilize(always(neg(g.args[0])), positive)
        return neg(stabilize(g, not positive))
    return rebuild(f.op, (stabilize(a, positive) for a in f.args))


# -- state operations ------------------------------------------------------------

def initial_state(phi: Formula) -> SemanticState:
    m = canonicalize(phi)
    if m is TRUE:
        return TT_SINK
    if m is FALSE:
        return REJECT_INITIAL
    return SemanticState(m)


def _accepting_state(main: Formula) -> SemanticState:
    if main is TRUE:
        return TT_SINK
    if main is FALSE:
        return REJECT_ACCEPTING
    bp = reset(main)
    return SemanticState(main, bp, ACCEPTING, bp is TRUE)


@lru_cache(maxsize=None)
def _step(q: SemanticState, sigma: frozenset[str]) -> SemanticState:
    if q.is_sink:
        return q
    m = prog(q.main, sigma)
    if q.component == INITIAL:
        if m is TRUE:
            return TT_SINK
        if m is FALSE:
            return REJECT_INITIAL
        return SemanticState(m)
    if m is FALSE:
        return REJECT_ACCEPTING
    if m is TRUE:
        return TT_SINK
    b = prog(q.breakpoint, sigma)
    if b is TRUE:
        return SemanticState(m, reset(m), ACCEPTING, True)
    return SemanticState(m, b, ACCEPTING, False)


def step(q: SemanticState, sigma: Iterable[str]) -> SemanticState:
    """Deterministic successor of ``q`` on letter ``sigma``."""
    return _step(q, frozenset(sigma))


@lru_cache(maxsize=None)
def epsilon_targets(q: SemanticState) -> tuple[SemanticState, ...]:
    """Guesses that the persistence parts of ``q.main`` hold from now on."""
    if q.component != INITIAL or q.is_sink or is_cosafe(q.main):
        return ()
    stable = stabilize(q.main)
    candidates = stable.args if stable.op == OR else (stable,)
    targets = {_accepting_state(c) for c in candidates if c is not FALSE}
    return tuple(sorted(targets, key=SemanticState.sort_key))


# -- full construction ---------------------------------------------------------------

@dataclass
class Automaton:
    alphabet: tuple[frozenset[str], ...]
    states: list[SemanticState]
    initial: SemanticState
    delta: dict[tuple[int, frozenset[str]], int]
    epsilon: dict[int, list[int]]
    index: dict[SemanticState, int] = field(repr=False)

    @property
    def accepting(self) -> set[SemanticState]:
        return {q for q in self.states if q.accepting}

    @property
    def num_transitions(self) -> int:
        return len(self.delta)

    @property
    def num_epsilon(self) -> int:
        return sum(len(v) for v in self.epsilon.values())

    def successors(self, q: SemanticState) -> set[SemanticState]:
        i = self.index[q]
        out = {self.states[self.delta[(i, s)]] for s in self.alphabet}
        out.update(self.states[j] for j in self.epsilon.get(i, ()))
        return out

    def to_json(self) -> dict:
        return {
            "version": 1,
            "alphabet": [sorted(s) for s in self.alphabet],
            "states": [
                {
                    "id": i,
                    "main": render(q.main),
                    "breakpoint": None if q.breakpoint is None else render(q.breakpoint),
                    "component": q.component,
                    "accepting": q.accepting,
                }
                for i, q in enumerate(self.states)
            ],
            "initial": self.index[self.initial],
            "delta": [[i, sorted(s), j] for (i, s), j in self.delta.items()],
            "epsilon": [[i, j] for i, js in sorted(self.epsilon.items()) for j in js],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)


def build_full(
    phi: Formula,
    alphabet: Iterable[Iterable[str]] | None = None,
    cap: int = DEFAULT_STATE_CAP,
) -> Automaton:
    """Breadth-first exploration of every reachable state."""
    if cap < 1:
        raise ValueError("cap must be at least 1")
    if alphabet is None:
        letters = powerset(atoms(phi))
    else:
        letters = sorted({frozenset(s) for s in alphabet}, key=letter_key)
    q0 = initial_state(phi)
    states = [q0]
    index = {q0: 0}
    delta: dict[tuple[int, frozenset[str]], int] = {}
    epsilon: dict[int, list[int]] = {}
    queue = deque([q0])

    def visit(q: SemanticState) -> int:
        j = index.get(q)
        if j is None:
            if len(states) >= cap:
                raise StateCapError(
                    f"state cap {cap} exceeded with a frontier of {len(queue) + 1} states"
                )
            j = index[q] = len(states)
            states.append(q)
            queue.append(q)
        return j

    while queue:
        q = queue.popleft()
        i = index[q]
        for sigma in letters:
            delta[(i, sigma)] = visit(step(q, sigma))
        targets = epsilon_targets(q)
        if targets:
            epsilon[i] = [visit(t) for t in targets]
    return Automaton(tuple(letters), states, q0, delta, epsilon, index)


class OnTheFly:
    """Lazily explored automaton with a shared successor cache.

    ``constructed`` is the set of states ever materialised; callers that
    need per-episode counts keep their own set via ``track``.
    """

    def __init__(self, phi: Formula):
        self.phi = canonicalize(phi)
        self.initial = initial_state(phi)
        self.constructed: set[SemanticState] = {self.initial}
        self._succ: dict[tuple[SemanticState, frozenset[str]], SemanticState] = {}
        self._eps: dict[SemanticState, tuple[SemanticState, ...]] = {}

    def step(self, q: SemanticState, sigma: Iterable[str]) -> SemanticState:
        key = (q, frozenset(sigma))
        nxt = self._succ.get(key)
        if nxt is None:
            nxt = self._succ[key] = step(q, key[1])
            self.constructed.add(nxt)
        return nxt

    def epsilon(self, q: SemanticState) -> tuple[SemanticState, ...]:
        hit = self._eps.get(q)
        if hit is None:
            hit = self._eps[q] = epsilon_targets(q)
            self.constructed.update(hit)
        return hit


# -- lasso acceptance ------------------------------------------------------------------

def accepts_lasso(
    phi: Formula,
    w: LassoWord,
    alphabet: Iterable[Iterable[str]] | None = None,
    cap: int = DEFAULT_STATE_CAP,
) -> bool:
    """Decide whether some run of the automaton of ``phi`` on ``w`` accepts.

    Explores the product of lazily built states with the ``len(w)`` word
    positions; a run accepts iff it reaches a cycle through an accepting
    state. At most one epsilon move is possible per run since epsilon edges
    leave the initial component.
    """
    if alphabet is not None:
        allowed = {frozenset(s) for s in alphabet}
        stray = w.letters() - allowed
        if stray:
            raise ValueError(f"letters {sorted(map(format_letter, stray))} not in the alphabet")
    start = (initial_state(phi), 0)
    graph = nx.DiGraph()
    graph.add_node(start)
    seen_states = {start[0]}
    stack = [start]
    while stack:
        node = stack.pop()
        q, i = node
        succ = [(step(q, w[i]), w.successor(i))]
        succ.extend((t, i) for t in epsilon_targets(q))
        for nxt in succ:
            if nxt[0] not in seen_states:
                seen_states.add(nxt[0])
                if len(seen_states) > cap:
                    raise StateCapError(f"state cap {cap} exceeded while exploring the lasso product")
            if nxt not in graph:
                graph.add_node(nxt)
                stack.append(nxt)
            graph.add_edge(node, nxt)
    for scc in nx.strongly_connected_components(graph):
        if not any(q.accepting for q, _ in scc):
            continue
        if len(scc) > 1:
            return True
        (node,) = scc
        if graph.has_edge(node, node):
            return True
    return False


# -- simple path counting ----------------------------------------------------------

def count_simple_paths(
    graph: Automaton | Mapping[Hashable, Iterable[Hashable]],
    start: Hashable | None = None,
    cap: int | None = None,
) -> int:
    """Number of repetition-free node sequences of length >= 1.

    Counts sequences beginning at ``start``, or at any node when ``start``
    is None. Self-loops never extend a simple path.
    """
    if isinstance(graph, Automaton):
        adj: Callable[[Hashable], Iterable[Hashable]] = graph.successors
        nodes: Sequence[Hashable] = graph.states
    else:
        adj = lambda v: graph.get(v, ())  # noqa: E731
        nodes = list(graph)
    roots = nodes if start is None else [start]
    count = 0
    for root in roots:
        on_path = {root}
        path = [root]
        stack = [iter(list(adj(root)))]
        count += 1
        while stack:
            nxt = next(stack[-1], None)
            if nxt is None:
                stack.pop()
                on_path.discard(path.pop())
                continue
            if nxt in on_path:
                continue
            count += 1
            if cap is not None and count > cap:
                raise PathCountCapError(f"more than {cap} simple paths")
            on_path.add(nxt)
            path.append(nxt)
            stack.append(iter(list(adj(nxt))))
    return count


def simple_path_closed_form(n: int) -> int:
    """sum_{k=1..n} n!/(n-k)!: simple paths of the complete digraph on ``n`` nodes.

    This counts paths from every start node; from one fixed node the count
    is this value divided by ``n``. Always strictly below ``e * n!``.
    """
    return sum(factorial(n) // factorial(n - k) for k in range(1, n + 1))
