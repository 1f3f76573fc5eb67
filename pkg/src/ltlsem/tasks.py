"""Parameterised task families and the LetterWorld curriculum."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .formula import (
    Formula,
    always,
    atom,
    atoms,
    conj,
    disj,
    eventually,
    implies,
    neg,
    render,
    until,
)
from .ldba import is_cosafe
from .parser import parse

FAMILIES = (
    "small",
    "localsafety",
    "globalsafety",
    "finitereactive",
    "complexpatrol",
    "reachstay",
    "alwaysreactive",
)

# LetterWorld tasks from the literature; letters are renamed on sampling
SMALL_TEMPLATES = (
    "!a U (b & (!c U (d & (!e U f))))",
    "F((a | c | j) & F b) & F(c & F d) & F k",
    "F d & (!f U (d & F b))",
    "F(a & (!b U c)) & F d",
    "G F(a & F b) | G F(c & F d) & G F(e & F f)",
    "G F a & G F b & G F c & G F d & G(!e & !f)",
)


class PoolExhausted(ValueError):
    pass


@dataclass(frozen=True)
class TaskSpec:
    family: str
    k: int
    m: int
    pool: tuple[str, ...]
    formula: Formula

    @property
    def guarantee(self) -> bool:
        """Co-safe tasks end as soon as they are satisfied."""
        return is_cosafe(self.formula)

    @property
    def text(self) -> str:
        return render(self.formula)

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "k": self.k,
            "m": self.m,
            "formula": self.text,
            "guarantee": self.guarantee,
        }


def _draw(rng: np.random.Generator, pool: Sequence[str], n: int, exclude=()) -> list[str]:
    avail = [p for p in pool if p not in set(exclude)]
    if n > len(avail):
        raise PoolExhausted(f"need {n} distinct propositions, only {len(avail)} available")
    idx = rng.choice(len(avail), size=n, replace=False)
    return [avail[i] for i in idx]


def reach_avoid_chain(avoid: Sequence[Formula], reach: Sequence[Formula]) -> Formula:
    """!a1 U (r1 & (!a2 U (r2 & ... (!ak U rk))))."""
    f = until(neg(avoid[-1]), reach[-1])
    for a, r in zip(reversed(avoid[:-1]), reversed(reach[:-1])):
        f = until(neg(a), conj(r, f))
    return f


def sequence(reach: Sequence[Formula]) -> Formula:
    """F(r1 & F(r2 & ... F rk))."""
    f = eventually(reach[-1])
    for r in reversed(reach[:-1]):
        f = eventually(conj(r, f))
    return f


def _atoms(names):
    return [atom(p) for p in names]


def sample_task(
    family: str,
    k: int = 1,
    m: int = 1,
    pool: Sequence[str] = (),
    rng: np.random.Generator | int | None = None,
) -> TaskSpec:
    family = family.lower().replace("-", "").replace("_", "")
    if family not in FAMILIES:
        raise ValueError(f"unknown task family {family!r}")
    if k < 1 or m < 1:
        raise ValueError("k and m must be positive")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    pool = tuple(pool)

    if family == "small":
        template = parse(SMALL_TEMPLATES[int(rng.integers(len(SMALL_TEMPLATES)))])
        names = sorted(atoms(template))
        rename = dict(zip(names, _draw(rng, pool, len(names))))
        f = parse(_rename(render(template), rename))
    elif family == "localsafety":
        chains = []
        for _ in range(m):
            props = _atoms(_draw(rng, pool, 2 * k))
            chains.append(reach_avoid_chain(props[:k], props[k:]))
        f = disj(*chains)
    elif family == "globalsafety":
        (a,) = _draw(rng, pool, 1)
        chains = [
            reach_avoid_chain([atom(a)] * k, _atoms(_draw(rng, pool, k, exclude=[a])))
            for _ in range(m)
        ]
        f = disj(*chains)
    elif family == "finitereactive":
        names = _draw(rng, pool, k + 1)
        g, triggers = names[0], names[1:]
        rules = [
            implies(atom(t), eventually(disj(*_atoms(_draw(rng, pool, m, exclude=[g, t])))))
            for t in triggers
        ]
        f = until(conj(*rules), atom(g))
    elif family == "complexpatrol":
        (a,) = _draw(rng, pool, 1)
        chains = [sequence(_atoms(_draw(rng, pool, k, exclude=[a]))) for _ in range(m)]
        f = conj(always(eventually(disj(*chains))), always(neg(atom(a))))
    elif family == "reachstay":
        names = _draw(rng, pool, k + 1)
        f = conj(sequence(_atoms(names[:k])), eventually(always(atom(names[k]))))
    else:  # alwaysreactive
        triggers = _draw(rng, pool, k + 1)
        parts = [always(eventually(atom(triggers[0])))]
        for i in range(k):
            responses = _atoms(_draw(rng, pool, m, exclude=triggers))
            parts.append(
                always(implies(atom(triggers[i]), eventually(disj(*responses, atom(triggers[i + 1])))))
            )
        f = conj(*parts)
    return TaskSpec(family, k, m, pool, f)


def _rename(text: str, mapping: dict[str, str]) -> str:
    import re

    return re.sub(r"\b[a-z][a-z0-9_]*\b", lambda mt: mapping.get(mt.group(0), mt.group(0)), text)


# -- curriculum ------------------------------------------------------------------------

STAGE_THRESHOLDS = {1: 0.90, 2: 0.95, 3: 0.95}
FINAL_STAGE = 4
WINDOW = 256


def curriculum_advance(history: Sequence[float], stage: int, window: int = WINDOW) -> int:
    """Next stage once the success rate over the last ``window`` episodes is high enough.

    ``history`` holds per-episode returns or success flags; an entry counts
    as a success when it is positive.
    """
    if stage >= FINAL_STAGE:
        return FINAL_STAGE
    if len(history) < window:
        return stage
    sr = float(np.mean(np.asarray(history[-window:], dtype=float) > 0))
    return stage + 1 if sr >= STAGE_THRESHOLDS[stage] else stage


def _width(rng, stage: int) -> int:
    if stage == 1:
        return 1
    if stage == 2:
        return int(rng.integers(1, 3))
    if stage == 3:
        return 2
    return int(rng.integers(1, 4))


def sample_stage(
    stage: int,
    pool: Sequence[str],
    rng: np.random.Generator,
    kinds: Sequence[str] = ("reach", "reach_avoid"),
) -> Formula:
    """One LetterWorld curriculum task.

    Stages 1-3 draw reach ``F A`` or reach-avoid ``!A U b`` tasks with
    disjunctions ``A`` of width 1, up to 2, and exactly 2. Stage 4 draws
    reach-avoid sequences of depth and width up to 3, or recurrence tasks.
    """
    if stage < 1 or stage > FINAL_STAGE:
        raise ValueError(f"stage must be in 1..{FINAL_STAGE}")
    choices = list(kinds) + (["recurrence"] if stage == FINAL_STAGE else [])
    kind = choices[int(rng.integers(len(choices)))]
    if kind == "recurrence":
        # counts shrink to fit small pools
        n_goal = int(rng.integers(2, min(4, len(pool)) + 1))
        n_avoid = int(rng.integers(0, min(2, len(pool) - n_goal) + 1))
        names = _draw(rng, pool, n_goal + n_avoid)
        goals = [always(eventually(atom(p))) for p in names[:n_goal]]
        if n_avoid:
            goals.append(always(neg(disj(*_atoms(names[n_goal:])))))
        return conj(*goals)
    depth = int(rng.integers(1, 4)) if stage == FINAL_STAGE else 1
    w = _width(rng, stage)
    if kind == "reach":
        if stage == FINAL_STAGE:
            return sequence([disj(*_atoms(_draw(rng, pool, w))) for _ in range(depth)])
        return eventually(disj(*_atoms(_draw(rng, pool, w))))
    if kind != "reach_avoid":
        raise ValueError(f"unknown task kind {kind!r}")
    avoid, reach = [], []
    for _ in range(depth):
        names = _draw(rng, pool, w + 1)
        avoid.append(disj(*_atoms(names[:w])))
        reach.append(atom(names[w]))
    return reach_avoid_chain(avoid, reach)
