"""Product of LetterWorld with the on-the-fly automaton of a task."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .formula import Formula
from .ldba import TT_SINK, OnTheFly, SemanticState, is_cosafe
from .letterworld import MOVES, LetterWorldConfig, LetterWorldState, env_reset, env_step

TRAIN_STEPS = 75
TEST_STEPS = 300


@dataclass
class ProductStep:
    observation: np.ndarray
    state: SemanticState
    actions: tuple  # move names, then one epsilon target per jump
    reward: float
    terminal: bool
    info: dict = field(default_factory=dict)

    @property
    def epsilon_targets(self) -> tuple[SemanticState, ...]:
        return self.actions[len(MOVES):]


class ProductEnv:
    """Environment state paired with an automaton state.

    Moves advance the grid and then the automaton on the emitted label;
    epsilon actions only move the automaton. Entering an accepting state
    pays +1, entering the rejecting sink pays -1 and ends the episode.
    """

    def __init__(
        self,
        config: LetterWorldConfig,
        task: Formula,
        max_steps: int = TRAIN_STEPS,
        automaton: OnTheFly | None = None,
    ):
        self.config = config
        self.task = task
        self.max_steps = max_steps
        self.guarantee = is_cosafe(task)
        self.automaton = automaton if automaton is not None else OnTheFly(task)
        self.env: LetterWorldState | None = None
        self.q: SemanticState | None = None
        self.steps = 0
        self.constructed: set[SemanticState] = set()
        self.accepting_visits = 0
        self.trace: list[frozenset[str]] = []
        self._last: ProductStep | None = None

    # -- helpers ----------------------------------------------------------------------

    def _targets(self, q: SemanticState) -> tuple[SemanticState, ...]:
        targets = self.automaton.epsilon(q)
        self.constructed.update(targets)
        return targets

    def _settle(self, q: SemanticState) -> SemanticState:
        # jumps into the tt-sink carry no choice and are taken at once
        self.constructed.add(q)
        if TT_SINK in self._targets(q):
            self.constructed.add(TT_SINK)
            return TT_SINK
        return q

    def _emit(self, obs: np.ndarray, entered: bool) -> ProductStep:
        q = self.q
        reward = 0.0
        if entered and q.accepting:
            reward = 1.0
            self.accepting_visits += 1
        elif entered and q.is_rejecting_sink:
            reward = -1.0
        done_task = q.is_sink or (self.guarantee and q.accepting)
        truncated = not done_task and self.steps >= self.max_steps
        actions = MOVES if q.is_sink else MOVES + self._targets(q)
        info = {
            "accepting": reward > 0,
            "sink": q.is_sink,
            "success": q.is_accepting_sink,
            "truncated": truncated,
            "steps": self.steps,
            "constructed": len(self.constructed),
            "accepting_visits": self.accepting_visits,
        }
        self._last = ProductStep(obs, q, actions, reward, done_task or truncated, info)
        return self._last

    # -- interface ----------------------------------------------------------------------

    def reset(self, seed=None) -> ProductStep:
        self.env, obs = env_reset(self.config, seed)
        self.steps = 0
        self.accepting_visits = 0
        self.trace = []
        self.constructed = set()
        self.q = self._settle(self.automaton.initial)
        return self._emit(obs, entered=False)

    def step(self, action) -> ProductStep:
        last = self._last
        if last is None:
            raise RuntimeError("call reset() first")
        if last.terminal:
            raise RuntimeError("episode is over")
        if isinstance(action, (int, np.integer)):
            if not 0 <= action < len(last.actions):
                raise ValueError(f"action index {action} not available")
            action = last.actions[action]
        self.steps += 1
        if action in MOVES:
            self.env, obs, label = env_step(self.env, action)
            self.trace.append(label)
            q = self.automaton.step(self.q, label)
        elif isinstance(action, SemanticState) and action in last.epsilon_targets:
            obs = last.observation
            q = action
        else:
            raise ValueError(f"action {action!r} not available")
        self.q = self._settle(q)
        return self._emit(obs, entered=True)
