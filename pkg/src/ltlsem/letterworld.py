"""LetterWorld: letters scattered on a wrapping grid."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from string import ascii_lowercase

import numpy as np

MOVES = ("N", "E", "S", "W")
_DELTA = {"N": (0, -1), "E": (1, 0), "S": (0, 1), "W": (-1, 0)}


@dataclass(frozen=True)
class LetterWorldConfig:
    size: int = 7
    letters: tuple[str, ...] = tuple(ascii_lowercase[:12])
    copies: int = 2

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(self.letters))
        if self.size < 1 or self.copies < 1:
            raise ValueError("size and copies must be positive")
        if len(set(self.letters)) != len(self.letters):
            raise ValueError("letters must be distinct")
        if len(self.letters) * self.copies > self.size**2 - 1:
            raise ValueError(
                f"{len(self.letters)} letters x {self.copies} copies do not fit "
                f"on a {self.size}x{self.size} grid with a free start cell"
            )

    @property
    def channels(self) -> int:
        return len(self.letters) + 1

    @property
    def obs_shape(self) -> tuple[int, int, int]:
        return (self.size, self.size, self.channels)

    def label_set(self) -> tuple[frozenset[str], ...]:
        """Every letter the labelling map can emit: the empty one and singletons."""
        return (frozenset(),) + tuple(frozenset({x}) for x in self.letters)


@dataclass(frozen=True)
class LetterWorldState:
    config: LetterWorldConfig
    grid: np.ndarray = field(repr=False)  # [y, x] -> letter index or -1
    pos: tuple[int, int]
    steps: int = 0

    def letter_at(self, x: int, y: int) -> str | None:
        k = self.grid[y, x]
        return None if k < 0 else self.config.letters[k]

    def placement(self) -> dict[tuple[int, int], str]:
        ys, xs = np.nonzero(self.grid >= 0)
        return {(int(x), int(y)): self.config.letters[self.grid[y, x]] for y, x in zip(ys, xs)}


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def env_reset(cfg: LetterWorldConfig, seed=None) -> tuple[LetterWorldState, np.ndarray]:
    """Place each letter ``copies`` times and the agent on a free cell, uniformly."""
    rng = _as_rng(seed)
    n = cfg.size
    total = len(cfg.letters) * cfg.copies
    cells = rng.choice(n * n, size=total + 1, replace=False)
    grid = np.full((n, n), -1, dtype=np.int64)
    for i, c in enumerate(cells[:total]):
        grid.flat[c] = i // cfg.copies
    grid.flags.writeable = False
    start = int(cells[total])
    state = LetterWorldState(cfg, grid, (start % n, start // n))
    return state, observe(state)


def _letter_planes(state: LetterWorldState) -> np.ndarray:
    cfg = state.config
    planes = np.zeros(cfg.obs_shape, dtype=np.float64)
    ys, xs = np.nonzero(state.grid >= 0)
    planes[ys, xs, state.grid[ys, xs]] = 1.0
    return planes


def observe(state: LetterWorldState) -> np.ndarray:
    """Egocentric one-hot view; the agent sits at the centre cell."""
    n = state.config.size
    planes = _letter_planes(state)
    x, y = state.pos
    c = n // 2
    planes = np.roll(planes, (c - y, c - x), axis=(0, 1))
    planes[c, c, -1] = 1.0
    return planes


def env_step(state: LetterWorldState, move: str) -> tuple[LetterWorldState, np.ndarray, frozenset[str]]:
    if move not in _DELTA:
        raise ValueError(f"unknown move {move!r}; expected one of {MOVES}")
    n = state.config.size
    dx, dy = _DELTA[move]
    x, y = state.pos
    nxt = replace(state, pos=((x + dx) % n, (y + dy) % n), steps=state.steps + 1)
    name = nxt.letter_at(*nxt.pos)
    label = frozenset() if name is None else frozenset({name})
    return nxt, observe(nxt), label
