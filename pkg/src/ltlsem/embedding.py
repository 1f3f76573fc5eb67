"""Semantic feature vectors for automaton states.

Layout, repeated for the main formula and then the breakpoint (``tt`` when
absent)::

    trueness   |norms| x |sigma_env|   normalised trueness deltas per letter
    attention  2 x |ap| x |ap|         (+ then -), row p, column q
    complexity 4                       height, conjuncts, disjuncts, trueness

followed by one flag that is 1.0 iff the state carries a breakpoint.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .formula import AND, OR, TRUE, Formula, canonicalize, count_junctions, height
from .lasso import format_letter
from .ldba import SemanticState
from .progression import prog
from .propositional import obligations, trueness

NORMALIZATIONS = ("raw", "minmax", "extreme", "reachavoid")


@dataclass(frozen=True)
class EmbeddingConfig:
    ap: tuple[str, ...]
    sigma_env: tuple[frozenset[str], ...]
    normalizations: tuple[str, ...] = NORMALIZATIONS
    ref_height: int = 1
    ref_conjuncts: int = 1
    ref_disjuncts: int = 1

    def __post_init__(self):
        object.__setattr__(self, "ap", tuple(self.ap))
        object.__setattr__(self, "sigma_env", tuple(frozenset(s) for s in self.sigma_env))
        object.__setattr__(self, "normalizations", tuple(self.normalizations))
        if not self.sigma_env:
            raise ValueError("sigma_env must be nonempty")
        unknown = set(self.normalizations) - set(NORMALIZATIONS)
        if unknown:
            raise ValueError(f"unknown normalizations {sorted(unknown)}")
        if min(self.ref_height, self.ref_conjuncts, self.ref_disjuncts) < 1:
            raise ValueError("reference counts must be positive")

    @classmethod
    def for_task(
        cls,
        phi: Formula,
        ap: Sequence[str],
        sigma_env: Iterable[Iterable[str]],
        normalizations: Sequence[str] = NORMALIZATIONS,
    ) -> "EmbeddingConfig":
        """Reference counts taken from the initial task formula."""
        phi = canonicalize(phi)
        return cls(
            tuple(ap),
            tuple(frozenset(s) for s in sigma_env),
            tuple(normalizations),
            max(height(phi), 1),
            max(count_junctions(phi, AND), 1),
            max(count_junctions(phi, OR), 1),
        )

    @property
    def half_size(self) -> int:
        return len(self.normalizations) * len(self.sigma_env) + 2 * len(self.ap) ** 2 + 4

    @property
    def size(self) -> int:
        return 2 * self.half_size + 1

    def layout(self) -> list[dict]:
        """Block names with offsets and lengths."""
        blocks = []
        offset = 0
        for part in ("main", "breakpoint"):
            for norm in self.normalizations:
                blocks.append((f"{part}.trueness.{norm}", len(self.sigma_env)))
            blocks.append((f"{part}.attention.pos", len(self.ap) ** 2))
            blocks.append((f"{part}.attention.neg", len(self.ap) ** 2))
            blocks.append((f"{part}.complexity", 4))
        blocks.append(("has_breakpoint", 1))
        out = []
        for name, length in blocks:
            out.append({"name": name, "offset": offset, "length": length})
            offset += length
        return out

    def manifest(self) -> dict:
        return {
            "ap": list(self.ap),
            "sigma_env": [format_letter(s) for s in self.sigma_env],
            "normalizations": list(self.normalizations),
            "reference": [self.ref_height, self.ref_conjuncts, self.ref_disjuncts],
            "size": self.size,
            "blocks": self.layout(),
        }


def f_trueness(f: Formula, sigma: Iterable[str]) -> float:
    """Change in trueness caused by reading ``sigma``."""
    return trueness(prog(f, sigma)).value - trueness(canonicalize(f)).value


def normalize(values: Sequence[float], mode: str) -> np.ndarray:
    x = np.asarray(values, dtype=float)
    if x.size == 0:
        raise ValueError("values must be nonempty")
    lo, hi = x.min(), x.max()
    if mode == "raw":
        return x.copy()
    if mode == "minmax":
        if hi == lo:
            return np.full_like(x, 0.5)
        return (x - lo) / (hi - lo)
    if mode == "extreme":
        if hi == lo:
            return x.copy()
        return np.where((x == lo) | (x == hi), x, 0.0)
    if mode == "reachavoid":
        # positives to [0, 1] by max, negatives to [-1, 0] by |min|
        out = np.zeros_like(x)
        pos = x > 0
        if pos.any():
            out[pos] = x[pos] / hi
        negv = x < 0
        if negv.any():
            out[negv] = x[negv] / -lo
        return out
    raise ValueError(f"unknown normalization {mode!r}")


def f_attention(
    f: Formula,
    p: str,
    q: str,
    positive: bool,
    sigma_env: Iterable[Iterable[str]],
) -> float:
    """Share of obligation letters after seeing ``{p}`` that contain (or lack) ``q``."""
    ob = obligations(prog(f, {p}), sigma_env)
    if not ob:
        return 0.0
    hits = sum((q in o) == positive for o in ob)
    return hits / len(ob)


def complexity_features(f: Formula, cfg: EmbeddingConfig) -> np.ndarray:
    f = canonicalize(f)
    return np.array(
        [
            min(height(f) / cfg.ref_height, 1.0),
            min(count_junctions(f, AND) / cfg.ref_conjuncts, 1.0),
            min(count_junctions(f, OR) / cfg.ref_disjuncts, 1.0),
            trueness(f).value,
        ]
    )


@lru_cache(maxsize=65536)
def _embed_formula(f: Formula, cfg: EmbeddingConfig) -> np.ndarray:
    deltas = [f_trueness(f, s) for s in cfg.sigma_env]
    parts = [normalize(deltas, mode) for mode in cfg.normalizations]
    n = len(cfg.ap)
    att = np.zeros((2, n, n))
    for i, p in enumerate(cfg.ap):
        ob = obligations(prog(f, {p}), cfg.sigma_env)
        if not ob:
            continue
        for j, q in enumerate(cfg.ap):
            k = sum(q in o for o in ob)
            att[0, i, j] = k / len(ob)
            att[1, i, j] = (len(ob) - k) / len(ob)
    parts.append(att.ravel())
    parts.append(complexity_features(f, cfg))
    out = np.concatenate(parts)
    out.flags.writeable = False
    return out


def embed_formula(f: Formula, cfg: EmbeddingConfig) -> np.ndarray:
    """One half of a state embedding."""
    return _embed_formula(canonicalize(f), cfg)


@lru_cache(maxsize=65536)
def _embed_state(q: SemanticState, cfg: EmbeddingConfig) -> np.ndarray:
    bp = TRUE if q.breakpoint is None else q.breakpoint
    flag = np.array([0.0 if q.breakpoint is None else 1.0])
    out = np.concatenate([_embed_formula(q.main, cfg), _embed_formula(bp, cfg), flag])
    out.flags.writeable = False
    return out


def embed_state(q: SemanticState, cfg: EmbeddingConfig) -> np.ndarray:
    """Fixed-length read-only vector; identical inputs give identical bits."""
    return _embed_state(q, cfg)
