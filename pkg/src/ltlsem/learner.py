"""Linear Q-learning over observation and semantic-embedding features."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .embedding import NORMALIZATIONS, EmbeddingConfig, embed_state
from .formula import Formula, render
from .ldba import OnTheFly, SemanticState
from .letterworld import MOVES, LetterWorldConfig
from .parser import parse
from .product import TEST_STEPS, TRAIN_STEPS, ProductEnv
from .tasks import WINDOW, curriculum_advance, sample_stage

FEATURE_MODES = ("semantic", "concat")
_TRAIN, _EVAL = 0, 1


def episode_rng(seed: int, *path: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, *path]))


class Featurizer:
    """Maps (observation, automaton state) to a flat feature vector.

    ``concat`` mode is the observation followed by the state embedding.
    ``semantic`` mode appends, for the main formula and the breakpoint, one
    egocentric map per normalisation holding the trueness feature of the
    letter found in each cell, plus a constant bias. The maps let a linear
    model relate "which direction" to "which letter helps" without
    letter-specific weights.
    """

    def __init__(self, env: LetterWorldConfig, mode: str = "semantic", normalizations=NORMALIZATIONS):
        if mode not in FEATURE_MODES:
            raise ValueError(f"unknown feature mode {mode!r}")
        self.env = env
        self.mode = mode
        self.normalizations = tuple(normalizations)
        self.sigma_env = env.label_set()
        n, L = env.size, len(self.sigma_env)
        self.obs_dim = n * n * env.channels
        self.emb_dim = 2 * (len(self.normalizations) * L + 2 * len(env.letters) ** 2 + 4) + 1
        self.map_dim = 2 * len(self.normalizations) * n * n if mode == "semantic" else 0
        self.dim = self.obs_dim + self.emb_dim + self.map_dim + (mode == "semantic")

    def config_for(self, task: Formula) -> EmbeddingConfig:
        return EmbeddingConfig.for_task(task, self.env.letters, self.sigma_env, self.normalizations)

    def __call__(self, obs: np.ndarray, q: SemanticState, cfg: EmbeddingConfig) -> np.ndarray:
        emb = embed_state(q, cfg)
        if self.mode == "concat":
            return np.concatenate([obs.ravel(), emb])
        nn, L = len(self.normalizations), len(self.sigma_env)
        # cell -> index into sigma_env (0 is the empty letter)
        cell = obs[..., :-1] @ np.arange(1, L, dtype=float)
        cell = cell.astype(np.int64)
        half = cfg.half_size
        maps = [emb[off: off + nn * L].reshape(nn, L)[:, cell] for off in (0, half)]
        return np.concatenate([obs.ravel(), emb, *(m.ravel() for m in maps), [1.0]])


@dataclass
class LinearQ:
    dim: int
    alpha: float = 0.002
    gamma: float = 0.94
    moves: np.ndarray = None  # (4, dim)
    eps_weights: np.ndarray = None  # (dim,)

    def __post_init__(self):
        if self.moves is None:
            self.moves = np.zeros((len(MOVES), self.dim))
        if self.eps_weights is None:
            self.eps_weights = np.zeros(self.dim)
        if self.moves.shape != (len(MOVES), self.dim) or self.eps_weights.shape != (self.dim,):
            raise ValueError("weight shapes do not match the feature dimension")

    def values(self, move_features: np.ndarray, eps_features: Sequence[np.ndarray] = ()) -> np.ndarray:
        q = self.moves @ move_features
        if len(eps_features):
            q = np.concatenate([q, np.asarray(eps_features) @ self.eps_weights])
        return q


@dataclass
class Transition:
    features: np.ndarray  # features of the taken action
    action: int  # index into the action list
    reward: float
    terminal: bool
    next_values: np.ndarray | None = None  # Q-values of the successor's actions


def q_update(model: LinearQ, t: Transition) -> LinearQ:
    """One temporal-difference step on the taken action's weights (in place)."""
    x = np.asarray(t.features, dtype=float)
    if x.shape != (model.dim,):
        raise ValueError(f"feature dimension {x.shape} does not match model dimension {model.dim}")
    w = model.moves[t.action] if t.action < len(MOVES) else model.eps_weights
    target = t.reward
    if not t.terminal and t.next_values is not None and len(t.next_values):
        target += model.gamma * float(np.max(t.next_values))
    w += model.alpha * (target - float(w @ x)) * x
    return model


# -- agents ---------------------------------------------------------------------------

class Agent:
    """Scores every available action of a product step."""

    def __init__(self, model: LinearQ, featurizer: Featurizer):
        self.model = model
        self.featurizer = featurizer
        self.cfg: EmbeddingConfig | None = None

    def begin(self, task: Formula) -> None:
        self.cfg = self.featurizer.config_for(task)

    def features(self, step) -> tuple[np.ndarray, list[np.ndarray]]:
        f = self.featurizer
        move = f(step.observation, step.state, self.cfg)
        eps = [f(step.observation, t, self.cfg) for t in step.epsilon_targets]
        return move, eps

    def q_values(self, step) -> tuple[np.ndarray, np.ndarray, list[np.ndarray]]:
        move, eps = self.features(step)
        return self.model.values(move, eps), move, eps


def run_episode(env: ProductEnv, rng: np.random.Generator, policy: Callable, on_step=None) -> dict:
    """Roll out one episode; ``policy(step) -> action index``."""
    step = env.reset(rng)
    ret = 0.0
    while not step.terminal:
        a = policy(step)
        nxt = env.step(a)
        ret += nxt.reward
        if on_step is not None:
            on_step(step, a, nxt)
        step = nxt
    success = step.info["success"] if env.guarantee else step.info["accepting_visits"] > 0
    return {
        "steps": step.info["steps"],
        "return": ret,
        "accepted_visits": step.info["accepting_visits"],
        "constructed_states": step.info["constructed"],
        "success": bool(success),
    }


def random_policy(rng: np.random.Generator) -> Callable:
    return lambda step: int(rng.integers(len(step.actions)))


# -- training ---------------------------------------------------------------------------

@dataclass
class TrainConfig:
    size: int = 5
    letters: tuple[str, ...] = ("a", "b", "c", "d")
    copies: int = 2
    stage: int = 1
    kinds: tuple[str, ...] = ("reach", "reach_avoid")
    tasks: tuple[str, ...] = ()  # explicit task list; overrides the curriculum
    curriculum: bool = False
    total_steps: int = 50_000
    max_steps: int = TRAIN_STEPS
    alpha: float = 0.002
    gamma: float = 0.94
    eps_start: float = 1.0
    eps_end: float = 0.05
    eps_decay: float = 0.5  # fraction of total_steps for the linear decay
    window: int = WINDOW
    target_sr: float = 0.90
    features: str = "semantic"
    normalizations: tuple[str, ...] = NORMALIZATIONS

    def __post_init__(self):
        self.letters = tuple(self.letters)
        self.kinds = tuple(self.kinds)
        self.tasks = tuple(self.tasks)
        self.normalizations = tuple(self.normalizations)

    @property
    def env(self) -> LetterWorldConfig:
        return LetterWorldConfig(self.size, self.letters, self.copies)

    @classmethod
    def from_json(cls, data: dict) -> "TrainConfig":
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        unknown = set(data) - set(known) - {"version"}
        if unknown:
            raise ValueError(f"unknown config keys {sorted(unknown)}")
        return cls(**known)


@dataclass
class TrainResult:
    model: LinearQ
    config: TrainConfig
    seed: int
    episodes: list[dict] = field(default_factory=list)
    windowed_sr: list[float] = field(default_factory=list)
    steps_to_target: int | None = None
    final_stage: int = 1

    def to_checkpoint(self) -> dict:
        featurizer = Featurizer(self.config.env, self.config.features, self.config.normalizations)
        probe = featurizer.config_for(parse("F " + self.config.letters[0]))
        return {
            "version": 1,
            "seed": self.seed,
            "config": asdict(self.config),
            "feature_dim": self.model.dim,
            "embedding": {k: v for k, v in probe.manifest().items() if k != "reference"},
            "alpha": self.model.alpha,
            "gamma": self.model.gamma,
            "moves": self.model.moves.tolist(),
            "epsilon": self.model.eps_weights.tolist(),
        }


def load_checkpoint(data: dict) -> tuple[LinearQ, TrainConfig]:
    if data.get("version") != 1:
        raise ValueError("unsupported checkpoint version")
    cfg = TrainConfig.from_json(data["config"])
    featurizer = Featurizer(cfg.env, cfg.features, cfg.normalizations)
    if featurizer.dim != data["feature_dim"]:
        raise ValueError("checkpoint feature layout does not match its configuration")
    model = LinearQ(
        featurizer.dim,
        data["alpha"],
        data["gamma"],
        np.asarray(data["moves"], dtype=float),
        np.asarray(data["epsilon"], dtype=float),
    )
    return model, cfg


def _task_source(cfg: TrainConfig) -> Callable[[np.random.Generator, int], Formula]:
    if cfg.tasks:
        parsed = [parse(t) for t in cfg.tasks]
        return lambda rng, stage: parsed[int(rng.integers(len(parsed)))]
    return lambda rng, stage: sample_stage(stage, cfg.letters, rng, cfg.kinds)


def train(cfg: TrainConfig, seed: int, log: Callable[[dict], None] | None = None) -> TrainResult:
    """Epsilon-greedy Q-learning for ``cfg.total_steps`` environment steps.

    Episode ``i`` draws its task and layout from a generator seeded by
    ``(seed, i)``, so runs are reproducible bit for bit.
    """
    env_cfg = cfg.env
    featurizer = Featurizer(env_cfg, cfg.features, cfg.normalizations)
    model = LinearQ(featurizer.dim, cfg.alpha, cfg.gamma)
    agent = Agent(model, featurizer)
    source = _task_source(cfg)
    automata: dict[Formula, OnTheFly] = {}
    result = TrainResult(model, cfg, seed)
    stage = cfg.stage
    history: list[float] = []
    total = 0
    decay_steps = max(1, int(cfg.eps_decay * cfg.total_steps))
    episode = 0
    while total < cfg.total_steps:
        rng = episode_rng(seed, _TRAIN, episode)
        task = source(rng, stage)
        aut = automata.setdefault(task, OnTheFly(task))
        env = ProductEnv(env_cfg, task, cfg.max_steps, aut)
        agent.begin(task)
        cache = {}

        def policy(step):
            eps = max(cfg.eps_end, cfg.eps_start - (cfg.eps_start - cfg.eps_end) * total / decay_steps)
            values, move, eps_feats = agent.q_values(step)
            cache["step"] = (move, eps_feats)
            if rng.random() < eps:
                return int(rng.integers(len(step.actions)))
            return int(np.argmax(values))

        def learn(step, a, nxt):
            nonlocal total
            total += 1
            move, eps_feats = cache["step"]
            x = move if a < len(MOVES) else eps_feats[a - len(MOVES)]
            nv = None
            if not nxt.terminal:
                nv, _, _ = agent.q_values(nxt)
            q_update(model, Transition(x, a, nxt.reward, nxt.terminal, nv))

        stats = run_episode(env, rng, policy, learn)
        stats = {"episode": episode, "task": render(task), "stage": stage, **stats}
        result.episodes.append(stats)
        if log is not None:
            log(stats)
        history.append(float(stats["success"]))
        if len(history) >= cfg.window:
            sr = float(np.mean(history[-cfg.window:]))
            result.windowed_sr.append(sr)
            if result.steps_to_target is None and sr >= cfg.target_sr:
                result.steps_to_target = total
        if cfg.curriculum:
            new_stage = curriculum_advance(history, stage, cfg.window)
            if new_stage != stage:
                stage = new_stage
                history = []
        episode += 1
    result.final_stage = stage
    return result


# -- evaluation ---------------------------------------------------------------------------

@dataclass
class TaskReport:
    task: str
    guarantee: bool
    sr: list[float]
    mu_acc: list[float]
    mu_states: list[float]

    def summary(self) -> dict:
        out = {"task": self.task, "guarantee": self.guarantee}
        for name in ("sr", "mu_acc", "mu_states"):
            v = np.asarray(getattr(self, name))
            out[name] = {"per_seed": v.tolist(), "mean": float(v.mean()), "std": float(v.std())}
        return out


@dataclass
class EvalReport:
    tasks: list[TaskReport]
    episodes: int
    seeds: list[int]
    horizon: int | None

    def to_json(self) -> dict:
        per = [t.summary() for t in self.tasks]
        finite = [t for t in per if t["guarantee"]]
        infinite = [t for t in per if not t["guarantee"]]
        agg = {}
        if finite:
            agg["sr"] = float(np.mean([t["sr"]["mean"] for t in finite]))
        if infinite:
            agg["mu_acc"] = float(np.mean([t["mu_acc"]["mean"] for t in infinite]))
        agg["mu_states"] = float(np.mean([t["mu_states"]["mean"] for t in per]))
        return {
            "version": 1,
            "episodes": self.episodes,
            "seeds": self.seeds,
            "horizon": self.horizon,
            "tasks": per,
            "aggregate": agg,
        }


def greedy_policy(agent: Agent) -> Callable:
    return lambda step: int(np.argmax(agent.q_values(step)[0]))


def evaluate(
    model: LinearQ | None,
    tasks: Iterable[Formula | str],
    episodes: int,
    seeds: Sequence[int],
    env_cfg: LetterWorldConfig,
    features: str = "semantic",
    normalizations=NORMALIZATIONS,
    horizon: int | None = None,
    policy_factory: Callable | None = None,
) -> EvalReport:
    """Greedy rollouts; SR for co-safe tasks, accepting visits for the rest.

    ``horizon`` defaults to the training length for co-safe tasks and to a
    longer test length otherwise. ``policy_factory(rng, env)`` overrides the
    greedy model policy (used for scripted or random baselines).
    """
    tasks = [parse(t) if isinstance(t, str) else t for t in tasks]
    featurizer = Featurizer(env_cfg, features, normalizations)
    if model is not None and model.dim != featurizer.dim:
        raise ValueError("model dimension does not match the feature layout")
    reports = []
    for ti, task in enumerate(tasks):
        aut = OnTheFly(task)
        probe = ProductEnv(env_cfg, task)
        h = horizon if horizon is not None else (TRAIN_STEPS if probe.guarantee else TEST_STEPS)
        rep = TaskReport(render(task), probe.guarantee, [], [], [])
        for seed in seeds:
            succ, acc, states = [], [], []
            for ep in range(episodes):
                rng = episode_rng(seed, _EVAL, ti, ep)
                env = ProductEnv(env_cfg, task, h, aut)
                if policy_factory is not None:
                    policy = policy_factory(rng, env)
                else:
                    agent = Agent(model, featurizer)
                    agent.begin(task)
                    policy = greedy_policy(agent)
                stats = run_episode(env, rng, policy)
                succ.append(stats["success"])
                acc.append(stats["accepted_visits"])
                states.append(stats["constructed_states"])
            rep.sr.append(float(np.mean(succ)))
            rep.mu_acc.append(float(np.mean(acc)))
            rep.mu_states.append(float(np.mean(states)))
        reports.append(rep)
    return EvalReport(reports, episodes, list(seeds), horizon)


def write_jsonl(path, rows: Iterable[dict]) -> None:
    with open(path, "w") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")
