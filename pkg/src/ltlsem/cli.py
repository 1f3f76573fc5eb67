"""Command-line entry point.

Exit codes: 0 on success, 1 for user errors, 2 when a size cap is hit.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Sequence

import numpy as np

from . import __version__
from .embedding import NORMALIZATIONS, EmbeddingConfig, embed_state
from .errors import CapExceeded
from .formula import atoms, render
from .lasso import LassoWord, eval_lasso, format_letter, parse_letter, parse_word, powerset
from .ldba import (
    ACCEPTING,
    DEFAULT_STATE_CAP,
    SemanticState,
    accepts_lasso,
    build_full,
    count_simple_paths,
    initial_state,
    simple_path_closed_form,
)
from .learner import (
    TrainConfig,
    evaluate,
    load_checkpoint,
    random_policy,
    train,
    write_jsonl,
)
from .letterworld import LetterWorldConfig
from .parser import ParseError, parse
from .progression import prog_word
from .propositional import DEFAULT_VARIABLE_CAP, obligations, trueness
from .tasks import FAMILIES, sample_task


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _emit(args, payload, text: str) -> None:
    if getattr(args, "json", False):
        print(json.dumps(payload))
    else:
        print(text)


def _letters(text: str) -> list[frozenset[str]]:
    """``";r;y"`` -> [{}, {r}, {y}]."""
    word = parse_word(text)
    if not word:
        raise UsageError("alphabet must contain at least one letter")
    return list(dict.fromkeys(word))


def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None


def _alphabet(args, phi) -> list[frozenset[str]]:
    if getattr(args, "alphabet_file", None):
        data = _read_json(args.alphabet_file)
        if isinstance(data, dict):
            data = data.get("alphabet", data.get("sigma_env"))
        if not isinstance(data, list) or not data:
            raise UsageError("alphabet file must hold a nonempty list of letters")
        return [frozenset(s) for s in data]
    if getattr(args, "alphabet", None) is not None:
        return _letters(args.alphabet)
    ap = sorted(set(args.ap.split(",")) if getattr(args, "ap", None) else atoms(phi))
    return powerset(ap)


# -- subcommands ------------------------------------------------------------------------

def cmd_parse(args):
    f = parse(args.formula)
    _emit(args, {"formula": render(f)}, render(f))


def cmd_progress(args):
    f = parse(args.formula)
    word = [parse_letter(s) for s in args.letter] if args.letter else []
    if args.word is not None:
        word.extend(parse_word(args.word))
    g = prog_word(f, word)
    _emit(args, {"formula": render(f), "word": [sorted(s) for s in word], "result": render(g)}, render(g))


def cmd_trueness(args):
    t = trueness(parse(args.formula), args.cap)
    payload = {
        "numerator": t.satisfying,
        "denominator": 2**t.variables,
        "variables": t.variables,
        "value": t.value,
    }
    _emit(args, payload, f"{t} ({t.value:g})")


def cmd_obligations(args):
    f = parse(args.formula)
    alphabet = _alphabet(args, f)
    ob = sorted(obligations(f, alphabet), key=lambda s: (len(s), sorted(s)))
    text = "\n".join("{" + format_letter(s) + "}" for s in ob) or "(none)"
    _emit(args, {"obligations": [sorted(s) for s in ob]}, text)


def _embedding_config(args, phi) -> EmbeddingConfig:
    if args.config:
        data = _read_json(args.config)
    else:
        data = {}
    ap = data.get("ap") or (args.ap.split(",") if args.ap else sorted(atoms(phi)))
    if "sigma_env" in data:
        sigma = [frozenset(s) for s in data["sigma_env"]]
    elif args.sigma_env is not None:
        sigma = _letters(args.sigma_env)
    else:
        sigma = powerset(ap)
    norms = data.get("normalizations", NORMALIZATIONS)
    task = parse(data["task"]) if "task" in data else phi
    return EmbeddingConfig.for_task(task, ap, sigma, norms)


def cmd_embed(args):
    phi = parse(args.formula)
    cfg = _embedding_config(args, phi)
    if args.breakpoint is None:
        q = initial_state(phi)
    else:
        bp = parse(args.breakpoint)
        q = SemanticState(phi, bp, ACCEPTING, args.accepting)
    vec = embed_state(q, cfg)
    payload = {"version": 1, "state": str(q), "vector": vec.tolist(), "layout": cfg.manifest()}
    text = json.dumps(payload) if args.json else "\n".join(
        f"{b['name']:<28} " + " ".join(f"{x:.4g}" for x in vec[b["offset"]: b["offset"] + b["length"]])
        for b in cfg.layout()
    )
    print(text)


def cmd_automaton(args):
    phi = parse(args.formula)
    aut = build_full(phi, _alphabet(args, phi), args.cap)
    if args.json:
        print(json.dumps(aut.to_json()))
        return
    print(f"states: {len(aut.states)}  transitions: {aut.num_transitions}  epsilon: {aut.num_epsilon}")
    for i, q in enumerate(aut.states):
        print(f"{i:>3} {q}")
        for s in aut.alphabet:
            print(f"      {{{format_letter(s)}}} -> {aut.delta[(i, s)]}")
        for j in aut.epsilon.get(i, ()):
            print(f"      eps -> {j}")


def cmd_accepts(args):
    phi = parse(args.formula)
    w = LassoWord(parse_word(args.prefix), parse_word(args.loop) or (frozenset(),))
    got = accepts_lasso(phi, w, cap=args.cap)
    payload = {"accepts": got}
    if args.oracle:
        payload["oracle"] = eval_lasso(w, phi)
    text = str(got).lower() + (f" (oracle: {str(payload['oracle']).lower()})" if args.oracle else "")
    _emit(args, payload, text)


def _pool(args, default: Sequence[str]) -> list[str]:
    return args.pool.split(",") if args.pool else list(default)


def cmd_sample(args):
    pool = _pool(args, [chr(ord("a") + i) for i in range(12)])
    rng = np.random.default_rng(args.seed)
    specs = [sample_task(args.family, args.k, args.m, pool, rng) for _ in range(args.count)]
    if args.json:
        print(json.dumps({"tasks": [t.to_json() for t in specs]}))
    else:
        print("\n".join(t.text for t in specs))


def cmd_train(args):
    cfg = TrainConfig.from_json(_read_json(args.config)) if args.config else TrainConfig()
    if args.steps is not None:
        cfg.total_steps = args.steps
    rows = []
    result = train(cfg, args.seed, rows.append)
    with open(args.out, "w") as fh:
        json.dump(result.to_checkpoint(), fh)
    if args.log:
        write_jsonl(args.log, rows)
    summary = {
        "episodes": len(result.episodes),
        "steps_to_target": result.steps_to_target,
        "final_windowed_sr": result.windowed_sr[-1] if result.windowed_sr else None,
        "final_stage": result.final_stage,
        "model": args.out,
    }
    _emit(args, summary, "\n".join(f"{k}: {v}" for k, v in summary.items()))


def _task_list(spec: str) -> list[str]:
    if os.path.exists(spec):
        with open(spec) as fh:
            return [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    return [t.strip() for t in spec.split(";") if t.strip()]


def _format_report(rep: dict) -> str:
    lines = [f"{'task':<40} {'SR':>12} {'mu_acc':>12} {'mu_states':>12}"]
    for t in rep["tasks"]:
        cell = lambda k: f"{t[k]['mean']:.3f}+-{t[k]['std']:.3f}"  # noqa: E731
        lines.append(f"{t['task'][:40]:<40} {cell('sr'):>12} {cell('mu_acc'):>12} {cell('mu_states'):>12}")
    lines.append("aggregate: " + ", ".join(f"{k}={v:.3f}" for k, v in rep["aggregate"].items()))
    return "\n".join(lines)


def cmd_eval(args):
    model, cfg = load_checkpoint(_read_json(args.model))
    seeds = [int(s) for s in args.seeds.split(",")]
    factory = (lambda rng, env: random_policy(rng)) if args.policy == "random" else None
    rep = evaluate(
        model,
        _task_list(args.tasks),
        args.episodes,
        seeds,
        cfg.env,
        cfg.features,
        cfg.normalizations,
        args.horizon,
        factory,
    ).to_json()
    _emit(args, rep, _format_report(rep))


def _complete_digraph(n: int) -> dict[int, list[int]]:
    return {i: [j for j in range(n) if j != i] for i in range(n)}


def cmd_bench(args):
    letters = tuple(chr(ord("a") + i) for i in range(args.letters))
    env = LetterWorldConfig(args.size, letters, args.copies)
    rng = np.random.default_rng(args.seed)
    model = None
    features, norms = "semantic", NORMALIZATIONS
    if args.model:
        model, mcfg = load_checkpoint(_read_json(args.model))
        env, features, norms = mcfg.env, mcfg.features, mcfg.normalizations
        letters = env.letters
    pool = _pool(args, letters)
    specs = [sample_task(args.family, args.k, args.m, pool, rng) for _ in range(args.tasks)]
    automata = [build_full(s.formula, env.label_set(), args.cap) for s in specs]
    factory = None if model is not None else (lambda r, e: random_policy(r))
    reports = evaluate(
        model, [s.formula for s in specs], args.episodes, [args.seed], env, features, norms, None, factory
    ).to_json()["tasks"]
    rows = []
    for spec, aut, rep in zip(specs, automata, reports):
        row = {
            "task": spec.text,
            "states": len(aut.states),
            "transitions": aut.num_transitions,
            "mu_states": rep["mu_states"]["mean"],
            "sr": rep["sr"]["mean"],
            "mu_acc": rep["mu_acc"]["mean"],
        }
        if args.paths:
            try:
                row["simple_paths"] = count_simple_paths(aut, aut.initial, args.path_cap)
            except CapExceeded:
                row["simple_paths"] = None  # more than --path-cap
            row["closed_form_bound"] = simple_path_closed_form(len(aut.states)) // len(aut.states)
        rows.append(row)
    payload = {"version": 1, "family": args.family, "k": args.k, "m": args.m, "tasks": rows}
    if args.paths:
        payload["complete_digraphs"] = [
            {
                "n": n,
                "count": count_simple_paths(_complete_digraph(n)),
                "closed_form": simple_path_closed_form(n),
                "e_factorial": math.e * math.factorial(n),
            }
            for n in range(1, args.max_n + 1)
        ]
    if args.json:
        print(json.dumps(payload))
        return
    print(f"{'|Q|':>6} {'|delta|':>8} {'mu_states':>10} {'SR':>6} {'mu_acc':>7}  task")
    for r in rows:
        extra = ""
        if args.paths:
            n = r["simple_paths"]
            extra = f"  paths={'>' + str(args.path_cap) if n is None else n}"
        print(f"{r['states']:>6} {r['transitions']:>8} {r['mu_states']:>10.2f} {r['sr']:>6.2f} {r['mu_acc']:>7.2f}  {r['task']}{extra}")
    for c in payload.get("complete_digraphs", []):
        ok = "ok" if c["count"] == c["closed_form"] < c["e_factorial"] else "MISMATCH"
        print(f"K_{c['n']}: {c['count']} simple paths, closed form {c['closed_form']}, e*n! = {c['e_factorial']:.1f} [{ok}]")


# -- wiring -------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ltlsem", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(fn=fn)
        sp.add_argument("--json", action="store_true", help="emit one JSON document")
        return sp

    sp = add("parse", cmd_parse, "canonicalise and print a formula")
    sp.add_argument("formula")

    sp = add("progress", cmd_progress, "progress a formula through letters")
    sp.add_argument("formula")
    sp.add_argument("--letter", action="append", help="comma-separated letter; repeatable")
    sp.add_argument("--word", help="letters separated by ';'")

    sp = add("trueness", cmd_trueness, "satisfying-assignment ratio")
    sp.add_argument("formula")
    sp.add_argument("--cap", type=int, default=DEFAULT_VARIABLE_CAP)

    sp = add("obligations", cmd_obligations, "letters whose repetition satisfies the formula")
    sp.add_argument("formula")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--alphabet-file")
    g.add_argument("--alphabet", help="letters separated by ';'")
    g.add_argument("--full-ap", action="store_true", help="all subsets of the formula's atoms (default)")
    sp.add_argument("--ap", help="proposition universe for --full-ap")

    sp = add("embed", cmd_embed, "semantic embedding of a state")
    sp.add_argument("formula")
    sp.add_argument("--breakpoint")
    sp.add_argument("--accepting", action="store_true", help="set the accepting flag")
    sp.add_argument("--config", help="JSON with ap, sigma_env, normalizations, task")
    sp.add_argument("--ap")
    sp.add_argument("--sigma-env", help="letters separated by ';'")

    sp = add("automaton", cmd_automaton, "build the full automaton")
    sp.add_argument("formula")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--alphabet", help="letters separated by ';'")
    g.add_argument("--alphabet-file")
    sp.add_argument("--ap")
    sp.add_argument("--cap", type=int, default=DEFAULT_STATE_CAP)

    sp = add("accepts", cmd_accepts, "does the automaton accept prefix.loop^w")
    sp.add_argument("formula")
    sp.add_argument("--prefix", default="")
    sp.add_argument("--loop", required=True)
    sp.add_argument("--oracle", action="store_true", help="also report the direct semantics")
    sp.add_argument("--cap", type=int, default=DEFAULT_STATE_CAP)

    sp = add("sample", cmd_sample, "draw tasks from a family")
    sp.add_argument("--family", required=True, choices=FAMILIES)
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=1)
    sp.add_argument("--pool", help="comma-separated propositions")

    sp = add("train", cmd_train, "train a linear Q model")
    sp.add_argument("--config")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--steps", type=int)
    sp.add_argument("--out", required=True)
    sp.add_argument("--log", help="episode log (JSON lines)")

    sp = add("eval", cmd_eval, "evaluate a trained model")
    sp.add_argument("--model", required=True)
    sp.add_argument("--tasks", required=True, help="file with one formula per line, or ';'-separated")
    sp.add_argument("--episodes", type=int, default=100)
    sp.add_argument("--seeds", default="0")
    sp.add_argument("--horizon", type=int)
    sp.add_argument("--policy", choices=("greedy", "random"), default="greedy")

    sp = add("bench", cmd_bench, "automaton sizes and on-the-fly economy")
    sp.add_argument("--family", required=True, choices=FAMILIES)
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--tasks", type=int, default=5)
    sp.add_argument("--episodes", type=int, default=50)
    sp.add_argument("--size", type=int, default=7)
    sp.add_argument("--letters", type=int, default=12)
    sp.add_argument("--copies", type=int, default=2)
    sp.add_argument("--pool", help="comma-separated propositions (default: the grid letters)")
    sp.add_argument("--model", help="checkpoint for a greedy policy (default: random policy)")
    sp.add_argument("--cap", type=int, default=DEFAULT_STATE_CAP)
    sp.add_argument("--paths", action="store_true", help="count simple paths and check the closed form")
    sp.add_argument("--path-cap", type=int, default=1_000_000)
    sp.add_argument("--max-n", type=int, default=7)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.fn(args)
    except UsageError as exc:
        print(f"ltlsem: error: {exc}", file=sys.stderr)
        return 1
    except ParseError as exc:
        print(f"ltlsem: {exc}", file=sys.stderr)
        return 1
    except CapExceeded as exc:
        print(f"ltlsem: limit: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"ltlsem: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
