"""
Only build what you visit
=========================

Reach-avoid disjunctions blow up when the whole automaton is explored, but
an agent wandering the grid touches a handful of states per episode.
"""

import numpy as np

from ltlsem.ldba import build_full, count_simple_paths, simple_path_closed_form
from ltlsem.learner import evaluate, random_policy
from ltlsem.letterworld import LetterWorldConfig
from ltlsem.tasks import sample_task

env = LetterWorldConfig(7, tuple("abcdefgh"), 2)
rng = np.random.default_rng(7)
specs = [sample_task("localsafety", 3, 3, env.letters, rng) for _ in range(5)]

report = evaluate(
    None, [s.formula for s in specs], 50, [0], env,
    horizon=75, policy_factory=lambda r, e: random_policy(r),
).to_json()

print(f"{'|Q|':>5} {'|delta|':>8} {'mu_states':>10}")
for spec, row in zip(specs, report["tasks"]):
    aut = build_full(spec.formula, env.label_set())
    print(f"{len(aut.states):>5} {aut.num_transitions:>8} {row['mu_states']['mean']:>10.2f}")

# a small automaton has few simple paths...
aut = build_full(sample_task("localsafety", 2, 1, env.letters, 0).formula, env.label_set())
print(len(aut.states), count_simple_paths(aut, aut.initial))

# ...while a complete digraph hits the closed form
for n in range(1, 8):
    g = {i: [j for j in range(n) if j != i] for i in range(n)}
    print(n, count_simple_paths(g), simple_path_closed_form(n))
